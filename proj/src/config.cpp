#include "acr/config.hpp"

#include <fstream>
#include <set>

#include "acr/errors.hpp"
#include "acr/hashing.hpp"
#include "acr/mocks.hpp"
#include "acr/remote.hpp"

namespace acr {

using nlohmann::json;

namespace {

class Validator {
public:
    void unknown_keys(const json& obj, const std::string& where,
                      const std::set<std::string>& allowed) {
        for (auto it = obj.begin(); it != obj.end(); ++it) {
            if (!allowed.count(it.key())) {
                errors_.push_back(where + ": unknown key \"" + it.key() + "\"");
            }
        }
    }

    template <typename T>
    void read(const json& obj, const std::string& where, const char* key, T& out) {
        if (!obj.contains(key)) return;
        try {
            out = obj.at(key).get<T>();
        } catch (const json::exception&) {
            errors_.push_back(where + "." + key + ": wrong type");
        }
    }

    void require(bool ok, const std::string& message) {
        if (!ok) errors_.push_back(message);
    }

    void finish() const {
        if (errors_.empty()) return;
        std::string joined = "configuration invalid:";
        for (const auto& e : errors_) joined += "\n  - " + e;
        throw ConfigError(joined);
    }

private:
    std::vector<std::string> errors_;
};

void parse_backend(Validator& v, const json& obj, const std::string& where, BackendSelection& sel,
                   const std::set<std::string>& kinds) {
    v.unknown_keys(obj, where,
                   {"kind", "endpoint", "model", "credential_env", "timeout_seconds",
                    "max_retries", "backoff_ms", "max_in_flight", "supports_logprobs", "seed",
                    "audit_log", "vocab", "dim"});
    v.read(obj, where, "kind", sel.kind);
    v.require(kinds.count(sel.kind) > 0, where + ".kind: \"" + sel.kind + "\" is not one of the supported kinds");
    v.read(obj, where, "endpoint", sel.backend.endpoint);
    v.read(obj, where, "model", sel.backend.model);
    v.read(obj, where, "credential_env", sel.backend.credential_env);
    v.read(obj, where, "timeout_seconds", sel.backend.timeout_seconds);
    v.read(obj, where, "max_retries", sel.backend.max_retries);
    v.read(obj, where, "backoff_ms", sel.backend.backoff_ms);
    v.read(obj, where, "max_in_flight", sel.backend.max_in_flight);
    v.read(obj, where, "supports_logprobs", sel.backend.supports_logprobs);
    v.read(obj, where, "seed", sel.backend.seed);
    v.read(obj, where, "audit_log", sel.backend.audit_log);
    v.read(obj, where, "vocab", sel.vocab);
    long dim = static_cast<long>(sel.dim);
    v.read(obj, where, "dim", dim);
    sel.dim = static_cast<Eigen::Index>(dim);
    if (sel.kind == "remote") {
        v.require(!sel.backend.endpoint.empty(), where + ": remote backend needs an endpoint");
    }
    v.require(sel.backend.timeout_seconds > 0, where + ".timeout_seconds must be > 0");
    v.require(sel.backend.max_retries >= 0, where + ".max_retries must be >= 0");
}

}  // namespace

PipelineConfig parse_pipeline_config(const json& root) {
    Validator v;
    PipelineConfig cfg;

    v.unknown_keys(root, "config",
                   {"documents", "qa", "output_dir", "prompts_dir", "seed", "chunking", "kg",
                    "ppr", "alignment", "curriculum", "trainer", "backends"});
    v.read(root, "config", "documents", cfg.documents_path);
    v.read(root, "config", "qa", cfg.qa_path);
    v.read(root, "config", "output_dir", cfg.output_dir);
    v.read(root, "config", "prompts_dir", cfg.prompts_dir);
    v.read(root, "config", "seed", cfg.seed);

    if (root.contains("chunking")) {
        const auto& c = root["chunking"];
        v.unknown_keys(c, "chunking", {"window", "overlap"});
        v.read(c, "chunking", "window", cfg.chunking.window);
        v.read(c, "chunking", "overlap", cfg.chunking.overlap);
    }
    v.require(cfg.chunking.window > cfg.chunking.overlap,
              "chunking.window must exceed chunking.overlap");

    if (root.contains("kg")) {
        const auto& c = root["kg"];
        v.unknown_keys(c, "kg", {"tau"});
        v.read(c, "kg", "tau", cfg.kg.tau);
    }
    v.require(cfg.kg.tau > 0.0 && cfg.kg.tau < 1.0, "kg.tau must lie in (0,1)");

    if (root.contains("ppr")) {
        const auto& c = root["ppr"];
        v.unknown_keys(c, "ppr", {"alpha", "epsilon", "k_large", "k_small"});
        v.read(c, "ppr", "alpha", cfg.ppr.alpha);
        v.read(c, "ppr", "epsilon", cfg.ppr.epsilon);
        v.read(c, "ppr", "k_large", cfg.ppr.k_large);
        v.read(c, "ppr", "k_small", cfg.ppr.k_small);
    }
    v.require(cfg.ppr.alpha > 0.0 && cfg.ppr.alpha < 1.0, "ppr.alpha must lie in (0,1)");
    v.require(cfg.ppr.epsilon > 0.0, "ppr.epsilon must be positive");
    v.require(cfg.ppr.k_large >= 1 && cfg.ppr.k_small >= 1, "ppr subgraph sizes must be >= 1");

    if (root.contains("alignment")) {
        const auto& c = root["alignment"];
        v.unknown_keys(c, "alignment",
                       {"lambda_forward", "lambda_backward", "lambda_parameter", "positives"});
        v.read(c, "alignment", "lambda_forward", cfg.alignment.weights.forward);
        v.read(c, "alignment", "lambda_backward", cfg.alignment.weights.backward);
        v.read(c, "alignment", "lambda_parameter", cfg.alignment.weights.parameter);
        v.read(c, "alignment", "positives", cfg.alignment.positives);
    }
    v.require(cfg.alignment.positives >= 1, "alignment.positives must be >= 1");
    v.require(std::isfinite(cfg.alignment.weights.forward) &&
                  std::isfinite(cfg.alignment.weights.backward) &&
                  std::isfinite(cfg.alignment.weights.parameter),
              "alignment weights must be finite");

    if (root.contains("curriculum")) {
        const auto& c = root["curriculum"];
        v.unknown_keys(c, "curriculum", {"queries_per_subgraph", "retrieval_depth", "negative_cap"});
        v.read(c, "curriculum", "queries_per_subgraph", cfg.curriculum.queries_per_subgraph);
        v.read(c, "curriculum", "retrieval_depth", cfg.curriculum.retrieval_depth);
        v.read(c, "curriculum", "negative_cap", cfg.curriculum.negative_cap);
    }
    v.require(cfg.curriculum.queries_per_subgraph >= 1, "curriculum.queries_per_subgraph >= 1");
    v.require(cfg.curriculum.retrieval_depth >= 1, "curriculum.retrieval_depth >= 1");
    v.require(cfg.curriculum.negative_cap >= 1, "curriculum.negative_cap >= 1");

    if (root.contains("trainer")) {
        const auto& c = root["trainer"];
        v.unknown_keys(c, "trainer",
                       {"epochs", "batch_size", "grad_accumulation", "learning_rate",
                        "temperature", "mix_in_batch"});
        v.read(c, "trainer", "epochs", cfg.trainer.epochs);
        v.read(c, "trainer", "batch_size", cfg.trainer.batch_size);
        v.read(c, "trainer", "grad_accumulation", cfg.trainer.grad_accumulation);
        v.read(c, "trainer", "learning_rate", cfg.trainer.learning_rate);
        v.read(c, "trainer", "temperature", cfg.trainer.temperature);
        v.read(c, "trainer", "mix_in_batch", cfg.trainer.mix_in_batch);
    }
    v.require(cfg.trainer.epochs >= 0, "trainer.epochs must be >= 0");
    v.require(cfg.trainer.batch_size >= 1, "trainer.batch_size must be >= 1");
    v.require(cfg.trainer.grad_accumulation >= 1, "trainer.grad_accumulation must be >= 1");
    v.require(cfg.trainer.temperature > 0.0, "trainer.temperature must be > 0");

    if (root.contains("backends")) {
        const auto& b = root["backends"];
        v.unknown_keys(b, "backends", {"extract", "likelihood", "embed", "augment", "judge"});
        if (b.contains("extract"))
            parse_backend(v, b["extract"], "backends.extract", cfg.backends.extract,
                          {"mock", "remote"});
        if (b.contains("likelihood"))
            parse_backend(v, b["likelihood"], "backends.likelihood", cfg.backends.likelihood,
                          {"uniform", "hash", "contains-answer", "remote"});
        if (b.contains("embed"))
            parse_backend(v, b["embed"], "backends.embed", cfg.backends.embed, {"hash", "remote"});
        if (b.contains("augment"))
            parse_backend(v, b["augment"], "backends.augment", cfg.backends.augment,
                          {"mock", "remote"});
        if (b.contains("judge"))
            parse_backend(v, b["judge"], "backends.judge", cfg.backends.judge, {"mock", "remote"});
    }

    cfg.trainer.seed = cfg.seed;
    v.finish();
    return cfg;
}

PipelineConfig load_pipeline_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open config: " + path);
    json root = json::parse(in, nullptr, false);
    if (root.is_discarded()) throw ConfigError("config is not valid JSON: " + path);
    if (!root.is_object()) throw ConfigError("config root must be a JSON object: " + path);
    return parse_pipeline_config(root);
}

nlohmann::json config_to_json(const PipelineConfig& cfg) {
    json backends;
    auto backend_json = [](const BackendSelection& sel) {
        return json{{"kind", sel.kind},
                    {"endpoint", sel.backend.endpoint},
                    {"model", sel.backend.model},
                    {"credential_env", sel.backend.credential_env},
                    {"timeout_seconds", sel.backend.timeout_seconds},
                    {"max_retries", sel.backend.max_retries},
                    {"backoff_ms", sel.backend.backoff_ms},
                    {"max_in_flight", sel.backend.max_in_flight},
                    {"supports_logprobs", sel.backend.supports_logprobs},
                    {"seed", sel.backend.seed},
                    {"audit_log", sel.backend.audit_log},
                    {"vocab", sel.vocab},
                    {"dim", static_cast<long>(sel.dim)}};
    };
    backends["extract"] = backend_json(cfg.backends.extract);
    backends["likelihood"] = backend_json(cfg.backends.likelihood);
    backends["embed"] = backend_json(cfg.backends.embed);
    backends["augment"] = backend_json(cfg.backends.augment);
    backends["judge"] = backend_json(cfg.backends.judge);

    return json{
        {"documents", cfg.documents_path},
        {"qa", cfg.qa_path},
        {"output_dir", cfg.output_dir},
        {"prompts_dir", cfg.prompts_dir},
        {"seed", cfg.seed},
        {"chunking", {{"window", cfg.chunking.window}, {"overlap", cfg.chunking.overlap}}},
        {"kg", {{"tau", cfg.kg.tau}}},
        {"ppr",
         {{"alpha", cfg.ppr.alpha},
          {"epsilon", cfg.ppr.epsilon},
          {"k_large", cfg.ppr.k_large},
          {"k_small", cfg.ppr.k_small}}},
        {"alignment",
         {{"lambda_forward", cfg.alignment.weights.forward},
          {"lambda_backward", cfg.alignment.weights.backward},
          {"lambda_parameter", cfg.alignment.weights.parameter},
          {"positives", cfg.alignment.positives}}},
        {"curriculum",
         {{"queries_per_subgraph", cfg.curriculum.queries_per_subgraph},
          {"retrieval_depth", cfg.curriculum.retrieval_depth},
          {"negative_cap", cfg.curriculum.negative_cap}}},
        {"trainer",
         {{"epochs", cfg.trainer.epochs},
          {"batch_size", cfg.trainer.batch_size},
          {"grad_accumulation", cfg.trainer.grad_accumulation},
          {"learning_rate", cfg.trainer.learning_rate},
          {"temperature", cfg.trainer.temperature},
          {"mix_in_batch", cfg.trainer.mix_in_batch}}},
        {"backends", backends}};
}

std::string config_hash(const PipelineConfig& cfg) {
    return hash_hex(fnv1a64(config_to_json(cfg).dump()));
}

std::unique_ptr<EntityExtractor> make_extractor(const PipelineConfig& cfg,
                                                const PromptLibrary& prompts) {
    const auto& sel = cfg.backends.extract;
    if (sel.kind == "remote") return std::make_unique<RemoteEntityExtractor>(sel.backend, prompts);
    return std::make_unique<MockEntityExtractor>();
}

std::unique_ptr<LikelihoodScorer> make_scorer(const PipelineConfig& cfg) {
    const auto& sel = cfg.backends.likelihood;
    if (sel.kind == "remote") return std::make_unique<RemoteLikelihoodScorer>(sel.backend);
    if (sel.kind == "uniform") return std::make_unique<MockUniformScorer>(sel.vocab);
    if (sel.kind == "contains-answer") return std::make_unique<ContainsAnswerScorer>();
    return std::make_unique<MockHashScorer>(sel.backend.seed ? sel.backend.seed : cfg.seed);
}

std::unique_ptr<Embedder> make_embedder(const PipelineConfig& cfg) {
    const auto& sel = cfg.backends.embed;
    if (sel.kind == "remote") return std::make_unique<RemoteEmbedder>(sel.backend);
    return std::make_unique<MockHashEmbedder>(sel.dim, sel.backend.seed ? sel.backend.seed : cfg.seed);
}

std::unique_ptr<QueryAugmenter> make_augmenter(const PipelineConfig& cfg,
                                               const PromptLibrary& prompts) {
    const auto& sel = cfg.backends.augment;
    if (sel.kind == "remote") return std::make_unique<RemoteQueryAugmenter>(sel.backend, prompts);
    return std::make_unique<MockQueryAugmenter>(sel.backend.seed ? sel.backend.seed : cfg.seed);
}

std::unique_ptr<PairJudge> make_judge(const PipelineConfig& cfg, const PromptLibrary& prompts) {
    const auto& sel = cfg.backends.judge;
    if (sel.kind == "remote") return std::make_unique<RemotePairJudge>(sel.backend, prompts);
    return std::make_unique<MockPairJudge>();
}

}  // namespace acr
