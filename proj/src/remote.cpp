#include "acr/remote.hpp"

#include <chrono>
#include <condition_variable>
#include <cstdlib>
#include <fstream>
#include <mutex>
#include <thread>

#include <httplib.h>
#include <json.hpp>

#include "acr/errors.hpp"
#include "acr/mocks.hpp"

namespace acr {

using nlohmann::json;

class RemoteTransport {
public:
    explicit RemoteTransport(const BackendConfig& cfg)
        : cfg_(cfg), client_(cfg.endpoint.c_str()), slots_(cfg.max_in_flight) {
        if (cfg.endpoint.empty()) throw ConfigError("remote backend requires an endpoint URL");
        if (!(cfg.timeout_seconds > 0)) throw ConfigError("backend timeout must be positive");
        if (cfg.max_retries < 0) throw ConfigError("backend retries must be >= 0");
        const auto secs = static_cast<time_t>(cfg.timeout_seconds);
        const auto usecs =
            static_cast<time_t>((cfg.timeout_seconds - static_cast<double>(secs)) * 1e6);
        client_.set_connection_timeout(secs, usecs);
        client_.set_read_timeout(secs, usecs);
        client_.set_write_timeout(secs, usecs);
        if (!cfg.credential_env.empty()) {
            if (const char* secret = std::getenv(cfg.credential_env.c_str())) {
                client_.set_default_headers({{"Authorization", std::string("Bearer ") + secret}});
            }
        }
    }

    const BackendConfig& config() const { return cfg_; }

    json post(const std::string& path, const json& body, const std::string& item_id) {
        acquire_slot();
        struct Release {
            RemoteTransport* t;
            ~Release() { t->release_slot(); }
        } release{this};

        const std::string payload = body.dump();
        std::string last_error;
        for (int attempt = 0; attempt <= cfg_.max_retries; ++attempt) {
            if (attempt > 0 && cfg_.backoff_ms > 0) {
                std::this_thread::sleep_for(
                    std::chrono::milliseconds(cfg_.backoff_ms * (1 << (attempt - 1))));
            }
            auto res = client_.Post(path.c_str(), payload, "application/json");
            if (!res) {
                last_error = "transport error: " + httplib::to_string(res.error());
                continue;
            }
            if (res->status != 200) {
                last_error = "HTTP " + std::to_string(res->status) + ": " + res->body;
                continue;
            }
            json parsed = json::parse(res->body, nullptr, false);
            if (parsed.is_discarded()) {
                audit(path, body, json{{"error", "unparseable"}, {"raw", res->body}});
                throw ParseError("backend returned non-JSON payload from " + path, res->body);
            }
            audit(path, body, parsed);
            return parsed;
        }
        audit(path, body, json{{"error", last_error}});
        throw BackendError("backend " + cfg_.endpoint + path + " failed after " +
                               std::to_string(cfg_.max_retries + 1) + " attempts: " + last_error,
                           item_id);
    }

private:
    void acquire_slot() {
        std::unique_lock lock(mutex_);
        cv_.wait(lock, [&] { return slots_ > 0; });
        --slots_;
    }

    void release_slot() {
        {
            std::lock_guard lock(mutex_);
            ++slots_;
        }
        cv_.notify_one();
    }

    void audit(const std::string& path, const json& request, const json& response) {
        if (cfg_.audit_log.empty()) return;
        std::lock_guard lock(audit_mutex_);
        std::ofstream out(cfg_.audit_log, std::ios::app);
        if (!out) return;
        out << json{{"seq", audit_seq_++}, {"path", path}, {"request", request},
                    {"response", response}}
                   .dump()
            << "\n";
    }

    BackendConfig cfg_;
    httplib::Client client_;
    std::mutex mutex_;
    std::condition_variable cv_;
    int slots_;
    std::mutex audit_mutex_;
    long audit_seq_ = 0;
};

std::shared_ptr<RemoteTransport> make_transport(const BackendConfig& cfg) {
    return std::make_shared<RemoteTransport>(cfg);
}

namespace {

std::string chat(RemoteTransport& transport, const std::string& prompt,
                 const std::string& item_id) {
    json body{{"model", transport.config().model},
              {"messages", json::array({json{{"role", "user"}, {"content", prompt}}})}};
    json res = transport.post("/v1/chat/completions", body, item_id);
    if (!res.contains("choices") || !res["choices"].is_array() || res["choices"].empty() ||
        !res["choices"][0].contains("message") ||
        !res["choices"][0]["message"].contains("content")) {
        throw ParseError("chat response missing choices[0].message.content", res.dump());
    }
    return res["choices"][0]["message"]["content"].get<std::string>();
}

// Pulls the first top-level JSON object out of free-form model text.
json extract_json_object(const std::string& content) {
    const std::size_t start = content.find('{');
    const std::size_t end = content.rfind('}');
    if (start == std::string::npos || end == std::string::npos || end <= start) {
        return json(json::value_t::discarded);
    }
    return json::parse(content.substr(start, end - start + 1), nullptr, false);
}

std::string remote_id(const char* capability, const BackendConfig& cfg) {
    return std::string("remote-") + capability + ":" + cfg.model + "@" + cfg.endpoint;
}

}  // namespace

RemoteEntityExtractor::RemoteEntityExtractor(const BackendConfig& cfg, PromptLibrary prompts)
    : transport_(make_transport(cfg)), prompts_(std::move(prompts)) {}

ExtractionRecord RemoteEntityExtractor::extract(const Chunk& chunk) {
    if (chunk.text.empty()) throw ConfigError("cannot extract from an empty chunk");
    const std::string content =
        chat(*transport_, render_extraction_prompt(prompts_, chunk.text), chunk.id);
    ExtractionRecord rec = parse_extraction_output(content);
    rec.chunk_id = chunk.id;
    return rec;
}

std::string RemoteEntityExtractor::id() const { return remote_id("extract", transport_->config()); }

RemoteLikelihoodScorer::RemoteLikelihoodScorer(const BackendConfig& cfg)
    : transport_(make_transport(cfg)) {
    if (!cfg.supports_logprobs) {
        throw ConfigError("likelihood backend \"" + cfg.model +
                          "\" does not declare token log-probability support");
    }
}

TokenLogProbs RemoteLikelihoodScorer::score(const std::string& prompt, const std::string& target) {
    if (target.empty()) throw ConfigError("likelihood target must be non-empty");
    json body{{"model", transport_->config().model}, {"prompt", prompt}, {"target", target}};
    json res = transport_->post("/v1/score", body, "");
    if (!res.contains("logprobs") || !res["logprobs"].is_array() || res["logprobs"].empty()) {
        throw ParseError("score response missing logprobs array", res.dump());
    }
    TokenLogProbs out;
    out.reserve(res["logprobs"].size());
    for (const auto& v : res["logprobs"]) {
        if (!v.is_number()) throw ParseError("non-numeric logprob", res.dump());
        double lp = v.get<double>();
        if (!std::isfinite(lp) || lp > 1e-9) {
            throw ParseError("logprob out of range (must be finite and <= 0): " +
                                 std::to_string(lp),
                             res.dump());
        }
        out.push_back(std::min(lp, 0.0));
    }
    return out;
}

std::string RemoteLikelihoodScorer::id() const { return remote_id("score", transport_->config()); }

RemoteEmbedder::RemoteEmbedder(const BackendConfig& cfg) : transport_(make_transport(cfg)) {}

std::vector<EmbeddingVector> RemoteEmbedder::embed(const std::vector<std::string>& texts) {
    for (const auto& t : texts) {
        if (t.empty()) throw ConfigError("cannot embed an empty string");
    }
    json body{{"model", transport_->config().model}, {"input", texts}};
    json res = transport_->post("/v1/embeddings", body, "");
    if (!res.contains("data") || !res["data"].is_array() || res["data"].size() != texts.size()) {
        throw ParseError("embedding response data array does not match input count", res.dump());
    }
    std::vector<EmbeddingVector> out;
    out.reserve(texts.size());
    for (const auto& item : res["data"]) {
        if (!item.contains("embedding") || !item["embedding"].is_array()) {
            throw ParseError("embedding item missing vector", res.dump());
        }
        const auto values = item["embedding"].get<std::vector<double>>();
        EmbeddingVector v =
            Eigen::Map<const Eigen::VectorXd>(values.data(), static_cast<Eigen::Index>(values.size()));
        if (dim_ == 0) dim_ = v.size();
        if (v.size() != dim_) {
            throw ConfigError("embedding dimension drift: expected " + std::to_string(dim_) +
                              ", got " + std::to_string(v.size()));
        }
        const double norm = v.norm();
        if (!(norm > 0.0)) throw ParseError("zero-norm embedding from backend", res.dump());
        out.push_back(v / norm);
    }
    return out;
}

Eigen::Index RemoteEmbedder::dimension() const {
    if (dim_ == 0) {
        throw ConfigError("remote embedder dimension unknown before the first call");
    }
    return dim_;
}

std::string RemoteEmbedder::id() const { return remote_id("embed", transport_->config()); }

RemoteQueryAugmenter::RemoteQueryAugmenter(const BackendConfig& cfg, PromptLibrary prompts)
    : transport_(make_transport(cfg)), prompts_(std::move(prompts)) {}

AugmentResult RemoteQueryAugmenter::augment(const QAPair& qa,
                                            const std::vector<AugmentEntity>& entities, int n) {
    if (n < 1) throw ConfigError("augmented query count must be >= 1");
    const std::string content =
        chat(*transport_, render_augmentation_prompt(prompts_, qa, entities, n), qa.id);
    AugmentResult res;
    json obj = extract_json_object(content);
    if (!obj.is_discarded() && obj.contains("confusing_questions") &&
        obj["confusing_questions"].is_array()) {
        for (const auto& q : obj["confusing_questions"]) {
            if (q.is_string() && q.get<std::string>() != qa.question) {
                res.queries.push_back(q.get<std::string>());
            }
            if (res.queries.size() == static_cast<std::size_t>(n)) break;
        }
    }
    if (res.queries.size() < static_cast<std::size_t>(n)) {
        res.degraded = true;
        MockQueryAugmenter pad(transport_->config().seed);
        const auto fill = pad.augment(qa, entities, n);
        for (const auto& q : fill.queries) {
            if (res.queries.size() == static_cast<std::size_t>(n)) break;
            res.queries.push_back(q);
        }
    }
    return res;
}

std::string RemoteQueryAugmenter::id() const {
    return remote_id("augment", transport_->config());
}

RemotePairJudge::RemotePairJudge(const BackendConfig& cfg, PromptLibrary prompts)
    : transport_(make_transport(cfg)), prompts_(std::move(prompts)) {}

JudgeOutcome RemotePairJudge::judge(const std::string& question, const std::string& ground_truth,
                                    const std::string& answer1, const std::string& answer2) {
    if (question.empty() || ground_truth.empty() || answer1.empty() || answer2.empty()) {
        throw ConfigError("judge requires non-empty question, ground truth and answers");
    }
    const std::string content = chat(
        *transport_, render_judge_prompt(prompts_, question, ground_truth, answer1, answer2), "");
    JudgeOutcome out;  // None on every criterion unless parsed
    json obj = extract_json_object(content);
    if (obj.is_discarded()) return out;
    auto read = [&](const char* key) {
        if (obj.contains(key) && obj[key].is_object() && obj[key].contains("Winner") &&
            obj[key]["Winner"].is_string()) {
            return winner_from_name(obj[key]["Winner"].get<std::string>());
        }
        return Winner::None;
    };
    out.faithfulness = read("Faithfulness");
    out.conciseness = read("Conciseness");
    out.overall = read("Overall Winner");
    return out;
}

std::string RemotePairJudge::id() const { return remote_id("judge", transport_->config()); }

}  // namespace acr
