// Command-line pipeline driver. Every stage reads its prerequisites from the
// configured output directory, writes its artifact plus a manifest (config
// hash, input hashes, seed), and re-running with unchanged inputs is a
// verified no-op.
//
// Exit codes: 0 success, 1 usage/config, 2 missing prerequisite, 3 backend
// failure.

#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <set>

#include <CLI11.hpp>
#include <json.hpp>

#include "acr/alignment.hpp"
#include "acr/config.hpp"
#include "acr/curriculum.hpp"
#include "acr/errors.hpp"
#include "acr/evalx.hpp"
#include "acr/hashing.hpp"
#include "acr/jsonl.hpp"
#include "acr/kg.hpp"
#include "acr/ppr.hpp"
#include "acr/retriever.hpp"
#include "acr/synthetic.hpp"
#include "acr/trainer.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitMissing = 2;
constexpr int kExitBackend = 3;

struct MissingPrerequisite : std::runtime_error {
    using std::runtime_error::runtime_error;
};

std::string artifact(const acr::PipelineConfig& cfg, const std::string& name) {
    return (fs::path(cfg.output_dir) / name).string();
}

void require_artifact(const std::string& path, const std::string& producer) {
    if (!fs::exists(path)) {
        throw MissingPrerequisite(fs::path(path).filename().string() + " missing; run " +
                                  producer);
    }
}

// Manifest-based staleness check: a command is a no-op when its manifest,
// outputs, input hashes and config hash all still match.
class CommandManifest {
public:
    CommandManifest(const acr::PipelineConfig& cfg, std::string command)
        : cfg_(cfg), command_(std::move(command)) {}

    void add_input(const std::string& path) { inputs_[path] = acr::hash_hex(acr::hash_file(path)); }
    void add_output(const std::string& path) { outputs_.push_back(path); }

    bool up_to_date() const {
        const std::string path = manifest_path();
        std::ifstream in(path);
        if (!in) return false;
        json prev = json::parse(in, nullptr, false);
        if (prev.is_discarded()) return false;
        if (prev.value("config_hash", "") != acr::config_hash(cfg_)) return false;
        if (!prev.contains("inputs") || prev["inputs"] != json(inputs_)) return false;
        for (const auto& out : prev.value("outputs", std::vector<std::string>{})) {
            if (!fs::exists(out)) return false;
        }
        return true;
    }

    void write() const {
        json j{{"command", command_},
               {"config_hash", acr::config_hash(cfg_)},
               {"seed", cfg_.seed},
               {"inputs", inputs_},
               {"outputs", outputs_}};
        acr::atomic_write(manifest_path(), j.dump(2) + "\n");
    }

private:
    std::string manifest_path() const { return artifact(cfg_, command_ + ".manifest.json"); }

    const acr::PipelineConfig& cfg_;
    std::string command_;
    std::map<std::string, std::string> inputs_;
    std::vector<std::string> outputs_;
};

acr::PipelineConfig load_config_or_die(const std::string& path) {
    if (path.empty()) throw acr::ConfigError("--config is required for this command");
    return acr::load_pipeline_config(path);
}

acr::PromptLibrary prompts_for(const acr::PipelineConfig& cfg) {
    return cfg.prompts_dir.empty() ? acr::PromptLibrary::defaults()
                                   : acr::PromptLibrary::load(cfg.prompts_dir);
}

// ---------------------------------------------------------------------------
// Commands
// ---------------------------------------------------------------------------

int cmd_ingest(const acr::PipelineConfig& cfg) {
    require_artifact(cfg.documents_path, "nothing (configure \"documents\")");
    require_artifact(cfg.qa_path, "nothing (configure \"qa\")");

    CommandManifest manifest(cfg, "ingest");
    manifest.add_input(cfg.documents_path);
    manifest.add_input(cfg.qa_path);
    const std::string chunks_path = artifact(cfg, "chunks.jsonl");
    manifest.add_output(chunks_path);
    if (manifest.up_to_date()) {
        std::cout << "ingest: up to date\n";
        return kExitOk;
    }

    const auto docs = acr::load_documents(cfg.documents_path);
    const auto qa = acr::load_qa_pairs(cfg.qa_path);
    std::set<std::string> doc_ids;
    for (const auto& d : docs) {
        if (!doc_ids.insert(d.id).second) throw acr::ConfigError("duplicate document id " + d.id);
    }
    for (const auto& p : qa) {
        if (!doc_ids.count(p.doc_id)) {
            throw acr::ConfigError("qa pair " + p.id + " references unknown document " + p.doc_id);
        }
    }
    acr::Tokenizer tok;
    const auto chunks = acr::chunk_corpus(docs, cfg.chunking.window, cfg.chunking.overlap, tok);
    acr::save_chunks(chunks_path, chunks);
    manifest.write();
    std::cout << "ingest: " << docs.size() << " documents, " << qa.size() << " qa pairs -> "
              << chunks.size() << " chunks\n";
    return kExitOk;
}

int cmd_build_kg(const acr::PipelineConfig& cfg) {
    const std::string chunks_path = artifact(cfg, "chunks.jsonl");
    require_artifact(chunks_path, "ingest");

    CommandManifest manifest(cfg, "build-kg");
    manifest.add_input(chunks_path);
    const std::string graph_dir = artifact(cfg, "graph");
    manifest.add_output((fs::path(graph_dir) / "nodes.jsonl").string());
    manifest.add_output((fs::path(graph_dir) / "edges.jsonl").string());
    if (manifest.up_to_date()) {
        std::cout << "build-kg: up to date\n";
        return kExitOk;
    }

    const auto chunks = acr::load_chunks(chunks_path);
    auto prompts = prompts_for(cfg);
    auto extractor = acr::make_extractor(cfg, prompts);
    auto embedder = acr::make_embedder(cfg);

    std::vector<acr::ExtractionRecord> records;
    records.reserve(chunks.size());
    for (const auto& chunk : chunks) records.push_back(extractor->extract(chunk));

    acr::GraphBuildStats stats;
    acr::KnowledgeGraph kg = acr::build_graph(records, &stats);
    const int added = acr::augment_similarity_edges(kg, *embedder, cfg.kg.tau);
    acr::save_graph(graph_dir, kg);
    manifest.write();
    std::cout << "build-kg: " << kg.nodes.size() << " nodes, " << kg.edges.size() << " edges ("
              << added << " augmented), dropped " << stats.dropped_relations
              << " dangling relations\n";
    return kExitOk;
}

int cmd_subgraph(const acr::PipelineConfig& cfg) {
    const std::string graph_dir = artifact(cfg, "graph");
    require_artifact((fs::path(graph_dir) / "nodes.jsonl").string(), "build-kg");
    require_artifact(cfg.qa_path, "nothing (configure \"qa\")");

    CommandManifest manifest(cfg, "subgraph");
    manifest.add_input((fs::path(graph_dir) / "nodes.jsonl").string());
    manifest.add_input((fs::path(graph_dir) / "edges.jsonl").string());
    manifest.add_input(cfg.qa_path);
    const std::string out_path = artifact(cfg, "subgraphs.jsonl");
    manifest.add_output(out_path);
    if (manifest.up_to_date()) {
        std::cout << "subgraph: up to date\n";
        return kExitOk;
    }

    const acr::KnowledgeGraph kg = acr::load_graph(graph_dir);
    const auto qa_pairs = acr::load_qa_pairs(cfg.qa_path);
    auto embedder = acr::make_embedder(cfg);
    const acr::TransitionMatrix transition = acr::build_transition(kg);

    if (fs::exists(out_path)) fs::remove(out_path);
    int skipped = 0;
    for (const auto& qa : qa_pairs) {
        try {
            const auto subs = acr::subgraph_for_qa(kg, transition, qa, embedder.get(),
                                                   cfg.ppr_large(), cfg.ppr_small());
            acr::append_subgraph_trace(out_path, qa.id, subs);
        } catch (const acr::ConfigError&) {
            ++skipped;  // no seed entities matched; QA pair skipped
        }
    }
    manifest.write();
    std::cout << "subgraph: " << (qa_pairs.size() - static_cast<std::size_t>(skipped))
              << " QA pairs processed, " << skipped << " skipped (no seeds)\n";
    return kExitOk;
}

int cmd_augment(const acr::PipelineConfig& cfg) {
    const std::string graph_dir = artifact(cfg, "graph");
    const std::string subgraphs_path = artifact(cfg, "subgraphs.jsonl");
    require_artifact(subgraphs_path, "subgraph");
    require_artifact((fs::path(graph_dir) / "nodes.jsonl").string(), "build-kg");

    CommandManifest manifest(cfg, "augment");
    manifest.add_input(subgraphs_path);
    manifest.add_input(cfg.qa_path);
    const std::string out_path = artifact(cfg, "augmented_queries.jsonl");
    manifest.add_output(out_path);
    if (manifest.up_to_date()) {
        std::cout << "augment: up to date\n";
        return kExitOk;
    }

    const acr::KnowledgeGraph kg = acr::load_graph(graph_dir);
    const auto qa_pairs = acr::load_qa_pairs(cfg.qa_path);
    std::map<std::string, acr::QAPair> qa_by_id;
    for (const auto& qa : qa_pairs) qa_by_id[qa.id] = qa;
    auto prompts = prompts_for(cfg);
    auto augmenter = acr::make_augmenter(cfg, prompts);

    std::string out;
    int degraded = 0;
    acr::for_each_jsonl(subgraphs_path, [&](const json& rec, long line) {
        const auto qa_id = acr::require_field<std::string>(rec, "qa_id", line);
        auto it = qa_by_id.find(qa_id);
        if (it == qa_by_id.end()) return;
        acr::SubgraphResult large, small;
        large.node_ids = rec.at("large").at("members").get<std::vector<int>>();
        small.node_ids = rec.at("small").at("members").get<std::vector<int>>();
        const auto pool = acr::build_augmented_pool(it->second, kg, large, small,
                                                    cfg.curriculum.queries_per_subgraph,
                                                    *augmenter);
        degraded += pool.degraded ? 1 : 0;
        auto dump = [&](const std::vector<acr::AugmentedQuery>& queries, const char* cls) {
            for (const auto& q : queries) {
                out += json{{"qa_id", q.qa_id},
                            {"size_class", cls},
                            {"text", q.text},
                            {"source_node_ids", q.source_node_ids}}
                           .dump();
                out.push_back('\n');
            }
        };
        dump(pool.large, "L");
        dump(pool.small, "S");
    });
    acr::atomic_write(out_path, out);
    manifest.write();
    std::cout << "augment: wrote " << out_path << (degraded ? " (some pools degraded)" : "")
              << "\n";
    return kExitOk;
}

// Parses "a,b,c" into alignment weights.
acr::AlignmentWeights parse_weights(const std::string& spec) {
    acr::AlignmentWeights w;
    double* slots[3] = {&w.forward, &w.backward, &w.parameter};
    std::istringstream in(spec);
    std::string part;
    int i = 0;
    while (std::getline(in, part, ',')) {
        if (i >= 3) throw acr::ConfigError("--weights takes exactly three comma-separated values");
        try {
            *slots[i++] = std::stod(part);
        } catch (const std::exception&) {
            throw acr::ConfigError("--weights: \"" + part + "\" is not a number");
        }
    }
    if (i != 3) throw acr::ConfigError("--weights takes exactly three comma-separated values");
    return w;
}

int cmd_align(acr::PipelineConfig cfg, const std::string& weights_override) {
    if (!weights_override.empty()) cfg.alignment.weights = parse_weights(weights_override);
    const std::string chunks_path = artifact(cfg, "chunks.jsonl");
    require_artifact(chunks_path, "ingest");
    require_artifact(cfg.qa_path, "nothing (configure \"qa\")");

    CommandManifest manifest(cfg, "align");
    manifest.add_input(chunks_path);
    manifest.add_input(cfg.qa_path);
    const std::string scores_path = artifact(cfg, "scores.jsonl");
    const std::string positives_path = artifact(cfg, "positives.jsonl");
    manifest.add_output(scores_path);
    manifest.add_output(positives_path);
    if (manifest.up_to_date()) {
        std::cout << "align: up to date\n";
        return kExitOk;
    }

    const auto chunks = acr::load_chunks(chunks_path);
    const auto qa_pairs = acr::load_qa_pairs(cfg.qa_path);
    std::map<std::string, std::vector<acr::Chunk>> by_doc;
    for (const auto& c : chunks) by_doc[c.doc_id].push_back(c);

    auto prompts = prompts_for(cfg);
    auto scorer = acr::make_scorer(cfg);
    auto embedder = acr::make_embedder(cfg);

    if (fs::exists(scores_path)) fs::remove(scores_path);
    std::string positives_out;
    int flagged = 0;
    for (const auto& qa : qa_pairs) {
        auto it = by_doc.find(qa.doc_id);
        if (it == by_doc.end()) {
            ++flagged;
            continue;
        }
        const auto scored = acr::score_chunks(qa, it->second, *scorer, *embedder,
                                              cfg.alignment.weights, prompts);
        acr::append_scores(scores_path, qa.id, scored.scores);
        const auto top = acr::select_positives(scored.scores, cfg.alignment.positives);
        if (top.empty()) ++flagged;
        positives_out += json{{"qa_id", qa.id}, {"positive_ids", top}}.dump();
        positives_out.push_back('\n');
    }
    acr::atomic_write(positives_path, positives_out);
    manifest.write();
    std::cout << "align: scored " << qa_pairs.size() << " QA pairs, " << flagged << " flagged\n";
    return kExitOk;
}

int cmd_index(const acr::PipelineConfig& cfg) {
    const std::string chunks_path = artifact(cfg, "chunks.jsonl");
    require_artifact(chunks_path, "ingest");

    CommandManifest manifest(cfg, "index");
    manifest.add_input(chunks_path);
    const std::string index_path = artifact(cfg, "index.bin");
    manifest.add_output(index_path);
    if (manifest.up_to_date()) {
        std::cout << "index: up to date\n";
        return kExitOk;
    }

    const auto chunks = acr::load_chunks(chunks_path);
    auto embedder = acr::make_embedder(cfg);
    const auto index = acr::build_index(chunks, *embedder);
    acr::save_index(index_path, index);
    manifest.write();
    std::cout << "index: " << index.count() << " chunks, dim " << index.dim() << "\n";
    return kExitOk;
}

std::map<std::string, std::vector<std::string>> load_positives(const std::string& path) {
    std::map<std::string, std::vector<std::string>> out;
    acr::for_each_jsonl(path, [&](const json& rec, long line) {
        out[acr::require_field<std::string>(rec, "qa_id", line)] =
            acr::require_field<std::vector<std::string>>(rec, "positive_ids", line);
    });
    return out;
}

int cmd_curriculum(const acr::PipelineConfig& cfg, int stage, const std::string& adapter_path) {
    const std::string positives_path = artifact(cfg, "positives.jsonl");
    require_artifact(positives_path, "align");
    require_artifact(cfg.qa_path, "nothing (configure \"qa\")");
    const std::string index_path = artifact(cfg, "index.bin");
    require_artifact(index_path, "index");

    CommandManifest cmd_manifest(cfg, "curriculum-stage" + std::to_string(stage));
    cmd_manifest.add_input(positives_path);
    cmd_manifest.add_input(cfg.qa_path);
    cmd_manifest.add_input(index_path);
    if (stage >= 2) {
        const std::string prev_adapter =
            adapter_path.empty() ? artifact(cfg, "adapter_stage" + std::to_string(stage - 1) + ".bin")
                                 : adapter_path;
        require_artifact(prev_adapter, "train --stage " + std::to_string(stage - 1));
        cmd_manifest.add_input(prev_adapter);
    }
    const std::string stage_path = artifact(cfg, "stage" + std::to_string(stage) + ".jsonl");
    cmd_manifest.add_output(stage_path);
    if (cmd_manifest.up_to_date()) {
        std::cout << "curriculum: stage " << stage << " up to date\n";
        return kExitOk;
    }

    const auto qa_pairs = acr::load_qa_pairs(cfg.qa_path);
    acr::StageAssemblyInput input;
    input.qa_pairs = qa_pairs;
    input.positives = load_positives(positives_path);

    const acr::EmbeddingIndex index = acr::load_index(index_path);
    acr::AdapterModel adapter;
    if (stage == 1) {
        adapter = acr::AdapterModel::identity(index.dim(), cfg.trainer.temperature);
    } else {
        std::string path = adapter_path.empty()
                               ? artifact(cfg, "adapter_stage" + std::to_string(stage - 1) + ".bin")
                               : adapter_path;
        require_artifact(path, "train --stage " + std::to_string(stage - 1));
        adapter = acr::AdapterModel::load(path);
    }

    acr::StageManifest sm;
    sm.config_hash = acr::config_hash(cfg);
    sm.seed = cfg.seed;
    sm.adapter_hash = acr::hash_hex(adapter.content_hash());
    sm.backend_ids = acr::make_embedder(cfg)->id();

    if (stage >= 2) {
        const std::string aug_path = artifact(cfg, "augmented_queries.jsonl");
        require_artifact(aug_path, "augment");
        const std::string chunks_path = artifact(cfg, "chunks.jsonl");
        require_artifact(chunks_path, "ingest");

        const auto chunks = acr::load_chunks(chunks_path);
        std::map<std::string, std::vector<acr::Chunk>> by_doc;
        for (const auto& c : chunks) by_doc[c.doc_id].push_back(c);
        auto embedder = acr::make_embedder(cfg);
        std::map<std::string, acr::EmbeddingIndex> doc_indexes;
        for (const auto& [doc_id, doc_chunks] : by_doc) {
            doc_indexes.emplace(doc_id, acr::build_index(doc_chunks, *embedder));
        }
        std::map<std::string, std::string> doc_of_qa;
        for (const auto& qa : qa_pairs) doc_of_qa[qa.id] = qa.doc_id;

        const char* want_class = (stage == 2) ? "L" : "S";
        std::map<std::string, std::vector<std::vector<std::string>>> mined;
        acr::for_each_jsonl(aug_path, [&](const json& rec, long line) {
            if (acr::require_field<std::string>(rec, "size_class", line) != want_class) return;
            const auto qa_id = acr::require_field<std::string>(rec, "qa_id", line);
            auto pos_it = input.positives.find(qa_id);
            auto doc_it = doc_of_qa.find(qa_id);
            if (pos_it == input.positives.end() || doc_it == doc_of_qa.end()) return;
            auto idx_it = doc_indexes.find(doc_it->second);
            if (idx_it == doc_indexes.end()) return;
            mined[qa_id].push_back(acr::mine_hard_negatives(
                idx_it->second, *embedder, acr::require_field<std::string>(rec, "text", line),
                pos_it->second, cfg.curriculum.retrieval_depth, &adapter));
        });
        for (const auto& [qa_id, lists] : mined) {
            input.negatives[qa_id] = acr::merge_negative_lists(
                lists, static_cast<std::size_t>(cfg.curriculum.negative_cap));
        }
    }

    acr::StageAssemblyStats stats;
    const acr::StageDataset ds = acr::assemble_stage(stage, input, sm, &stats);
    acr::save_stage_dataset(stage_path, ds);
    cmd_manifest.write();
    std::cout << "curriculum: stage " << stage << " has " << ds.examples.size() << " examples ("
              << stats.dropped_qa << " QA pairs dropped)\n";
    return kExitOk;
}

int cmd_train(const acr::PipelineConfig& cfg, int stage) {
    const std::string dataset_path = artifact(cfg, "stage" + std::to_string(stage) + ".jsonl");
    require_artifact(dataset_path, "curriculum --stage " + std::to_string(stage));
    const std::string index_path = artifact(cfg, "index.bin");
    require_artifact(index_path, "index");

    CommandManifest cmd_manifest(cfg, "train-stage" + std::to_string(stage));
    cmd_manifest.add_input(dataset_path);
    cmd_manifest.add_input(index_path);
    if (stage >= 2) {
        const std::string prev = artifact(cfg, "adapter_stage" + std::to_string(stage - 1) + ".bin");
        require_artifact(prev, "train --stage " + std::to_string(stage - 1));
        cmd_manifest.add_input(prev);
    }
    const std::string out_path = artifact(cfg, "adapter_stage" + std::to_string(stage) + ".bin");
    cmd_manifest.add_output(out_path);
    if (cmd_manifest.up_to_date()) {
        std::cout << "train: stage " << stage << " up to date\n";
        return kExitOk;
    }

    const acr::StageDataset ds = acr::load_stage_dataset(dataset_path);
    const acr::EmbeddingIndex index = acr::load_index(index_path);
    auto embedder = acr::make_embedder(cfg);

    acr::AdapterModel adapter;
    if (stage == 1) {
        adapter = acr::AdapterModel::identity(index.dim(), cfg.trainer.temperature);
    } else {
        const std::string prev = artifact(cfg, "adapter_stage" + std::to_string(stage - 1) + ".bin");
        require_artifact(prev, "train --stage " + std::to_string(stage - 1));
        adapter = acr::AdapterModel::load(prev);
    }

    acr::TrainReport report;
    const acr::AdapterModel trained =
        acr::train_stage(adapter, ds, index, *embedder, cfg.trainer, &report);
    trained.save(out_path);

    json rj{{"stage", report.stage},
            {"epoch_mean_loss", report.epoch_mean_loss},
            {"updates", report.updates},
            {"examples_seen", report.examples_seen},
            {"adapter_hash", report.adapter_hash},
            {"skipped_empty", report.skipped_empty}};
    acr::atomic_write(artifact(cfg, "train_report_stage" + std::to_string(stage) + ".json"),
                      rj.dump(2) + "\n");
    cmd_manifest.write();
    std::cout << "train: stage " << stage << " -> " << out_path << " (" << report.updates
              << " updates)\n";
    return kExitOk;
}

int cmd_retrieve(const acr::PipelineConfig& cfg, const std::string& query, int k,
                 const std::string& adapter_path) {
    const std::string index_path = artifact(cfg, "index.bin");
    require_artifact(index_path, "index");
    const acr::EmbeddingIndex index = acr::load_index(index_path);
    auto embedder = acr::make_embedder(cfg);

    std::unique_ptr<acr::AdapterModel> adapter;
    if (!adapter_path.empty()) {
        require_artifact(adapter_path, "train");
        adapter = std::make_unique<acr::AdapterModel>(acr::AdapterModel::load(adapter_path));
    }
    const auto results = acr::retrieve_text(index, query, *embedder, k, adapter.get());
    for (const auto& r : results) {
        std::cout << r.chunk_id << "\t" << r.similarity << "\n";
    }
    return kExitOk;
}

int cmd_eval(const acr::PipelineConfig& cfg, const std::string& predictions_path,
             const std::string& verdicts_path) {
    if (predictions_path.empty() && verdicts_path.empty()) {
        throw acr::ConfigError("eval needs --predictions and/or --verdicts");
    }
    json report;

    if (!predictions_path.empty()) {
        require_artifact(predictions_path, "your answer generator");
        double f1_sum = 0, p_sum = 0, r_sum = 0;
        int n = 0;
        acr::for_each_jsonl(predictions_path, [&](const json& rec, long line) {
            const auto pred = acr::require_field<std::string>(rec, "prediction", line);
            const auto gold = acr::require_field<std::string>(rec, "gold", line);
            const auto f1 = acr::token_f1(pred, gold);
            f1_sum += f1.f1;
            p_sum += f1.precision;
            r_sum += f1.recall;
            ++n;
        });
        if (n == 0) throw acr::ConfigError("predictions file is empty");
        report["f1"] = {{"mean_f1", f1_sum / n},
                        {"mean_precision", p_sum / n},
                        {"mean_recall", r_sum / n},
                        {"count", n}};
        std::cout << "token F1 over " << n << " pairs: " << (f1_sum / n) << "\n";
    }

    if (!verdicts_path.empty()) {
        require_artifact(verdicts_path, "judge");
        std::vector<acr::JudgeVerdict> verdicts;
        acr::for_each_jsonl(verdicts_path, [&](const json& rec, long line) {
            acr::JudgeVerdict v;
            v.qa_id = acr::require_field<std::string>(rec, "qa_id", line);
            v.outcome.faithfulness =
                acr::winner_from_name(acr::require_field<std::string>(rec, "faithfulness", line));
            v.outcome.conciseness =
                acr::winner_from_name(acr::require_field<std::string>(rec, "conciseness", line));
            v.outcome.overall =
                acr::winner_from_name(acr::require_field<std::string>(rec, "overall", line));
            verdicts.push_back(std::move(v));
        });
        auto add = [&](const char* name, acr::Criterion c) {
            const auto wr = acr::compute_win_rate(verdicts, c);
            json entry{{"excluded", wr.excluded}};
            if (wr.value) {
                entry["win_rate"] = *wr.value;
                std::cout << name << " win rate: " << *wr.value << " (" << wr.excluded
                          << " excluded)\n";
            } else {
                entry["win_rate"] = nullptr;
                std::cout << name << " win rate: undefined (all verdicts excluded)\n";
            }
            report["win_rate"][name] = entry;
        };
        add("faithfulness", acr::Criterion::Faithfulness);
        add("conciseness", acr::Criterion::Conciseness);
        add("overall", acr::Criterion::Overall);
    }

    acr::atomic_write(artifact(cfg, "eval_report.json"), report.dump(2) + "\n");
    return kExitOk;
}

int cmd_synthetic(std::uint64_t seed, const std::string& out_dir) {
    acr::SyntheticRunConfig cfg;
    cfg.corpus.seed = seed;
    cfg.trainer.seed = seed;
    const auto metrics = acr::run_synthetic_e2e(cfg, out_dir);
    std::cout << "synthetic-e2e: baseline recall@" << cfg.eval_depth << " = "
              << metrics.baseline_recall << ", finetuned = " << metrics.final_recall
              << " (improvement " << metrics.improvement << ") over " << metrics.heldout_queries
              << " held-out queries\n"
              << "adapter " << metrics.adapter_hash << ", wall " << metrics.wall_seconds << "s\n";
    return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"answer-centric retriever finetuning pipeline"};
    app.require_subcommand(1);

    std::string config_path;
    app.add_option("--config,-c", config_path, "pipeline configuration file (JSON)");

    auto* ingest = app.add_subcommand("ingest", "chunk the corpus onto disk");
    auto* build_kg = app.add_subcommand("build-kg", "extract entities and build the graph");
    auto* subgraph = app.add_subcommand("subgraph", "per-QA cohesive subgraphs");
    auto* augment = app.add_subcommand("augment", "augmented query pools");
    auto* align = app.add_subcommand("align", "alignment scores and positive sets");
    auto* curriculum = app.add_subcommand("curriculum", "assemble a stage dataset");
    auto* train = app.add_subcommand("train", "train one curriculum stage");
    auto* index_cmd = app.add_subcommand("index", "build the retrieval index");
    auto* retrieve = app.add_subcommand("retrieve", "query the index");
    auto* eval = app.add_subcommand("eval", "token F1 and win-rate reports");
    auto* synth = app.add_subcommand("synthetic-e2e", "deterministic end-to-end harness");

    std::string weights_override;
    align->add_option("--weights", weights_override,
                      "override lambda_f,lambda_b,lambda_v for this run");

    int stage = 1;
    curriculum->add_option("--stage", stage, "curriculum stage (1-3)")->required();
    std::string adapter_path;
    curriculum->add_option("--adapter", adapter_path, "mining adapter checkpoint (stages 2/3)");

    int train_stage_n = 1;
    train->add_option("--stage", train_stage_n, "stage to train (1-3)")->required();

    std::string query;
    int k = 10;
    std::string retrieve_adapter;
    retrieve->add_option("--query", query, "query text")->required();
    retrieve->add_option("--k", k, "results to return");
    retrieve->add_option("--adapter", retrieve_adapter, "adapter checkpoint");

    std::string predictions_path, verdicts_path;
    eval->add_option("--predictions", predictions_path, "jsonl with prediction/gold fields");
    eval->add_option("--verdicts", verdicts_path, "jsonl with per-criterion winners");

    std::uint64_t synth_seed = 42;
    std::string synth_out = "synthetic_out";
    synth->add_option("--seed", synth_seed, "run seed");
    synth->add_option("--out", synth_out, "output directory");

    CLI11_PARSE(app, argc, argv);

    try {
        if (synth->parsed()) return cmd_synthetic(synth_seed, synth_out);

        const acr::PipelineConfig cfg = load_config_or_die(config_path);
        fs::create_directories(cfg.output_dir);

        if (ingest->parsed()) return cmd_ingest(cfg);
        if (build_kg->parsed()) return cmd_build_kg(cfg);
        if (subgraph->parsed()) return cmd_subgraph(cfg);
        if (augment->parsed()) return cmd_augment(cfg);
        if (align->parsed()) return cmd_align(cfg, weights_override);
        if (curriculum->parsed()) {
            if (stage < 1 || stage > 3) throw acr::ConfigError("--stage must be 1, 2 or 3");
            return cmd_curriculum(cfg, stage, adapter_path);
        }
        if (train->parsed()) {
            if (train_stage_n < 1 || train_stage_n > 3)
                throw acr::ConfigError("--stage must be 1, 2 or 3");
            return cmd_train(cfg, train_stage_n);
        }
        if (index_cmd->parsed()) return cmd_index(cfg);
        if (retrieve->parsed()) return cmd_retrieve(cfg, query, k, retrieve_adapter);
        if (eval->parsed()) return cmd_eval(cfg, predictions_path, verdicts_path);
    } catch (const MissingPrerequisite& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitMissing;
    } catch (const acr::BackendError& e) {
        std::cerr << "backend error: " << e.what() << "\n";
        return kExitBackend;
    } catch (const acr::CurriculumOrderError& e) {
        std::cerr << "curriculum order error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitUsage;
    }
    return kExitUsage;
}
