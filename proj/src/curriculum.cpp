#include "acr/curriculum.hpp"

#include <algorithm>
#include <set>

#include <json.hpp>

#include "acr/errors.hpp"
#include "acr/jsonl.hpp"

namespace acr {

using nlohmann::json;

AugmentedPool build_augmented_pool(const QAPair& qa, const KnowledgeGraph& kg,
                                   const SubgraphResult& large, const SubgraphResult& small,
                                   int n, QueryAugmenter& augmenter) {
    if (n < 1) throw ConfigError("augmented query count must be >= 1");
    if (large.node_ids.empty() && small.node_ids.empty()) {
        throw ConfigError("both subgraphs empty for QA pair " + qa.id);
    }

    AugmentedPool pool;
    auto generate = [&](const SubgraphResult& sub, SizeClass cls,
                        std::vector<AugmentedQuery>& out) {
        if (sub.node_ids.empty()) return;
        const auto payload = entity_payload(kg, sub.node_ids);
        AugmentResult res = augmenter.augment(qa, payload, n);
        pool.degraded = pool.degraded || res.degraded;
        for (auto& text : res.queries) {
            AugmentedQuery aq;
            aq.text = std::move(text);
            aq.qa_id = qa.id;
            aq.size_class = cls;
            aq.source_node_ids = sub.node_ids;
            out.push_back(std::move(aq));
        }
    };
    generate(large, SizeClass::Large, pool.large);
    generate(small, SizeClass::Small, pool.small);
    return pool;
}

std::vector<std::string> mine_hard_negatives(const EmbeddingIndex& index, Embedder& embedder,
                                             const std::string& query_text,
                                             const std::vector<std::string>& positives, int k,
                                             const AdapterModel* adapter) {
    const auto retrieved = retrieve_text(index, query_text, embedder, k, adapter);
    const std::set<std::string> positive_set(positives.begin(), positives.end());
    std::vector<std::string> negatives;
    for (const auto& r : retrieved) {
        if (!positive_set.count(r.chunk_id)) negatives.push_back(r.chunk_id);
    }
    return negatives;
}

std::vector<std::string> merge_negative_lists(const std::vector<std::vector<std::string>>& lists,
                                              std::size_t cap) {
    std::vector<std::string> merged;
    std::set<std::string> seen;
    for (const auto& list : lists) {
        for (const auto& id : list) {
            if (merged.size() >= cap) return merged;
            if (seen.insert(id).second) merged.push_back(id);
        }
    }
    return merged;
}

StageDataset assemble_stage(int stage, const StageAssemblyInput& input,
                            const StageManifest& manifest, StageAssemblyStats* stats) {
    if (stage < 1 || stage > 3) throw ConfigError("stage must be 1, 2 or 3");
    StageDataset ds;
    ds.stage = stage;
    ds.manifest = manifest;
    ds.manifest.stage = stage;
    StageAssemblyStats local;

    for (const auto& qa : input.qa_pairs) {
        auto pos_it = input.positives.find(qa.id);
        if (pos_it == input.positives.end() || pos_it->second.empty()) {
            ++local.dropped_qa;
            continue;
        }
        std::vector<std::string> negatives;
        std::string provenance;
        if (stage >= 2) {
            auto neg_it = input.negatives.find(qa.id);
            if (neg_it == input.negatives.end() || neg_it->second.empty()) {
                ++local.dropped_qa;
                continue;
            }
            negatives = neg_it->second;
            provenance = stage == 2 ? "L" : "S";
            // The defining exclusion: a positive never doubles as a negative.
            const std::set<std::string> pos_set(pos_it->second.begin(), pos_it->second.end());
            for (const auto& n : negatives) {
                if (pos_set.count(n)) {
                    throw ConfigError("negative " + n + " of QA " + qa.id +
                                      " overlaps the positive set");
                }
            }
        }
        for (const auto& positive : pos_it->second) {
            StageExample ex;
            ex.qa_id = qa.id;
            ex.query = qa.question;
            ex.positive_id = positive;
            ex.negative_ids = negatives;
            ex.provenance = provenance;
            ds.examples.push_back(std::move(ex));
        }
    }
    if (stats) *stats = local;
    return ds;
}

void save_stage_dataset(const std::string& path, const StageDataset& dataset) {
    std::string out;
    json mf{{"record", "manifest"},
            {"stage", dataset.manifest.stage},
            {"config_hash", dataset.manifest.config_hash},
            {"backend_ids", dataset.manifest.backend_ids},
            {"seed", dataset.manifest.seed},
            {"adapter_hash", dataset.manifest.adapter_hash}};
    out += mf.dump();
    out.push_back('\n');
    for (const auto& ex : dataset.examples) {
        json rec{{"record", "example"}, {"stage", dataset.stage},
                 {"qa_id", ex.qa_id},   {"query", ex.query},
                 {"positive_id", ex.positive_id}, {"negative_ids", ex.negative_ids},
                 {"provenance", ex.provenance}};
        out += rec.dump();
        out.push_back('\n');
    }
    atomic_write(path, out);
}

StageDataset load_stage_dataset(const std::string& path) {
    StageDataset ds;
    bool have_manifest = false;
    for_each_jsonl(path, [&](const json& rec, long line) {
        const std::string kind = require_field<std::string>(rec, "record", line);
        if (kind == "manifest") {
            ds.manifest.stage = require_field<int>(rec, "stage", line);
            ds.manifest.config_hash = require_field<std::string>(rec, "config_hash", line);
            ds.manifest.backend_ids = require_field<std::string>(rec, "backend_ids", line);
            ds.manifest.seed = require_field<std::uint64_t>(rec, "seed", line);
            ds.manifest.adapter_hash = require_field<std::string>(rec, "adapter_hash", line);
            ds.stage = ds.manifest.stage;
            have_manifest = true;
        } else if (kind == "example") {
            StageExample ex;
            ex.qa_id = require_field<std::string>(rec, "qa_id", line);
            ex.query = require_field<std::string>(rec, "query", line);
            ex.positive_id = require_field<std::string>(rec, "positive_id", line);
            ex.negative_ids = require_field<std::vector<std::string>>(rec, "negative_ids", line);
            ex.provenance = require_field<std::string>(rec, "provenance", line);
            ds.examples.push_back(std::move(ex));
        } else {
            throw ParseError("unknown record kind \"" + kind + "\" at line " + std::to_string(line),
                             rec.dump(), line);
        }
    });
    if (!have_manifest) throw ParseError("stage dataset missing manifest record");
    return ds;
}

}  // namespace acr
