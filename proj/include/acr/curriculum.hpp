#pragma once

// Curriculum construction: per-QA augmented query pools from the two
// subgraph sizes, hard negatives mined against them, and the three stage
// datasets consumed by the trainer.

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "acr/backends.hpp"
#include "acr/corpus.hpp"
#include "acr/kg.hpp"
#include "acr/ppr.hpp"
#include "acr/retriever.hpp"

namespace acr {

enum class SizeClass { Large, Small };

struct AugmentedQuery {
    std::string text;
    std::string qa_id;
    SizeClass size_class = SizeClass::Large;
    std::vector<int> source_node_ids;
};

struct AugmentedPool {
    std::vector<AugmentedQuery> large;
    std::vector<AugmentedQuery> small;
    bool degraded = false;
};

struct StageExample {
    std::string qa_id;
    std::string query;
    std::string positive_id;
    std::vector<std::string> negative_ids;  // empty in stage 1
    std::string provenance;                 // mining size class, "" for stage 1
};

struct StageManifest {
    int stage = 0;
    std::string config_hash;
    std::string backend_ids;
    std::uint64_t seed = 0;
    std::string adapter_hash;  // hex hash of the adapter that mined negatives
};

struct StageDataset {
    int stage = 0;
    std::vector<StageExample> examples;
    StageManifest manifest;
};

// n augmented queries per non-empty subgraph size class, each carrying the
// subgraph's entity payload into the generation backend. An empty small
// subgraph yields an empty small pool, not an error.
AugmentedPool build_augmented_pool(const QAPair& qa, const KnowledgeGraph& kg,
                                   const SubgraphResult& large, const SubgraphResult& small,
                                   int n, QueryAugmenter& augmenter);

// Top-k retrieval for the query minus every chunk in the positive set,
// retrieval order preserved. May be empty.
std::vector<std::string> mine_hard_negatives(const EmbeddingIndex& index, Embedder& embedder,
                                             const std::string& query_text,
                                             const std::vector<std::string>& positives, int k,
                                             const AdapterModel* adapter);

// Union of per-query mined lists for one QA pair, first-seen order, capped.
std::vector<std::string> merge_negative_lists(const std::vector<std::vector<std::string>>& lists,
                                              std::size_t cap);

struct StageAssemblyInput {
    std::vector<QAPair> qa_pairs;
    std::map<std::string, std::vector<std::string>> positives;  // qa_id -> T+ (ordered)
    // qa_id -> merged negatives of the stage's size class (stages 2/3).
    std::map<std::string, std::vector<std::string>> negatives;
};

struct StageAssemblyStats {
    int dropped_qa = 0;  // empty positive or negative pool
};

// Stage 1 pairs every (q, t+) with empty negatives; stages 2 and 3 pair the
// original query with each t+ and that QA's mined negative set. QA pairs
// with nothing to train on are dropped and counted.
StageDataset assemble_stage(int stage, const StageAssemblyInput& input,
                            const StageManifest& manifest, StageAssemblyStats* stats = nullptr);

// Record-per-example file plus a manifest line; byte-exact round trip.
void save_stage_dataset(const std::string& path, const StageDataset& dataset);
StageDataset load_stage_dataset(const std::string& path);

}  // namespace acr
