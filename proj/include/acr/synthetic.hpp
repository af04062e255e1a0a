#pragma once

// Synthetic corpus and end-to-end harness: deterministic documents with one
// planted answer-sufficient chunk and near-duplicate distractors per QA
// pair, driven entirely by the mock backends. Used by the e2e CLI command
// and the verification suite.

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "acr/corpus.hpp"
#include "acr/curriculum.hpp"
#include "acr/trainer.hpp"

namespace acr {

struct SyntheticSpec {
    int n_docs = 20;
    int segments_per_doc = 10;  // one chunk per segment after chunking
    int distractors_per_qa = 3;
    int paraphrases_per_qa = 3;  // held-out eval queries
    std::uint64_t seed = 42;
    std::size_t chunk_window = 40;
    std::size_t chunk_overlap = 4;
};

struct SyntheticCorpus {
    SyntheticSpec spec;
    std::vector<Document> documents;
    std::vector<QAPair> qa_pairs;
    std::vector<Chunk> chunks;
    std::map<std::string, std::string> planted;                   // qa_id -> chunk id
    std::map<std::string, std::vector<std::string>> distractors;  // qa_id -> chunk ids
    std::map<std::string, std::vector<std::string>> paraphrases;  // qa_id -> held-out queries
};

SyntheticCorpus make_synthetic_corpus(const SyntheticSpec& spec = {});

// Pipeline knobs for the synthetic run. The corpus is desk-sized, so the
// mining depth, positive count and trainer settings differ from the
// paper-scale defaults; everything is pinned here.
struct SyntheticRunConfig {
    SyntheticSpec corpus;
    double kg_tau = 0.8;
    double ppr_alpha = 0.85;
    double ppr_epsilon = 1e-4;
    int k_large = 200;
    int k_small = 3;
    int positives = 1;              // M: one answer-sufficient chunk per QA
    int queries_per_subgraph = 10;  // n
    int retrieval_depth = 4;        // K for mining, kept below the chunk count
    int negative_cap = 20;
    int eval_depth = 5;             // recall@k for the harness metric
    TrainConfig trainer{12, 4, 1, 0.35, 0.05, 42};
};

struct SyntheticArtifacts {
    SyntheticCorpus corpus;
    StageDataset stage1, stage2, stage3;
    AdapterModel baseline;  // identity
    AdapterModel final_adapter;
    std::vector<TrainReport> reports;
    EmbeddingIndex index;  // global, over all chunks
};

struct SyntheticMetrics {
    double baseline_recall = 0.0;  // recall@eval_depth of planted positives
    double final_recall = 0.0;
    double improvement = 0.0;
    double baseline_mrr = 0.0;
    double final_mrr = 0.0;
    int heldout_queries = 0;
    std::string adapter_hash;
    double wall_seconds = 0.0;
};

// Runs the whole pipeline (extraction, graph, subgraphs, augmented pools,
// alignment, curriculum, three-stage training) with the deterministic mocks
// and evaluates held-out paraphrase recall. When out_dir is non-empty every
// artifact is persisted there along with a metrics file.
SyntheticMetrics run_synthetic_e2e(const SyntheticRunConfig& cfg, const std::string& out_dir,
                                   SyntheticArtifacts* artifacts = nullptr);

}  // namespace acr
