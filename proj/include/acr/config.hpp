#pragma once

// Single configuration file for the whole pipeline. Defaults follow the
// published hyperparameter tables; validation rejects unknown keys and
// reports every offending field at once.

#include <memory>
#include <string>
#include <vector>

#include <json.hpp>

#include "acr/alignment.hpp"
#include "acr/backends.hpp"
#include "acr/ppr.hpp"
#include "acr/prompts.hpp"
#include "acr/trainer.hpp"

namespace acr {

struct ChunkingConfig {
    std::size_t window = 512;  // B
    std::size_t overlap = 12;  // b
};

struct KgConfig {
    double tau = 0.8;
};

struct PprConfig {
    double alpha = 0.85;
    double epsilon = 1e-4;
    int k_large = 200;
    int k_small = 20;
};

struct AlignmentConfig {
    AlignmentWeights weights;  // 1.0 / 0.3 / 1.0
    int positives = 10;        // M
};

struct CurriculumConfig {
    int queries_per_subgraph = 10;  // n
    int retrieval_depth = 20;       // K
    int negative_cap = 20;
};

struct BackendSelection {
    std::string kind;  // capability-specific: mock variants or "remote"
    BackendConfig backend;
    std::size_t vocab = 4;   // mock uniform scorer
    Eigen::Index dim = 64;   // mock embedder
};

struct BackendsConfig {
    BackendSelection extract{"mock", {}, 4, 64};
    BackendSelection likelihood{"hash", {}, 4, 64};
    BackendSelection embed{"hash", {}, 4, 64};
    BackendSelection augment{"mock", {}, 4, 64};
    BackendSelection judge{"mock", {}, 4, 64};
};

struct PipelineConfig {
    std::string documents_path;
    std::string qa_path;
    std::string output_dir = "out";
    std::string prompts_dir;  // optional template overrides
    std::uint64_t seed = 42;
    ChunkingConfig chunking;
    KgConfig kg;
    PprConfig ppr;
    AlignmentConfig alignment;
    CurriculumConfig curriculum;
    TrainConfig trainer;
    BackendsConfig backends;

    PprParams ppr_large() const { return {ppr.alpha, ppr.epsilon, ppr.k_large}; }
    PprParams ppr_small() const { return {ppr.alpha, ppr.epsilon, ppr.k_small}; }
};

// Parses and validates; accumulates every problem before throwing one
// ConfigError that lists them all.
PipelineConfig parse_pipeline_config(const nlohmann::json& root);
PipelineConfig load_pipeline_config(const std::string& path);

nlohmann::json config_to_json(const PipelineConfig& cfg);

// Stable hex digest of the canonical JSON form; used by artifact manifests.
std::string config_hash(const PipelineConfig& cfg);

// Capability factories over the configured kind (mock flavors or remote).
std::unique_ptr<EntityExtractor> make_extractor(const PipelineConfig& cfg,
                                                const PromptLibrary& prompts);
std::unique_ptr<LikelihoodScorer> make_scorer(const PipelineConfig& cfg);
std::unique_ptr<Embedder> make_embedder(const PipelineConfig& cfg);
std::unique_ptr<QueryAugmenter> make_augmenter(const PipelineConfig& cfg,
                                               const PromptLibrary& prompts);
std::unique_ptr<PairJudge> make_judge(const PipelineConfig& cfg, const PromptLibrary& prompts);

}  // namespace acr
