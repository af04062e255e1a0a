#pragma once

// Three-stage contrastive finetuning of the linear adapter with InfoNCE and
// exact hand-derived gradients: plain accumulated gradient descent, fully
// deterministic given (seed, config, data).

#include <cstdint>
#include <string>
#include <vector>

#include "acr/adapter.hpp"
#include "acr/backends.hpp"
#include "acr/curriculum.hpp"
#include "acr/retriever.hpp"

namespace acr {

struct TrainConfig {
    int epochs = 10;
    int batch_size = 2;
    int grad_accumulation = 8;
    double learning_rate = 6e-6;
    double temperature = 0.05;  // tau_c
    std::uint64_t seed = 42;
    // Opt-in: also contrast against the other in-batch positives during
    // stages 2/3, on top of the mined negatives. Off by default; the staged
    // objective contrasts {positive} with the mined set only.
    bool mix_in_batch = false;
};

struct TrainReport {
    int stage = 0;
    std::vector<double> epoch_mean_loss;
    long updates = 0;        // parameter updates applied
    long examples_seen = 0;
    double wall_seconds = 0.0;
    std::string adapter_hash;  // canonical hash after the stage
    bool skipped_empty = false;
};

// One vectorized contrastive example: query, positive, mined negatives.
struct ContrastiveExample {
    Eigen::VectorXd query;
    Eigen::VectorXd positive;
    std::vector<Eigen::VectorXd> negatives;
};

// loss = -log( exp(s+) / sum over {positive} + negatives of exp(s) ) with
// s = similarity/tau, computed with max-subtracted log-sum-exp. Always >= 0;
// exactly 0 with no negatives.
double infonce_loss(const AdapterModel& adapter, const Eigen::VectorXd& query,
                    const Eigen::VectorXd& positive,
                    const std::vector<Eigen::VectorXd>& negatives, double tau);

// Analytic d(loss)/dW, differentiated through the cosine normalization.
// Matches central finite differences to ~1e-6 relative on well-conditioned
// inputs. Optionally reports the loss of the same evaluation.
Eigen::MatrixXd infonce_gradient(const AdapterModel& adapter, const Eigen::VectorXd& query,
                                 const Eigen::VectorXd& positive,
                                 const std::vector<Eigen::VectorXd>& negatives, double tau,
                                 double* loss_out = nullptr);

// One curriculum stage. Stage 1 uses the other positives of each mini-batch
// as in-batch negatives; stages 2 and 3 use the dataset's mined negatives.
// For stages 2/3 the dataset's manifest hash must equal the incoming
// adapter's canonical hash (curriculum ordering), else CurriculumOrderError.
// Returns the canonical (checkpoint-quantized) adapter whose parent hash is
// the incoming adapter's.
AdapterModel train_stage(const AdapterModel& adapter, const StageDataset& dataset,
                         const EmbeddingIndex& index, Embedder& embedder, const TrainConfig& cfg,
                         TrainReport* report = nullptr);

struct CurriculumRun {
    AdapterModel final_adapter;
    std::vector<TrainReport> reports;
};

// Sequential stage-1/2/3 training over pre-mined datasets. Validates the
// checkpoint-hash chain before each stage and, when checkpoint_dir is
// non-empty, persists the adapter after every stage.
CurriculumRun run_curriculum(const AdapterModel& adapter, const StageDataset& stage1,
                             const StageDataset& stage2, const StageDataset& stage3,
                             const EmbeddingIndex& index, Embedder& embedder,
                             const TrainConfig& cfg, const std::string& checkpoint_dir = "");

}  // namespace acr
