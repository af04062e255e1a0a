#include "acr/trainer.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <map>
#include <random>

#include "acr/errors.hpp"
#include "acr/hashing.hpp"

namespace acr {

namespace {

// Scores for {positive} ∪ negatives in that order, as similarity/tau.
std::vector<double> candidate_scores(const AdapterModel& adapter, const Eigen::VectorXd& query,
                                     const Eigen::VectorXd& positive,
                                     const std::vector<Eigen::VectorXd>& negatives, double tau) {
    std::vector<double> s;
    s.reserve(1 + negatives.size());
    const Eigen::VectorXd u = adapter.transform(query);
    s.push_back(cosine(u, adapter.transform(positive)) / tau);
    for (const auto& n : negatives) s.push_back(cosine(u, adapter.transform(n)) / tau);
    return s;
}

double loss_from_scores(const std::vector<double>& s) {
    const double m = *std::max_element(s.begin(), s.end());
    double denom = 0.0;
    for (double v : s) denom += std::exp(v - m);
    return -(s[0] - m) + std::log(denom);
}

}  // namespace

double infonce_loss(const AdapterModel& adapter, const Eigen::VectorXd& query,
                    const Eigen::VectorXd& positive,
                    const std::vector<Eigen::VectorXd>& negatives, double tau) {
    if (!(tau > 0.0)) throw ConfigError("contrastive temperature must be positive");
    return loss_from_scores(candidate_scores(adapter, query, positive, negatives, tau));
}

Eigen::MatrixXd infonce_gradient(const AdapterModel& adapter, const Eigen::VectorXd& query,
                                 const Eigen::VectorXd& positive,
                                 const std::vector<Eigen::VectorXd>& negatives, double tau,
                                 double* loss_out) {
    if (!(tau > 0.0)) throw ConfigError("contrastive temperature must be positive");
    const Eigen::Index d = adapter.dim();
    const std::size_t n_cand = 1 + negatives.size();

    const Eigen::VectorXd u = adapter.transform(query);
    const double u_norm = u.norm();

    std::vector<Eigen::VectorXd> v(n_cand);
    std::vector<double> v_norm(n_cand);
    std::vector<double> sigma(n_cand);  // cosine per candidate
    v[0] = adapter.transform(positive);
    for (std::size_t j = 1; j < n_cand; ++j) v[j] = adapter.transform(negatives[j - 1]);
    for (std::size_t j = 0; j < n_cand; ++j) {
        v_norm[j] = v[j].norm();
        sigma[j] = (u_norm <= 0.0 || v_norm[j] <= 0.0) ? 0.0 : u.dot(v[j]) / (u_norm * v_norm[j]);
    }

    std::vector<double> s(n_cand);
    for (std::size_t j = 0; j < n_cand; ++j) s[j] = sigma[j] / tau;
    const double m = *std::max_element(s.begin(), s.end());
    double denom = 0.0;
    for (double val : s) denom += std::exp(val - m);
    if (loss_out) *loss_out = -(s[0] - m) + std::log(denom);

    // dL/dsigma_j = (softmax_j - [j == positive]) / tau; the cosine then
    // differentiates through both projected arguments:
    //   dsigma/du  = (v_hat - sigma * u_hat) / |u|
    //   dsigma/dv_j = (u_hat - sigma * v_hat) / |v_j|
    // and u = W q, v_j = W y_j contribute outer products with q and y_j.
    Eigen::MatrixXd grad = Eigen::MatrixXd::Zero(d, d);
    if (u_norm <= 0.0) return grad;  // degenerate projection: similarity pinned at 0
    const Eigen::VectorXd u_hat = u / u_norm;

    for (std::size_t j = 0; j < n_cand; ++j) {
        const double p_j = std::exp(s[j] - m) / denom;
        const double g = (p_j - (j == 0 ? 1.0 : 0.0)) / tau;
        if (v_norm[j] <= 0.0) continue;
        const Eigen::VectorXd v_hat = v[j] / v_norm[j];
        const Eigen::VectorXd dsig_du = (v_hat - sigma[j] * u_hat) / u_norm;
        const Eigen::VectorXd dsig_dv = (u_hat - sigma[j] * v_hat) / v_norm[j];
        const Eigen::VectorXd& y = (j == 0) ? positive : negatives[j - 1];
        grad.noalias() += g * dsig_du * query.transpose();
        grad.noalias() += g * dsig_dv * y.transpose();
    }
    return grad;
}

namespace {

struct VectorizedDataset {
    std::vector<ContrastiveExample> examples;
};

VectorizedDataset vectorize(const StageDataset& dataset, const EmbeddingIndex& index,
                            Embedder& embedder) {
    VectorizedDataset out;
    out.examples.reserve(dataset.examples.size());
    std::map<std::string, Eigen::VectorXd> query_cache;
    for (const auto& ex : dataset.examples) {
        ContrastiveExample ce;
        auto it = query_cache.find(ex.query);
        if (it == query_cache.end()) {
            it = query_cache.emplace(ex.query, embedder.embed_one(ex.query)).first;
        }
        ce.query = it->second;
        auto pos = index.vector_for(ex.positive_id);
        if (!pos) {
            throw ConfigError("stage dataset references chunk missing from index: " +
                              ex.positive_id);
        }
        ce.positive = *pos;
        ce.negatives.reserve(ex.negative_ids.size());
        for (const auto& nid : ex.negative_ids) {
            auto neg = index.vector_for(nid);
            if (!neg) {
                throw ConfigError("stage dataset references chunk missing from index: " + nid);
            }
            ce.negatives.push_back(*neg);
        }
        out.examples.push_back(std::move(ce));
    }
    return out;
}

void seeded_shuffle(std::vector<std::size_t>& order, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    for (std::size_t i = order.size(); i > 1; --i) {
        const std::size_t j = static_cast<std::size_t>(rng() % i);
        std::swap(order[i - 1], order[j]);
    }
}

}  // namespace

AdapterModel train_stage(const AdapterModel& adapter, const StageDataset& dataset,
                         const EmbeddingIndex& index, Embedder& embedder, const TrainConfig& cfg,
                         TrainReport* report) {
    if (dataset.stage < 1 || dataset.stage > 3) throw ConfigError("dataset stage out of range");
    if (cfg.batch_size < 1 || cfg.grad_accumulation < 1 || cfg.epochs < 0) {
        throw ConfigError("train config requires batch_size >= 1, grad_accumulation >= 1, epochs >= 0");
    }
    if (!(cfg.temperature > 0.0)) throw ConfigError("contrastive temperature must be positive");
    if (adapter.dim() != index.dim()) {
        throw ConfigError("adapter dimension " + std::to_string(adapter.dim()) +
                          " does not match index dimension " + std::to_string(index.dim()));
    }

    if (dataset.stage >= 2) {
        const std::string expected = hash_hex(adapter.content_hash());
        if (dataset.manifest.adapter_hash != expected) {
            throw CurriculumOrderError(
                "stage " + std::to_string(dataset.stage) + " dataset was mined with adapter " +
                dataset.manifest.adapter_hash + " but the current adapter is " + expected +
                "; stages must be trained in curriculum order");
        }
    }

    TrainReport local;
    local.stage = dataset.stage;
    if (dataset.examples.empty() || cfg.epochs == 0) {
        local.skipped_empty = dataset.examples.empty();
        local.adapter_hash = hash_hex(adapter.content_hash());
        if (report) *report = local;
        return adapter;
    }

    const auto t0 = std::chrono::steady_clock::now();
    const VectorizedDataset data = vectorize(dataset, index, embedder);
    const std::size_t n = data.examples.size();

    AdapterModel current = adapter;
    const std::uint64_t incoming_hash = adapter.content_hash();
    const double tau = cfg.temperature;
    const std::size_t window_batches = static_cast<std::size_t>(cfg.grad_accumulation);

    std::vector<std::size_t> order(n);
    for (std::size_t i = 0; i < n; ++i) order[i] = i;

    for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
        seeded_shuffle(order, splitmix64(cfg.seed + 1000003ULL * static_cast<std::uint64_t>(dataset.stage) +
                                         static_cast<std::uint64_t>(epoch)));
        double epoch_loss = 0.0;

        Eigen::MatrixXd grad_sum = Eigen::MatrixXd::Zero(current.dim(), current.dim());
        std::size_t window_examples = 0;
        std::size_t batches_in_window = 0;

        auto apply_update = [&]() {
            if (window_examples == 0) return;
            current.weight.noalias() -=
                (cfg.learning_rate / static_cast<double>(window_examples)) * grad_sum;
            grad_sum.setZero();
            window_examples = 0;
            batches_in_window = 0;
            ++local.updates;
        };

        for (std::size_t batch_start = 0; batch_start < n;
             batch_start += static_cast<std::size_t>(cfg.batch_size)) {
            const std::size_t batch_end =
                std::min(n, batch_start + static_cast<std::size_t>(cfg.batch_size));

            for (std::size_t bi = batch_start; bi < batch_end; ++bi) {
                const ContrastiveExample& ex = data.examples[order[bi]];
                double loss = 0.0;
                std::vector<Eigen::VectorXd> negatives;
                if (dataset.stage >= 2) negatives = ex.negatives;
                if (dataset.stage == 1 || cfg.mix_in_batch) {
                    // In-batch negatives: the other positives of this batch.
                    for (std::size_t bj = batch_start; bj < batch_end; ++bj) {
                        if (bj == bi) continue;
                        negatives.push_back(data.examples[order[bj]].positive);
                    }
                }
                grad_sum.noalias() +=
                    infonce_gradient(current, ex.query, ex.positive, negatives, tau, &loss);
                epoch_loss += loss;
                ++window_examples;
                ++local.examples_seen;
            }
            if (++batches_in_window == window_batches) apply_update();
        }
        apply_update();  // flush a partial accumulation window
        local.epoch_mean_loss.push_back(epoch_loss / static_cast<double>(n));
    }

    current.seed = cfg.seed;
    current.parent_hash = incoming_hash;
    AdapterModel result = current.canonical();
    local.adapter_hash = hash_hex(result.content_hash());
    local.wall_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    if (report) *report = local;
    return result;
}

CurriculumRun run_curriculum(const AdapterModel& adapter, const StageDataset& stage1,
                             const StageDataset& stage2, const StageDataset& stage3,
                             const EmbeddingIndex& index, Embedder& embedder,
                             const TrainConfig& cfg, const std::string& checkpoint_dir) {
    namespace fs = std::filesystem;
    if (stage1.stage != 1 || stage2.stage != 2 || stage3.stage != 3) {
        throw ConfigError("run_curriculum expects datasets for stages 1, 2, 3 in order");
    }

    CurriculumRun run;
    run.reports.resize(3);
    AdapterModel current = adapter;
    const StageDataset* stages[3] = {&stage1, &stage2, &stage3};
    for (int i = 0; i < 3; ++i) {
        try {
            current = train_stage(current, *stages[i], index, embedder, cfg, &run.reports[static_cast<std::size_t>(i)]);
        } catch (const CurriculumOrderError& e) {
            throw CurriculumOrderError("stage " + std::to_string(i + 1) + ": " + e.what());
        }
        if (!checkpoint_dir.empty()) {
            fs::create_directories(checkpoint_dir);
            current.save((fs::path(checkpoint_dir) / ("adapter_stage" + std::to_string(i + 1) + ".bin"))
                             .string());
        }
    }
    run.final_adapter = std::move(current);
    return run;
}

}  // namespace acr
