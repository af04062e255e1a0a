#include "acr/ppr.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>

#include <json.hpp>

#include "acr/errors.hpp"

namespace acr {

TransitionMatrix build_transition(const KnowledgeGraph& kg) {
    if (kg.nodes.empty()) throw ConfigError("cannot build transition matrix of an empty graph");
    const Eigen::Index n = static_cast<Eigen::Index>(kg.nodes.size());

    std::vector<Eigen::Triplet<double>> triplets;
    std::vector<double> degree(static_cast<std::size_t>(n), 0.0);
    for (Eigen::Index i = 0; i < n; ++i) {
        const auto& neigh = kg.adjacency[static_cast<std::size_t>(i)];
        degree[static_cast<std::size_t>(i)] = static_cast<double>(neigh.size());
    }

    for (Eigen::Index j = 0; j < n; ++j) {
        const auto& neigh = kg.adjacency[static_cast<std::size_t>(j)];
        if (neigh.empty()) {
            // Isolated node: self-loop keeps the column stochastic.
            triplets.emplace_back(j, j, 1.0);
            continue;
        }
        const double w = 1.0 / degree[static_cast<std::size_t>(j)];
        for (int i : neigh) triplets.emplace_back(i, j, w);
    }

    TransitionMatrix t;
    t.matrix.resize(n, n);
    t.matrix.setFromTriplets(triplets.begin(), triplets.end());
    t.matrix.makeCompressed();
    return t;
}

AprVector approximate_ppr(const TransitionMatrix& w, const std::set<int>& seeds, double alpha,
                          double epsilon) {
    if (seeds.empty()) throw ConfigError("PPR requires a non-empty seed set");
    if (!(alpha > 0.0 && alpha < 1.0)) throw ConfigError("teleport probability must be in (0,1)");
    if (!(epsilon > 0.0)) throw ConfigError("epsilon must be positive");
    const Eigen::Index n = w.size();
    for (int s : seeds) {
        if (s < 0 || s >= n) throw ConfigError("seed id out of range: " + std::to_string(s));
    }

    Eigen::VectorXd chi = Eigen::VectorXd::Zero(n);
    const double mass = 1.0 / static_cast<double>(seeds.size());
    for (int s : seeds) chi[s] = mass;

    AprVector out;
    out.seeds = seeds;
    Eigen::VectorXd apr = chi;
    while (true) {
        Eigen::VectorXd next = alpha * chi + (1.0 - alpha) * (w.matrix * apr);
        const double delta = (next - apr).lpNorm<Eigen::Infinity>();
        apr = std::move(next);
        ++out.iterations;
        if (delta < epsilon) break;
    }
    out.scores = std::move(apr);
    return out;
}

SubgraphResult extract_cohesive_subgraph(const AprVector& apr, int k, double epsilon) {
    if (k < 1) throw ConfigError("maximum subgraph size must be >= 1");
    SubgraphResult res;

    const Eigen::Index n = apr.scores.size();
    std::vector<int> order(static_cast<std::size_t>(n));
    for (Eigen::Index i = 0; i < n; ++i) order[static_cast<std::size_t>(i)] = static_cast<int>(i);
    std::sort(order.begin(), order.end(), [&](int a, int b) {
        if (apr.scores[a] != apr.scores[b]) return apr.scores[a] > apr.scores[b];
        return a < b;
    });

    // Filter trailing terms below the threshold.
    std::vector<int> survivors;
    for (int id : order) {
        if (apr.scores[id] < epsilon) break;  // sorted, so the rest are smaller
        survivors.push_back(id);
    }
    if (survivors.empty()) {
        res.empty_warning = true;
        return res;
    }

    const std::size_t window = std::min<std::size_t>(static_cast<std::size_t>(k), survivors.size());
    if (window <= 1) {
        res.node_ids.assign(survivors.begin(), survivors.begin() + static_cast<std::ptrdiff_t>(window));
        for (int id : res.node_ids) res.apr_values.push_back(apr.scores[id]);
        return res;
    }

    // Largest first difference of -log apr within the window; the prefix up
    // to and including that gap's left element is the community.
    std::size_t best_gap = 0;
    double best_delta = -1.0;
    double prev = -std::log(apr.scores[survivors[0]]);
    for (std::size_t i = 1; i < window; ++i) {
        const double cur = -std::log(apr.scores[survivors[i]]);
        const double delta = cur - prev;
        if (delta > best_delta) {
            best_delta = delta;
            best_gap = i - 1;
        }
        prev = cur;
    }
    res.cut_index = static_cast<int>(best_gap);
    const std::size_t keep = best_gap + 1;
    res.node_ids.assign(survivors.begin(), survivors.begin() + static_cast<std::ptrdiff_t>(keep));
    for (int id : res.node_ids) res.apr_values.push_back(apr.scores[id]);
    return res;
}

QaSubgraphs subgraph_for_qa(const KnowledgeGraph& kg, const TransitionMatrix& w, const QAPair& qa,
                            Embedder* embedder, const PprParams& params_large,
                            const PprParams& params_small) {
    if (params_large.alpha != params_small.alpha || params_large.epsilon != params_small.epsilon) {
        throw ConfigError("the two subgraph extractions share one PPR solve and may differ "
                          "only in their maximum size");
    }
    QaSubgraphs out;
    out.seeds = match_entities(qa, kg, embedder);
    if (out.seeds.empty()) {
        throw ConfigError("no graph entities matched QA pair " + qa.id +
                          "; cannot seed subgraph extraction");
    }
    out.apr = approximate_ppr(w, out.seeds.node_ids, params_large.alpha, params_large.epsilon);
    out.large = extract_cohesive_subgraph(out.apr, params_large.max_subgraph, params_large.epsilon);
    out.small = extract_cohesive_subgraph(out.apr, params_small.max_subgraph, params_small.epsilon);
    return out;
}

void append_subgraph_trace(const std::string& path, const std::string& qa_id,
                           const QaSubgraphs& result) {
    nlohmann::json rec;
    rec["qa_id"] = qa_id;
    rec["iterations"] = result.apr.iterations;
    rec["seeds"] = std::vector<int>(result.seeds.node_ids.begin(), result.seeds.node_ids.end());
    rec["large"] = {{"cut_index", result.large.cut_index},
                    {"members", result.large.node_ids},
                    {"apr", result.large.apr_values}};
    rec["small"] = {{"cut_index", result.small.cut_index},
                    {"members", result.small.node_ids},
                    {"apr", result.small.apr_values}};
    std::ofstream out(path, std::ios::app);
    if (!out) throw IoError("cannot append trace: " + path);
    out << rec.dump() << "\n";
}

}  // namespace acr
