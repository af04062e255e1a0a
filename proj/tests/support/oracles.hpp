#pragma once

// Test-only oracles, independent of the implementation paths they check:
// a dense linear solve for PPR, brute-force cut enumeration for the
// cohesive-subgraph rule, and central finite differences for the InfoNCE
// gradient.

#include <algorithm>
#include <cmath>
#include <random>
#include <vector>

#include <Eigen/Dense>

#include "acr/adapter.hpp"
#include "acr/kg.hpp"
#include "acr/trainer.hpp"

namespace acr::testing {

// Exact stationary solution of pr = alpha*chi + (1-alpha)*W*pr via a dense
// solve of (I - (1-alpha)W) pr = alpha*chi.
inline Eigen::VectorXd dense_ppr(const Eigen::MatrixXd& w, const std::set<int>& seeds,
                                 double alpha) {
    const Eigen::Index n = w.rows();
    Eigen::VectorXd chi = Eigen::VectorXd::Zero(n);
    for (int s : seeds) chi[s] = 1.0 / static_cast<double>(seeds.size());
    const Eigen::MatrixXd system = Eigen::MatrixXd::Identity(n, n) - (1.0 - alpha) * w;
    return system.partialPivLu().solve(alpha * chi);
}

// Brute-force reference for the sharp-drop cut: sorts, filters, enumerates
// every cut position and keeps the one after the largest -log gap (first
// occurrence on ties). Returns the kept node ids.
inline std::vector<int> brute_force_cut(const Eigen::VectorXd& scores, int k, double epsilon) {
    std::vector<int> order(static_cast<std::size_t>(scores.size()));
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = static_cast<int>(i);
    std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
        if (scores[a] != scores[b]) return scores[a] > scores[b];
        return a < b;
    });
    std::vector<int> survivors;
    for (int id : order) {
        if (scores[id] >= epsilon) survivors.push_back(id);
    }
    if (survivors.empty()) return {};
    const std::size_t window = std::min<std::size_t>(static_cast<std::size_t>(k), survivors.size());
    if (window <= 1) return {survivors.begin(), survivors.begin() + static_cast<long>(window)};

    std::size_t best_cut = 0;  // index of the left element of the best gap
    double best = -1.0;
    for (std::size_t i = 0; i + 1 < window; ++i) {
        const double gap = -std::log(scores[survivors[i + 1]]) + std::log(scores[survivors[i]]);
        if (gap > best) {
            best = gap;
            best_cut = i;
        }
    }
    return {survivors.begin(), survivors.begin() + static_cast<long>(best_cut + 1)};
}

// Random connected undirected graph as a KnowledgeGraph skeleton (no
// embeddings): a spanning tree plus extra random edges.
inline KnowledgeGraph random_connected_graph(int n, std::mt19937_64& rng) {
    KnowledgeGraph kg;
    for (int i = 0; i < n; ++i) {
        EntityNode node;
        node.id = i;
        node.name = "n" + std::to_string(i);
        node.type = "NODE";
        node.chunk_ids.insert("c");
        kg.nodes.push_back(std::move(node));
    }
    auto add_edge = [&](int a, int b) {
        if (a == b || kg.has_edge(a, b, EdgeKind::Extracted)) return;
        RelationEdge e;
        e.source = a;
        e.target = b;
        e.description = "r";
        kg.edges.push_back(std::move(e));
    };
    for (int i = 1; i < n; ++i) add_edge(static_cast<int>(rng() % static_cast<unsigned>(i)), i);
    const int extra = n / 2;
    for (int i = 0; i < extra; ++i) {
        add_edge(static_cast<int>(rng() % static_cast<unsigned>(n)),
                 static_cast<int>(rng() % static_cast<unsigned>(n)));
    }
    build_adjacency(kg);
    return kg;
}

// Central finite differences of the InfoNCE loss with respect to W.
inline Eigen::MatrixXd finite_difference_gradient(const AdapterModel& adapter,
                                                  const Eigen::VectorXd& query,
                                                  const Eigen::VectorXd& positive,
                                                  const std::vector<Eigen::VectorXd>& negatives,
                                                  double tau, double h = 1e-5) {
    const Eigen::Index d = adapter.dim();
    Eigen::MatrixXd grad(d, d);
    AdapterModel probe = adapter;
    for (Eigen::Index r = 0; r < d; ++r) {
        for (Eigen::Index c = 0; c < d; ++c) {
            const double saved = probe.weight(r, c);
            probe.weight(r, c) = saved + h;
            const double up = infonce_loss(probe, query, positive, negatives, tau);
            probe.weight(r, c) = saved - h;
            const double down = infonce_loss(probe, query, positive, negatives, tau);
            probe.weight(r, c) = saved;
            grad(r, c) = (up - down) / (2.0 * h);
        }
    }
    return grad;
}

}  // namespace acr::testing
