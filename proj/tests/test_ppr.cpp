#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "acr/errors.hpp"
#include "acr/mocks.hpp"
#include "acr/ppr.hpp"
#include "support/oracles.hpp"

using namespace acr;

namespace {

KnowledgeGraph path_graph(int n) {
    std::mt19937_64 rng(0);
    KnowledgeGraph kg = testing::random_connected_graph(2, rng);  // seed shape
    kg.nodes.clear();
    kg.edges.clear();
    for (int i = 0; i < n; ++i) {
        EntityNode node;
        node.id = i;
        node.name = "p" + std::to_string(i);
        kg.nodes.push_back(std::move(node));
    }
    for (int i = 0; i + 1 < n; ++i) {
        RelationEdge e;
        e.source = i;
        e.target = i + 1;
        kg.edges.push_back(std::move(e));
    }
    build_adjacency(kg);
    return kg;
}

AprVector apr_from(std::initializer_list<double> values) {
    AprVector apr;
    apr.scores.resize(static_cast<Eigen::Index>(values.size()));
    Eigen::Index i = 0;
    for (double v : values) apr.scores[i++] = v;
    return apr;
}

}  // namespace

TEST_CASE("build_transition shapes") {
    SUBCASE("two nodes, one undirected edge") {
        auto kg = path_graph(2);
        auto w = build_transition(kg);
        Eigen::MatrixXd dense = Eigen::MatrixXd(w.matrix);
        CHECK(dense(0, 0) == doctest::Approx(0.0));
        CHECK(dense(1, 0) == doctest::Approx(1.0));
        CHECK(dense(0, 1) == doctest::Approx(1.0));
        CHECK(dense(1, 1) == doctest::Approx(0.0));
    }
    SUBCASE("isolated node gets a unit self-loop column") {
        KnowledgeGraph kg = path_graph(2);
        EntityNode iso;
        iso.id = 2;
        iso.name = "iso";
        kg.nodes.push_back(iso);
        build_adjacency(kg);
        auto w = build_transition(kg);
        Eigen::MatrixXd dense = Eigen::MatrixXd(w.matrix);
        CHECK(dense(2, 2) == doctest::Approx(1.0));
        CHECK(dense.col(2).sum() == doctest::Approx(1.0));
    }
    SUBCASE("triangle: every column has two 1/2 entries") {
        KnowledgeGraph kg = path_graph(3);
        RelationEdge e;
        e.source = 0;
        e.target = 2;
        kg.edges.push_back(e);
        build_adjacency(kg);
        auto w = build_transition(kg);
        Eigen::MatrixXd dense = Eigen::MatrixXd(w.matrix);
        for (int j = 0; j < 3; ++j) {
            CHECK(dense.col(j).sum() == doctest::Approx(1.0).epsilon(1e-12));
            int halves = 0;
            for (int i = 0; i < 3; ++i)
                if (dense(i, j) == doctest::Approx(0.5)) ++halves;
            CHECK(halves == 2);
        }
    }
    SUBCASE("columns are stochastic on random graphs") {
        std::mt19937_64 rng(11);
        for (int trial = 0; trial < 10; ++trial) {
            auto kg = testing::random_connected_graph(2 + static_cast<int>(rng() % 40), rng);
            auto w = build_transition(kg);
            Eigen::RowVectorXd colsums = Eigen::RowVectorXd::Ones(w.size()) * w.matrix;
            for (Eigen::Index j = 0; j < w.size(); ++j) {
                CHECK(colsums[j] == doctest::Approx(1.0).epsilon(1e-12));
            }
        }
    }
}

TEST_CASE("approximate_ppr basics") {
    SUBCASE("single node fixed point") {
        auto kg = path_graph(1);
        build_adjacency(kg);
        auto w = build_transition(kg);
        auto apr = approximate_ppr(w, {0}, 0.85, 1e-6);
        CHECK(apr.scores[0] == doctest::Approx(1.0));
    }
    SUBCASE("two-node path, alpha=0.5 converges to [2/3, 1/3]") {
        auto kg = path_graph(2);
        auto w = build_transition(kg);
        auto apr = approximate_ppr(w, {0}, 0.5, 1e-10);
        // Closed form: pr = alpha (I - (1-alpha) W)^-1 chi.
        CHECK(apr.scores[0] == doctest::Approx(2.0 / 3.0).epsilon(1e-8));
        CHECK(apr.scores[1] == doctest::Approx(1.0 / 3.0).epsilon(1e-8));
    }
    SUBCASE("empty seed set is an error") {
        auto kg = path_graph(2);
        auto w = build_transition(kg);
        CHECK_THROWS_AS(approximate_ppr(w, {}, 0.85, 1e-4), ConfigError);
    }
    SUBCASE("out-of-range seed is an error") {
        auto kg = path_graph(2);
        auto w = build_transition(kg);
        CHECK_THROWS_AS(approximate_ppr(w, {5}, 0.85, 1e-4), ConfigError);
    }
}

TEST_CASE("PPR matches the dense solve oracle on random graphs") {
    std::mt19937_64 rng(2024);
    for (double epsilon : {1e-4, 1e-6}) {
        for (int trial = 0; trial < 25; ++trial) {
            const int n = 2 + static_cast<int>(rng() % 49);
            auto kg = testing::random_connected_graph(n, rng);
            auto w = build_transition(kg);

            std::set<int> seeds;
            const int n_seeds = std::min(n, 1 + static_cast<int>(rng() % 3));
            while (static_cast<int>(seeds.size()) < n_seeds) {
                seeds.insert(static_cast<int>(rng() % static_cast<unsigned>(n)));
            }

            auto apr = approximate_ppr(w, seeds, 0.85, epsilon);
            auto exact = testing::dense_ppr(Eigen::MatrixXd(w.matrix), seeds, 0.85);
            CHECK((apr.scores - exact).lpNorm<Eigen::Infinity>() < epsilon);

            // Mass conservation.
            CHECK(apr.scores.sum() == doctest::Approx(1.0).epsilon(1e-9));
            CHECK(apr.scores.minCoeff() >= 0.0);
        }
    }
}

TEST_CASE("iteration count respects the geometric contraction bound") {
    std::mt19937_64 rng(7);
    for (double alpha : {0.5, 0.85, 0.95}) {
        for (int trial = 0; trial < 10; ++trial) {
            const int n = 2 + static_cast<int>(rng() % 49);
            auto kg = testing::random_connected_graph(n, rng);
            auto w = build_transition(kg);
            const double epsilon = 1e-4;
            auto apr = approximate_ppr(w, {0}, alpha, epsilon);
            const int bound =
                static_cast<int>(std::ceil(std::log(epsilon) / std::log(1.0 - alpha))) + 1;
            CHECK(apr.iterations <= bound);
        }
    }
}

TEST_CASE("cohesive cut: worked example") {
    auto apr = apr_from({0.5, 0.3, 0.15, 0.04, 0.01});
    auto res = extract_cohesive_subgraph(apr, 200, 0.02);
    // Survivors' -log values: 0.693, 1.204, 1.897, 3.219; gaps 0.511, 0.693,
    // 1.322; the third gap wins, keeping three nodes.
    REQUIRE(res.node_ids.size() == 3);
    CHECK(res.node_ids == std::vector<int>{0, 1, 2});
    CHECK(res.cut_index == 2);
    CHECK(!res.empty_warning);
}

TEST_CASE("cohesive cut edge cases") {
    SUBCASE("single survivor is kept without a gap") {
        auto apr = apr_from({0.9, 0.001});
        auto res = extract_cohesive_subgraph(apr, 200, 0.01);
        CHECK(res.node_ids == std::vector<int>{0});
        CHECK(res.cut_index == -1);
    }
    SUBCASE("everything below epsilon -> empty with warning") {
        auto apr = apr_from({1e-6, 1e-7});
        auto res = extract_cohesive_subgraph(apr, 200, 1e-4);
        CHECK(res.node_ids.empty());
        CHECK(res.empty_warning);
    }
    SUBCASE("window k bounds the search and the result") {
        auto apr = apr_from({0.4, 0.3, 0.2, 0.05, 0.03, 0.02});
        auto res = extract_cohesive_subgraph(apr, 3, 0.001);
        CHECK(res.node_ids.size() <= 3);
        auto res1 = extract_cohesive_subgraph(apr, 1, 0.001);
        CHECK(res1.node_ids == std::vector<int>{0});
    }
    SUBCASE("ties in score break by node id") {
        auto apr = apr_from({0.2, 0.5, 0.2, 0.05});
        auto res = extract_cohesive_subgraph(apr, 200, 0.01);
        REQUIRE(res.node_ids.size() >= 3);
        CHECK(res.node_ids[0] == 1);
        CHECK(res.node_ids[1] == 0);  // tie with node 2, lower id first
        CHECK(res.node_ids[2] == 2);
    }
}

TEST_CASE("cut agrees with brute-force enumeration on random vectors") {
    std::mt19937_64 rng(99);
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    for (int trial = 0; trial < 1000; ++trial) {
        const int n = 1 + static_cast<int>(rng() % 30);
        Eigen::VectorXd raw(n);
        for (int i = 0; i < n; ++i) raw[i] = std::pow(unif(rng), 3.0) + 1e-9;
        raw /= raw.sum();
        AprVector apr;
        apr.scores = raw;
        const int k = 1 + static_cast<int>(rng() % 12);
        const double epsilon = (trial % 3 == 0) ? 1e-4 : 0.01;

        auto fast = extract_cohesive_subgraph(apr, k, epsilon);
        auto brute = testing::brute_force_cut(raw, k, epsilon);
        CHECK(fast.node_ids == brute);
    }
}

TEST_CASE("subgraph_for_qa shares one solve and nests by size") {
    // Star of one guild with keeper/answer triangle, as the synthetic corpus
    // builds them.
    auto kg = build_graph({
        ExtractionRecord{"c0",
                         {{"Zyq", "T", ""}, {"Vex", "T", ""}, {"Gild", "T", ""}},
                         {{"Vex", "Gild", "serves", 1}, {"Vex", "Zyq", "guards", 1},
                          {"Zyq", "Gild", "empowers", 1}},
                         0},
        ExtractionRecord{"c1", {{"Fero", "T", ""}, {"Rim", "T", ""}},
                         {{"Fero", "Gild", "supports", 1}, {"Fero", "Rim", "admires", 1}}, 0},
    });
    auto w = build_transition(kg);
    MockHashEmbedder embedder(64, 3);
    embed_nodes(kg, embedder);

    QAPair qa{"q0", "d", "Which relic of Gild ?", "Zyq"};
    PprParams large{0.85, 1e-4, 200};
    PprParams small{0.85, 1e-4, 3};
    auto subs = subgraph_for_qa(kg, w, qa, &embedder, large, small);

    CHECK(subs.seeds.node_ids.size() == 2);  // answer + guild
    REQUIRE(!subs.large.node_ids.empty());
    REQUIRE(!subs.small.node_ids.empty());
    CHECK(subs.small.node_ids.size() <= subs.large.node_ids.size());
    // Small result is a prefix of the large one (same ordering, same apr).
    for (std::size_t i = 0; i < subs.small.node_ids.size(); ++i) {
        CHECK(subs.small.node_ids[i] == subs.large.node_ids[i]);
    }

    QAPair hopeless{"q1", "d", "nothing matches here", "nope"};
    CHECK_THROWS_AS(subgraph_for_qa(kg, w, hopeless, nullptr, large, small), ConfigError);
}

TEST_CASE("prefix property on random apr vectors") {
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    for (int trial = 0; trial < 200; ++trial) {
        const int n = 2 + static_cast<int>(rng() % 40);
        Eigen::VectorXd raw(n);
        for (int i = 0; i < n; ++i) raw[i] = unif(rng) + 1e-9;
        raw /= raw.sum();
        AprVector apr;
        apr.scores = raw;

        auto large = extract_cohesive_subgraph(apr, 200, 1e-4);
        auto small = extract_cohesive_subgraph(apr, 5, 1e-4);
        if (small.node_ids.size() <= large.node_ids.size()) {
            for (std::size_t i = 0; i < small.node_ids.size(); ++i) {
                CHECK(small.node_ids[i] == large.node_ids[i]);
            }
        }
    }
}
