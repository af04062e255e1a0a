#pragma once

// Personalized PageRank by power iteration over the column-stochastic
// transition matrix of the undirected graph view, and cohesive subgraph
// extraction by cutting the sorted scores at the largest first difference of
// their negative logs.

#include <set>
#include <string>
#include <vector>

#include <Eigen/SparseCore>

#include "acr/corpus.hpp"
#include "acr/kg.hpp"

namespace acr {

// W = A^T D^-1 over the undirected view; every column sums to 1. Isolated
// nodes receive a self-loop before normalization so the matrix stays
// stochastic.
struct TransitionMatrix {
    Eigen::SparseMatrix<double> matrix;
    Eigen::Index size() const { return matrix.rows(); }
};

struct PprParams {
    double alpha = 0.85;   // teleport probability
    double epsilon = 1e-4; // sup-norm stopping threshold, doubles as score filter
    int max_subgraph = 200;
};

struct AprVector {
    Eigen::VectorXd scores;      // one entry per node, sums to 1
    std::set<int> seeds;
    int iterations = 0;          // power-iteration updates performed
};

struct SubgraphResult {
    std::vector<int> node_ids;     // descending score, node-id tiebreak
    std::vector<double> apr_values;  // aligned with node_ids
    int cut_index = -1;            // position of the chosen gap, -1 if degenerate
    bool empty_warning = false;    // every score fell below the filter
};

TransitionMatrix build_transition(const KnowledgeGraph& kg);

// Iterates apr <- alpha*chi + (1-alpha)*W*apr from apr = chi until the
// sup-norm step change drops below epsilon. chi spreads teleport mass
// uniformly over the seeds. Throws ConfigError on an empty or out-of-range
// seed set.
AprVector approximate_ppr(const TransitionMatrix& w, const std::set<int>& seeds, double alpha,
                          double epsilon);

// Sharp-drop rule: sort scores descending (node-id tiebreak), drop entries
// below epsilon, map the survivors to -log apr, take first differences over
// the leading min(k, survivors) entries, and keep the prefix ending at the
// largest difference.
SubgraphResult extract_cohesive_subgraph(const AprVector& apr, int k, double epsilon);

struct QaSubgraphs {
    AprVector apr;
    SubgraphResult large;
    SubgraphResult small;
    MatchResult seeds;
};

// One shared PPR solve per QA pair, cut at two maximum sizes.
QaSubgraphs subgraph_for_qa(const KnowledgeGraph& kg, const TransitionMatrix& w, const QAPair& qa,
                            Embedder* embedder, const PprParams& params_large,
                            const PprParams& params_small);

// Optional per-QA trace record (apr values, cut, members) for debugging.
void append_subgraph_trace(const std::string& path, const std::string& qa_id,
                           const QaSubgraphs& result);

}  // namespace acr
