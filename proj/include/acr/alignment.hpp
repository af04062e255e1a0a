#pragma once

// Answer-sufficiency scoring of candidate chunks: forward and backward
// teacher-forced log-likelihood means plus the base retriever's cosine,
// combined into one weighted score that ranks the positive set.

#include <string>
#include <vector>

#include "acr/backends.hpp"
#include "acr/corpus.hpp"
#include "acr/prompts.hpp"

namespace acr {

struct AlignmentWeights {
    double forward = 1.0;
    double backward = 0.3;
    double parameter = 1.0;
};

struct ChunkScore {
    std::string chunk_id;
    double forward = 0.0;    // mean log-likelihood of the answer given (q, t)
    double backward = 0.0;   // mean log-likelihood of the question given (a, t)
    double parameter = 0.0;  // base cosine of question and chunk
    double unified = 0.0;
    bool valid = true;
};

// Mean token log-likelihood of the answer under the forward prompt.
double forward_alignment(const QAPair& qa, const Chunk& chunk, LikelihoodScorer& scorer,
                         const PromptLibrary& prompts);

// Mean token log-likelihood of the question under the backward prompt.
double backward_alignment(const QAPair& qa, const Chunk& chunk, LikelihoodScorer& scorer,
                          const PromptLibrary& prompts);

// Base (un-adapted) embedding cosine of question and chunk text.
double parameter_alignment(const QAPair& qa, const Chunk& chunk, Embedder& embedder);

// Weighted sum, evaluated left to right: wf*sf + wb*sb + wv*sv.
double unified_score(double s_forward, double s_backward, double s_parameter,
                     const AlignmentWeights& weights);

struct ScoredChunks {
    std::vector<ChunkScore> scores;  // ordered by chunk id
    int failed = 0;                  // chunks excluded after a component error
};

// Scores every candidate chunk of the QA pair. A failing component marks the
// chunk invalid and excludes it from ranking rather than imputing a value.
ScoredChunks score_chunks(const QAPair& qa, const std::vector<Chunk>& candidates,
                          LikelihoodScorer& scorer, Embedder& embedder,
                          const AlignmentWeights& weights, const PromptLibrary& prompts);

// Top-M by unified score (descending, chunk-id tiebreak) over valid scores.
std::vector<std::string> select_positives(const std::vector<ChunkScore>& scores, int m);

// Per-QA score records for auditability and curriculum rebuilds.
void append_scores(const std::string& path, const std::string& qa_id,
                   const std::vector<ChunkScore>& scores);
struct ScoreRecord {
    std::string qa_id;
    ChunkScore score;
};
std::vector<ScoreRecord> load_scores(const std::string& path);

}  // namespace acr
