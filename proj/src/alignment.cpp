#include "acr/alignment.hpp"

#include <algorithm>
#include <fstream>
#include <numeric>

#include <json.hpp>

#include "acr/adapter.hpp"
#include "acr/errors.hpp"
#include "acr/jsonl.hpp"

namespace acr {

using nlohmann::json;

namespace {

double mean_logprob(const TokenLogProbs& lp, const std::string& what) {
    if (lp.empty()) throw BackendError("scorer returned zero tokens for " + what);
    return std::accumulate(lp.begin(), lp.end(), 0.0) / static_cast<double>(lp.size());
}

}  // namespace

double forward_alignment(const QAPair& qa, const Chunk& chunk, LikelihoodScorer& scorer,
                         const PromptLibrary& prompts) {
    if (qa.answer.empty()) throw ConfigError("forward alignment needs a non-empty answer");
    const std::string prompt = render_forward_prompt(prompts, chunk.text, qa.question);
    try {
        return mean_logprob(scorer.score(prompt, qa.answer), "answer");
    } catch (const BackendError& e) {
        throw BackendError(e.what(), chunk.id);
    }
}

double backward_alignment(const QAPair& qa, const Chunk& chunk, LikelihoodScorer& scorer,
                          const PromptLibrary& prompts) {
    if (qa.question.empty()) throw ConfigError("backward alignment needs a non-empty question");
    const std::string prompt = render_backward_prompt(prompts, chunk.text, qa.answer);
    try {
        return mean_logprob(scorer.score(prompt, qa.question), "question");
    } catch (const BackendError& e) {
        throw BackendError(e.what(), chunk.id);
    }
}

double parameter_alignment(const QAPair& qa, const Chunk& chunk, Embedder& embedder) {
    const auto vecs = embedder.embed({qa.question, chunk.text});
    return cosine(vecs[0], vecs[1]);
}

double unified_score(double s_forward, double s_backward, double s_parameter,
                     const AlignmentWeights& weights) {
    return weights.forward * s_forward + weights.backward * s_backward +
           weights.parameter * s_parameter;
}

ScoredChunks score_chunks(const QAPair& qa, const std::vector<Chunk>& candidates,
                          LikelihoodScorer& scorer, Embedder& embedder,
                          const AlignmentWeights& weights, const PromptLibrary& prompts) {
    std::vector<const Chunk*> order;
    order.reserve(candidates.size());
    for (const auto& c : candidates) order.push_back(&c);
    std::sort(order.begin(), order.end(),
              [](const Chunk* a, const Chunk* b) { return a->id < b->id; });

    ScoredChunks out;
    out.scores.reserve(order.size());
    for (const Chunk* c : order) {
        ChunkScore s;
        s.chunk_id = c->id;
        try {
            s.forward = forward_alignment(qa, *c, scorer, prompts);
            s.backward = backward_alignment(qa, *c, scorer, prompts);
            s.parameter = parameter_alignment(qa, *c, embedder);
            s.unified = unified_score(s.forward, s.backward, s.parameter, weights);
        } catch (const BackendError&) {
            s.valid = false;
            ++out.failed;
        }
        out.scores.push_back(std::move(s));
    }
    return out;
}

std::vector<std::string> select_positives(const std::vector<ChunkScore>& scores, int m) {
    if (m < 1) throw ConfigError("positive set size must be >= 1");
    std::vector<const ChunkScore*> valid;
    for (const auto& s : scores)
        if (s.valid) valid.push_back(&s);
    std::sort(valid.begin(), valid.end(), [](const ChunkScore* a, const ChunkScore* b) {
        if (a->unified != b->unified) return a->unified > b->unified;
        return a->chunk_id < b->chunk_id;
    });
    if (valid.size() > static_cast<std::size_t>(m)) valid.resize(static_cast<std::size_t>(m));
    std::vector<std::string> ids;
    ids.reserve(valid.size());
    for (const auto* s : valid) ids.push_back(s->chunk_id);
    return ids;
}

void append_scores(const std::string& path, const std::string& qa_id,
                   const std::vector<ChunkScore>& scores) {
    std::ofstream out(path, std::ios::app | std::ios::binary);
    if (!out) throw IoError("cannot append scores: " + path);
    for (const auto& s : scores) {
        json rec{{"qa_id", qa_id},       {"chunk_id", s.chunk_id}, {"s_f", s.forward},
                 {"s_b", s.backward},    {"s_v", s.parameter},     {"s", s.unified},
                 {"valid", s.valid}};
        out << rec.dump() << "\n";
    }
}

std::vector<ScoreRecord> load_scores(const std::string& path) {
    std::vector<ScoreRecord> out;
    for_each_jsonl(path, [&](const json& rec, long line) {
        ScoreRecord r;
        r.qa_id = require_field<std::string>(rec, "qa_id", line);
        r.score.chunk_id = require_field<std::string>(rec, "chunk_id", line);
        r.score.forward = require_field<double>(rec, "s_f", line);
        r.score.backward = require_field<double>(rec, "s_b", line);
        r.score.parameter = require_field<double>(rec, "s_v", line);
        r.score.unified = require_field<double>(rec, "s", line);
        r.score.valid = require_field<bool>(rec, "valid", line);
        out.push_back(std::move(r));
    });
    return out;
}

}  // namespace acr
