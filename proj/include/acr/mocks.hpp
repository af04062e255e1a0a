#pragma once

// Deterministic mock backends. Every mock is a pure function of its inputs
// plus the seed carried in its config: two runs with equal config produce
// byte-identical outputs. They double as the offline test oracles and as the
// model layer of the synthetic end-to-end harness.

#include <cstdint>
#include <set>
#include <string>
#include <vector>

#include "acr/backends.hpp"
#include "acr/prompts.hpp"

namespace acr {

// Capitalized-token spans become entities (consecutive capitalized tokens
// merge into one span); two entities co-occurring in a sentence become a
// relation whose description is the text between them. The first entity of
// a sentence is typed PERSON, later ones ORG.
class MockEntityExtractor : public EntityExtractor {
public:
    ExtractionRecord extract(const Chunk& chunk) override;
    std::string id() const override { return "mock-extract-capspan"; }
};

// Uniform distribution over a fixed vocabulary: every target token scores
// -log(vocab_size).
class MockUniformScorer : public LikelihoodScorer {
public:
    explicit MockUniformScorer(std::size_t vocab_size = 4) : vocab_(vocab_size) {}
    TokenLogProbs score(const std::string& prompt, const std::string& target) override;
    std::string id() const override { return "mock-score-uniform-v" + std::to_string(vocab_); }

private:
    std::size_t vocab_;
};

// logp_i = -(1 + (hash(prompt || target || i) mod 100) / 100): reproducible
// pseudo-random values in [-2, -1).
class MockHashScorer : public LikelihoodScorer {
public:
    explicit MockHashScorer(std::uint64_t seed = 0) : seed_(seed) {}
    TokenLogProbs score(const std::string& prompt, const std::string& target) override;
    std::string id() const override { return "mock-score-hash-seed" + std::to_string(seed_); }

private:
    std::uint64_t seed_;
};

// Answer-sufficiency mock: -0.1 per token when the probe string occurs in
// the prompt's context section, -3.0 otherwise. For forward-style prompts
// the probe is the scoring target (the answer); for backward-style prompts
// it is the answer field embedded in the prompt. Section markers follow the
// shipped prompt templates ("Context:", "Answer:", "Question:").
class ContainsAnswerScorer : public LikelihoodScorer {
public:
    static constexpr double kHitLogProb = -0.1;
    static constexpr double kMissLogProb = -3.0;

    TokenLogProbs score(const std::string& prompt, const std::string& target) override;
    std::string id() const override { return "mock-score-contains-answer"; }
};

// Character-3-gram hashing embedder: each gram of the lowercased text adds
// +1/-1 (by hash bit) to one of `dim` buckets, then the vector is L2
// normalized. Equal strings embed equally; unrelated strings are nearly
// orthogonal for large dim.
class MockHashEmbedder : public Embedder {
public:
    explicit MockHashEmbedder(Eigen::Index dim = 64, std::uint64_t seed = 0)
        : dim_(dim), seed_(seed) {}

    std::vector<EmbeddingVector> embed(const std::vector<std::string>& texts) override;
    Eigen::Index dimension() const override { return dim_; }
    std::string id() const override {
        return "mock-embed-ngram" + std::to_string(dim_) + "-seed" + std::to_string(seed_);
    }

private:
    Eigen::Index dim_;
    std::uint64_t seed_;
};

// Fixed template table cycling over the query-transformation categories
// (comparison, causal, quotation, perspective shift), instantiated with the
// provided entity names. With no entities it falls back to paraphrase
// templates of the original question. Always returns exactly n queries,
// none equal to the original question.
class MockQueryAugmenter : public QueryAugmenter {
public:
    explicit MockQueryAugmenter(std::uint64_t seed = 0) : seed_(seed) {}
    AugmentResult augment(const QAPair& qa, const std::vector<AugmentEntity>& entities,
                          int n) override;
    std::string id() const override { return "mock-augment-templates-seed" + std::to_string(seed_); }

private:
    std::uint64_t seed_;
};

// Deterministic judge: the disqualification rule fires on answers equal to
// "unanswerable"; otherwise faithfulness goes to the answer with higher
// token overlap against the ground truth, conciseness to the shorter
// answer, and overall follows faithfulness then conciseness.
class MockPairJudge : public PairJudge {
public:
    JudgeOutcome judge(const std::string& question, const std::string& ground_truth,
                       const std::string& answer1, const std::string& answer2) override;
    std::string id() const override { return "mock-judge-overlap"; }
};

}  // namespace acr
