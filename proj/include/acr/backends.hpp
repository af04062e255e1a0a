#pragma once

// Capability contracts for every model-dependent step in the pipeline:
// entity extraction, teacher-forced likelihood scoring, embedding, query
// augmentation and pairwise judging. Each capability has a remote HTTP
// implementation (remote.hpp) and a deterministic mock (mocks.hpp); the
// pipeline only ever sees these interfaces.

#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "acr/corpus.hpp"

namespace acr {

struct BackendConfig {
    std::string endpoint;        // e.g. http://127.0.0.1:8080
    std::string model;
    std::string credential_env;  // name of env var holding the API key
    double timeout_seconds = 30.0;
    int max_retries = 2;
    int backoff_ms = 250;        // base for exponential backoff
    int max_in_flight = 4;
    bool supports_logprobs = false;
    std::uint64_t seed = 0;      // mocks only
    std::string audit_log;       // optional request/response JSONL
};

struct ExtractedEntity {
    std::string name;
    std::string type;
    std::string description;
};

struct ExtractedRelation {
    std::string source;
    std::string target;
    std::string description;
    double strength = 1.0;
};

struct ExtractionRecord {
    std::string chunk_id;
    std::vector<ExtractedEntity> entities;
    std::vector<ExtractedRelation> relations;
    int skipped_lines = 0;  // malformed tuple lines in the raw output
};

// Per-token log-probabilities of a target under teacher forcing; one value
// per target token, all <= 0.
using TokenLogProbs = std::vector<double>;

// Unit L2 norm after ingest normalization.
using EmbeddingVector = Eigen::VectorXd;

// Entity payload handed to the query augmenter (Listing-style name / type /
// descriptions object).
struct AugmentEntity {
    std::string name;
    std::string type;
    std::vector<std::string> descriptions;
};

struct AugmentResult {
    std::vector<std::string> queries;
    bool degraded = false;  // backend returned fewer than requested; padded
};

enum class Winner { A1, A2, Tie, None };

struct JudgeOutcome {
    Winner faithfulness = Winner::None;
    Winner conciseness = Winner::None;
    Winner overall = Winner::None;
};

class EntityExtractor {
public:
    virtual ~EntityExtractor() = default;
    virtual ExtractionRecord extract(const Chunk& chunk) = 0;
    virtual std::string id() const = 0;
};

class LikelihoodScorer {
public:
    virtual ~LikelihoodScorer() = default;
    // Log-probability of each target token conditioned on prompt plus the
    // preceding target tokens.
    virtual TokenLogProbs score(const std::string& prompt, const std::string& target) = 0;
    virtual std::string id() const = 0;
};

class Embedder {
public:
    virtual ~Embedder() = default;
    // Order-preserving, one unit vector per input.
    virtual std::vector<EmbeddingVector> embed(const std::vector<std::string>& texts) = 0;
    virtual Eigen::Index dimension() const = 0;
    virtual std::string id() const = 0;

    EmbeddingVector embed_one(const std::string& text) {
        return embed(std::vector<std::string>{text}).front();
    }
};

class QueryAugmenter {
public:
    virtual ~QueryAugmenter() = default;
    virtual AugmentResult augment(const QAPair& qa, const std::vector<AugmentEntity>& entities,
                                  int n) = 0;
    virtual std::string id() const = 0;
};

class PairJudge {
public:
    virtual ~PairJudge() = default;
    virtual JudgeOutcome judge(const std::string& question, const std::string& ground_truth,
                               const std::string& answer1, const std::string& answer2) = 0;
    virtual std::string id() const = 0;
};

// Parses the frozen tuple grammar of the extraction prompt:
//   ("entity"<|>NAME<|>TYPE<|>DESCRIPTION)
//   ("relationship"<|>SOURCE<|>TARGET<|>DESCRIPTION<|>STRENGTH)
// Well-formed lines become entities/relations; anything else is skipped and
// counted. Never throws.
ExtractionRecord parse_extraction_output(const std::string& raw);

const char* winner_name(Winner w);
Winner winner_from_name(const std::string& name);

}  // namespace acr
