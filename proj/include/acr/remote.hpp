#pragma once

// Remote implementations of the backend contracts over an HTTP JSON
// interface: chat-completion style for extraction/augmentation/judging, a
// completion-with-token-logprobs endpoint for likelihood scoring, and an
// embedding endpoint returning float arrays.
//
// Every transport failure is retried with exponential backoff and surfaces
// as an explicit BackendError; nothing is silently dropped. Requests and
// responses can be mirrored to an audit JSONL file.

#include <memory>
#include <string>

#include "acr/backends.hpp"
#include "acr/prompts.hpp"

namespace acr {

class RemoteTransport;  // one HTTP client + retry/audit/in-flight policy

std::shared_ptr<RemoteTransport> make_transport(const BackendConfig& cfg);

class RemoteEntityExtractor : public EntityExtractor {
public:
    RemoteEntityExtractor(const BackendConfig& cfg, PromptLibrary prompts);
    ExtractionRecord extract(const Chunk& chunk) override;
    std::string id() const override;

private:
    std::shared_ptr<RemoteTransport> transport_;
    PromptLibrary prompts_;
};

class RemoteLikelihoodScorer : public LikelihoodScorer {
public:
    // The config must declare logprob support; a backend without it is a
    // configuration-time error, not a call-time one.
    explicit RemoteLikelihoodScorer(const BackendConfig& cfg);
    TokenLogProbs score(const std::string& prompt, const std::string& target) override;
    std::string id() const override;

private:
    std::shared_ptr<RemoteTransport> transport_;
};

class RemoteEmbedder : public Embedder {
public:
    explicit RemoteEmbedder(const BackendConfig& cfg);
    std::vector<EmbeddingVector> embed(const std::vector<std::string>& texts) override;
    Eigen::Index dimension() const override;
    std::string id() const override;

private:
    std::shared_ptr<RemoteTransport> transport_;
    Eigen::Index dim_ = 0;  // fixed by the first response; drift is fatal
};

class RemoteQueryAugmenter : public QueryAugmenter {
public:
    RemoteQueryAugmenter(const BackendConfig& cfg, PromptLibrary prompts);
    // Parses the JSON object's confusing_questions list; a short response is
    // padded from the deterministic template mock and flagged degraded.
    AugmentResult augment(const QAPair& qa, const std::vector<AugmentEntity>& entities,
                          int n) override;
    std::string id() const override;

private:
    std::shared_ptr<RemoteTransport> transport_;
    PromptLibrary prompts_;
};

class RemotePairJudge : public PairJudge {
public:
    RemotePairJudge(const BackendConfig& cfg, PromptLibrary prompts);
    // Unparseable verdicts come back as None (raw payload kept in the audit
    // log), matching the win-rate exclusion path.
    JudgeOutcome judge(const std::string& question, const std::string& ground_truth,
                       const std::string& answer1, const std::string& answer2) override;
    std::string id() const override;

private:
    std::shared_ptr<RemoteTransport> transport_;
    PromptLibrary prompts_;
};

}  // namespace acr
