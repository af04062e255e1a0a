#pragma once

// Evaluation utilities: token-level F1 with QA-style normalization,
// retrieval diagnostics, and pairwise win-rate aggregation.

#include <optional>
#include <set>
#include <string>
#include <vector>

#include "acr/backends.hpp"

namespace acr {

struct F1Result {
    double precision = 0.0;
    double recall = 0.0;
    double f1 = 0.0;
};

// Normalizes both strings (lowercase, punctuation stripped, articles a/an/the
// dropped, whitespace collapsed) and scores token-multiset overlap. The
// normalization is the common QA convention and can be bypassed by
// pre-normalizing and setting normalize=false.
F1Result token_f1(const std::string& prediction, const std::string& gold, bool normalize = true);

// Fraction of the relevant set present in the first k results. An empty
// relevant set is reported as 0 (and flagged via undefined when provided).
double recall_at_k(const std::vector<std::string>& results, const std::set<std::string>& relevant,
                   int k, bool* undefined = nullptr);

// Reciprocal rank of the first relevant result, 0 if none appears.
double mrr(const std::vector<std::string>& results, const std::set<std::string>& relevant,
           bool* undefined = nullptr);

enum class Criterion { Faithfulness, Conciseness, Overall };

struct JudgeVerdict {
    std::string qa_id;
    JudgeOutcome outcome;
};

struct WinRateResult {
    std::optional<double> value;  // empty when every verdict was excluded
    int excluded = 0;             // None verdicts (the formula's 0/0 case)
};

// Per-query contribution: 1 for an A1 win, 0 for an A2 win, 0.5 for a Tie;
// None verdicts are excluded from numerator and denominator.
WinRateResult compute_win_rate(const std::vector<JudgeVerdict>& verdicts, Criterion criterion);

}  // namespace acr
