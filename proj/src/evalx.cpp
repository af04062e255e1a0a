#include "acr/evalx.hpp"

#include <algorithm>
#include <cctype>
#include <map>

#include "acr/errors.hpp"

namespace acr {

namespace {

std::vector<std::string> normalized_tokens(const std::string& text, bool normalize) {
    std::vector<std::string> tokens;
    std::string cur;
    auto flush = [&]() {
        if (!cur.empty()) {
            if (!normalize || (cur != "a" && cur != "an" && cur != "the")) tokens.push_back(cur);
            cur.clear();
        }
    };
    for (char c : text) {
        const unsigned char uc = static_cast<unsigned char>(c);
        if (std::isspace(uc) || (normalize && std::ispunct(uc))) {
            flush();
            continue;
        }
        cur.push_back(normalize ? static_cast<char>(std::tolower(uc)) : c);
    }
    flush();
    return tokens;
}

}  // namespace

F1Result token_f1(const std::string& prediction, const std::string& gold, bool normalize) {
    const auto pred = normalized_tokens(prediction, normalize);
    const auto ref = normalized_tokens(gold, normalize);

    F1Result r;
    if (pred.empty() && ref.empty()) {
        r.precision = r.recall = r.f1 = 1.0;
        return r;
    }
    if (pred.empty() || ref.empty()) return r;

    std::map<std::string, int> bag;
    for (const auto& t : ref) bag[t]++;
    int overlap = 0;
    for (const auto& t : pred) {
        auto it = bag.find(t);
        if (it != bag.end() && it->second > 0) {
            --it->second;
            ++overlap;
        }
    }
    r.precision = static_cast<double>(overlap) / static_cast<double>(pred.size());
    r.recall = static_cast<double>(overlap) / static_cast<double>(ref.size());
    if (r.precision + r.recall > 0.0) {
        r.f1 = 2.0 * r.precision * r.recall / (r.precision + r.recall);
    }
    return r;
}

double recall_at_k(const std::vector<std::string>& results, const std::set<std::string>& relevant,
                   int k, bool* undefined) {
    if (k < 1) throw ConfigError("recall@k requires k >= 1");
    if (undefined) *undefined = relevant.empty();
    if (relevant.empty()) return 0.0;
    int hits = 0;
    const std::size_t depth = std::min<std::size_t>(results.size(), static_cast<std::size_t>(k));
    for (std::size_t i = 0; i < depth; ++i) {
        if (relevant.count(results[i])) ++hits;
    }
    return static_cast<double>(hits) / static_cast<double>(relevant.size());
}

double mrr(const std::vector<std::string>& results, const std::set<std::string>& relevant,
           bool* undefined) {
    if (undefined) *undefined = relevant.empty();
    if (relevant.empty()) return 0.0;
    for (std::size_t i = 0; i < results.size(); ++i) {
        if (relevant.count(results[i])) return 1.0 / static_cast<double>(i + 1);
    }
    return 0.0;
}

WinRateResult compute_win_rate(const std::vector<JudgeVerdict>& verdicts, Criterion criterion) {
    if (verdicts.empty()) throw ConfigError("win rate needs at least one verdict");
    WinRateResult out;
    double numerator = 0.0;
    int counted = 0;
    for (const auto& v : verdicts) {
        Winner w = Winner::None;
        switch (criterion) {
            case Criterion::Faithfulness: w = v.outcome.faithfulness; break;
            case Criterion::Conciseness: w = v.outcome.conciseness; break;
            case Criterion::Overall: w = v.outcome.overall; break;
        }
        switch (w) {
            case Winner::A1: numerator += 1.0; ++counted; break;
            case Winner::A2: ++counted; break;
            case Winner::Tie: numerator += 0.5; ++counted; break;
            case Winner::None: ++out.excluded; break;
        }
    }
    if (counted > 0) out.value = numerator / static_cast<double>(counted);
    return out;
}

}  // namespace acr
