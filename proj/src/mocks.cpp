#include "acr/mocks.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <map>

#include "acr/hashing.hpp"
#include "acr/tokenizer.hpp"

namespace acr {

namespace {

bool is_upper_start(const std::string& tok) {
    return !tok.empty() && std::isupper(static_cast<unsigned char>(tok[0])) != 0;
}

bool is_word(const std::string& tok) {
    return !tok.empty() && std::isalnum(static_cast<unsigned char>(tok[0])) != 0;
}

std::string to_lower(std::string s) {
    for (char& c : s) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    return s;
}

std::string trim(const std::string& s) {
    std::size_t a = s.find_first_not_of(" \t\r\n");
    if (a == std::string::npos) return {};
    std::size_t b = s.find_last_not_of(" \t\r\n");
    return s.substr(a, b - a + 1);
}

std::vector<std::vector<std::string>> split_sentences(const std::vector<std::string>& tokens) {
    std::vector<std::vector<std::string>> sentences(1);
    for (const auto& tok : tokens) {
        sentences.back().push_back(tok);
        if (!tok.empty() && (tok[0] == '.' || tok[0] == '!' || tok[0] == '?')) {
            sentences.emplace_back();
        }
    }
    while (!sentences.empty() && sentences.back().empty()) sentences.pop_back();
    return sentences;
}

}  // namespace

ExtractionRecord MockEntityExtractor::extract(const Chunk& chunk) {
    ExtractionRecord rec;
    rec.chunk_id = chunk.id;
    Tokenizer tok;
    const auto sentences = split_sentences(tok.tokenize(chunk.text));

    std::map<std::string, std::size_t> seen;  // name -> index in rec.entities
    for (const auto& sentence : sentences) {
        // Capitalized spans in this sentence, in order of appearance.
        struct Span {
            std::string name;
            std::size_t token_after;  // first token index past the span
        };
        std::vector<Span> spans;
        std::size_t i = 0;
        while (i < sentence.size()) {
            if (is_upper_start(sentence[i])) {
                std::string name = sentence[i];
                std::size_t j = i + 1;
                while (j < sentence.size() && is_upper_start(sentence[j])) {
                    name += " " + sentence[j];
                    ++j;
                }
                spans.push_back({name, j});
                i = j;
            } else {
                ++i;
            }
        }
        for (std::size_t s = 0; s < spans.size(); ++s) {
            const std::string type = (s == 0) ? "PERSON" : "ORG";
            if (!seen.count(spans[s].name)) {
                seen[spans[s].name] = rec.entities.size();
                rec.entities.push_back({spans[s].name, type, "mentioned in " + chunk.id});
            }
        }
        // Consecutive co-occurring spans relate; the words between them are
        // the relation description.
        for (std::size_t s = 0; s + 1 < spans.size(); ++s) {
            std::string between;
            std::size_t from = spans[s].token_after;
            std::size_t to = from;
            // Walk until the start of the next span's first token.
            std::size_t next_start = spans[s + 1].token_after;
            // Recover the next span's start by counting its words.
            std::size_t next_len = 1 + static_cast<std::size_t>(std::count(
                                           spans[s + 1].name.begin(), spans[s + 1].name.end(), ' '));
            next_start -= next_len;
            for (to = from; to < next_start; ++to) {
                if (!is_word(sentence[to])) continue;
                if (!between.empty()) between += " ";
                between += to_lower(sentence[to]);
            }
            if (between.empty()) between = "related";
            rec.relations.push_back({spans[s].name, spans[s + 1].name, between, 1.0});
        }
    }
    return rec;
}

TokenLogProbs MockUniformScorer::score(const std::string& /*prompt*/, const std::string& target) {
    Tokenizer tok;
    const std::size_t n = tok.count(target);
    return TokenLogProbs(n, -std::log(static_cast<double>(vocab_)));
}

TokenLogProbs MockHashScorer::score(const std::string& prompt, const std::string& target) {
    Tokenizer tok;
    const std::size_t n = tok.count(target);
    TokenLogProbs out(n);
    for (std::size_t i = 0; i < n; ++i) {
        std::uint64_t h = fnv1a64(prompt, seed_ == 0 ? kFnvOffset : splitmix64(seed_));
        h = fnv1a64(target, h);
        h = fnv1a64(std::to_string(i), h);
        out[i] = -(1.0 + static_cast<double>(h % 100) / 100.0);
    }
    return out;
}

TokenLogProbs ContainsAnswerScorer::score(const std::string& prompt, const std::string& target) {
    // Pull the context section out of the rendered prompt.
    std::string context = prompt;
    std::string probe = target;
    const std::size_t ctx_pos = prompt.find("Context:");
    if (ctx_pos != std::string::npos) {
        const std::size_t ctx_start = ctx_pos + std::string("Context:").size();
        const std::size_t q_pos = prompt.find("Question:", ctx_start);
        const std::size_t a_pos = prompt.find("Answer:", ctx_start);
        const std::size_t ctx_end = std::min(q_pos == std::string::npos ? prompt.size() : q_pos,
                                             a_pos == std::string::npos ? prompt.size() : a_pos);
        context = trim(prompt.substr(ctx_start, ctx_end - ctx_start));
        // Backward-style prompt: the answer precedes the trailing
        // "Question:" marker and is the probe instead of the target.
        if (a_pos != std::string::npos && q_pos != std::string::npos && a_pos < q_pos) {
            const std::size_t ans_start = a_pos + std::string("Answer:").size();
            probe = trim(prompt.substr(ans_start, q_pos - ans_start));
        }
    }
    Tokenizer tok;
    const std::size_t n = tok.count(target);
    const bool hit = !probe.empty() && context.find(trim(probe)) != std::string::npos;
    return TokenLogProbs(n, hit ? kHitLogProb : kMissLogProb);
}

std::vector<EmbeddingVector> MockHashEmbedder::embed(const std::vector<std::string>& texts) {
    std::vector<EmbeddingVector> out;
    out.reserve(texts.size());
    const std::uint64_t base = seed_ == 0 ? kFnvOffset : splitmix64(seed_);
    for (const auto& text : texts) {
        EmbeddingVector v = EmbeddingVector::Zero(dim_);
        const std::string lower = "\x02" + to_lower(text) + "\x03";
        if (lower.size() >= 3) {
            for (std::size_t i = 0; i + 3 <= lower.size(); ++i) {
                const std::uint64_t h = fnv1a64(std::string_view(lower).substr(i, 3), base);
                const Eigen::Index idx = static_cast<Eigen::Index>(h % static_cast<std::uint64_t>(dim_));
                v[idx] += (h & 0x8000000000000000ULL) ? -1.0 : 1.0;
            }
        }
        const double norm = v.norm();
        if (norm == 0.0) {
            v[0] = 1.0;
        } else {
            v /= norm;
        }
        out.push_back(std::move(v));
    }
    return out;
}

AugmentResult MockQueryAugmenter::augment(const QAPair& qa,
                                          const std::vector<AugmentEntity>& entities, int n) {
    AugmentResult res;
    if (n <= 0) return res;
    res.queries.reserve(static_cast<std::size_t>(n));

    if (entities.empty()) {
        static const char* kParaphrase[] = {
            "In other words: ",
            "Restated: ",
            "Put differently: ",
            "To ask it another way: ",
        };
        for (int i = 0; i < n; ++i) {
            res.queries.push_back(std::string(kParaphrase[i % 4]) + qa.question);
        }
        return res;
    }

    // Each query weaves in a window of the payload, so pools built from
    // larger subgraphs range over more (and more remote) entities while
    // small-subgraph pools keep circling the answer neighborhood.
    const std::size_t m = entities.size();
    auto at = [&](int i, int offset) -> const AugmentEntity& {
        return entities[static_cast<std::size_t>(3 * i + offset) % m];
    };
    for (int i = 0; i < n; ++i) {
        const auto& e1 = at(i, 0);
        const auto& e2 = at(i, 1);
        const auto& e3 = at(i, 2);
        const auto& e4 = at(i, 3);
        std::string q;
        switch (i % 4) {
            case 0:
                q = "Compare " + e1.name + " and " + e2.name + " beside " + e3.name + " and " +
                    e4.name + ": " + qa.question;
                break;
            case 1:
                q = "What cause involving " + e1.name + ", " + e2.name + " and " + e3.name +
                    " bears on this: " + qa.question;
                break;
            case 2: {
                const std::string desc =
                    e1.descriptions.empty() ? e1.type : e1.descriptions.front();
                q = "Given that " + e1.name + " is \"" + desc + "\" and tied to " + e2.name +
                    " and " + e3.name + ", " + qa.question;
                break;
            }
            case 3:
                q = "From the perspective of " + e1.name + " watching " + e2.name + " and " +
                    e3.name + ", " + qa.question;
                break;
        }
        res.queries.push_back(std::move(q));
    }
    return res;
}

JudgeOutcome MockPairJudge::judge(const std::string& /*question*/, const std::string& ground_truth,
                                  const std::string& answer1, const std::string& answer2) {
    JudgeOutcome out;
    const std::string a1 = to_lower(trim(answer1));
    const std::string a2 = to_lower(trim(answer2));
    const bool dq1 = a1 == "unanswerable";
    const bool dq2 = a2 == "unanswerable";
    if (dq1 || dq2) {
        Winner w = (dq1 && dq2) ? Winner::Tie : (dq1 ? Winner::A2 : Winner::A1);
        out.faithfulness = out.conciseness = out.overall = w;
        return out;
    }
    if (a1 == a2) {
        out.faithfulness = out.conciseness = out.overall = Winner::Tie;
        return out;
    }

    Tokenizer tok;
    auto overlap = [&](const std::string& ans) {
        auto a_toks = tok.tokenize(to_lower(ans));
        auto g_toks = tok.tokenize(to_lower(ground_truth));
        std::map<std::string, int> bag;
        for (auto& t : g_toks) bag[t]++;
        int hits = 0;
        for (auto& t : a_toks) {
            auto it = bag.find(t);
            if (it != bag.end() && it->second > 0) {
                --it->second;
                ++hits;
            }
        }
        return hits;
    };
    const int o1 = overlap(answer1);
    const int o2 = overlap(answer2);
    out.faithfulness = o1 > o2 ? Winner::A1 : (o2 > o1 ? Winner::A2 : Winner::Tie);

    const std::size_t n1 = tok.count(answer1);
    const std::size_t n2 = tok.count(answer2);
    out.conciseness = n1 < n2 ? Winner::A1 : (n2 < n1 ? Winner::A2 : Winner::Tie);

    out.overall = out.faithfulness != Winner::Tie ? out.faithfulness : out.conciseness;
    return out;
}

}  // namespace acr
