#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace acr {

// Deterministic corpus tokenizer: splits on whitespace and emits punctuation
// runs as separate tokens. Downstream math only needs token counts and
// offsets, never token identity, so no vocabulary is involved.
//
// Idempotence contract: tokenize(detokenize(tokenize(x))) == tokenize(x).
class Tokenizer {
public:
    std::vector<std::string> tokenize(std::string_view text) const;

    // Joins tokens with single spaces. Re-tokenizing the result yields the
    // same token sequence.
    std::string detokenize(const std::vector<std::string>& tokens) const;

    std::size_t count(std::string_view text) const { return tokenize(text).size(); }
};

}  // namespace acr
