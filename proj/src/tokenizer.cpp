#include "acr/tokenizer.hpp"

#include <cctype>

namespace acr {

namespace {

bool is_space(char c) { return std::isspace(static_cast<unsigned char>(c)) != 0; }
bool is_punct(char c) { return std::ispunct(static_cast<unsigned char>(c)) != 0; }

}  // namespace

std::vector<std::string> Tokenizer::tokenize(std::string_view text) const {
    std::vector<std::string> tokens;
    std::size_t i = 0;
    const std::size_t n = text.size();
    while (i < n) {
        if (is_space(text[i])) {
            ++i;
            continue;
        }
        std::size_t start = i;
        if (is_punct(text[i])) {
            // Punctuation run is one token: "..." stays together, "a,b"
            // splits into three.
            while (i < n && is_punct(text[i])) ++i;
        } else {
            while (i < n && !is_space(text[i]) && !is_punct(text[i])) ++i;
        }
        tokens.emplace_back(text.substr(start, i - start));
    }
    return tokens;
}

std::string Tokenizer::detokenize(const std::vector<std::string>& tokens) const {
    std::string out;
    for (std::size_t i = 0; i < tokens.size(); ++i) {
        if (i) out.push_back(' ');
        out += tokens[i];
    }
    return out;
}

}  // namespace acr
