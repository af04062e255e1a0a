#include "acr/backends.hpp"

#include <cctype>
#include <cmath>
#include <sstream>

namespace acr {

namespace {

std::string trim(const std::string& s) {
    std::size_t a = s.find_first_not_of(" \t\r\n");
    if (a == std::string::npos) return {};
    std::size_t b = s.find_last_not_of(" \t\r\n");
    return s.substr(a, b - a + 1);
}

std::vector<std::string> split_delim(const std::string& s, const std::string& delim) {
    std::vector<std::string> parts;
    std::size_t pos = 0;
    while (true) {
        std::size_t next = s.find(delim, pos);
        if (next == std::string::npos) {
            parts.push_back(s.substr(pos));
            break;
        }
        parts.push_back(s.substr(pos, next - pos));
        pos = next + delim.size();
    }
    return parts;
}

std::string strip_quotes(const std::string& s) {
    std::string t = trim(s);
    if (t.size() >= 2 && t.front() == '"' && t.back() == '"') return t.substr(1, t.size() - 2);
    return t;
}

}  // namespace

ExtractionRecord parse_extraction_output(const std::string& raw) {
    ExtractionRecord rec;
    std::istringstream in(raw);
    std::string line;
    while (std::getline(in, line)) {
        std::string t = trim(line);
        if (t.empty()) continue;

        // Tolerate the tuple wrappers: ("...<|>...>)  with optional trailing
        // '>' before the closing paren.
        if (!t.empty() && t.front() == '(') t.erase(0, 1);
        if (!t.empty() && t.back() == ')') t.pop_back();
        t = trim(t);
        if (!t.empty() && t.back() == '>') {
            // Only strip a dangling '>' that is not part of the <|> delimiter.
            if (t.size() < 3 || t.compare(t.size() - 3, 3, "<|>") != 0) t.pop_back();
        }

        auto parts = split_delim(t, "<|>");
        if (parts.size() < 2) {
            ++rec.skipped_lines;
            continue;
        }
        const std::string tag = strip_quotes(parts[0]);
        if (tag == "entity" && parts.size() == 4) {
            ExtractedEntity e;
            e.name = strip_quotes(parts[1]);
            e.type = strip_quotes(parts[2]);
            e.description = strip_quotes(parts[3]);
            if (e.name.empty()) {
                ++rec.skipped_lines;
                continue;
            }
            rec.entities.push_back(std::move(e));
        } else if (tag == "relationship" && parts.size() == 5) {
            ExtractedRelation r;
            r.source = strip_quotes(parts[1]);
            r.target = strip_quotes(parts[2]);
            r.description = strip_quotes(parts[3]);
            try {
                std::size_t used = 0;
                r.strength = std::stod(strip_quotes(parts[4]), &used);
            } catch (const std::exception&) {
                ++rec.skipped_lines;
                continue;
            }
            if (r.source.empty() || r.target.empty() || !std::isfinite(r.strength)) {
                ++rec.skipped_lines;
                continue;
            }
            rec.relations.push_back(std::move(r));
        } else {
            ++rec.skipped_lines;
        }
    }
    return rec;
}

const char* winner_name(Winner w) {
    switch (w) {
        case Winner::A1: return "Answer 1";
        case Winner::A2: return "Answer 2";
        case Winner::Tie: return "Tie";
        case Winner::None: return "None";
    }
    return "None";
}

Winner winner_from_name(const std::string& name) {
    std::string t;
    for (char c : name)
        if (!std::isspace(static_cast<unsigned char>(c))) t.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
    if (t == "answer1" || t == "a1") return Winner::A1;
    if (t == "answer2" || t == "a2") return Winner::A2;
    if (t == "tie") return Winner::Tie;
    return Winner::None;
}

}  // namespace acr
