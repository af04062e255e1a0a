#pragma once

// Prompt templates shipped as editable text assets keyed by capability.
// Built-in defaults are compiled in; a directory of <capability>.txt files
// can override any of them. Placeholders use {name} syntax.

#include <string>
#include <vector>

#include "acr/backends.hpp"

namespace acr {

struct PromptLibrary {
    std::string extraction;    // {chunk}
    std::string augmentation;  // {payload} — JSON object per the generation contract
    std::string forward;       // {chunk} {question}
    std::string backward;      // {chunk} {answer}
    std::string judge;         // {question} {ground_truth} {answer1} {answer2}

    static PromptLibrary defaults();

    // Overrides any template for which dir/<capability>.txt exists
    // (extraction.txt, augmentation.txt, forward.txt, backward.txt,
    // judge.txt).
    static PromptLibrary load(const std::string& dir);

    void save(const std::string& dir) const;
};

std::string render_template(const std::string& tmpl,
                            const std::vector<std::pair<std::string, std::string>>& vars);

std::string render_forward_prompt(const PromptLibrary& lib, const std::string& chunk_text,
                                  const std::string& question);
std::string render_backward_prompt(const PromptLibrary& lib, const std::string& chunk_text,
                                   const std::string& answer);
std::string render_extraction_prompt(const PromptLibrary& lib, const std::string& chunk_text);
std::string render_augmentation_prompt(const PromptLibrary& lib, const QAPair& qa,
                                       const std::vector<AugmentEntity>& entities, int n);
std::string render_judge_prompt(const PromptLibrary& lib, const std::string& question,
                                const std::string& ground_truth, const std::string& answer1,
                                const std::string& answer2);

}  // namespace acr
