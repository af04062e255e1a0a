#include "acr/prompts.hpp"

#include <filesystem>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "acr/errors.hpp"
#include "acr/jsonl.hpp"

namespace acr {

namespace {

const char* kExtraction = R"(Given a text document that is potentially relevant to this activity, your task is to identify all entities of specific types and the relationships among them.

Steps:

1. Identify Entity Types: choose the categories that fit the text, such as PERSON, ORG, LOCATION, EVENT, or CONCEPT. Think step by step about which spans of the text denote entities before writing anything.

2. Extract Entities: for each entity, provide its name, its type, and a short description grounded in the text.

Format each entity as:
("entity"<|>entity_name<|>entity_type<|>entity_description)

3. Identify Relationships: for each pair of clearly related entities, provide a short description of the relation and an integer strength from 1 to 10.

Format each relationship as:
("relationship"<|>source_entity<|>target_entity<|>relationship_description<|>relationship_strength)

Return one tuple per line and nothing else.

Text:
{chunk}
)";

const char* kAugmentation = R"(You are an expert in creating complex and confusing questions for educational purposes. Your task is to generate {n} distinct and challenging questions based on an original question-answer pair and a set of related entities with their descriptions.

The goal is to formulate questions that are semantically different from the original but lead to the exact same answer. These new questions should be confusing by design, incorporating details from the provided entity descriptions to misdirect or challenge the user's understanding.

Input:

You will receive the following in JSON format:
- original_question: A straightforward question.
- answer: The correct and sole answer to the original question.
- entities: A list of objects, where each object contains:
  - name: The name of the entity.
  - type: The category of the entity.
  - descriptions: A list of strings, each describing a different aspect of the entity.

Task:

Generate {n} new questions (we'll call them "confusing questions").

Requirements for Confusing Questions:

1. Same Answer: Every generated question must have the exact same answer as the original question.
2. Incorporate Entities: Each question should subtly weave in information from the entities and their descriptions.
3. Variety: The questions should be diverse in their structure and focus. You should not include exact wording / entities in the original question / answer. For example, you can: compare or contrast among the given entities; ask for a cause or effect based on the descriptions; use a quote or a redefined term from the descriptions; frame the question from a different perspective.
4. Clarity and Grammar: Despite being confusing, the questions must be grammatically correct and coherent.

Output Format:

Produce a single JSON object with one key, confusing_questions, which contains a list of {n} string questions.

{payload}
)";

const char* kForward = R"(You are given a context and a question. Answer the question as concisely as you can, using a single phrase or sentence if possible. If the question cannot be answered based on the information in the context, write "unanswerable". If the question is a yes/no question, answer "yes", "no", or "unanswerable". Do not provide any explanation.

Context: {chunk}

Question: {question}

Answer:)";

const char* kBackward = R"(You are given a context and an answer. Write the most likely original question for that answer, as concisely as you can, using a single sentence. Do not provide any explanation.

Context: {chunk}

Answer: {answer}

Question:)";

const char* kJudge = R"(You are an expert evaluator. Your task is to rigorously assess two answers to a specific question, based on a provided Ground Truth. You will use two criteria: Faithfulness and Conciseness.

Evaluation Rules:

Disqualification Rule (Primary Check):
First, check if either answer explicitly states that the Ground Truth document does not contain enough information or evidence to answer the Question. If exactly one answer does so while the other gives a substantive answer, the substantive answer wins every criterion. If both do so, declare a Tie on every criterion.

Evaluation Criteria (Secondary Check):
Faithfulness: The degree to which the answer is exclusively and accurately supported by the provided Ground Truth document.
Conciseness: The degree to which the answer avoids mentioning excessive entities or relationships that are not essential for answering the Question.

Output Format:

Output your complete evaluation in the following JSON format.

{
  "Faithfulness": {"Winner": "[Answer 1, Answer 2, Tie, or None]", "Explanation": "..."},
  "Conciseness": {"Winner": "[Answer 1, Answer 2, Tie, or None]", "Explanation": "..."},
  "Overall Winner": {"Winner": "[Answer 1, Answer 2, Tie, or None]", "Explanation": "..."}
}

Question: {question}

Ground Truth: {ground_truth}

Answer 1: {answer1}

Answer 2: {answer2}
)";

std::string read_if_exists(const std::filesystem::path& p, const std::string& fallback) {
    std::ifstream in(p, std::ios::binary);
    if (!in) return fallback;
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

}  // namespace

PromptLibrary PromptLibrary::defaults() {
    PromptLibrary lib;
    lib.extraction = kExtraction;
    lib.augmentation = kAugmentation;
    lib.forward = kForward;
    lib.backward = kBackward;
    lib.judge = kJudge;
    return lib;
}

PromptLibrary PromptLibrary::load(const std::string& dir) {
    namespace fs = std::filesystem;
    PromptLibrary lib = defaults();
    fs::path base(dir);
    lib.extraction = read_if_exists(base / "extraction.txt", lib.extraction);
    lib.augmentation = read_if_exists(base / "augmentation.txt", lib.augmentation);
    lib.forward = read_if_exists(base / "forward.txt", lib.forward);
    lib.backward = read_if_exists(base / "backward.txt", lib.backward);
    lib.judge = read_if_exists(base / "judge.txt", lib.judge);
    return lib;
}

void PromptLibrary::save(const std::string& dir) const {
    namespace fs = std::filesystem;
    fs::create_directories(dir);
    atomic_write((fs::path(dir) / "extraction.txt").string(), extraction);
    atomic_write((fs::path(dir) / "augmentation.txt").string(), augmentation);
    atomic_write((fs::path(dir) / "forward.txt").string(), forward);
    atomic_write((fs::path(dir) / "backward.txt").string(), backward);
    atomic_write((fs::path(dir) / "judge.txt").string(), judge);
}

std::string render_template(const std::string& tmpl,
                            const std::vector<std::pair<std::string, std::string>>& vars) {
    std::string out = tmpl;
    for (const auto& [name, value] : vars) {
        const std::string needle = "{" + name + "}";
        std::size_t pos = 0;
        while ((pos = out.find(needle, pos)) != std::string::npos) {
            out.replace(pos, needle.size(), value);
            pos += value.size();
        }
    }
    return out;
}

std::string render_forward_prompt(const PromptLibrary& lib, const std::string& chunk_text,
                                  const std::string& question) {
    return render_template(lib.forward, {{"chunk", chunk_text}, {"question", question}});
}

std::string render_backward_prompt(const PromptLibrary& lib, const std::string& chunk_text,
                                   const std::string& answer) {
    return render_template(lib.backward, {{"chunk", chunk_text}, {"answer", answer}});
}

std::string render_extraction_prompt(const PromptLibrary& lib, const std::string& chunk_text) {
    return render_template(lib.extraction, {{"chunk", chunk_text}});
}

std::string render_augmentation_prompt(const PromptLibrary& lib, const QAPair& qa,
                                       const std::vector<AugmentEntity>& entities, int n) {
    nlohmann::json payload;
    payload["original_question"] = qa.question;
    payload["answer"] = qa.answer;
    nlohmann::json ents = nlohmann::json::array();
    for (const auto& e : entities) {
        ents.push_back({{"name", e.name}, {"type", e.type}, {"descriptions", e.descriptions}});
    }
    payload["entities"] = ents;
    return render_template(lib.augmentation,
                           {{"n", std::to_string(n)}, {"payload", payload.dump(2)}});
}

std::string render_judge_prompt(const PromptLibrary& lib, const std::string& question,
                                const std::string& ground_truth, const std::string& answer1,
                                const std::string& answer2) {
    return render_template(lib.judge, {{"question", question},
                                       {"ground_truth", ground_truth},
                                       {"answer1", answer1},
                                       {"answer2", answer2}});
}

}  // namespace acr
