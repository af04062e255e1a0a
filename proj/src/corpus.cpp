#include "acr/corpus.hpp"

#include <filesystem>
#include <sstream>

#include <json.hpp>

#include "acr/errors.hpp"
#include "acr/jsonl.hpp"

namespace acr {

using nlohmann::json;

std::vector<Chunk> chunk_document(const Document& doc, std::size_t window,
                                  std::size_t overlap, const Tokenizer& tok) {
    if (window <= overlap) {
        throw ConfigError("chunk window must exceed overlap (window=" + std::to_string(window) +
                          ", overlap=" + std::to_string(overlap) + ")");
    }
    std::vector<Chunk> chunks;
    const std::vector<std::string> tokens = tok.tokenize(doc.text);
    if (tokens.empty()) return chunks;

    const std::size_t stride = window - overlap;
    std::size_t start = 0;
    std::size_t index = 0;
    while (true) {
        const std::size_t end = std::min(start + window, tokens.size());
        Chunk c;
        c.doc_id = doc.id;
        c.index = index;
        c.token_start = start;
        c.token_end = end;
        c.text = tok.detokenize({tokens.begin() + static_cast<std::ptrdiff_t>(start),
                                 tokens.begin() + static_cast<std::ptrdiff_t>(end)});
        std::ostringstream id;
        id << doc.id << "#" << index;
        c.id = id.str();
        chunks.push_back(std::move(c));
        if (end == tokens.size()) break;
        start += stride;
        ++index;
    }
    return chunks;
}

std::vector<Chunk> chunk_corpus(const std::vector<Document>& docs, std::size_t window,
                                std::size_t overlap, const Tokenizer& tok) {
    std::vector<Chunk> all;
    for (const auto& d : docs) {
        auto cs = chunk_document(d, window, overlap, tok);
        all.insert(all.end(), std::make_move_iterator(cs.begin()),
                   std::make_move_iterator(cs.end()));
    }
    return all;
}

void save_documents(const std::string& path, const std::vector<Document>& docs) {
    std::string out;
    for (const auto& d : docs) {
        json rec{{"id", d.id}, {"title", d.title}, {"text", d.text}};
        out += rec.dump();
        out.push_back('\n');
    }
    atomic_write(path, out);
}

std::vector<Document> load_documents(const std::string& path) {
    std::vector<Document> docs;
    for_each_jsonl(path, [&](const json& rec, long line) {
        Document d;
        d.id = require_field<std::string>(rec, "id", line);
        d.title = require_field<std::string>(rec, "title", line);
        d.text = require_field<std::string>(rec, "text", line);
        docs.push_back(std::move(d));
    });
    return docs;
}

void save_qa_pairs(const std::string& path, const std::vector<QAPair>& qa) {
    std::string out;
    for (const auto& p : qa) {
        json rec{{"id", p.id}, {"doc_id", p.doc_id}, {"question", p.question}, {"answer", p.answer}};
        out += rec.dump();
        out.push_back('\n');
    }
    atomic_write(path, out);
}

std::vector<QAPair> load_qa_pairs(const std::string& path) {
    std::vector<QAPair> qa;
    for_each_jsonl(path, [&](const json& rec, long line) {
        QAPair p;
        p.id = require_field<std::string>(rec, "id", line);
        p.doc_id = require_field<std::string>(rec, "doc_id", line);
        p.question = require_field<std::string>(rec, "question", line);
        p.answer = require_field<std::string>(rec, "answer", line);
        qa.push_back(std::move(p));
    });
    return qa;
}

void save_chunks(const std::string& path, const std::vector<Chunk>& chunks) {
    std::string out;
    for (const auto& c : chunks) {
        json rec{{"id", c.id},
                 {"doc_id", c.doc_id},
                 {"index", c.index},
                 {"text", c.text},
                 {"token_start", c.token_start},
                 {"token_end", c.token_end}};
        out += rec.dump();
        out.push_back('\n');
    }
    atomic_write(path, out);
}

void save_corpus(const std::string& dir, const Corpus& corpus) {
    namespace fs = std::filesystem;
    fs::create_directories(dir);
    save_documents((fs::path(dir) / "documents.jsonl").string(), corpus.documents);
    save_qa_pairs((fs::path(dir) / "qa.jsonl").string(), corpus.qa_pairs);
}

Corpus load_corpus(const std::string& dir) {
    namespace fs = std::filesystem;
    Corpus corpus;
    corpus.documents = load_documents((fs::path(dir) / "documents.jsonl").string());
    corpus.qa_pairs = load_qa_pairs((fs::path(dir) / "qa.jsonl").string());
    return corpus;
}

std::vector<Chunk> load_chunks(const std::string& path) {
    std::vector<Chunk> chunks;
    for_each_jsonl(path, [&](const json& rec, long line) {
        Chunk c;
        c.id = require_field<std::string>(rec, "id", line);
        c.doc_id = require_field<std::string>(rec, "doc_id", line);
        c.index = require_field<std::size_t>(rec, "index", line);
        c.text = require_field<std::string>(rec, "text", line);
        c.token_start = require_field<std::size_t>(rec, "token_start", line);
        c.token_end = require_field<std::size_t>(rec, "token_end", line);
        chunks.push_back(std::move(c));
    });
    return chunks;
}

}  // namespace acr
