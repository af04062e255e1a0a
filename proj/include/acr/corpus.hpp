#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "acr/tokenizer.hpp"

namespace acr {

struct Document {
    std::string id;
    std::string title;
    std::string text;
};

// One token window of a document. token_start/token_end are half-open
// offsets into the document's token sequence.
struct Chunk {
    std::string id;
    std::string doc_id;
    std::size_t index = 0;
    std::string text;
    std::size_t token_start = 0;
    std::size_t token_end = 0;
};

struct QAPair {
    std::string id;
    std::string doc_id;
    std::string question;
    std::string answer;
};

struct Corpus {
    std::vector<Document> documents;
    std::vector<QAPair> qa_pairs;
};

// Sliding token windows of size at most `window` with stride window-overlap.
// Chunk starts land on 0, window-overlap, 2*(window-overlap), ...; every
// token of the document is covered and consecutive chunks share exactly
// `overlap` tokens. Empty document yields no chunks.
//
// Throws ConfigError unless window > overlap >= 0.
std::vector<Chunk> chunk_document(const Document& doc, std::size_t window,
                                  std::size_t overlap, const Tokenizer& tok);

std::vector<Chunk> chunk_corpus(const std::vector<Document>& docs, std::size_t window,
                                std::size_t overlap, const Tokenizer& tok);

// Line-delimited JSON persistence. Writes are atomic (temp file + rename);
// loads report the line number and missing field on malformed input.
void save_documents(const std::string& path, const std::vector<Document>& docs);
std::vector<Document> load_documents(const std::string& path);

void save_qa_pairs(const std::string& path, const std::vector<QAPair>& qa);
std::vector<QAPair> load_qa_pairs(const std::string& path);

void save_chunks(const std::string& path, const std::vector<Chunk>& chunks);
std::vector<Chunk> load_chunks(const std::string& path);

// Directory-level convenience over the two record files (documents.jsonl,
// qa.jsonl). Round-trip identity: save then load yields equal records.
void save_corpus(const std::string& dir, const Corpus& corpus);
Corpus load_corpus(const std::string& dir);

}  // namespace acr
