#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

// Byte-exactness of every on-disk format: save -> load -> save must emit
// identical bytes.

#include <filesystem>

#include "acr/binio.hpp"
#include "acr/curriculum.hpp"
#include "acr/errors.hpp"
#include "acr/jsonl.hpp"
#include "acr/kg.hpp"
#include "acr/mocks.hpp"
#include "acr/retriever.hpp"
#include "acr/trainer.hpp"

using namespace acr;
namespace fs = std::filesystem;

namespace {

struct TempDir {
    fs::path path;
    TempDir() : path(fs::temp_directory_path() / "acr_formats") {
        fs::remove_all(path);
        fs::create_directories(path);
    }
    ~TempDir() { fs::remove_all(path); }
    std::string file(const char* name) const { return (path / name).string(); }
};

Chunk make_chunk(const std::string& id, const std::string& text) {
    Chunk c;
    c.id = id;
    c.doc_id = "doc1";
    c.index = 0;
    c.text = text;
    c.token_end = 2;
    return c;
}

}  // namespace

TEST_CASE("corpus files: save -> load -> save is byte-identical") {
    TempDir dir;
    std::vector<Document> docs{{"doc1", "T", "alpha beta gamma"},
                               {"doc2", "U", "delta epsilon"}};
    std::vector<QAPair> qa{{"q1", "doc1", "what?", "alpha"}};
    Tokenizer tok;
    auto chunks = chunk_corpus(docs, 2, 1, tok);

    save_documents(dir.file("d1.jsonl"), docs);
    save_documents(dir.file("d2.jsonl"), load_documents(dir.file("d1.jsonl")));
    CHECK(binio::read_file(dir.file("d1.jsonl")) == binio::read_file(dir.file("d2.jsonl")));

    save_qa_pairs(dir.file("q1.jsonl"), qa);
    save_qa_pairs(dir.file("q2.jsonl"), load_qa_pairs(dir.file("q1.jsonl")));
    CHECK(binio::read_file(dir.file("q1.jsonl")) == binio::read_file(dir.file("q2.jsonl")));

    save_chunks(dir.file("c1.jsonl"), chunks);
    save_chunks(dir.file("c2.jsonl"), load_chunks(dir.file("c1.jsonl")));
    CHECK(binio::read_file(dir.file("c1.jsonl")) == binio::read_file(dir.file("c2.jsonl")));
}

TEST_CASE("graph files: save -> load -> save is byte-identical") {
    TempDir dir;
    auto kg = build_graph({
        ExtractionRecord{"c1",
                         {{"Alpha", "T", "d1"}, {"Beta", "U", "d2"}},
                         {{"Alpha", "Beta", "linked", 2.5}},
                         0},
        ExtractionRecord{"c2", {{"Gamma", "T", ""}}, {}, 0},
    });
    MockHashEmbedder embedder(32, 4);
    augment_similarity_edges(kg, embedder, 0.8);

    const auto g1 = (dir.path / "g1").string();
    const auto g2 = (dir.path / "g2").string();
    save_graph(g1, kg);
    save_graph(g2, load_graph(g1));
    for (const char* name : {"nodes.jsonl", "edges.jsonl", "graph_manifest.json"}) {
        CHECK(binio::read_file((fs::path(g1) / name).string()) ==
              binio::read_file((fs::path(g2) / name).string()));
    }
}

TEST_CASE("stage dataset: save -> load -> save is byte-identical") {
    TempDir dir;
    StageDataset ds;
    ds.stage = 3;
    ds.manifest.stage = 3;
    ds.manifest.config_hash = "deadbeef";
    ds.manifest.backend_ids = "a,b,c";
    ds.manifest.seed = 1234;
    ds.manifest.adapter_hash = "77aa";
    for (int i = 0; i < 5; ++i) {
        StageExample ex;
        ex.qa_id = "qa" + std::to_string(i);
        ex.query = "query " + std::to_string(i);
        ex.positive_id = "p" + std::to_string(i);
        ex.negative_ids = {"n1", "n2", "n3"};
        ex.provenance = "S";
        ds.examples.push_back(std::move(ex));
    }
    save_stage_dataset(dir.file("s1.jsonl"), ds);
    save_stage_dataset(dir.file("s2.jsonl"), load_stage_dataset(dir.file("s1.jsonl")));
    CHECK(binio::read_file(dir.file("s1.jsonl")) == binio::read_file(dir.file("s2.jsonl")));
}

TEST_CASE("index and adapter binaries: save -> load -> save is byte-identical") {
    TempDir dir;
    MockHashEmbedder embedder(24, 2);
    auto index = build_index({make_chunk("a", "one two"), make_chunk("b", "three four")},
                             embedder);
    save_index(dir.file("i1.bin"), index);
    save_index(dir.file("i2.bin"), load_index(dir.file("i1.bin")));
    CHECK(binio::read_file(dir.file("i1.bin")) == binio::read_file(dir.file("i2.bin")));

    AdapterModel adapter = AdapterModel::identity(24, 0.05);
    adapter.weight(3, 5) = 0.125;
    adapter.seed = 42;
    adapter = adapter.canonical();
    adapter.save(dir.file("a1.bin"));
    AdapterModel::load(dir.file("a1.bin")).save(dir.file("a2.bin"));
    CHECK(binio::read_file(dir.file("a1.bin")) == binio::read_file(dir.file("a2.bin")));
}

TEST_CASE("corrupted binary headers are rejected") {
    TempDir dir;
    MockHashEmbedder embedder(8, 1);
    auto index = build_index({make_chunk("a", "x")}, embedder);
    save_index(dir.file("i.bin"), index);
    auto bytes = binio::read_file(dir.file("i.bin"));
    bytes[0] = 'X';
    atomic_write(dir.file("bad.bin"), bytes);
    CHECK_THROWS_AS(load_index(dir.file("bad.bin")), ParseError);

    bytes = binio::read_file(dir.file("i.bin"));
    bytes.resize(bytes.size() - 3);
    atomic_write(dir.file("short.bin"), bytes);
    CHECK_THROWS_AS(load_index(dir.file("short.bin")), ParseError);
}
