#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

// Exercises the HTTP JSON surface with an in-process server: request shapes,
// retry behavior, and every parse/error path of the remote backends.

#include <atomic>
#include <filesystem>
#include <fstream>
#include <thread>

#include "acr/errors.hpp"
#include "acr/remote.hpp"

#include <httplib.h>
#include <json.hpp>

using namespace acr;
using nlohmann::json;

namespace {

class TestServer {
public:
    TestServer() {
        server_.Post("/v1/chat/completions", [this](const httplib::Request& req,
                                                    httplib::Response& res) {
            ++chat_calls;
            last_chat_request = json::parse(req.body);
            if (fail_next > 0) {
                --fail_next;
                res.status = 500;
                res.set_content("boom", "text/plain");
                return;
            }
            json out{{"choices",
                      json::array({json{{"message", json{{"content", chat_content}}}}})}};
            res.set_content(out.dump(), "application/json");
        });
        server_.Post("/v1/score", [this](const httplib::Request& req, httplib::Response& res) {
            last_score_request = json::parse(req.body);
            res.set_content(json{{"logprobs", score_logprobs}}.dump(), "application/json");
        });
        server_.Post("/v1/embeddings", [this](const httplib::Request& req,
                                              httplib::Response& res) {
            const json body = json::parse(req.body);
            json data = json::array();
            for (std::size_t i = 0; i < body["input"].size(); ++i) {
                data.push_back(json{{"embedding", embedding_value}});
            }
            res.set_content(json{{"data", data}}.dump(), "application/json");
        });

        port_ = server_.bind_to_any_port("127.0.0.1");
        thread_ = std::thread([this] { server_.listen_after_bind(); });
        server_.wait_until_ready();
    }

    ~TestServer() {
        server_.stop();
        thread_.join();
    }

    BackendConfig config() const {
        BackendConfig cfg;
        cfg.endpoint = "http://127.0.0.1:" + std::to_string(port_);
        cfg.model = "test-model";
        cfg.timeout_seconds = 5;
        cfg.max_retries = 2;
        cfg.backoff_ms = 1;
        return cfg;
    }

    std::string chat_content;
    std::vector<double> score_logprobs{-0.5, -1.0};
    std::vector<double> embedding_value{3.0, 4.0};
    std::atomic<int> fail_next{0};
    std::atomic<int> chat_calls{0};
    json last_chat_request, last_score_request;

private:
    httplib::Server server_;
    int port_ = 0;
    std::thread thread_;
};

Chunk make_chunk(const std::string& text) {
    Chunk c;
    c.id = "chunk-1";
    c.doc_id = "d";
    c.text = text;
    return c;
}

}  // namespace

TEST_CASE("remote extractor round trip with the tuple grammar") {
    TestServer server;
    server.chat_content =
        "(\"entity\"<|>Paris<|>LOCATION<|>capital)\n"
        "(\"relationship\"<|>Paris<|>France<|>capital of<|>9)\n"
        "noise line\n";
    RemoteEntityExtractor extractor(server.config(), PromptLibrary::defaults());
    auto rec = extractor.extract(make_chunk("Paris is in France."));
    CHECK(rec.chunk_id == "chunk-1");
    REQUIRE(rec.entities.size() == 1);
    CHECK(rec.entities[0].name == "Paris");
    REQUIRE(rec.relations.size() == 1);
    CHECK(rec.relations[0].strength == doctest::Approx(9));
    CHECK(rec.skipped_lines == 1);
    // Prompt carried the chunk text.
    const auto prompt =
        server.last_chat_request["messages"][0]["content"].get<std::string>();
    CHECK(prompt.find("Paris is in France.") != std::string::npos);
}

TEST_CASE("retries recover from transient failures, then give up") {
    TestServer server;
    server.chat_content = "(\"entity\"<|>X<|>T<|>d)";
    SUBCASE("two failures then success within max_retries") {
        server.fail_next = 2;
        RemoteEntityExtractor extractor(server.config(), PromptLibrary::defaults());
        auto rec = extractor.extract(make_chunk("text"));
        CHECK(rec.entities.size() == 1);
        CHECK(server.chat_calls == 3);
    }
    SUBCASE("persistent failure surfaces as BackendError with the chunk id") {
        server.fail_next = 10;
        RemoteEntityExtractor extractor(server.config(), PromptLibrary::defaults());
        try {
            extractor.extract(make_chunk("text"));
            FAIL("expected BackendError");
        } catch (const BackendError& e) {
            CHECK(e.item_id() == "chunk-1");
        }
    }
}

TEST_CASE("remote scorer validates config and payload") {
    TestServer server;
    SUBCASE("logprob support is a configuration-time requirement") {
        CHECK_THROWS_AS(RemoteLikelihoodScorer{server.config()}, ConfigError);
    }
    SUBCASE("scores flow through") {
        auto cfg = server.config();
        cfg.supports_logprobs = true;
        RemoteLikelihoodScorer scorer(cfg);
        auto lp = scorer.score("prompt", "target");
        REQUIRE(lp.size() == 2);
        CHECK(lp[0] == doctest::Approx(-0.5));
        CHECK(server.last_score_request["target"] == "target");
    }
    SUBCASE("positive logprobs are rejected") {
        auto cfg = server.config();
        cfg.supports_logprobs = true;
        server.score_logprobs = {0.25};
        RemoteLikelihoodScorer scorer(cfg);
        CHECK_THROWS_AS(scorer.score("p", "t"), ParseError);
    }
}

TEST_CASE("remote embedder normalizes and tracks dimension drift") {
    TestServer server;
    RemoteEmbedder embedder(server.config());
    auto vecs = embedder.embed({"a", "b"});
    REQUIRE(vecs.size() == 2);
    CHECK(vecs[0].norm() == doctest::Approx(1.0));
    CHECK(vecs[0][0] == doctest::Approx(0.6));  // 3-4-5 triangle
    CHECK(embedder.dimension() == 2);

    server.embedding_value = {1.0, 2.0, 2.0};  // dimension changes mid-session
    CHECK_THROWS_AS(embedder.embed({"c"}), ConfigError);
}

TEST_CASE("remote augmenter parses confusing_questions and pads short lists") {
    TestServer server;
    QAPair qa{"q1", "d", "original question ?", "ans"};
    SUBCASE("full response passes through") {
        json list = json::array();
        for (int i = 0; i < 10; ++i) list.push_back("variant " + std::to_string(i));
        server.chat_content = "Sure! " + json{{"confusing_questions", list}}.dump();
        RemoteQueryAugmenter aug(server.config(), PromptLibrary::defaults());
        auto res = aug.augment(qa, {}, 10);
        CHECK(res.queries.size() == 10);
        CHECK(!res.degraded);
        CHECK(res.queries[0] == "variant 0");
    }
    SUBCASE("short response is padded deterministically and flagged") {
        server.chat_content = json{{"confusing_questions", json::array({"only one"})}}.dump();
        RemoteQueryAugmenter aug(server.config(), PromptLibrary::defaults());
        auto res = aug.augment(qa, {}, 5);
        CHECK(res.queries.size() == 5);
        CHECK(res.degraded);
        CHECK(res.queries[0] == "only one");
        for (const auto& q : res.queries) CHECK(q != qa.question);
    }
    SUBCASE("verbatim originals are filtered out") {
        server.chat_content =
            json{{"confusing_questions", json::array({qa.question, "fresh one"})}}.dump();
        RemoteQueryAugmenter aug(server.config(), PromptLibrary::defaults());
        auto res = aug.augment(qa, {}, 2);
        CHECK(res.queries[0] == "fresh one");
        CHECK(res.degraded);
    }
}

TEST_CASE("audit log mirrors requests and responses as JSONL") {
    namespace fs = std::filesystem;
    TestServer server;
    server.chat_content = "(\"entity\"<|>X<|>T<|>d)";
    auto cfg = server.config();
    cfg.audit_log = (fs::temp_directory_path() / "acr_audit.jsonl").string();
    fs::remove(cfg.audit_log);

    RemoteEntityExtractor extractor(cfg, PromptLibrary::defaults());
    extractor.extract(make_chunk("text"));
    extractor.extract(make_chunk("more text"));

    std::ifstream in(cfg.audit_log);
    REQUIRE(in.good());
    std::string line;
    int lines = 0;
    while (std::getline(in, line)) {
        const auto rec = json::parse(line);
        CHECK(rec.contains("seq"));
        CHECK(rec["path"] == "/v1/chat/completions");
        CHECK(rec.contains("request"));
        CHECK(rec.contains("response"));
        ++lines;
    }
    CHECK(lines == 2);
    fs::remove(cfg.audit_log);
}

TEST_CASE("remote judge parses the verdict object; malformed becomes None") {
    TestServer server;
    SUBCASE("well-formed verdict") {
        server.chat_content = json{{"Faithfulness", {{"Winner", "Answer 1"}, {"Explanation", "..."}}},
                                   {"Conciseness", {{"Winner", "Tie"}, {"Explanation", "..."}}},
                                   {"Overall Winner", {{"Winner", "Answer 1"}, {"Explanation", "..."}}}}
                                  .dump();
        RemotePairJudge judge(server.config(), PromptLibrary::defaults());
        auto v = judge.judge("q", "gt", "a1", "a2");
        CHECK(v.faithfulness == Winner::A1);
        CHECK(v.conciseness == Winner::Tie);
        CHECK(v.overall == Winner::A1);
    }
    SUBCASE("free text without JSON -> all None") {
        server.chat_content = "I cannot decide.";
        RemotePairJudge judge(server.config(), PromptLibrary::defaults());
        auto v = judge.judge("q", "gt", "a1", "a2");
        CHECK(v.faithfulness == Winner::None);
        CHECK(v.overall == Winner::None);
    }
}
