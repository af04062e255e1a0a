#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "acr/backends.hpp"
#include "acr/mocks.hpp"
#include "acr/prompts.hpp"

using namespace acr;

namespace {

Chunk make_chunk(const std::string& text, const std::string& id = "c0") {
    Chunk c;
    c.id = id;
    c.doc_id = "d";
    c.text = text;
    return c;
}

}  // namespace

TEST_CASE("parse_extraction_output handles the frozen tuple grammar") {
    SUBCASE("entity line") {
        auto rec = parse_extraction_output(R"(("entity"<|>Paris<|>LOCATION<|>capital city))");
        REQUIRE(rec.entities.size() == 1);
        CHECK(rec.entities[0].name == "Paris");
        CHECK(rec.entities[0].type == "LOCATION");
        CHECK(rec.entities[0].description == "capital city");
        CHECK(rec.skipped_lines == 0);
    }
    SUBCASE("relationship line with numeric strength") {
        auto rec = parse_extraction_output(R"(("relationship"<|>A<|>B<|>supplies<|>7))");
        REQUIRE(rec.relations.size() == 1);
        CHECK(rec.relations[0].source == "A");
        CHECK(rec.relations[0].target == "B");
        CHECK(rec.relations[0].description == "supplies");
        CHECK(rec.relations[0].strength == doctest::Approx(7.0));
    }
    SUBCASE("garbage lines are skipped and counted") {
        auto rec = parse_extraction_output(
            "hello\n(\"entity\"<|>Paris<|>LOCATION<|>capital city)\n\n");
        CHECK(rec.entities.size() == 1);
        CHECK(rec.skipped_lines == 1);
    }
    SUBCASE("trailing '>' wrapper from the prompt format is tolerated") {
        auto rec = parse_extraction_output(R"(("entity"<|>Rome<|>LOCATION<|>old city>))");
        REQUIRE(rec.entities.size() == 1);
        CHECK(rec.entities[0].description == "old city");
    }
    SUBCASE("wrong arity or bad strength is skipped") {
        auto rec = parse_extraction_output(
            "(\"entity\"<|>OnlyName)\n(\"relationship\"<|>A<|>B<|>x<|>often)\n");
        CHECK(rec.entities.empty());
        CHECK(rec.relations.empty());
        CHECK(rec.skipped_lines == 2);
    }
}

TEST_CASE("mock extractor: capitalized spans and sentence co-occurrence") {
    MockEntityExtractor ex;
    SUBCASE("two entities and one relation") {
        auto rec = ex.extract(make_chunk("Alice founded Acme."));
        REQUIRE(rec.entities.size() == 2);
        CHECK(rec.entities[0].name == "Alice");
        CHECK(rec.entities[0].type == "PERSON");
        CHECK(rec.entities[1].name == "Acme");
        CHECK(rec.entities[1].type == "ORG");
        REQUIRE(rec.relations.size() == 1);
        CHECK(rec.relations[0].source == "Alice");
        CHECK(rec.relations[0].target == "Acme");
        CHECK(rec.relations[0].description == "founded");
        CHECK(rec.relations[0].strength == doctest::Approx(1.0));
        CHECK(rec.chunk_id == "c0");
    }
    SUBCASE("no capitalized tokens -> empty record") {
        auto rec = ex.extract(make_chunk("nothing to see here."));
        CHECK(rec.entities.empty());
        CHECK(rec.relations.empty());
    }
    SUBCASE("multi-word spans merge") {
        auto rec = ex.extract(make_chunk("Acme Corporation hired Bob."));
        REQUIRE(rec.entities.size() == 2);
        CHECK(rec.entities[0].name == "Acme Corporation");
        CHECK(rec.entities[1].name == "Bob");
    }
}

TEST_CASE("mock scorers") {
    SUBCASE("uniform: -log(vocab) per token") {
        MockUniformScorer scorer(4);
        auto lp = scorer.score("any prompt", "one two three");
        REQUIRE(lp.size() == 3);
        for (double v : lp) CHECK(v == doctest::Approx(-std::log(4.0)));
    }
    SUBCASE("hash: deterministic, in [-2,-1)") {
        MockHashScorer scorer(9);
        auto a = scorer.score("p", "t u v");
        auto b = scorer.score("p", "t u v");
        CHECK(a == b);
        for (double v : a) {
            CHECK(v >= -2.0);
            CHECK(v < -1.0);
        }
        auto c = scorer.score("different prompt", "t u v");
        CHECK(a != c);
    }
    SUBCASE("empty prompt allowed") {
        MockHashScorer scorer;
        CHECK(scorer.score("", "tok").size() == 1);
    }
}

TEST_CASE("contains-answer scorer follows the prompt sections") {
    ContainsAnswerScorer scorer;
    const PromptLibrary prompts = PromptLibrary::defaults();

    SUBCASE("forward: target found in context") {
        const auto prompt = render_forward_prompt(prompts, "the relic Zyqmora empowers", "which?");
        auto lp = scorer.score(prompt, "Zyqmora");
        REQUIRE(lp.size() == 1);
        CHECK(lp[0] == doctest::Approx(-0.1));
    }
    SUBCASE("forward: target absent") {
        const auto prompt = render_forward_prompt(prompts, "nothing relevant", "which?");
        auto lp = scorer.score(prompt, "Zyqmora");
        CHECK(lp[0] == doctest::Approx(-3.0));
    }
    SUBCASE("backward: probe is the embedded answer, not the target") {
        const auto hit = render_backward_prompt(prompts, "chunk holding Zyqmora", "Zyqmora");
        auto lp = scorer.score(hit, "which relic was it ?");
        REQUIRE(lp.size() == 5);
        CHECK(lp[0] == doctest::Approx(-0.1));

        const auto miss = render_backward_prompt(prompts, "chunk without it", "Zyqmora");
        auto lp2 = scorer.score(miss, "which relic was it ?");
        CHECK(lp2[0] == doctest::Approx(-3.0));
    }
}

TEST_CASE("mock embedder: unit norm, determinism, discrimination") {
    MockHashEmbedder embedder(64, 0);
    auto vecs = embedder.embed({"abc", "abc", "xyz"});
    REQUIRE(vecs.size() == 3);
    for (const auto& v : vecs) CHECK(v.norm() == doctest::Approx(1.0).epsilon(1e-9));
    CHECK((vecs[0] - vecs[1]).norm() == doctest::Approx(0.0));
    const double cos_same = vecs[0].dot(vecs[1]);
    const double cos_diff = vecs[0].dot(vecs[2]);
    CHECK(cos_same == doctest::Approx(1.0));
    CHECK(cos_diff < 1.0);
    // Golden values for the fixed hashing definition (dim 64, seed 0):
    // "abc" and "xyz" share no buckets; "abcd" and "abce" share half their
    // gram mass.
    CHECK(cos_diff == doctest::Approx(0.0));
    auto overlap = embedder.embed({"abcd", "abce"});
    CHECK(overlap[0].dot(overlap[1]) == doctest::Approx(0.25).epsilon(1e-12));
}

TEST_CASE("mock augmenter produces n templated queries") {
    MockQueryAugmenter aug(0);
    QAPair qa{"q1", "d", "Which relic?", "Zyq"};
    SUBCASE("with entities") {
        std::vector<AugmentEntity> ents{{"GildMora", "ORG", {"a guild"}},
                                        {"VexTan", "PERSON", {}}};
        auto res = aug.augment(qa, ents, 10);
        REQUIRE(res.queries.size() == 10);
        CHECK(!res.degraded);
        for (const auto& q : res.queries) CHECK(q != qa.question);
        CHECK(res.queries[0].find("Compare") == 0);
        CHECK(res.queries[0].find("GildMora") != std::string::npos);
        auto res2 = aug.augment(qa, ents, 10);
        CHECK(res.queries == res2.queries);
    }
    SUBCASE("no entities -> paraphrase fallback") {
        auto res = aug.augment(qa, {}, 4);
        REQUIRE(res.queries.size() == 4);
        for (const auto& q : res.queries) {
            CHECK(q != qa.question);
            CHECK(q.find(qa.question) != std::string::npos);
        }
    }
}

TEST_CASE("mock judge") {
    MockPairJudge judge;
    SUBCASE("identical answers tie everywhere") {
        auto v = judge.judge("q?", "truth", "same", "same");
        CHECK(v.faithfulness == Winner::Tie);
        CHECK(v.conciseness == Winner::Tie);
        CHECK(v.overall == Winner::Tie);
    }
    SUBCASE("disqualification: unanswerable loses to substance") {
        auto v = judge.judge("q?", "the harbor tide", "the harbor tide", "unanswerable");
        CHECK(v.faithfulness == Winner::A1);
        CHECK(v.overall == Winner::A1);
        auto v2 = judge.judge("q?", "the harbor tide", "Unanswerable", "harbor");
        CHECK(v2.overall == Winner::A2);
        auto v3 = judge.judge("q?", "gt", "unanswerable", "unanswerable");
        CHECK(v3.overall == Winner::Tie);
    }
    SUBCASE("overlap decides faithfulness, length conciseness") {
        auto v = judge.judge("q?", "alpha beta gamma", "alpha beta", "delta epsilon zeta eta");
        CHECK(v.faithfulness == Winner::A1);
        CHECK(v.conciseness == Winner::A1);
        CHECK(v.overall == Winner::A1);
    }
}

TEST_CASE("winner names round trip") {
    CHECK(winner_from_name("Answer 1") == Winner::A1);
    CHECK(winner_from_name("answer 2") == Winner::A2);
    CHECK(winner_from_name("Tie") == Winner::Tie);
    CHECK(winner_from_name("gibberish") == Winner::None);
    CHECK(std::string(winner_name(Winner::A1)) == "Answer 1");
}
