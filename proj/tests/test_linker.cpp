#include "pog/linker.hpp"

#include <doctest.h>

using namespace pog;

namespace {

std::vector<std::pair<EntityId, std::string>> toy_universe() {
    return {{"m.1", "France"},   {"m.2", "Germany"}, {"m.3", "Lou Seal"},
            {"m.4", "Denmark"},  {"m.5", "Europe"},  {"m.6", "San Francisco"},
            {"m.7", "Baseball"}, {"m.8", "Mascot"},  {"m.9", "World Series"},
            {"m.10", "Seattle"}};
}

} // namespace

TEST_CASE("extract_topic_keywords: scripted keyword passes through verbatim") {
    MockLlm llm;
    llm.add(Purpose::Extract, "Lou Seal");
    PromptLibrary prompts;
    PipelineConfig config;
    auto keywords = extract_topic_keywords("Lou Seal is the mascot...?", llm, prompts, config);
    CHECK(keywords == std::vector<std::string>{"Lou Seal"});
}

TEST_CASE("extract_topic_keywords: multiple lines keep order, bullets stripped") {
    MockLlm llm;
    llm.add(Purpose::Extract, "- Germany\n- Lejre Municipality\n");
    PromptLibrary prompts;
    PipelineConfig config;
    auto keywords = extract_topic_keywords("q?", llm, prompts, config);
    CHECK(keywords == std::vector<std::string>{"Germany", "Lejre Municipality"});
}

TEST_CASE("extract_topic_keywords: numeric surface forms survive bullet stripping") {
    MockLlm llm;
    llm.add(Purpose::Extract, "1. 2014 World Series\n2) 1984\n30 Rock");
    PromptLibrary prompts;
    PipelineConfig config;
    auto keywords = extract_topic_keywords("q?", llm, prompts, config);
    CHECK(keywords ==
          std::vector<std::string>{"2014 World Series", "1984", "30 Rock"});
}

TEST_CASE("extract_topic_keywords: empty replies error after one retry") {
    MockLlm llm;
    llm.add(Purpose::Extract, "\n\n");
    llm.add(Purpose::Extract, "");
    PromptLibrary prompts;
    PipelineConfig config;
    CHECK_THROWS_AS((void)extract_topic_keywords("q?", llm, prompts, config), ParseError);
    CHECK(llm.remaining() == 0);
}

TEST_CASE("align_to_kg: exact label match short-circuits with score 1") {
    HashingEmbedder em;
    auto set = align_to_kg({"lou seal"}, toy_universe(), em);
    REQUIRE(set.size() == 1);
    CHECK(set[0].entity == "m.3");
    CHECK(set[0].score == 1.0);
}

TEST_CASE("align_to_kg: distinctness forces the second keyword to next-best") {
    HashingEmbedder em;
    auto set = align_to_kg({"France", "France"}, toy_universe(), em);
    REQUIRE(set.size() == 2);
    CHECK(set[0].entity == "m.1");
    CHECK(set[0].score == 1.0);
    CHECK(set[1].entity != "m.1");
}

TEST_CASE("align_to_kg: equals the cosine oracle per keyword") {
    HashingEmbedder em;
    auto universe = toy_universe();
    std::vector<std::string> keywords{"world series games", "mascot costume"};
    auto set = align_to_kg(keywords, universe, em);
    REQUIRE(set.size() == 2);

    std::vector<std::pair<EntityId, EmbeddingVector>> candidates;
    for (const auto& [id, label] : universe)
        candidates.emplace_back(id, em.embed_one(label));

    auto top1 = cosine_top_k(em.embed_one(keywords[0]), candidates, 1);
    CHECK(set[0].entity == top1[0]);

    // second keyword: best among the remaining
    std::vector<std::pair<EntityId, EmbeddingVector>> rest;
    for (const auto& c : candidates)
        if (c.first != set[0].entity) rest.push_back(c);
    auto top2 = cosine_top_k(em.embed_one(keywords[1]), rest, 1);
    CHECK(set[1].entity == top2[0]);

    for (const auto& t : set) {
        bool in_universe = false;
        for (const auto& [id, label] : universe)
            if (id == t.entity) in_universe = true;
        CHECK(in_universe);
    }
}

TEST_CASE("align_to_kg: empty universe is an error") {
    HashingEmbedder em;
    CHECK_THROWS_AS((void)align_to_kg({"x"}, {}, em), PreconditionError);
}

TEST_CASE("align_to_kg is deterministic") {
    HashingEmbedder em;
    auto a = align_to_kg({"baseball team parade"}, toy_universe(), em);
    auto b = align_to_kg({"baseball team parade"}, toy_universe(), em);
    REQUIRE(a.size() == b.size());
    CHECK(a[0].entity == b[0].entity);
    CHECK(a[0].score == b[0].score);
}
