#include "pog/answer.hpp"
#include "test_support.hpp"

#include <doctest.h>

using namespace pog;

namespace {

struct AnswerRig {
    KnowledgeGraph kg;
    QuestionSubgraph graph;
    QuestionBundle bundle{"what lies at the end?", {"first hop?"}};
    Indicator indicator;
    PipelineConfig config;
    MockLlm llm;
    HashingEmbedder embedder;
    PromptLibrary prompts;
    std::vector<std::string> degraded;

    AnswerRig() {
        kg.add_triple("a", "r1", "b");
        kg.add_triple("b", "r2", "c");
        kg.add_triple("a", "r3", "d");
        kg.set_label("a", "Alpha");
        kg.set_label("b", "Bravo");
        kg.set_label("c", "Charlie");
        kg.set_label("d", "Delta");
        graph = test::make_unclustered(kg);
        indicator.raw = "Alpha - r - what";
    }

    OpContext ctx() {
        return OpContext{graph, bundle, indicator, config, llm, embedder, prompts, &degraded};
    }

    PathSet paths() { return entity_path_find(graph, {"a"}, 0, 2, Phase::Topic, 2); }
};

} // namespace

TEST_CASE("summarize_paths: echo is identity") {
    AnswerRig rig;
    PathSet in = rig.paths();
    std::string echo;
    for (std::size_t i = 0; i < in.size(); ++i) {
        if (i) echo += "\n";
        echo += render_path(in.paths[i], rig.graph);
    }
    rig.llm.add(Purpose::Summarize, echo);
    OpContext ctx = rig.ctx();
    PathSet out = summarize_paths(in, ctx);
    CHECK(test::step_set(out) == test::step_set(in));
    CHECK(rig.degraded.empty());
}

TEST_CASE("summarize_paths: fabricated steps are dropped") {
    AnswerRig rig;
    PathSet in = rig.paths();
    // keep one real line, add one fabricated line
    std::string real = render_path(in.paths[0], rig.graph);
    rig.llm.add(Purpose::Summarize,
                real + "\n{Alpha} -> invented.relation -> {Nowhere Land}");
    OpContext ctx = rig.ctx();
    PathSet out = summarize_paths(in, ctx);
    REQUIRE(out.size() == 1);
    CHECK(out.paths[0].steps == in.paths[0].steps);
}

TEST_CASE("summarize_paths: a fabricated middle step truncates the run") {
    AnswerRig rig;
    PathSet in = rig.paths();
    // find the 2-step path a->b->c and corrupt its middle
    const EntityPath* two = nullptr;
    for (const EntityPath& p : in.paths)
        if (p.length() == 2) two = &p;
    REQUIRE(two != nullptr);
    rig.llm.add(Purpose::Summarize,
                "{Alpha} -> r1 -> {Bravo} -> fake.hop -> {Charlie}");
    OpContext ctx = rig.ctx();
    PathSet out = summarize_paths(in, ctx);
    REQUIRE(out.size() == 1);
    CHECK(out.paths[0].length() == 1); // only the validated first step survives
}

TEST_CASE("summarize_paths: all-invalid replies degrade to the input") {
    AnswerRig rig;
    PathSet in = rig.paths();
    rig.llm.add(Purpose::Summarize, "nothing that parses");
    rig.llm.add(Purpose::Summarize, "{Fake} -> made.up -> {Faker}");
    OpContext ctx = rig.ctx();
    PathSet out = summarize_paths(in, ctx);
    CHECK(test::step_set(out) == test::step_set(in));
    REQUIRE(rig.degraded.size() == 1);
}

TEST_CASE("evaluate_sufficiency: {Yes} token gates sufficiency and extracts the answer") {
    AnswerRig rig;
    rig.llm.add(Purpose::Evaluate,
                "{Yes}. The chain ends at Charlie, so the answer is {Charlie}.");
    OpContext ctx = rig.ctx();
    AnswerOutcome out = evaluate_sufficiency(rig.paths(), ctx);
    CHECK(out.verdict == Verdict::Sufficient);
    CHECK(out.answer == "Charlie");
    CHECK(!out.evidence_paths.empty());
}

TEST_CASE("evaluate_sufficiency: {No} captures the reason") {
    AnswerRig rig;
    rig.llm.add(Purpose::Evaluate, "{No} missing link");
    OpContext ctx = rig.ctx();
    AnswerOutcome out = evaluate_sufficiency(rig.paths(), ctx);
    CHECK(out.verdict == Verdict::Insufficient);
    CHECK(out.reason == "{No} missing link");
}

TEST_CASE("evaluate_sufficiency: neither token twice degrades to insufficient") {
    AnswerRig rig;
    rig.llm.add(Purpose::Evaluate, "hmm");
    rig.llm.add(Purpose::Evaluate, "still hmm");
    OpContext ctx = rig.ctx();
    AnswerOutcome out = evaluate_sufficiency(rig.paths(), ctx);
    CHECK(out.verdict == Verdict::Insufficient);
    REQUIRE(rig.degraded.size() == 1);
}

TEST_CASE("extract_answer_text rules") {
    CHECK(extract_answer_text("{Yes} the answer is {2014 World Series}.") ==
          "2014 World Series");
    // brace group before "answer" is skipped in favor of the one after
    CHECK(extract_answer_text("{Yes} path hits {Denmark}; the answer is {Denmark}.") ==
          "Denmark");
    // no group after "answer": first non-verdict group anywhere
    CHECK(extract_answer_text("{Yes} it is {Americas}, answer given") == "Americas");
    // no braces at all: trimmed reply line
    CHECK(extract_answer_text("  plain text reply \n") == "plain text reply");
}

TEST_CASE("generate_final_answer: grounded vs own-knowledge classification") {
    SUBCASE("empty paths, answer from own knowledge") {
        AnswerRig rig;
        rig.llm.add(Purpose::Generate, "From my own knowledge the answer is {Atlantis}.");
        OpContext ctx = rig.ctx();
        PathSet empty;
        AnswerOutcome out = generate_final_answer(empty, ctx);
        CHECK(out.answer == "Atlantis");
        CHECK(out.evidence_source == EvidenceSource::KgInspiredLlm);
    }

    SUBCASE("answer present on an evidence path is kg_only") {
        AnswerRig rig;
        rig.llm.add(Purpose::Generate, "The paths show the answer is {Charlie}.");
        OpContext ctx = rig.ctx();
        AnswerOutcome out = generate_final_answer(rig.paths(), ctx);
        CHECK(out.answer == "Charlie");
        CHECK(out.evidence_source == EvidenceSource::KgOnly);
    }
}
