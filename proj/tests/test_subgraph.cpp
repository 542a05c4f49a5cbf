#include "pog/subgraph.hpp"
#include "test_support.hpp"

#include <doctest.h>

#include <map>
#include <random>

using namespace pog;

namespace {

// BFS ball oracle over the raw triple list (undirected).
std::set<EntityId> oracle_ball(const KnowledgeGraph& kg, const EntityId& start, int depth) {
    std::set<EntityId> ball{start};
    std::vector<EntityId> frontier{start};
    for (int d = 0; d < depth; ++d) {
        std::vector<EntityId> next;
        for (const EntityId& e : frontier) {
            for (const Triple& t : kg.triples()) {
                if (t.head == e && !ball.count(t.tail)) {
                    ball.insert(t.tail);
                    next.push_back(t.tail);
                }
                if (t.tail == e && !ball.count(t.head)) {
                    ball.insert(t.head);
                    next.push_back(t.head);
                }
            }
        }
        frontier = std::move(next);
    }
    return ball;
}

std::set<EntityId> covered_entities(const QuestionSubgraph& q) {
    std::set<EntityId> out;
    for (SupernodeId s = 0; s < q.supernode_count(); ++s)
        for (const EntityId& e : q.members(s)) out.insert(e);
    return out;
}

std::set<std::tuple<EntityId, std::string, EntityId>> backing_union(const QuestionSubgraph& q) {
    std::set<std::tuple<EntityId, std::string, EntityId>> out;
    for (const Superedge& e : q.edges())
        for (const Triple& t : e.backing) out.insert({t.head, t.relation, t.tail});
    return out;
}

} // namespace

TEST_CASE("build: single topic D=1 is exactly the 1-hop ball") {
    KnowledgeGraph kg;
    kg.add_triple("t", "r1", "a");
    kg.add_triple("b", "r2", "t");
    kg.add_triple("a", "r3", "far");
    LocalGraphSource source(kg);

    QuestionSubgraph q = build_question_subgraph(source, {"t"}, 1);
    CHECK(covered_entities(q) == std::set<EntityId>{"t", "a", "b"});
    // induced triples only: a->far is outside
    CHECK(backing_union(q) == std::set<std::tuple<EntityId, std::string, EntityId>>{
                                  {"t", "r1", "a"}, {"b", "r2", "t"}});
}

TEST_CASE("build: far-apart topics yield disjoint balls") {
    KnowledgeGraph kg;
    // chain t1 - c1 - c2 - c3 - c4 - t2 (undirected distance 5)
    kg.add_triple("t1", "r", "c1");
    kg.add_triple("c1", "r", "c2");
    kg.add_triple("c2", "r", "c3");
    kg.add_triple("c3", "r", "c4");
    kg.add_triple("c4", "r", "t2");
    LocalGraphSource source(kg);

    QuestionSubgraph q = build_question_subgraph(source, {"t1", "t2"}, 2);
    CHECK(covered_entities(q) ==
          std::set<EntityId>{"t1", "c1", "c2", "c3", "c4", "t2"});
    // triple (c2,r,c3) connects the two balls and is induced
    CHECK(backing_union(q).count({"c2", "r", "c3"}) == 1);

    QuestionSubgraph q1 = build_question_subgraph(source, {"t1", "t2"}, 1);
    CHECK(covered_entities(q1) == std::set<EntityId>{"t1", "c1", "c4", "t2"});
    CHECK(backing_union(q1).count({"c1", "r", "c2"}) == 0);
}

TEST_CASE("build: entity set equals the BFS-ball oracle on random graphs") {
    std::mt19937_64 rng(21);
    for (int trial = 0; trial < 15; ++trial) {
        KnowledgeGraph kg = test::random_graph(rng, {.max_triples = 50});
        std::vector<EntityId> entities(kg.entities().begin(), kg.entities().end());
        std::sort(entities.begin(), entities.end());
        std::vector<EntityId> topics{entities[0],
                                     entities[entities.size() / 2]};
        int d_max = 1 + static_cast<int>(rng() % 3);

        LocalGraphSource source(kg);
        QuestionSubgraph q = build_question_subgraph(source, topics, d_max);

        std::set<EntityId> expected;
        for (const EntityId& t : topics) {
            auto ball = oracle_ball(kg, t, d_max);
            expected.insert(ball.begin(), ball.end());
        }
        CHECK(covered_entities(q) == expected);
    }
}

TEST_CASE("build: missing topic raises naming the entity") {
    KnowledgeGraph kg;
    kg.add_triple("a", "r", "b");
    LocalGraphSource source(kg);
    CHECK_THROWS_WITH_AS((void)build_question_subgraph(source, {"ghost"}, 1),
                         doctest::Contains("ghost"), PreconditionError);
}

TEST_CASE("cluster: parallel triples merge into one superedge with a relation set") {
    KnowledgeGraph kg;
    kg.add_triple("fr", "contained_by", "eu");
    kg.add_triple("fr", "partOf", "eu");
    kg.set_label("fr", "France");
    kg.set_label("eu", "Europe");

    QuestionSubgraph clustered = cluster_supernodes(test::make_unclustered(kg, {"fr"}));
    REQUIRE(clustered.edges().size() == 1);
    CHECK(clustered.edges()[0].relations ==
          std::vector<std::string>{"contained_by", "partOf"});
}

TEST_CASE("cluster: championship-style answer sets merge into one supernode") {
    KnowledgeGraph kg = KnowledgeGraph::load_files(
        std::string(POG_FIXTURE_DIR) + "/lou_seal.kg.tsv",
        std::string(POG_FIXTURE_DIR) + "/lou_seal.labels.tsv");
    QuestionSubgraph clustered =
        cluster_supernodes(test::make_unclustered(kg, {"m.0kgcl"}));

    SupernodeId s = clustered.supernode_of("m.0c14ws");
    REQUIRE(s >= 0);
    CHECK(clustered.members(s) ==
          std::vector<EntityId>{"m.0c14ws", "m.0d12ws", "m.0e10ws"});
    // 7 triples collapse to 5 superedges: 3 championships into 1
    CHECK(clustered.edges().size() == 5);
}

TEST_CASE("cluster: all-distinct signatures leave the partition unchanged") {
    KnowledgeGraph kg;
    kg.add_triple("a", "r1", "b");
    kg.add_triple("b", "r2", "c");
    kg.add_triple("c", "r3", "a");
    QuestionSubgraph clustered = cluster_supernodes(test::make_unclustered(kg, {"a"}));
    CHECK(clustered.supernode_count() == 3);
    for (SupernodeId s = 0; s < 3; ++s) CHECK(clustered.members(s).size() == 1);
}

TEST_CASE("cluster: topic entities never merge") {
    KnowledgeGraph kg;
    // t and u have identical signatures, but t is a topic
    kg.add_triple("hub", "r", "t");
    kg.add_triple("hub", "r", "u");
    QuestionSubgraph clustered = cluster_supernodes(test::make_unclustered(kg, {"t"}));
    CHECK(clustered.supernode_of("t") != clustered.supernode_of("u"));
}

TEST_CASE("cluster losslessness on random graphs") {
    std::mt19937_64 rng(31);
    for (int trial = 0; trial < 25; ++trial) {
        KnowledgeGraph kg = test::random_graph(rng);
        std::vector<EntityId> entities(kg.entities().begin(), kg.entities().end());
        std::sort(entities.begin(), entities.end());
        QuestionSubgraph unclustered = test::make_unclustered(kg, {entities[0]});
        QuestionSubgraph clustered = cluster_supernodes(unclustered);

        std::set<std::tuple<EntityId, std::string, EntityId>> original;
        for (const Triple& t : kg.triples()) original.insert({t.head, t.relation, t.tail});
        CHECK(backing_union(clustered) == original);

        // each backing triple is consistent with its superedge
        for (const Superedge& e : clustered.edges()) {
            CHECK(!e.relations.empty());
            for (const Triple& t : e.backing) {
                const auto& from_members = clustered.members(e.from);
                const auto& to_members = clustered.members(e.to);
                CHECK(std::count(from_members.begin(), from_members.end(), t.head) == 1);
                CHECK(std::count(to_members.begin(), to_members.end(), t.tail) == 1);
                CHECK(std::count(e.relations.begin(), e.relations.end(), t.relation) == 1);
            }
        }
    }
}

TEST_CASE("reduce: single topic is identity") {
    KnowledgeGraph kg;
    kg.add_triple("t", "r", "a");
    kg.add_triple("a", "r", "b");
    QuestionSubgraph q = test::make_unclustered(kg, {"t"});
    QuestionSubgraph reduced = reduce_by_topic_paths(q, 3);
    CHECK(covered_entities(reduced) == covered_entities(q));
    CHECK(reduced.edges().size() == q.edges().size());
}

TEST_CASE("reduce: dangling branch off the chain is removed") {
    KnowledgeGraph kg;
    // chain t1 - m - t2 of length 2 = 2*d_max with d_max=1, branch m - b
    kg.add_triple("t1", "r", "m");
    kg.add_triple("m", "r", "t2");
    kg.add_triple("m", "r", "b");
    QuestionSubgraph q = test::make_unclustered(kg, {"t1", "t2"});

    std::vector<std::string> warnings;
    QuestionSubgraph reduced = reduce_by_topic_paths(q, 1, &warnings);
    CHECK(covered_entities(reduced) == std::set<EntityId>{"t1", "m", "t2"});
    CHECK(warnings.empty());
}

TEST_CASE("reduce: disconnected topic keeps its ball with a warning") {
    KnowledgeGraph kg;
    kg.add_triple("t1", "r", "a");
    kg.add_triple("t2", "r", "b");
    QuestionSubgraph q = test::make_unclustered(kg, {"t1", "t2"});

    std::vector<std::string> warnings;
    QuestionSubgraph reduced = reduce_by_topic_paths(q, 2, &warnings);
    CHECK(covered_entities(reduced) == std::set<EntityId>{"t1", "a", "t2", "b"});
    CHECK(warnings.size() == 2);
}

TEST_CASE("reduce: soundness and idempotence vs the DFS oracle on random graphs") {
    std::mt19937_64 rng(41);
    for (int trial = 0; trial < 20; ++trial) {
        KnowledgeGraph kg = test::random_graph(rng, {.max_triples = 60});
        std::vector<EntityId> entities(kg.entities().begin(), kg.entities().end());
        std::sort(entities.begin(), entities.end());
        std::vector<EntityId> topics{entities.front(), entities.back()};
        int d_max = 2;

        QuestionSubgraph q = test::make_unclustered(kg, topics);
        QuestionSubgraph reduced = reduce_by_topic_paths(q, d_max);

        // every supernode on a qualifying inter-topic path is retained
        std::set<SupernodeId> qualifying = test::oracle_inter_topic_vertices(q, 2 * d_max);
        std::set<EntityId> kept = covered_entities(reduced);
        for (SupernodeId s : qualifying)
            for (const EntityId& e : q.members(s)) CHECK(kept.count(e) == 1);

        // topics always retained
        for (const EntityId& t : topics) CHECK(kept.count(t) == 1);

        // idempotent
        QuestionSubgraph twice = reduce_by_topic_paths(reduced, d_max);
        CHECK(covered_entities(twice) == kept);
        CHECK(twice.edges().size() == reduced.edges().size());

        // reduced is a subgraph of the original
        for (const EntityId& e : kept) CHECK(covered_entities(q).count(e) == 1);
    }
}

TEST_CASE("reduce preserves qualifying entity paths (soundness of exploration inputs)") {
    // chain of length 3 between topics plus an irrelevant offshoot
    KnowledgeGraph kg;
    kg.add_triple("t1", "a", "x");
    kg.add_triple("x", "b", "y");
    kg.add_triple("y", "c", "t2");
    kg.add_triple("x", "d", "dead");
    kg.add_triple("dead", "e", "deader");
    QuestionSubgraph q = test::make_unclustered(kg, {"t1", "t2"});
    QuestionSubgraph reduced = reduce_by_topic_paths(q, 2);

    PathSet before = entity_path_find(q, {"t1", "t2"}, 2, 4, Phase::Topic, 2);
    PathSet after = entity_path_find(reduced, {"t1", "t2"}, 2, 4, Phase::Topic, 2);
    CHECK(before.size() == after.size());
    CHECK(before.size() == 1);
}

TEST_CASE("subgraph debug dump lists supernodes, members, superedges") {
    KnowledgeGraph kg;
    kg.add_triple("a", "r", "b");
    kg.set_label("a", "A");
    QuestionSubgraph q = test::make_unclustered(kg, {"a"});
    auto doc = q.to_json();
    CHECK(doc["supernodes"].size() == 2);
    CHECK(doc["superedges"].size() == 1);
    CHECK(doc["supernodes"][0]["members"].is_array());
}
