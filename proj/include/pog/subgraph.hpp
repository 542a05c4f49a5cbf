#pragma once
// Question subgraph: the D_max-hop neighborhood union around the topic
// entities, represented at supernode level.
//
// Life cycle per question:
//   build_question_subgraph  — unclustered: one supernode per entity, one
//                              superedge per induced triple
//   cluster_supernodes       — (a) parallel triples between an ordered pair
//                              merge into one superedge carrying the relation
//                              set; (b) non-topic supernodes with identical
//                              neighborhood signatures merge, to a fixpoint
//   reduce_by_topic_paths    — keeps supernodes on simple inter-topic paths
//                              of length <= 2*D_max; single-topic identity
//
// Every superedge carries the original triples backing it, so clustering is
// lossless by construction and expansion can be checked exactly.

#include "pog/kg.hpp"

#include <json.hpp>

#include <string>
#include <unordered_map>
#include <vector>

namespace pog {

using SupernodeId = int;

struct Superedge {
    SupernodeId from = -1;
    SupernodeId to = -1;
    std::vector<std::string> relations; // sorted, unique
    std::vector<Triple> backing;        // original triples covered by this edge
};

class QuestionSubgraph {
public:
    QuestionSubgraph() = default;

    int supernode_count() const { return static_cast<int>(members_.size()); }
    const std::vector<EntityId>& members(SupernodeId s) const { return members_.at(s); }
    SupernodeId supernode_of(const EntityId& e) const;

    const std::vector<Superedge>& edges() const { return edges_; }
    const Superedge& edge(int id) const { return edges_.at(id); }
    const std::vector<int>& incident_edges(SupernodeId s) const { return adjacency_.at(s); }

    // Topic entity -> its supernode, in original topic order.
    const std::vector<std::pair<EntityId, SupernodeId>>& topics() const { return topics_; }
    bool is_topic_supernode(SupernodeId s) const;

    bool clustered() const { return clustered_; }
    const KnowledgeGraph& origin() const { return origin_; }

    // Display name for an entity or relation id; covers entities added
    // during node expansion as well as the original induced subgraph.
    std::string label(const std::string& id) const;

    std::size_t covered_entity_count() const;

    // ---- node-expand support (appends only; existing ids stay valid) ----
    SupernodeId ensure_entity(const EntityId& e, const std::string& label);
    int add_expansion_triple(const Triple& t); // returns the superedge id

    nlohmann::json to_json() const;

    // ---- construction API used by the builders below ----
    SupernodeId add_supernode(std::vector<EntityId> member_ids);
    int add_superedge(Superedge e);
    void set_origin(KnowledgeGraph origin) { origin_ = std::move(origin); }
    void set_clustered(bool clustered) { clustered_ = clustered; }
    void register_topic(const EntityId& e) { topics_.emplace_back(e, supernode_of(e)); }
    void copy_extra_labels(const QuestionSubgraph& other) {
        extra_labels_ = other.extra_labels_;
    }

private:
    std::vector<std::vector<EntityId>> members_;
    std::vector<Superedge> edges_;
    std::vector<std::vector<int>> adjacency_;
    std::unordered_map<EntityId, SupernodeId> node_of_;
    std::vector<std::pair<EntityId, SupernodeId>> topics_;
    std::unordered_map<std::string, std::string> extra_labels_; // expansion entities
    KnowledgeGraph origin_;
    bool clustered_ = false;
};

// D_max-hop expansion around the topic entities (undirected reachability),
// induced over the covered entity set. Unclustered output.
QuestionSubgraph build_question_subgraph(const GraphSource& source,
                                         const std::vector<EntityId>& topics,
                                         int d_max);

QuestionSubgraph cluster_supernodes(const QuestionSubgraph& input);

// With >= 2 topics keeps exactly the supernodes lying on some simple
// inter-topic path of length <= 2*d_max; a topic with no qualifying path to
// any other topic keeps its whole d_max-ball (warning recorded). Identity
// for a single topic.
QuestionSubgraph reduce_by_topic_paths(const QuestionSubgraph& input, int d_max,
                                       std::vector<std::string>* warnings = nullptr);

} // namespace pog
