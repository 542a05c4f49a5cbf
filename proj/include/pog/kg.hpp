#pragma once
// In-memory triple store with a per-entity adjacency index, plus the
// GraphSource interface that lets the pipeline run against either this
// store or a remote SPARQL endpoint.
//
// Storage model:
// - triples are deduplicated on load (multiplicity-1)
// - adjacency keeps outgoing and incoming triple indices per entity
// - labels are short textual descriptions; a missing entity label renders
//   as "Unnamed Entity", a missing relation label falls back to the
//   relation id itself (Freebase relation ids are already readable)

#include "pog/errors.hpp"

#include <optional>
#include <string>
#include <unordered_map>
#include <unordered_set>
#include <vector>

namespace pog {

using EntityId = std::string;

// Which side of the stored triple the *connected* entity sits on:
// Tail = the query entity is the head, Head = the query entity is the tail.
enum class Direction { Tail, Head };

inline const char* direction_to_string(Direction d) {
    return d == Direction::Tail ? "tail" : "head";
}

struct Triple {
    EntityId head;
    std::string relation;
    EntityId tail;

    bool operator==(const Triple&) const = default;
};

struct NeighborRecord {
    std::string relation;
    EntityId neighbor;
    Direction direction = Direction::Tail;

    bool operator==(const NeighborRecord&) const = default;
};

// 1-hop record that also carries the neighbor's display name, mirroring the
// combined subgraph-search query against remote endpoints.
struct NamedNeighbor {
    std::string relation;
    EntityId neighbor;
    std::string neighbor_name;
    Direction direction = Direction::Tail;
};

class KnowledgeGraph {
public:
    KnowledgeGraph() = default;

    // Adds a triple unless an identical one is already present.
    // Head and tail are registered as entities.
    void add_triple(const EntityId& head, const std::string& relation, const EntityId& tail);

    void set_label(const std::string& id, const std::string& label);

    // head_id \t relation \t tail_id, one triple per line; optional
    // companion label file with id \t label lines.
    static KnowledgeGraph load_files(const std::string& triples_path,
                                     const std::string& labels_path = "");

    std::vector<NeighborRecord> neighbors_1hop(const EntityId& e) const;

    // Stored description; "Unnamed Entity" for unlabeled entities, the id
    // itself for unlabeled relation ids.
    std::string label(const std::string& id) const;

    KnowledgeGraph induced_subgraph(const std::unordered_set<EntityId>& entity_set) const;

    bool has_entity(const EntityId& e) const { return entities_.count(e) > 0; }
    bool has_relation(const std::string& r) const { return relations_.count(r) > 0; }
    bool has_triple(const Triple& t) const;

    const std::vector<Triple>& triples() const { return triples_; }
    const std::unordered_set<EntityId>& entities() const { return entities_; }
    const std::unordered_map<std::string, std::string>& labels() const { return labels_; }

    std::size_t triple_count() const { return triples_.size(); }
    std::size_t entity_count() const { return entities_.size(); }

private:
    std::vector<Triple> triples_;
    std::unordered_set<EntityId> entities_;
    std::unordered_set<std::string> relations_;
    std::unordered_map<std::string, std::string> labels_;
    std::unordered_map<EntityId, std::vector<std::size_t>> out_; // e is head
    std::unordered_map<EntityId, std::vector<std::size_t>> in_;  // e is tail
    std::unordered_set<std::string> triple_keys_;                // dedup
};

// Backend the pipeline traverses: local store or SPARQL endpoint.
// Implementations must be safe for concurrent readers.
class GraphSource {
public:
    virtual ~GraphSource() = default;

    virtual std::vector<NeighborRecord> neighbors_1hop(const EntityId& e) const = 0;
    virtual std::string label(const std::string& id) const = 0;

    // 1-hop expansion with display names in one round trip.
    virtual std::vector<NamedNeighbor> expand_1hop(const EntityId& e) const = 0;

    // Whether entity existence can be checked up front (local store only).
    virtual std::optional<bool> knows_entity(const EntityId& e) const { (void)e; return std::nullopt; }
};

class LocalGraphSource final : public GraphSource {
public:
    explicit LocalGraphSource(const KnowledgeGraph& graph) : graph_(graph) {}

    std::vector<NeighborRecord> neighbors_1hop(const EntityId& e) const override {
        return graph_.neighbors_1hop(e);
    }
    std::string label(const std::string& id) const override { return graph_.label(id); }
    std::vector<NamedNeighbor> expand_1hop(const EntityId& e) const override;
    std::optional<bool> knows_entity(const EntityId& e) const override {
        return graph_.has_entity(e);
    }

    const KnowledgeGraph& graph() const { return graph_; }

private:
    const KnowledgeGraph& graph_;
};

} // namespace pog
