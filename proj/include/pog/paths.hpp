#pragma once
// Reasoning-path types over a question subgraph. A PathStep traverses one
// superedge in either orientation; an EntityPath threads an ordered anchor
// list through a step sequence, with anchor positions marking segment
// boundaries. Paths compare and deduplicate by step sequence.

#include "pog/subgraph.hpp"

#include <compare>
#include <cstddef>
#include <string>
#include <vector>

namespace pog {

struct PathStep {
    SupernodeId from = -1; // traversal source
    SupernodeId to = -1;   // traversal target
    int edge = -1;         // superedge id in the question subgraph
    bool forward = true;   // traversal matches the stored triple orientation

    auto operator<=>(const PathStep&) const = default;
};

struct EntityPath {
    std::vector<EntityId> anchors;        // ordered anchor entities
    std::vector<std::size_t> anchor_pos;  // node positions, 0..steps.size()
    std::vector<PathStep> steps;

    std::size_t length() const { return steps.size(); }

    SupernodeId node_at(std::size_t pos) const {
        if (steps.empty()) return -1;
        return pos == 0 ? steps.front().from : steps[pos - 1].to;
    }
    SupernodeId head_supernode() const { return node_at(0); }
    SupernodeId tail_supernode() const { return node_at(steps.size()); }

    // Steps of the run leaving anchor i, up to the next anchor (or the path
    // end for the last anchor). Empty when the anchor starts no run.
    std::vector<PathStep> run_from_anchor(std::size_t anchor_index,
                                          std::size_t max_steps) const;

    bool same_steps(const EntityPath& other) const { return steps == other.steps; }
};

enum class Phase { Topic, Supplement, Expand, Final };

const char* phase_to_string(Phase p);

struct PathSet {
    std::vector<EntityPath> paths;
    Phase phase = Phase::Topic;
    int depth = 0;

    bool empty() const { return paths.empty(); }
    std::size_t size() const { return paths.size(); }
};

// Sorts into canonical (step-sequence) order and removes duplicates.
void canonicalize(std::vector<EntityPath>& paths);

bool contains_path(const std::vector<EntityPath>& haystack, const EntityPath& needle);

} // namespace pog
