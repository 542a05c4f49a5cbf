#include "pog/subgraph.hpp"

#include <algorithm>
#include <deque>
#include <map>
#include <set>
#include <tuple>

namespace pog {

namespace {

bool triple_less(const Triple& a, const Triple& b) {
    return std::tie(a.head, a.relation, a.tail) < std::tie(b.head, b.relation, b.tail);
}

} // namespace

SupernodeId QuestionSubgraph::supernode_of(const EntityId& e) const {
    auto it = node_of_.find(e);
    return it == node_of_.end() ? -1 : it->second;
}

bool QuestionSubgraph::is_topic_supernode(SupernodeId s) const {
    for (const auto& [entity, sn] : topics_)
        if (sn == s) return true;
    return false;
}

std::string QuestionSubgraph::label(const std::string& id) const {
    if (auto it = extra_labels_.find(id); it != extra_labels_.end()) return it->second;
    return origin_.label(id);
}

std::size_t QuestionSubgraph::covered_entity_count() const {
    std::size_t n = 0;
    for (const auto& m : members_) n += m.size();
    return n;
}

SupernodeId QuestionSubgraph::add_supernode(std::vector<EntityId> member_ids) {
    SupernodeId id = static_cast<SupernodeId>(members_.size());
    for (const EntityId& e : member_ids) node_of_[e] = id;
    members_.push_back(std::move(member_ids));
    adjacency_.emplace_back();
    return id;
}

int QuestionSubgraph::add_superedge(Superedge e) {
    int id = static_cast<int>(edges_.size());
    adjacency_.at(e.from).push_back(id);
    if (e.to != e.from) adjacency_.at(e.to).push_back(id);
    edges_.push_back(std::move(e));
    return id;
}

SupernodeId QuestionSubgraph::ensure_entity(const EntityId& e, const std::string& label) {
    if (SupernodeId s = supernode_of(e); s >= 0) return s;
    extra_labels_[e] = label;
    return add_supernode({e});
}

int QuestionSubgraph::add_expansion_triple(const Triple& t) {
    SupernodeId from = supernode_of(t.head);
    SupernodeId to = supernode_of(t.tail);
    if (from < 0 || to < 0)
        throw PreconditionError("expansion triple endpoints must be registered first");
    for (int id : adjacency_.at(from)) {
        Superedge& e = edges_[id];
        if (e.from != from || e.to != to) continue;
        if (!std::binary_search(e.relations.begin(), e.relations.end(), t.relation))
            continue;
        // already covered by this (possibly clustered) superedge
        if (std::find(e.backing.begin(), e.backing.end(), t) == e.backing.end()) {
            e.backing.push_back(t);
            std::sort(e.backing.begin(), e.backing.end(), triple_less);
        }
        return id;
    }
    return add_superedge(Superedge{from, to, {t.relation}, {t}});
}

nlohmann::json QuestionSubgraph::to_json() const {
    nlohmann::ordered_json doc;
    doc["clustered"] = clustered_;
    doc["supernodes"] = nlohmann::ordered_json::array();
    for (SupernodeId s = 0; s < supernode_count(); ++s) {
        nlohmann::ordered_json node;
        node["id"] = s;
        node["members"] = members_[s];
        std::vector<std::string> names;
        for (const auto& m : members_[s]) names.push_back(label(m));
        node["labels"] = names;
        node["topic"] = is_topic_supernode(s);
        doc["supernodes"].push_back(std::move(node));
    }
    doc["superedges"] = nlohmann::ordered_json::array();
    for (const Superedge& e : edges_) {
        nlohmann::ordered_json edge;
        edge["from"] = e.from;
        edge["to"] = e.to;
        edge["relations"] = e.relations;
        doc["superedges"].push_back(std::move(edge));
    }
    return doc;
}

// ---------------------------------------------------------------------------

QuestionSubgraph build_question_subgraph(const GraphSource& source,
                                         const std::vector<EntityId>& topics, int d_max) {
    if (topics.empty()) throw PreconditionError("topics must be non-empty");
    if (d_max < 1) throw PreconditionError("d_max must be >= 1");
    for (const EntityId& t : topics)
        if (auto known = source.knows_entity(t); known.has_value() && !*known)
            throw PreconditionError("topic entity not in graph: " + t);

    // Union of per-topic D_max balls under undirected reachability.
    std::set<EntityId> covered(topics.begin(), topics.end());
    std::map<EntityId, std::string> names;
    std::map<EntityId, std::vector<NamedNeighbor>> fetched;

    auto fetch = [&](const EntityId& e) -> const std::vector<NamedNeighbor>& {
        auto it = fetched.find(e);
        if (it == fetched.end()) it = fetched.emplace(e, source.expand_1hop(e)).first;
        return it->second;
    };

    for (const EntityId& topic : topics) {
        std::map<EntityId, int> dist{{topic, 0}};
        std::deque<EntityId> queue{topic};
        while (!queue.empty()) {
            EntityId u = queue.front();
            queue.pop_front();
            int d = dist[u];
            if (d >= d_max) continue;
            for (const NamedNeighbor& n : fetch(u)) {
                names.emplace(n.neighbor, n.neighbor_name);
                if (dist.emplace(n.neighbor, d + 1).second) queue.push_back(n.neighbor);
            }
        }
        for (const auto& [e, d] : dist) covered.insert(e);
    }

    // Induced triples need the edges incident to frontier entities too.
    std::vector<Triple> triples;
    std::set<std::tuple<EntityId, std::string, EntityId>> seen;
    for (const EntityId& e : covered) {
        for (const NamedNeighbor& n : fetch(e)) {
            names.emplace(n.neighbor, n.neighbor_name);
            if (!covered.count(n.neighbor)) continue;
            Triple t = n.direction == Direction::Tail ? Triple{e, n.relation, n.neighbor}
                                                      : Triple{n.neighbor, n.relation, e};
            if (seen.emplace(t.head, t.relation, t.tail).second) triples.push_back(t);
        }
    }
    std::sort(triples.begin(), triples.end(), triple_less);

    KnowledgeGraph origin;
    for (const Triple& t : triples) origin.add_triple(t.head, t.relation, t.tail);
    for (const EntityId& e : covered) {
        std::string name = names.count(e) ? names[e] : source.label(e);
        origin.set_label(e, name);
    }
    QuestionSubgraph q;
    q.set_origin(std::move(origin));

    for (const EntityId& e : covered) q.add_supernode({e});
    for (const Triple& t : triples) {
        Superedge edge;
        edge.from = q.supernode_of(t.head);
        edge.to = q.supernode_of(t.tail);
        edge.relations = {t.relation};
        edge.backing = {t};
        q.add_superedge(std::move(edge));
    }
    for (const EntityId& t : topics) q.register_topic(t);
    return q;
}

// ---------------------------------------------------------------------------

namespace {

// Regroups all backing triples by their (from, to) supernode pair.
void regroup_edges(QuestionSubgraph& q, const std::vector<Triple>& triples) {
    std::map<std::pair<SupernodeId, SupernodeId>, Superedge> grouped;
    for (const Triple& t : triples) {
        SupernodeId from = q.supernode_of(t.head);
        SupernodeId to = q.supernode_of(t.tail);
        Superedge& e = grouped[{from, to}];
        e.from = from;
        e.to = to;
        e.relations.push_back(t.relation);
        e.backing.push_back(t);
    }
    for (auto& [key, e] : grouped) {
        std::sort(e.relations.begin(), e.relations.end());
        e.relations.erase(std::unique(e.relations.begin(), e.relations.end()),
                          e.relations.end());
        std::sort(e.backing.begin(), e.backing.end(), triple_less);
        q.add_superedge(std::move(e));
    }
}

// Renumbers supernodes so ids are deterministic: sorted by smallest member.
QuestionSubgraph rebuild(const QuestionSubgraph& input,
                         std::vector<std::vector<EntityId>> groups, bool clustered) {
    for (auto& g : groups) std::sort(g.begin(), g.end());
    std::sort(groups.begin(), groups.end(),
              [](const auto& a, const auto& b) { return a.front() < b.front(); });

    QuestionSubgraph out;
    out.set_clustered(clustered);
    out.set_origin(input.origin());
    out.copy_extra_labels(input);
    for (auto& g : groups) out.add_supernode(std::move(g));
    regroup_edges(out, input.origin().triples());
    for (const auto& [entity, sn] : input.topics()) out.register_topic(entity);
    return out;
}

} // namespace

QuestionSubgraph cluster_supernodes(const QuestionSubgraph& input) {
    // Start from the input partition; rule (a) falls out of regrouping.
    std::vector<std::vector<EntityId>> groups;
    std::unordered_map<EntityId, SupernodeId> node_of;
    for (SupernodeId s = 0; s < input.supernode_count(); ++s) {
        groups.push_back(input.members(s));
        for (const EntityId& e : input.members(s)) node_of[e] = s;
    }
    std::set<EntityId> topic_entities;
    for (const auto& [entity, sn] : input.topics()) topic_entities.insert(entity);

    const std::vector<Triple>& triples = input.origin().triples();

    // Rule (b): merge non-topic supernodes with identical neighborhood
    // signatures, repeated until no group changes.
    for (;;) {
        // signature: sorted set of (neighbor supernode, relation, outgoing?)
        using Signature = std::vector<std::tuple<SupernodeId, std::string, bool>>;
        std::vector<Signature> sig(groups.size());
        for (const Triple& t : triples) {
            SupernodeId from = node_of.at(t.head);
            SupernodeId to = node_of.at(t.tail);
            sig[from].emplace_back(to, t.relation, true);
            sig[to].emplace_back(from, t.relation, false);
        }
        for (auto& s : sig) {
            std::sort(s.begin(), s.end());
            s.erase(std::unique(s.begin(), s.end()), s.end());
        }

        std::map<Signature, std::vector<std::size_t>> by_sig;
        for (std::size_t g = 0; g < groups.size(); ++g) {
            if (groups[g].empty()) continue;
            bool is_topic = false;
            for (const EntityId& e : groups[g])
                if (topic_entities.count(e)) is_topic = true;
            if (is_topic) continue; // topic entities never merge
            by_sig[sig[g]].push_back(g);
        }

        bool merged = false;
        for (auto& [signature, ids] : by_sig) {
            if (ids.size() < 2) continue;
            merged = true;
            auto& target = groups[ids.front()];
            for (std::size_t i = 1; i < ids.size(); ++i) {
                for (EntityId& e : groups[ids[i]]) target.push_back(std::move(e));
                groups[ids[i]].clear();
            }
        }
        if (!merged) break;

        groups.erase(std::remove_if(groups.begin(), groups.end(),
                                    [](const auto& g) { return g.empty(); }),
                     groups.end());
        node_of.clear();
        for (std::size_t g = 0; g < groups.size(); ++g)
            for (const EntityId& e : groups[g]) node_of[e] = static_cast<SupernodeId>(g);
    }

    return rebuild(input, std::move(groups), /*clustered=*/true);
}

// ---------------------------------------------------------------------------

namespace {

std::vector<std::vector<SupernodeId>> undirected_adjacency(const QuestionSubgraph& q) {
    std::vector<std::vector<SupernodeId>> adj(q.supernode_count());
    for (const Superedge& e : q.edges()) {
        adj[e.from].push_back(e.to);
        if (e.to != e.from) adj[e.to].push_back(e.from);
    }
    for (auto& a : adj) {
        std::sort(a.begin(), a.end());
        a.erase(std::unique(a.begin(), a.end()), a.end());
    }
    return adj;
}

std::vector<int> bfs_distances(const std::vector<std::vector<SupernodeId>>& adj,
                               SupernodeId start) {
    std::vector<int> dist(adj.size(), -1);
    std::deque<SupernodeId> queue{start};
    dist[start] = 0;
    while (!queue.empty()) {
        SupernodeId u = queue.front();
        queue.pop_front();
        for (SupernodeId v : adj[u])
            if (dist[v] < 0) {
                dist[v] = dist[u] + 1;
                queue.push_back(v);
            }
    }
    return dist;
}

// Marks every supernode lying on some simple s->t path of length <= budget.
// DFS guided by the BFS distance map from t, so hopeless branches are cut.
// Returns whether any qualifying path exists.
bool mark_path_vertices(const std::vector<std::vector<SupernodeId>>& adj, SupernodeId s,
                        SupernodeId t, int budget, std::vector<char>& qualified) {
    std::vector<int> dist_t = bfs_distances(adj, t);
    if (dist_t[s] < 0 || dist_t[s] > budget) return false;

    bool found = false;
    std::vector<SupernodeId> path{s};
    std::vector<char> on_path(adj.size(), 0);
    on_path[s] = 1;

    auto dfs = [&](auto&& self, SupernodeId u, int remaining) -> void {
        if (u == t) {
            found = true;
            for (SupernodeId v : path) qualified[v] = 1;
            return;
        }
        if (remaining == 0) return;
        for (SupernodeId v : adj[u]) {
            if (on_path[v]) continue;
            if (dist_t[v] < 0 || dist_t[v] > remaining - 1) continue;
            on_path[v] = 1;
            path.push_back(v);
            self(self, v, remaining - 1);
            path.pop_back();
            on_path[v] = 0;
        }
    };
    dfs(dfs, s, budget);
    return found;
}

} // namespace

QuestionSubgraph reduce_by_topic_paths(const QuestionSubgraph& input, int d_max,
                                       std::vector<std::string>* warnings) {
    const auto& topics = input.topics();
    if (topics.empty()) throw PreconditionError("reduce requires at least one topic");
    if (topics.size() == 1) return input;

    auto adj = undirected_adjacency(input);
    int budget = 2 * d_max;

    std::vector<char> qualified(input.supernode_count(), 0);
    std::vector<char> connected(topics.size(), 0);
    for (std::size_t i = 0; i < topics.size(); ++i) {
        for (std::size_t j = i + 1; j < topics.size(); ++j) {
            SupernodeId s = topics[i].second;
            SupernodeId t = topics[j].second;
            if (s == t) continue;
            if (mark_path_vertices(adj, s, t, budget, qualified)) {
                connected[i] = 1;
                connected[j] = 1;
            }
        }
    }

    // A topic with no qualifying path to any other keeps its whole ball.
    for (std::size_t i = 0; i < topics.size(); ++i) {
        if (connected[i]) continue;
        if (warnings)
            warnings->push_back("topic '" + topics[i].first +
                                "' has no qualifying path to any other topic; "
                                "keeping its " +
                                std::to_string(d_max) + "-hop ball");
        std::vector<int> dist = bfs_distances(adj, topics[i].second);
        for (std::size_t v = 0; v < dist.size(); ++v)
            if (dist[v] >= 0 && dist[v] <= d_max) qualified[v] = 1;
    }
    for (const auto& [entity, sn] : topics) qualified[sn] = 1;

    // Induce over the retained supernodes.
    std::vector<std::vector<EntityId>> groups;
    std::unordered_set<EntityId> kept_entities;
    for (SupernodeId s = 0; s < input.supernode_count(); ++s) {
        if (!qualified[s]) continue;
        groups.push_back(input.members(s));
        for (const EntityId& e : input.members(s)) kept_entities.insert(e);
    }

    for (auto& g : groups) std::sort(g.begin(), g.end());
    std::sort(groups.begin(), groups.end(),
              [](const auto& a, const auto& b) { return a.front() < b.front(); });

    QuestionSubgraph out;
    out.set_clustered(input.clustered());
    out.set_origin(input.origin().induced_subgraph(kept_entities));
    out.copy_extra_labels(input);
    for (auto& g : groups) out.add_supernode(std::move(g));

    // Preserve the input's edge granularity: a reduced unclustered graph
    // keeps one superedge per triple, a clustered one regroups per pair.
    if (input.clustered()) {
        regroup_edges(out, out.origin().triples());
    } else {
        std::vector<Triple> sorted = out.origin().triples();
        std::sort(sorted.begin(), sorted.end(), triple_less);
        for (const Triple& t : sorted)
            out.add_superedge(Superedge{out.supernode_of(t.head), out.supernode_of(t.tail),
                                        {t.relation},
                                        {t}});
    }
    for (const auto& [entity, sn] : input.topics()) out.register_topic(entity);
    return out;
}

} // namespace pog
