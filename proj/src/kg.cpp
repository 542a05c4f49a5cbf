#include "pog/kg.hpp"

#include <fstream>
#include <sstream>

namespace pog {

namespace {

std::string triple_key(const EntityId& h, const std::string& r, const EntityId& t) {
    std::string key;
    key.reserve(h.size() + r.size() + t.size() + 2);
    key += h;
    key += '\t';
    key += r;
    key += '\t';
    key += t;
    return key;
}

} // namespace

void KnowledgeGraph::add_triple(const EntityId& head, const std::string& relation,
                                const EntityId& tail) {
    if (head.empty() || relation.empty() || tail.empty())
        throw PreconditionError("triple fields must be non-empty");
    std::string key = triple_key(head, relation, tail);
    if (triple_keys_.count(key)) return;
    triple_keys_.insert(std::move(key));

    std::size_t idx = triples_.size();
    triples_.push_back(Triple{head, relation, tail});
    entities_.insert(head);
    entities_.insert(tail);
    relations_.insert(relation);
    out_[head].push_back(idx);
    in_[tail].push_back(idx);
}

void KnowledgeGraph::set_label(const std::string& id, const std::string& label) {
    labels_[id] = label;
}

KnowledgeGraph KnowledgeGraph::load_files(const std::string& triples_path,
                                          const std::string& labels_path) {
    KnowledgeGraph g;
    std::ifstream in(triples_path);
    if (!in) throw Error("cannot open triple file: " + triples_path);

    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        std::size_t t1 = line.find('\t');
        std::size_t t2 = t1 == std::string::npos ? std::string::npos : line.find('\t', t1 + 1);
        if (t1 == std::string::npos || t2 == std::string::npos)
            throw ParseError(triples_path + ":" + std::to_string(line_no) +
                                 ": expected head\\trelation\\ttail",
                             line);
        g.add_triple(line.substr(0, t1), line.substr(t1 + 1, t2 - t1 - 1),
                     line.substr(t2 + 1));
    }

    if (!labels_path.empty()) {
        std::ifstream lin(labels_path);
        if (!lin) throw Error("cannot open label file: " + labels_path);
        line_no = 0;
        while (std::getline(lin, line)) {
            ++line_no;
            if (line.empty()) continue;
            std::size_t tab = line.find('\t');
            if (tab == std::string::npos)
                throw ParseError(labels_path + ":" + std::to_string(line_no) +
                                     ": expected id\\tlabel",
                                 line);
            g.set_label(line.substr(0, tab), line.substr(tab + 1));
        }
    }
    return g;
}

std::vector<NeighborRecord> KnowledgeGraph::neighbors_1hop(const EntityId& e) const {
    std::vector<NeighborRecord> records;
    if (auto it = out_.find(e); it != out_.end()) {
        for (std::size_t idx : it->second) {
            const Triple& t = triples_[idx];
            records.push_back(NeighborRecord{t.relation, t.tail, Direction::Tail});
        }
    }
    if (auto it = in_.find(e); it != in_.end()) {
        for (std::size_t idx : it->second) {
            const Triple& t = triples_[idx];
            records.push_back(NeighborRecord{t.relation, t.head, Direction::Head});
        }
    }
    return records;
}

std::string KnowledgeGraph::label(const std::string& id) const {
    if (auto it = labels_.find(id); it != labels_.end()) return it->second;
    if (relations_.count(id)) return id;
    return "Unnamed Entity";
}

bool KnowledgeGraph::has_triple(const Triple& t) const {
    return triple_keys_.count(triple_key(t.head, t.relation, t.tail)) > 0;
}

KnowledgeGraph KnowledgeGraph::induced_subgraph(
    const std::unordered_set<EntityId>& entity_set) const {
    for (const EntityId& e : entity_set)
        if (!entities_.count(e))
            throw PreconditionError("entity not in graph: " + e);

    KnowledgeGraph sub;
    for (const Triple& t : triples_)
        if (entity_set.count(t.head) && entity_set.count(t.tail))
            sub.add_triple(t.head, t.relation, t.tail);
    // Isolated members of the entity set still belong to the subgraph.
    for (const EntityId& e : entity_set) sub.entities_.insert(e);

    for (const EntityId& e : sub.entities_)
        if (auto it = labels_.find(e); it != labels_.end()) sub.set_label(e, it->second);
    for (const std::string& r : sub.relations_)
        if (auto it = labels_.find(r); it != labels_.end()) sub.set_label(r, it->second);
    return sub;
}

std::vector<NamedNeighbor> LocalGraphSource::expand_1hop(const EntityId& e) const {
    std::vector<NamedNeighbor> out;
    for (const NeighborRecord& r : graph_.neighbors_1hop(e))
        out.push_back(NamedNeighbor{r.relation, r.neighbor, graph_.label(r.neighbor), r.direction});
    return out;
}

} // namespace pog
