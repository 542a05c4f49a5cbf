#include "pog/explore.hpp"

#include "pog/text.hpp"

#include "pog/prune.hpp"

#include <algorithm>
#include <cctype>
#include <deque>
#include <map>
#include <set>
#include <sstream>

namespace pog {

// ---- path type helpers ----------------------------------------------------

const char* phase_to_string(Phase p) {
    switch (p) {
    case Phase::Topic: return "topic";
    case Phase::Supplement: return "supplement";
    case Phase::Expand: return "expand";
    case Phase::Final: return "final";
    }
    return "?";
}

std::vector<PathStep> EntityPath::run_from_anchor(std::size_t anchor_index,
                                                  std::size_t max_steps) const {
    if (anchor_index >= anchor_pos.size()) return {};
    std::size_t begin = anchor_pos[anchor_index];
    std::size_t end = anchor_index + 1 < anchor_pos.size() ? anchor_pos[anchor_index + 1]
                                                           : steps.size();
    if (begin >= end) return {};
    std::size_t take = std::min(max_steps, end - begin);
    return {steps.begin() + static_cast<std::ptrdiff_t>(begin),
            steps.begin() + static_cast<std::ptrdiff_t>(begin + take)};
}

void canonicalize(std::vector<EntityPath>& paths) {
    std::stable_sort(paths.begin(), paths.end(),
                     [](const EntityPath& a, const EntityPath& b) { return a.steps < b.steps; });
    paths.erase(std::unique(paths.begin(), paths.end(),
                            [](const EntityPath& a, const EntityPath& b) {
                                return a.steps == b.steps;
                            }),
                paths.end());
}

bool contains_path(const std::vector<EntityPath>& haystack, const EntityPath& needle) {
    for (const EntityPath& p : haystack)
        if (p.steps == needle.steps) return true;
    return false;
}

// ---- reorder ----------------------------------------------------------------

std::vector<std::pair<EntityId, std::string>> reorder(
    const std::vector<std::pair<EntityId, std::string>>& topics, const Indicator& indicator,
    std::vector<std::string>* warnings) {
    struct Keyed {
        std::size_t pos;
        std::size_t original;
        std::pair<EntityId, std::string> topic;
    };
    std::vector<Keyed> keyed;
    for (std::size_t i = 0; i < topics.size(); ++i) {
        auto pos = indicator.position_of(topics[i].first);
        if (!pos && warnings)
            warnings->push_back("topic '" + topics[i].second +
                                "' not referenced by the indicator; kept at the end");
        keyed.push_back(Keyed{pos.value_or(std::numeric_limits<std::size_t>::max()), i,
                              topics[i]});
    }
    std::stable_sort(keyed.begin(), keyed.end(), [](const Keyed& a, const Keyed& b) {
        if (a.pos != b.pos) return a.pos < b.pos;
        return a.original < b.original;
    });
    std::vector<std::pair<EntityId, std::string>> out;
    for (const Keyed& k : keyed) out.push_back(k.topic);
    return out;
}

// ---- entity_path_find -------------------------------------------------------

namespace {

std::vector<int> supernode_distances(const QuestionSubgraph& g, SupernodeId start) {
    std::vector<int> dist(g.supernode_count(), -1);
    std::deque<SupernodeId> queue{start};
    dist[start] = 0;
    while (!queue.empty()) {
        SupernodeId u = queue.front();
        queue.pop_front();
        for (int eid : g.incident_edges(u)) {
            const Superedge& e = g.edge(eid);
            SupernodeId v = e.from == u ? e.to : e.from;
            if (dist[v] < 0) {
                dist[v] = dist[u] + 1;
                queue.push_back(v);
            }
        }
    }
    return dist;
}

// Traversal steps leaving u, both orientations.
void steps_from(const QuestionSubgraph& g, SupernodeId u, std::vector<PathStep>& out) {
    out.clear();
    for (int eid : g.incident_edges(u)) {
        const Superedge& e = g.edge(eid);
        if (e.from == u) out.push_back(PathStep{u, e.to, eid, true});
        if (e.to == u) out.push_back(PathStep{u, e.from, eid, false});
    }
}

// All simple paths s -> t with 1 <= length <= max_len. The backward BFS
// distance map from t cuts branches that cannot reach t in budget: the DFS
// walks forward while the distances are the meet-in-the-middle half.
std::vector<std::vector<PathStep>> collect_segments(const QuestionSubgraph& g, SupernodeId s,
                                                    SupernodeId t, std::size_t max_len) {
    std::vector<std::vector<PathStep>> segments;
    if (max_len == 0) return segments;
    std::vector<int> dist_t = supernode_distances(g, t);
    if (dist_t[s] < 0 || static_cast<std::size_t>(dist_t[s]) > max_len) return segments;

    std::vector<PathStep> path;
    std::vector<char> on_path(g.supernode_count(), 0);
    on_path[s] = 1;

    auto dfs = [&](auto&& self, SupernodeId u) -> void {
        std::vector<PathStep> moves;
        steps_from(g, u, moves);
        for (const PathStep& step : moves) {
            if (on_path[step.to]) continue;
            std::size_t len = path.size() + 1;
            if (len > max_len) continue;
            if (dist_t[step.to] < 0 ||
                len + static_cast<std::size_t>(dist_t[step.to]) > max_len)
                continue;
            path.push_back(step);
            if (step.to == t) segments.push_back(path);
            if (step.to != t) { // segments are simple; t ends the segment
                on_path[step.to] = 1;
                self(self, step.to);
                on_path[step.to] = 0;
            }
            path.pop_back();
        }
    };
    dfs(dfs, s);
    return segments;
}

// All simple paths leaving s with length <= max_len (every prefix counts).
std::vector<std::vector<PathStep>> collect_walks(const QuestionSubgraph& g, SupernodeId s,
                                                 std::size_t max_len) {
    std::vector<std::vector<PathStep>> walks;
    if (max_len == 0) return walks;
    std::vector<PathStep> path;
    std::vector<char> on_path(g.supernode_count(), 0);
    on_path[s] = 1;

    auto dfs = [&](auto&& self, SupernodeId u) -> void {
        if (path.size() == max_len) return;
        std::vector<PathStep> moves;
        steps_from(g, u, moves);
        for (const PathStep& step : moves) {
            if (on_path[step.to]) continue;
            path.push_back(step);
            walks.push_back(path);
            on_path[step.to] = 1;
            self(self, step.to);
            on_path[step.to] = 0;
            path.pop_back();
        }
    };
    dfs(dfs, s);
    return walks;
}

} // namespace

PathSet entity_path_find(const QuestionSubgraph& graph, const std::vector<EntityId>& anchors,
                         std::size_t min_len, std::size_t max_len, Phase phase, int depth) {
    if (anchors.empty()) throw PreconditionError("entity_path_find requires anchors");

    std::vector<SupernodeId> nodes;
    for (const EntityId& a : anchors) {
        SupernodeId s = graph.supernode_of(a);
        if (s < 0) throw PreconditionError("anchor not in question subgraph: " + a);
        nodes.push_back(s);
    }

    PathSet out;
    out.phase = phase;
    out.depth = depth;

    if (anchors.size() == 1) {
        for (auto& walk : collect_walks(graph, nodes[0], max_len)) {
            if (walk.size() <= min_len) continue;
            EntityPath p;
            p.anchors = anchors;
            p.anchor_pos = {0};
            p.steps = std::move(walk);
            out.paths.push_back(std::move(p));
        }
        canonicalize(out.paths);
        return out;
    }

    // Per-pair segment pools, then every combination inside the bucket.
    std::size_t nsegs = anchors.size() - 1;
    std::vector<std::vector<std::vector<PathStep>>> pools(nsegs);
    std::vector<std::size_t> min_seg(nsegs, 0);
    for (std::size_t i = 0; i < nsegs; ++i) {
        if (nodes[i] == nodes[i + 1]) {
            pools[i] = {{}}; // coinciding anchors: empty segment
            min_seg[i] = 0;
            continue;
        }
        std::vector<int> dist = supernode_distances(graph, nodes[i]);
        if (dist[nodes[i + 1]] < 0) return out; // unreachable pair: no entity path
        min_seg[i] = static_cast<std::size_t>(dist[nodes[i + 1]]);
    }
    std::vector<std::size_t> min_after(nsegs + 1, 0);
    for (std::size_t i = nsegs; i-- > 0;) min_after[i] = min_after[i + 1] + min_seg[i];
    if (min_after[0] > max_len) return out;

    for (std::size_t i = 0; i < nsegs; ++i) {
        if (nodes[i] == nodes[i + 1]) continue;
        std::size_t budget = max_len - (min_after[0] - min_seg[i]);
        pools[i] = collect_segments(graph, nodes[i], nodes[i + 1], budget);
        if (pools[i].empty()) return out;
    }

    std::vector<const std::vector<PathStep>*> chosen(nsegs, nullptr);
    auto combine = [&](auto&& self, std::size_t seg, std::size_t total) -> void {
        if (seg == nsegs) {
            if (total <= min_len || total > max_len) return;
            EntityPath p;
            p.anchors = anchors;
            p.anchor_pos.push_back(0);
            for (std::size_t i = 0; i < nsegs; ++i) {
                p.anchor_pos.push_back(p.anchor_pos.back() + chosen[i]->size());
                p.steps.insert(p.steps.end(), chosen[i]->begin(), chosen[i]->end());
            }
            out.paths.push_back(std::move(p));
            return;
        }
        for (const auto& option : pools[seg]) {
            std::size_t next = total + option.size();
            if (next + min_after[seg + 1] > max_len) continue;
            chosen[seg] = &option;
            self(self, seg + 1, next);
        }
    };
    combine(combine, 0, 0);
    canonicalize(out.paths);
    return out;
}

// ---- phases -----------------------------------------------------------------

namespace {


std::vector<EntityId> ids_of(const std::vector<std::pair<EntityId, std::string>>& list) {
    std::vector<EntityId> ids;
    ids.reserve(list.size());
    for (const auto& [id, label] : list) ids.push_back(id);
    return ids;
}

void record_phase(PhaseContext& ctx, Phase phase, int depth, std::size_t num_paths,
                  std::size_t calls_before) {
    std::size_t calls_now = ctx.transcript ? ctx.transcript->call_count() : 0;
    ctx.trace.phases.push_back(PhaseRecord{phase_to_string(phase), depth, num_paths,
                                           calls_now - calls_before});
}

std::size_t calls_snapshot(const PhaseContext& ctx) {
    return ctx.transcript ? ctx.transcript->call_count() : 0;
}

} // namespace

PhaseOutcome run_topic_phase(PhaseContext& ctx) {
    auto list_t = reorder(ctx.topics, ctx.analysis.indicator, &ctx.trace.warnings);
    std::vector<EntityId> anchor_ids = ids_of(list_t);
    OpContext op = ctx.op_context();

    PhaseOutcome out;
    out.paths.phase = Phase::Topic;

    int d = std::min(ctx.analysis.d_predict, ctx.config.d_max);
    for (; d <= ctx.config.d_max; ++d) {
        std::size_t calls0 = calls_snapshot(ctx);
        std::size_t lo = anchor_ids.size() * static_cast<std::size_t>(d - 1);
        std::size_t hi = anchor_ids.size() * static_cast<std::size_t>(d);
        PathSet found = entity_path_find(ctx.subgraph, anchor_ids, lo, hi, Phase::Topic, d);
        if (found.empty()) {
            record_phase(ctx, Phase::Topic, d, 0, calls0);
            continue;
        }
        PathSet pruned = apply_strategy(found, anchor_ids, op);
        out.paths = pruned;
        out.depth = d;
        PathSet summarized = summarize_paths(pruned, op);
        AnswerOutcome eval = evaluate_sufficiency(summarized, op);
        record_phase(ctx, Phase::Topic, d, found.size(), calls0);
        if (eval.verdict == Verdict::Sufficient) {
            eval.evidence_source = EvidenceSource::KgOnly;
            out.answered = true;
            out.outcome = std::move(eval);
            return out;
        }
    }
    out.depth = ctx.config.d_max;
    return out;
}

std::vector<PredictedEntity> parse_supplement_reply(const std::string& reply,
                                                    PhaseContext& ctx) {
    std::map<int, std::string> predictions;
    std::map<int, std::string> indicators;

    std::istringstream in(reply);
    std::string line;
    while (std::getline(in, line)) {
        std::string l = line;
        std::transform(l.begin(), l.end(), l.begin(),
                       [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
        std::size_t colon = line.find(':');
        if (colon == std::string::npos) continue;
        std::string head = l.substr(0, colon);
        std::string value = line.substr(colon + 1);
        std::size_t b = value.find_first_not_of(" \t\r");
        if (b == std::string::npos) continue;
        std::size_t e = value.find_last_not_of(" \t\r");
        value = value.substr(b, e - b + 1);

        int n = 0;
        for (char c : head)
            if (std::isdigit(static_cast<unsigned char>(c))) n = n * 10 + (c - '0');
        if (n < 1 || n > 3) continue; // predictions capped at three

        if (head.find("prediction") != std::string::npos)
            predictions[n] = value;
        else if (head.find("indicator") != std::string::npos)
            indicators[n] = value;
    }

    // Alignment universe: every entity covered by the question subgraph.
    std::vector<std::pair<EntityId, std::string>> universe;
    for (SupernodeId s = 0; s < ctx.subgraph.supernode_count(); ++s)
        for (const EntityId& e : ctx.subgraph.members(s))
            universe.emplace_back(e, ctx.subgraph.label(e));

    std::vector<std::string> labels;
    for (const auto& [id, label] : universe) labels.push_back(label);
    std::vector<EmbeddingVector> universe_vecs;

    std::vector<PredictedEntity> out;
    for (const auto& [n, text] : predictions) {
        auto ind_it = indicators.find(n);
        if (ind_it == indicators.end()) continue;

        PredictedEntity pred;
        pred.text = text;

        std::string folded = fold_text(text);
        for (const auto& [id, label] : universe)
            if (fold_text(label) == folded) {
                pred.aligned = id;
                break;
            }
        if (!pred.aligned && !universe.empty()) {
            if (universe_vecs.empty()) universe_vecs = ctx.embedder.embed(labels);
            EmbeddingVector tv = ctx.embedder.embed_one(text);
            double best = -2.0;
            std::size_t best_idx = universe.size();
            for (std::size_t i = 0; i < universe.size(); ++i) {
                double sim = cosine_similarity(tv, universe_vecs[i]);
                if (sim > best) {
                    best = sim;
                    best_idx = i;
                }
            }
            if (best_idx < universe.size() && best >= ctx.config.supplement_align_threshold)
                pred.aligned = universe[best_idx].first;
        }

        std::optional<std::pair<EntityId, std::string>> predicted_ref;
        if (pred.aligned) predicted_ref = std::make_pair(*pred.aligned, text);
        pred.indicator = parse_indicator(ind_it->second, ctx.topics, predicted_ref);
        out.push_back(std::move(pred));
    }
    return out;
}

PhaseOutcome run_supplement_phase(PhaseContext& ctx, const PathSet& paths_t) {
    OpContext op = ctx.op_context();
    std::size_t calls0 = calls_snapshot(ctx);

    std::string topic_list;
    for (std::size_t i = 0; i < ctx.topics.size(); ++i) {
        if (i) topic_list += ", ";
        topic_list += ctx.topics[i].second;
    }
    std::string related;
    if (paths_t.empty()) {
        related = "(none)";
    } else {
        for (std::size_t i = 0; i < paths_t.size(); ++i) {
            if (i) related += "\n";
            related += op.render(paths_t.paths[i]);
        }
    }

    LlmRequest request;
    request.prompt = ctx.prompts.render(
        "llm_supplement", {{"question", ctx.bundle.question},
                           {"topic_entities", topic_list},
                           {"indicator", ctx.analysis.indicator.raw},
                           {"split_questions", ctx.bundle.joined_splits()},
                           {"paths", related}});
    request.purpose = Purpose::Supplement;
    request.temperature = temperature_for(Purpose::Supplement, ctx.config);
    request.max_tokens = ctx.config.max_tokens;

    std::string reply = ctx.llm.complete(request);
    std::vector<PredictedEntity> predictions = parse_supplement_reply(reply, ctx);

    PhaseOutcome out;
    out.paths.phase = Phase::Supplement;
    out.paths.depth = ctx.config.d_max;
    out.depth = ctx.config.d_max;

    PathSet pool;
    pool.phase = Phase::Supplement;
    pool.depth = ctx.config.d_max;
    std::vector<EntityId> last_list = ids_of(ctx.topics);

    std::size_t max_total =
        ctx.topics.size() * static_cast<std::size_t>(ctx.config.d_max);
    for (const PredictedEntity& pred : predictions) {
        if (!pred.aligned) continue; // unalignable predictions dropped
        std::vector<std::pair<EntityId, std::string>> with_pred = ctx.topics;
        with_pred.emplace_back(*pred.aligned, ctx.subgraph.label(*pred.aligned));
        auto list_s = reorder(with_pred, pred.indicator, &ctx.trace.warnings);
        std::vector<EntityId> anchor_ids = ids_of(list_s);

        PathSet found = entity_path_find(ctx.subgraph, anchor_ids, 0, max_total,
                                         Phase::Supplement, ctx.config.d_max);
        if (found.empty()) continue;
        PathSet picked = fuzzy_select(found, pred.indicator, ctx.config.w_max, op);
        pool.paths.insert(pool.paths.end(), picked.paths.begin(), picked.paths.end());
        last_list = anchor_ids;
    }
    canonicalize(pool.paths);

    if (pool.empty()) {
        record_phase(ctx, Phase::Supplement, ctx.config.d_max, 0, calls0);
        return out; // exhausted, not an error
    }

    PathSet pruned = apply_strategy(pool, last_list, op);
    out.paths = pruned;
    PathSet summarized = summarize_paths(pruned, op);
    AnswerOutcome eval = evaluate_sufficiency(summarized, op);
    record_phase(ctx, Phase::Supplement, ctx.config.d_max, pool.size(), calls0);
    if (eval.verdict == Verdict::Sufficient) {
        eval.evidence_source = EvidenceSource::LlmInspiredKg;
        out.answered = true;
        out.outcome = std::move(eval);
    }
    return out;
}

PhaseOutcome run_expand_phase(PhaseContext& ctx, const PathSet& paths_t,
                              const PathSet& paths_s) {
    OpContext op = ctx.op_context();
    auto list_t = reorder(ctx.topics, ctx.analysis.indicator, nullptr);
    std::vector<EntityId> anchor_ids = ids_of(list_t);

    PathSet current;
    current.phase = Phase::Expand;
    current.paths = paths_t.paths;
    current.paths.insert(current.paths.end(), paths_s.paths.begin(), paths_s.paths.end());
    canonicalize(current.paths);
    if (!current.empty()) current = apply_strategy(current, anchor_ids, op);
    current.phase = Phase::Expand;

    PhaseOutcome out;
    out.paths = current;

    std::set<EntityId> visited;
    for (int d = 1; d <= ctx.config.d_max; ++d) {
        std::size_t calls0 = calls_snapshot(ctx);

        // Unvisited entities on the current paths, in sorted order.
        std::set<EntityId> to_expand;
        for (const EntityPath& p : current.paths)
            for (std::size_t pos = 0; pos <= p.steps.size(); ++pos) {
                SupernodeId s = p.node_at(pos);
                if (s < 0) continue;
                for (const EntityId& e : ctx.subgraph.members(s))
                    if (!visited.count(e)) to_expand.insert(e);
            }

        // 1-hop fetch from the source KG; new triples become expansion edges.
        std::set<int> new_edges;
        for (const EntityId& e : to_expand) {
            for (const NamedNeighbor& n : ctx.source.expand_1hop(e)) {
                Triple t = n.direction == Direction::Tail
                               ? Triple{e, n.relation, n.neighbor}
                               : Triple{n.neighbor, n.relation, e};
                ctx.subgraph.ensure_entity(n.neighbor, n.neighbor_name);
                new_edges.insert(ctx.subgraph.add_expansion_triple(t));
            }
        }

        // Merge: each fetched edge may extend a path at either end by one
        // step; originals are kept.
        std::vector<EntityPath> merged = current.paths;
        for (const EntityPath& p : current.paths) {
            if (p.steps.empty()) continue;
            std::set<SupernodeId> on_path;
            for (std::size_t pos = 0; pos <= p.steps.size(); ++pos)
                on_path.insert(p.node_at(pos));
            SupernodeId tail = p.tail_supernode();
            SupernodeId head = p.head_supernode();

            for (int eid : new_edges) {
                const Superedge& e = ctx.subgraph.edge(eid);
                auto append = [&](SupernodeId next, bool forward) {
                    if (on_path.count(next)) return;
                    EntityPath ext = p;
                    ext.steps.push_back(PathStep{tail, next, eid, forward});
                    merged.push_back(std::move(ext));
                };
                auto prepend = [&](SupernodeId prev, bool forward) {
                    if (on_path.count(prev)) return;
                    EntityPath ext = p;
                    ext.steps.insert(ext.steps.begin(), PathStep{prev, head, eid, forward});
                    for (std::size_t& pos : ext.anchor_pos) ++pos;
                    merged.push_back(std::move(ext));
                };
                if (e.from == tail) append(e.to, true);
                if (e.to == tail) append(e.from, false);
                if (e.to == head) prepend(e.from, true);
                if (e.from == head) prepend(e.to, false);
            }
        }
        canonicalize(merged);

        PathSet round;
        round.phase = Phase::Expand;
        round.depth = d;
        round.paths = std::move(merged);
        std::size_t found = round.size();

        PathSet pruned = round.empty() ? round : apply_strategy(round, anchor_ids, op);
        pruned.phase = Phase::Expand;
        pruned.depth = d;
        current = pruned;
        out.paths = current;
        out.depth = d;

        if (!current.empty()) {
            PathSet summarized = summarize_paths(current, op);
            AnswerOutcome eval = evaluate_sufficiency(summarized, op);
            record_phase(ctx, Phase::Expand, d, found, calls0);
            if (eval.verdict == Verdict::Sufficient) {
                eval.evidence_source = EvidenceSource::KgOnly;
                out.answered = true;
                out.outcome = std::move(eval);
                return out;
            }
        } else {
            record_phase(ctx, Phase::Expand, d, found, calls0);
        }
        visited.insert(to_expand.begin(), to_expand.end());
    }
    return out;
}

} // namespace pog
