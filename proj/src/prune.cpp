#include "pog/prune.hpp"

#include <algorithm>
#include <cctype>
#include <map>
#include <set>
#include <sstream>

namespace pog {

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9E3779B97F4A7C15ull;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
    return x ^ (x >> 31);
}

std::string render_node(SupernodeId s, const QuestionSubgraph& graph) {
    // members are stored sorted by id already
    std::string out = "{";
    const auto& members = graph.members(s);
    for (std::size_t i = 0; i < members.size(); ++i) {
        if (i) out += ", ";
        out += graph.label(members[i]);
    }
    out += "}";
    return out;
}

std::string render_relations(const Superedge& edge, int edge_id, bool pog_e,
                             std::uint64_t seed) {
    if (edge.relations.size() == 1) return edge.relations.front();
    if (pog_e) {
        std::uint64_t r = splitmix64(seed ^ static_cast<std::uint64_t>(edge_id + 1));
        return edge.relations[r % edge.relations.size()];
    }
    std::string out = "{";
    for (std::size_t i = 0; i < edge.relations.size(); ++i) {
        if (i) out += ", ";
        out += edge.relations[i];
    }
    out += "}";
    return out;
}

} // namespace

std::string render_steps(const std::vector<PathStep>& steps, const QuestionSubgraph& graph,
                         bool pog_e, std::uint64_t seed) {
    if (steps.empty()) return "{}";
    std::string out = render_node(steps.front().from, graph);
    for (const PathStep& step : steps) {
        out += " -> ";
        out += render_relations(graph.edge(step.edge), step.edge, pog_e, seed);
        out += " -> ";
        out += render_node(step.to, graph);
    }
    return out;
}

std::string render_path(const EntityPath& path, const QuestionSubgraph& graph, bool pog_e,
                        std::uint64_t seed) {
    return render_steps(path.steps, graph, pog_e, seed);
}

// ---------------------------------------------------------------------------

PathSet fuzzy_select(const PathSet& paths, const Indicator& indicator, int w,
                     const OpContext& ctx) {
    if (w < 1) throw PreconditionError("fuzzy_select requires w >= 1");
    PathSet out;
    out.phase = paths.phase;
    out.depth = paths.depth;
    if (paths.empty()) return out;

    std::vector<std::string> texts;
    texts.reserve(paths.size() + 1);
    texts.push_back(indicator.raw);
    for (const EntityPath& p : paths.paths) texts.push_back(ctx.render(p));
    std::vector<EmbeddingVector> vecs = ctx.embedder.embed(texts);

    std::vector<std::pair<std::size_t, EmbeddingVector>> candidates;
    for (std::size_t i = 0; i < paths.size(); ++i)
        candidates.emplace_back(i, std::move(vecs[i + 1]));
    std::vector<std::size_t> ranked = cosine_top_k(vecs.front(), candidates, w);

    for (std::size_t idx : ranked) out.paths.push_back(paths.paths[idx]);
    return out;
}

std::vector<int> parse_ranked_indices(const std::string& reply) {
    std::size_t open = reply.find('[');
    std::size_t close = open == std::string::npos ? std::string::npos
                                                  : reply.find(']', open + 1);
    if (open == std::string::npos || close == std::string::npos) return {};

    std::vector<int> indices;
    int value = 0;
    bool in_number = false;
    for (std::size_t i = open + 1; i < close; ++i) {
        char c = reply[i];
        if (std::isdigit(static_cast<unsigned char>(c))) {
            value = value * 10 + (c - '0');
            in_number = true;
        } else {
            if (in_number) indices.push_back(value);
            value = 0;
            in_number = false;
        }
    }
    if (in_number) indices.push_back(value);
    return indices;
}

namespace {

std::string numbered_paths_block(const std::vector<std::string>& rendered) {
    std::ostringstream out;
    for (std::size_t i = 0; i < rendered.size(); ++i) {
        if (i) out << "\n";
        out << "Path " << i << ": " << rendered[i];
    }
    return out.str();
}

// Ranked selection of rendered candidates via one precise-select call.
// Returns candidate indices in ranked order, or nullopt when the reply
// stayed unparseable after the retry.
std::optional<std::vector<std::size_t>> precise_rank(
    const std::vector<std::string>& rendered, int w, const OpContext& ctx) {
    LlmRequest request;
    request.prompt = ctx.prompts.render(
        "precise_select", {{"question", ctx.bundle.question},
                           {"indicator", ctx.indicator.raw},
                           {"split_questions", ctx.bundle.joined_splits()},
                           {"paths", numbered_paths_block(rendered)},
                           {"top_k", std::to_string(w)}});
    request.purpose = Purpose::PreciseSelect;
    request.temperature = temperature_for(Purpose::PreciseSelect, ctx.config);
    request.max_tokens = ctx.config.max_tokens;

    for (int attempt = 0; attempt < 2; ++attempt) {
        std::string reply = ctx.llm.complete(request);
        std::vector<int> ranked = parse_ranked_indices(reply);
        if (ranked.empty()) continue;

        std::vector<std::size_t> picked;
        std::set<int> seen;
        for (int idx : ranked) {
            if (idx < 0 || idx >= static_cast<int>(rendered.size())) continue; // skip
            if (!seen.insert(idx).second) continue;
            picked.push_back(static_cast<std::size_t>(idx));
            if (picked.size() == static_cast<std::size_t>(w)) break;
        }
        if (!picked.empty()) return picked;
    }
    return std::nullopt;
}

} // namespace

PathSet precise_select(const PathSet& paths, int w, const OpContext& ctx) {
    if (w < 1) throw PreconditionError("precise_select requires w >= 1");
    if (paths.empty()) throw PreconditionError("precise_select requires paths");

    std::vector<std::string> rendered;
    rendered.reserve(paths.size());
    for (const EntityPath& p : paths.paths) rendered.push_back(ctx.render(p));

    auto picked = precise_rank(rendered, w, ctx);
    if (!picked) {
        if (ctx.degraded) ctx.degraded->push_back("precise_select fell back to fuzzy");
        return fuzzy_select(paths, ctx.indicator, w, ctx);
    }

    PathSet out;
    out.phase = paths.phase;
    out.depth = paths.depth;
    for (std::size_t idx : *picked) out.paths.push_back(paths.paths[idx]);
    return out;
}

PathSet branch_reduced_select(const PathSet& paths, int w,
                              const std::vector<EntityId>& anchor_list,
                              const OpContext& ctx) {
    if (w < 1) throw PreconditionError("branch_reduced_select requires w >= 1");

    PathSet current = paths;

    // Anchored D-prefix of a candidate, one per anchor that starts a run.
    auto prefixes_of = [&](const EntityPath& p, int d) {
        std::vector<std::pair<std::size_t, std::vector<PathStep>>> out;
        for (std::size_t a = 0; a < anchor_list.size(); ++a) {
            for (std::size_t i = 0; i < p.anchors.size(); ++i) {
                if (p.anchors[i] != anchor_list[a]) continue;
                std::vector<PathStep> run =
                    p.run_from_anchor(i, static_cast<std::size_t>(d));
                if (!run.empty()) out.emplace_back(a, std::move(run));
                break;
            }
        }
        return out;
    };

    int d = 1;
    while (current.size() >= static_cast<std::size_t>(w) && d <= ctx.config.d_max) {
        // The prefix pool resets every round.
        std::map<std::pair<std::size_t, std::vector<PathStep>>, std::size_t> pool;
        for (const EntityPath& p : current.paths)
            for (auto& pref : prefixes_of(p, d))
                pool.emplace(std::move(pref), pool.size());

        if (pool.size() > static_cast<std::size_t>(w)) {
            std::vector<std::pair<std::size_t, std::vector<PathStep>>> ordered(pool.size());
            for (const auto& [key, idx] : pool) ordered[idx] = key;

            std::vector<std::string> rendered;
            rendered.reserve(ordered.size());
            for (const auto& [anchor_idx, steps] : ordered)
                rendered.push_back(
                    render_steps(steps, ctx.graph, ctx.config.pog_e, ctx.config.seed));

            auto picked = precise_rank(rendered, w, ctx);
            std::set<std::size_t> survivors;
            if (picked) {
                survivors.insert(picked->begin(), picked->end());
            } else {
                if (ctx.degraded)
                    ctx.degraded->push_back("branch_reduced prefix rank fell back to fuzzy");
                // Degraded round: rank prefixes by cosine instead.
                std::vector<std::string> texts{ctx.indicator.raw};
                for (const auto& r : rendered) texts.push_back(r);
                std::vector<EmbeddingVector> vecs = ctx.embedder.embed(texts);
                std::vector<std::pair<std::size_t, EmbeddingVector>> cands;
                for (std::size_t i = 0; i < rendered.size(); ++i)
                    cands.emplace_back(i, std::move(vecs[i + 1]));
                for (std::size_t idx : cosine_top_k(vecs.front(), cands, w))
                    survivors.insert(idx);
            }

            // IntersectMatchUpdate: keep candidates whose anchored D-prefix
            // survived, matching by exact step-sequence equality.
            std::vector<EntityPath> kept;
            for (const EntityPath& p : current.paths) {
                bool match = false;
                for (const auto& pref : prefixes_of(p, d)) {
                    auto it = pool.find(pref);
                    if (it != pool.end() && survivors.count(it->second)) {
                        match = true;
                        break;
                    }
                }
                if (match) kept.push_back(p);
            }
            current.paths = std::move(kept);
        }
        ++d;
    }

    if (current.size() > static_cast<std::size_t>(w))
        current = precise_select(current, w, ctx);
    return current;
}

PathSet apply_strategy(const PathSet& paths, const std::vector<EntityId>& anchor_list,
                       const OpContext& ctx, StrategyTrace* trace) {
    const PipelineConfig& cfg = ctx.config;
    auto record = [&](const char* stage, const PathSet& set) {
        if (trace) trace->stages.emplace_back(stage, set.size());
    };

    PathSet result;
    switch (cfg.strategy) {
    case Strategy::FuzzyOnly:
        result = fuzzy_select(paths, ctx.indicator, cfg.w_max, ctx);
        record("fuzzy", result);
        break;
    case Strategy::FuzzyPrecise:
        result = fuzzy_select(paths, ctx.indicator, cfg.w1, ctx);
        record("fuzzy", result);
        if (result.size() > static_cast<std::size_t>(cfg.w_max))
            result = precise_select(result, cfg.w_max, ctx);
        record("precise", result);
        break;
    case Strategy::FuzzyBranch:
        result = fuzzy_select(paths, ctx.indicator, cfg.w1, ctx);
        record("fuzzy", result);
        result = branch_reduced_select(result, cfg.w_max, anchor_list, ctx);
        record("branch", result);
        break;
    case Strategy::ThreeStep:
        result = fuzzy_select(paths, ctx.indicator, cfg.w1, ctx);
        record("fuzzy", result);
        result = branch_reduced_select(result, cfg.w2, anchor_list, ctx);
        record("branch", result);
        if (result.size() > static_cast<std::size_t>(cfg.w_max))
            result = precise_select(result, cfg.w_max, ctx);
        record("precise", result);
        break;
    }
    return result;
}

} // namespace pog
