#pragma once
// Three-step beam-search path pruning: fuzzy selection (embedding cosine),
// precise path selection (LLM-ranked indices), and branch-reduced selection
// (iterative prefix pruning against the graph structure), composed into four
// selectable strategies. Also owns canonical path rendering.

#include "pog/analysis.hpp"
#include "pog/config.hpp"
#include "pog/embed.hpp"
#include "pog/llm.hpp"
#include "pog/paths.hpp"
#include "pog/prompts.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace pog {

// Rendering: "{label, label} -> relation -> {label} -> {r1, r2} -> ..."
// Member labels are sorted by entity id; a singleton relation set renders
// bare, larger sets braced and comma-joined in sorted order. With pog_e on,
// each superedge contributes one relation sampled uniformly by a seeded
// generator keyed on the edge, stable across runs and render order.
std::string render_steps(const std::vector<PathStep>& steps, const QuestionSubgraph& graph,
                         bool pog_e = false, std::uint64_t seed = 0);
std::string render_path(const EntityPath& path, const QuestionSubgraph& graph,
                        bool pog_e = false, std::uint64_t seed = 0);

// Shared plumbing for the LLM-facing operations of pruning and answering.
struct OpContext {
    const QuestionSubgraph& graph;
    const QuestionBundle& bundle;
    const Indicator& indicator;
    const PipelineConfig& config;
    LlmBackend& llm;
    const EmbeddingProvider& embedder;
    const PromptLibrary& prompts;
    std::vector<std::string>* degraded = nullptr; // degradation flags sink

    std::string render(const EntityPath& p) const {
        return render_path(p, graph, config.pog_e, config.seed);
    }
};

// Top-W paths by cosine between the indicator text and the rendered paths;
// ties break by insertion index. No LLM involved.
PathSet fuzzy_select(const PathSet& paths, const Indicator& indicator, int w,
                     const OpContext& ctx);

// One LLM call over the numbered rendered paths, parsed as a ranked bracketed
// index list; out-of-range and repeated indices are skipped. Falls back to
// fuzzy_select after a failed retry, with a degradation flag.
PathSet precise_select(const PathSet& paths, int w, const OpContext& ctx);

// Iterative prefix pruning: per round D, the first D steps anchored at each
// list entity form the prefix pool; when the pool exceeds W it is
// precise-selected and only candidates whose anchored prefix survived are
// kept. The pool resets every round.
PathSet branch_reduced_select(const PathSet& paths, int w,
                              const std::vector<EntityId>& anchor_list,
                              const OpContext& ctx);

struct StrategyTrace {
    std::vector<std::pair<std::string, std::size_t>> stages; // (stage, size after)
};

PathSet apply_strategy(const PathSet& paths, const std::vector<EntityId>& anchor_list,
                       const OpContext& ctx, StrategyTrace* trace = nullptr);

// Exposed for reply-parsing tests: ranked indices out of a precise-select
// reply, tolerant of surrounding prose.
std::vector<int> parse_ranked_indices(const std::string& reply);

} // namespace pog
