#pragma once
// Three-phase exploration over the question subgraph: topic entity path
// exploration (depth-bucketed enumeration from the predicted depth up),
// LLM supplement path exploration (predicted bridge entities), and node
// expand exploration (1-hop growth from the source KG merged onto path
// ends). Each phase prunes, then hands the survivors to question answering.

#include "pog/answer.hpp"
#include "pog/paths.hpp"
#include "pog/trace.hpp"

#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace pog {

// Topics sorted by first occurrence in the indicator chain; entities the
// chain never mentions go last in their original order, with a warning.
std::vector<std::pair<EntityId, std::string>> reorder(
    const std::vector<std::pair<EntityId, std::string>>& topics, const Indicator& indicator,
    std::vector<std::string>* warnings = nullptr);

// All entity paths threading the anchors in order with total length in
// (min_len, max_len]; every per-pair segment is a simple path, and distinct
// segments may revisit supernodes. A single anchor enumerates all simple
// paths leaving it within the bucket. Output is canonically ordered.
PathSet entity_path_find(const QuestionSubgraph& graph,
                         const std::vector<EntityId>& anchors, std::size_t min_len,
                         std::size_t max_len, Phase phase, int depth);

struct PredictedEntity {
    std::string text;
    std::optional<EntityId> aligned;
    Indicator indicator; // I_Sup
};

struct PhaseContext {
    QuestionSubgraph& subgraph;
    const GraphSource& source;
    const QuestionBundle& bundle;
    const QuestionAnalysis& analysis;
    // (entity, label) in original topic order
    const std::vector<std::pair<EntityId, std::string>>& topics;
    const PipelineConfig& config;
    LlmBackend& llm;
    const EmbeddingProvider& embedder;
    const PromptLibrary& prompts;
    TraceLog& trace;
    const Transcript* transcript = nullptr; // per-phase call accounting

    OpContext op_context() const {
        return OpContext{subgraph, bundle,    analysis.indicator, config,
                         llm,      embedder,  prompts,            &trace.degraded_ops};
    }
};

struct PhaseOutcome {
    bool answered = false;
    AnswerOutcome outcome;
    PathSet paths; // last pruned path set of the phase
    int depth = 0;
};

PhaseOutcome run_topic_phase(PhaseContext& ctx);
PhaseOutcome run_supplement_phase(PhaseContext& ctx, const PathSet& paths_t);
PhaseOutcome run_expand_phase(PhaseContext& ctx, const PathSet& paths_t,
                              const PathSet& paths_s);

// Parses "Prediction N: ... / Indicator N: ..." pairs out of a supplement
// reply (at most three), aligning each prediction into the subgraph.
std::vector<PredictedEntity> parse_supplement_reply(const std::string& reply,
                                                    PhaseContext& ctx);

} // namespace pog
