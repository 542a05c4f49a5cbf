#pragma once
// Dataset loading, per-question pipeline orchestration, Hits@1 scoring and
// run-level metrics. One question failing never aborts a run.

#include "pog/analysis.hpp"
#include "pog/embed.hpp"
#include "pog/explore.hpp"
#include "pog/kg.hpp"
#include "pog/llm.hpp"
#include "pog/prompts.hpp"

#include <json.hpp>

#include <map>
#include <optional>
#include <string>
#include <vector>

namespace pog {

struct QuestionRecord {
    std::string id;
    std::string question;
    std::vector<std::string> gold_answers;
    // optional gold topic links: (label, entity id)
    std::vector<std::pair<std::string, EntityId>> gold_topics;
};

struct DatasetLoadResult {
    std::vector<QuestionRecord> records;
    std::vector<std::string> errors; // "line N: reason" for rejected lines
};

// JSON-lines: {"id": ..., "question": ..., "answers": [...],
//              "topic_entities"?: [{"label": ..., "entity": ...}, ...]}
DatasetLoadResult load_dataset(const std::string& path);
void save_dataset(const std::string& path, const std::vector<QuestionRecord>& records);

// Case/whitespace-folded exact match against any gold answer.
bool hits_at_1(const std::string& predicted, const std::vector<std::string>& gold_answers);

struct QuestionResult {
    std::string id;
    AnswerOutcome outcome;
    Phase answer_phase = Phase::Final;
    int depth = 0;
    bool hit = false;
    bool failed = false;
    std::string error;
    TraceLog trace;
    Transcript transcript;
    std::optional<nlohmann::ordered_json> subgraph_dump;

    nlohmann::ordered_json to_json() const;
};

struct RunMetrics {
    std::size_t questions = 0;
    std::size_t correct = 0;
    std::size_t failed = 0;
    double hits_at_1 = 0.0;
    std::uint64_t total_llm_calls = 0;
    double avg_llm_calls = 0.0;
    std::uint64_t total_prompt_chars = 0;
    std::map<std::string, std::size_t> phase_tally;
    std::map<std::string, std::size_t> evidence_tally;
    std::vector<nlohmann::ordered_json> per_question;

    nlohmann::ordered_json to_json() const;
};

class Pipeline {
public:
    Pipeline(const GraphSource& source, LlmBackend& llm, const EmbeddingProvider& embedder,
             const PromptLibrary& prompts, PipelineConfig config);

    // Universe for keyword alignment when gold topics are not used.
    void set_alignment_universe(std::vector<std::pair<EntityId, std::string>> universe);

    QuestionResult run_question(const QuestionRecord& record) const;

    const PipelineConfig& config() const { return config_; }

private:
    std::vector<std::pair<EntityId, std::string>> resolve_topics(
        const QuestionRecord& record, LlmBackend& llm, TraceLog& trace) const;

    const GraphSource& source_;
    LlmBackend& llm_;
    const EmbeddingProvider& embedder_;
    const PromptLibrary& prompts_;
    PipelineConfig config_;
    std::vector<std::pair<EntityId, std::string>> universe_;
};

RunMetrics run_dataset(const Pipeline& pipeline, const std::vector<QuestionRecord>& records,
                       int parallelism = 1);

} // namespace pog
