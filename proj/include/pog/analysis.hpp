#pragma once
// Question analysis: one LLM call decomposes the question into split
// questions and a thinking indicator — a single chain ordering the topic
// entities around an answer slot — from which the predicted exploration
// depth is derived.
//
// Indicator grammar (defined by example in the source material):
//   tokens separated by "–" or "-";
//   a token containing a known entity label (case-insensitive) is a
//   reference to that entity; a token carrying the "(answer)" marker, or a
//   terminal question word, is the answer slot;
//   the remaining tokens in each gap between anchors alternate
//   relation, entity-placeholder, relation, ... — only the relations are
//   kept as hints, so "A - r1 - x - r2 - y - when" predicts depth 2.

#include "pog/config.hpp"
#include "pog/kg.hpp"
#include "pog/llm.hpp"
#include "pog/prompts.hpp"

#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace pog {

struct IndicatorToken {
    enum class Kind { TopicRef, PredictedRef, AnswerSlot, RelationHint };
    Kind kind = Kind::RelationHint;
    std::string text;
    EntityId entity; // set for TopicRef / PredictedRef
};

struct Indicator {
    std::vector<IndicatorToken> chain;
    std::string raw;
    bool missing_answer_slot = false;

    std::optional<std::size_t> position_of(const EntityId& e) const {
        for (std::size_t i = 0; i < chain.size(); ++i)
            if ((chain[i].kind == IndicatorToken::Kind::TopicRef ||
                 chain[i].kind == IndicatorToken::Kind::PredictedRef) &&
                chain[i].entity == e)
                return i;
        return std::nullopt;
    }
};

// refs: (entity id, display label) the chain may reference. predicted, when
// given, is matched the same way but tagged PredictedRef.
Indicator parse_indicator(
    const std::string& raw, const std::vector<std::pair<EntityId, std::string>>& refs,
    const std::optional<std::pair<EntityId, std::string>>& predicted = std::nullopt);

struct QuestionAnalysis {
    std::vector<std::string> split_questions;
    Indicator indicator;
    int d_predict = 1;
};

struct QuestionBundle {
    std::string question;
    std::vector<std::string> split_questions;

    std::string joined_splits() const;
};

// Max over topic entities of the number of relation hints strictly between
// the entity's reference and the answer slot, floored at 1. A chain without
// an answer slot defaults to 1 and records a warning.
int derive_predicted_depth(const Indicator& indicator,
                           std::vector<std::string>* warnings = nullptr);

// Single LLM call; one retry on unparseable output, then ParseError carrying
// the raw reply.
QuestionAnalysis analyze_question(const std::string& question,
                                  const std::vector<std::pair<EntityId, std::string>>& topics,
                                  LlmBackend& llm, const PromptLibrary& prompts,
                                  const PipelineConfig& config,
                                  std::vector<std::string>* warnings = nullptr);

// Parses "split_question N: ..." lines and the "Indicator: ..." line out of
// an analysis reply. Throws ParseError when no indicator line is present.
QuestionAnalysis parse_analysis_reply(
    const std::string& reply, const std::vector<std::pair<EntityId, std::string>>& topics,
    std::vector<std::string>* warnings = nullptr);

} // namespace pog
