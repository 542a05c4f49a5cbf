#pragma once
// Topic entity recognition: keyword mentions extracted from the question by
// the LLM, each aligned to a KG entity by exact label match or embedding
// similarity.

#include "pog/config.hpp"
#include "pog/embed.hpp"
#include "pog/kg.hpp"
#include "pog/llm.hpp"
#include "pog/prompts.hpp"

#include <string>
#include <utility>
#include <vector>

namespace pog {

struct TopicEntity {
    std::string mention;
    EntityId entity;
    double score = 0.0; // cosine in [-1, 1]; exact label matches score 1
};

using TopicEntitySet = std::vector<TopicEntity>;

// Surface-form mentions in LLM output order. One retry, then ParseError
// carrying the raw reply.
std::vector<std::string> extract_topic_keywords(const std::string& question, LlmBackend& llm,
                                                const PromptLibrary& prompts,
                                                const PipelineConfig& config);

// Greedy alignment in keyword order; an exact case-insensitive label match
// short-circuits with score 1, otherwise highest cosine wins. Entities are
// kept distinct: a taken entity falls through to the next-best candidate.
TopicEntitySet align_to_kg(const std::vector<std::string>& keywords,
                           const std::vector<std::pair<EntityId, std::string>>& universe,
                           const EmbeddingProvider& embedder);

} // namespace pog
