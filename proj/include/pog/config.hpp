#pragma once

#include "pog/errors.hpp"

#include <cstdint>
#include <string>

namespace pog {

// Beam search pruning strategies, from LLM-free to fully LLM-reliant.
enum class Strategy {
    FuzzyOnly,
    FuzzyPrecise,
    FuzzyBranch,
    ThreeStep,
};

struct PipelineConfig {
    // Beam widths: W1 for fuzzy selection, W2 for internal narrowing,
    // w_max for the final width. Invariant: w_max <= w2 <= w1.
    int w1 = 80;
    int w2 = 20;
    int w_max = 3;
    int d_max = 3;

    Strategy strategy = Strategy::FuzzyPrecise;

    // Exploration calls run warm, reasoning calls run cold.
    double exploration_temperature = 0.4;
    double reasoning_temperature = 0.0;
    int max_tokens = 256;

    std::uint64_t seed = 0;

    // Render one uniformly sampled relation per clustered superedge
    // instead of the whole relation set.
    bool pog_e = false;

    // Skip LLM keyword extraction + alignment, use dataset gold topics.
    bool use_gold_topics = false;

    // Minimum cosine for aligning a supplement prediction into the
    // question subgraph when no exact label match exists.
    double supplement_align_threshold = 0.8;

    // Attach the reduced question subgraph (JSON) to each question result.
    bool dump_subgraph = false;

    std::string prompt_dir;

    void validate() const {
        if (w_max < 1 || w2 < w_max || w1 < w2)
            throw ConfigError("beam widths must satisfy 1 <= w_max <= w2 <= w1");
        if (d_max < 1)
            throw ConfigError("d_max must be >= 1");
        if (max_tokens < 1)
            throw ConfigError("max_tokens must be >= 1");
    }
};

inline Strategy strategy_from_string(const std::string& name) {
    if (name == "fuzzy") return Strategy::FuzzyOnly;
    if (name == "fuzzy-precise") return Strategy::FuzzyPrecise;
    if (name == "fuzzy-branch") return Strategy::FuzzyBranch;
    if (name == "three-step") return Strategy::ThreeStep;
    throw ConfigError("unknown strategy: " + name);
}

inline std::string strategy_to_string(Strategy s) {
    switch (s) {
    case Strategy::FuzzyOnly: return "fuzzy";
    case Strategy::FuzzyPrecise: return "fuzzy-precise";
    case Strategy::FuzzyBranch: return "fuzzy-branch";
    case Strategy::ThreeStep: return "three-step";
    }
    return "?";
}

} // namespace pog
