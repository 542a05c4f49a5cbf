#pragma once

#include <json.hpp>

#include <cstddef>
#include <string>
#include <vector>

namespace pog {

// Per-question exploration trace: one record per phase iteration plus any
// warnings, degradations, and bookkeeping notes.
struct PhaseRecord {
    std::string phase;
    int depth = 0;
    std::size_t num_paths = 0;
    std::size_t llm_calls = 0;
};

struct TraceLog {
    std::vector<PhaseRecord> phases;
    std::vector<std::string> warnings;
    std::vector<std::string> degraded_ops;
    std::vector<std::string> notes;
    // Final evidence paths, one entry per path: rendered text plus the
    // backing triples of every step.
    nlohmann::ordered_json evidence = nlohmann::ordered_json::array();

    nlohmann::ordered_json to_json() const {
        nlohmann::ordered_json doc;
        doc["phases"] = nlohmann::ordered_json::array();
        for (const PhaseRecord& r : phases) {
            nlohmann::ordered_json rec;
            rec["phase"] = r.phase;
            rec["depth"] = r.depth;
            rec["num_paths"] = r.num_paths;
            rec["llm_calls"] = r.llm_calls;
            doc["phases"].push_back(std::move(rec));
        }
        doc["warnings"] = warnings;
        doc["degraded_ops"] = degraded_ops;
        doc["notes"] = notes;
        doc["evidence"] = evidence;
        return doc;
    }
};

} // namespace pog
