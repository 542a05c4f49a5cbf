#pragma once
// Two-step question answering over pruned paths: summarize, then evaluate
// sufficiency (gated on the literal "{Yes}" token) or generate the final
// fallback answer from paths plus the model's own knowledge.

#include "pog/prune.hpp"

#include <string>

namespace pog {

enum class Verdict { Sufficient, Insufficient };
enum class EvidenceSource { KgOnly, LlmInspiredKg, KgInspiredLlm };

const char* evidence_source_to_string(EvidenceSource s);

struct AnswerOutcome {
    Verdict verdict = Verdict::Insufficient;
    std::string answer;
    std::string reason;
    PathSet evidence_paths;
    EvidenceSource evidence_source = EvidenceSource::KgOnly;
};

// One LLM call; the reply is parsed back into paths and hard-validated:
// every step must already exist in the input paths, fabricated steps are
// dropped. If nothing survives (or the reply is unparseable after a retry)
// the input is returned unchanged with a degradation flag.
PathSet summarize_paths(const PathSet& paths, const OpContext& ctx);

// One LLM call; "{Yes}" anywhere in the reply means Sufficient with the
// extracted answer, anything else Insufficient with the reply as reason.
AnswerOutcome evaluate_sufficiency(const PathSet& paths, const OpContext& ctx);

// Final fallback: always answers, from the given paths and the model's own
// knowledge. evidence_source is KgOnly when the answer matches an entity on
// the evidence paths, KgInspiredLlm otherwise.
AnswerOutcome generate_final_answer(const PathSet& paths, const OpContext& ctx);

// Answer text out of a reply: the first brace group following "answer",
// else the first brace group that is not {Yes}/{No}, else the trimmed reply.
std::string extract_answer_text(const std::string& reply);

} // namespace pog
