#include "pog/answer.hpp"

#include "pog/text.hpp"

#include <algorithm>
#include <cctype>
#include <map>
#include <sstream>

namespace pog {

namespace {


std::string paths_block(const PathSet& paths, const OpContext& ctx) {
    if (paths.empty()) return "(none)";
    std::ostringstream out;
    for (std::size_t i = 0; i < paths.size(); ++i) {
        if (i) out << "\n";
        out << ctx.render(paths.paths[i]);
    }
    return out.str();
}

LlmRequest make_request(const char* templ, Purpose purpose, const PathSet& paths,
                        const OpContext& ctx) {
    LlmRequest request;
    request.prompt = ctx.prompts.render(
        templ, {{"question", ctx.bundle.question},
                {"indicator", ctx.indicator.raw},
                {"split_questions", ctx.bundle.joined_splits()},
                {"paths", paths_block(paths, ctx)}});
    request.purpose = purpose;
    request.temperature = temperature_for(purpose, ctx.config);
    request.max_tokens = ctx.config.max_tokens;
    return request;
}

std::vector<std::string> split_arrow(const std::string& line) {
    std::vector<std::string> parts;
    std::size_t pos = 0;
    while (true) {
        std::size_t arrow = line.find("->", pos);
        std::string part =
            arrow == std::string::npos ? line.substr(pos) : line.substr(pos, arrow - pos);
        std::size_t b = part.find_first_not_of(" \t\r");
        std::size_t e = part.find_last_not_of(" \t\r");
        parts.push_back(b == std::string::npos ? "" : part.substr(b, e - b + 1));
        if (arrow == std::string::npos) break;
        pos = arrow + 2;
    }
    return parts;
}

} // namespace

const char* evidence_source_to_string(EvidenceSource s) {
    switch (s) {
    case EvidenceSource::KgOnly: return "kg_only";
    case EvidenceSource::LlmInspiredKg: return "llm_inspired_kg";
    case EvidenceSource::KgInspiredLlm: return "kg_inspired_llm";
    }
    return "?";
}

PathSet summarize_paths(const PathSet& paths, const OpContext& ctx) {
    if (paths.empty()) throw PreconditionError("summarize_paths requires paths");

    // Step universe of the input, keyed by rendered "{...} -> rel -> {...}".
    std::map<std::string, PathStep> universe;
    for (const EntityPath& p : paths.paths)
        for (const PathStep& s : p.steps)
            universe.emplace(
                render_steps({s}, ctx.graph, ctx.config.pog_e, ctx.config.seed), s);

    LlmRequest request = make_request("path_summarizing", Purpose::Summarize, paths, ctx);

    for (int attempt = 0; attempt < 2; ++attempt) {
        std::string reply = ctx.llm.complete(request);

        PathSet out;
        out.phase = paths.phase;
        out.depth = paths.depth;

        std::istringstream in(reply);
        std::string line;
        while (std::getline(in, line)) {
            if (line.find("->") == std::string::npos) continue;
            std::vector<std::string> parts = split_arrow(line);
            if (parts.size() < 3) continue;

            // parts alternate node, relation, node, relation, node, ...
            EntityPath path;
            for (std::size_t i = 0; i + 2 < parts.size(); i += 2) {
                std::string step_text = parts[i] + " -> " + parts[i + 1] + " -> " + parts[i + 2];
                auto it = universe.find(step_text);
                if (it == universe.end()) continue; // fabricated step: dropped
                const PathStep& step = it->second;
                if (!path.steps.empty() && path.steps.back().to != step.from) {
                    // contiguity broken by a dropped step; keep the first run
                    break;
                }
                path.steps.push_back(step);
            }
            if (!path.steps.empty()) out.paths.push_back(std::move(path));
        }

        if (!out.paths.empty()) {
            canonicalize(out.paths);
            return out;
        }
        if (attempt == 1) {
            if (ctx.degraded)
                ctx.degraded->push_back("summarize produced no valid paths; input kept");
            return paths;
        }
    }
    return paths; // unreachable
}

std::string extract_answer_text(const std::string& reply) {
    auto is_verdict = [](const std::string& s) {
        std::string f = fold_text(s);
        return f == "yes" || f == "no";
    };

    std::vector<std::pair<std::size_t, std::string>> groups;
    std::size_t pos = 0;
    while ((pos = reply.find('{', pos)) != std::string::npos) {
        std::size_t close = reply.find('}', pos + 1);
        if (close == std::string::npos) break;
        groups.emplace_back(pos, reply.substr(pos + 1, close - pos - 1));
        pos = close + 1;
    }

    std::string reply_l = reply;
    std::transform(reply_l.begin(), reply_l.end(), reply_l.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    std::size_t answer_pos = reply_l.find("answer");

    if (answer_pos != std::string::npos)
        for (const auto& [at, text] : groups)
            if (at > answer_pos && !is_verdict(text)) return text;
    for (const auto& [at, text] : groups)
        if (!is_verdict(text)) return text;

    std::size_t b = reply.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) return "";
    std::size_t e = reply.find_last_not_of(" \t\r\n");
    return reply.substr(b, e - b + 1);
}

AnswerOutcome evaluate_sufficiency(const PathSet& paths, const OpContext& ctx) {
    if (paths.empty()) throw PreconditionError("evaluate_sufficiency requires paths");

    LlmRequest request = make_request("evaluation", Purpose::Evaluate, paths, ctx);

    AnswerOutcome outcome;
    outcome.evidence_paths = paths;

    for (int attempt = 0; attempt < 2; ++attempt) {
        std::string reply = ctx.llm.complete(request);
        if (reply.find("{Yes}") != std::string::npos) {
            outcome.verdict = Verdict::Sufficient;
            outcome.answer = extract_answer_text(reply);
            outcome.reason = reply;
            return outcome;
        }
        if (reply.find("{No}") != std::string::npos) {
            outcome.verdict = Verdict::Insufficient;
            outcome.reason = reply;
            return outcome;
        }
        if (attempt == 1) {
            if (ctx.degraded)
                ctx.degraded->push_back("evaluation reply had neither {Yes} nor {No}");
            outcome.verdict = Verdict::Insufficient;
            outcome.reason = reply;
        }
    }
    return outcome;
}

AnswerOutcome generate_final_answer(const PathSet& paths, const OpContext& ctx) {
    LlmRequest request = make_request("generation", Purpose::Generate, paths, ctx);

    std::string reply;
    for (int attempt = 0; attempt < 2; ++attempt) {
        try {
            reply = ctx.llm.complete(request);
            break;
        } catch (const TransportError&) {
            if (attempt == 1) throw;
        }
    }

    AnswerOutcome outcome;
    outcome.verdict = Verdict::Sufficient;
    outcome.answer = extract_answer_text(reply);
    outcome.reason = reply;
    outcome.evidence_paths = paths;

    // KG-grounded iff the answer names an entity on some evidence path.
    bool grounded = false;
    std::string folded = fold_text(outcome.answer);
    for (const EntityPath& p : paths.paths) {
        for (std::size_t pos = 0; pos <= p.steps.size() && !grounded; ++pos) {
            SupernodeId s = p.node_at(pos);
            if (s < 0) continue;
            for (const EntityId& e : ctx.graph.members(s))
                if (fold_text(ctx.graph.label(e)) == folded) {
                    grounded = true;
                    break;
                }
        }
        if (grounded) break;
    }
    outcome.evidence_source =
        grounded ? EvidenceSource::KgOnly : EvidenceSource::KgInspiredLlm;
    return outcome;
}

} // namespace pog
