#include "pog/linker.hpp"

#include "pog/text.hpp"

#include <algorithm>
#include <cctype>
#include <set>
#include <sstream>

namespace pog {

namespace {


// Strips list markers ("- ", "* ", "3. ", "3) ") without eating keywords
// that legitimately start with digits.
std::string strip_bullet(const std::string& line) {
    std::size_t b = line.find_first_not_of(" \t\r");
    if (b == std::string::npos) return "";
    std::size_t e = line.find_last_not_of(" \t\r");
    std::string body = line.substr(b, e - b + 1);

    if (body.size() >= 2 && (body[0] == '-' || body[0] == '*') && body[1] == ' ')
        return body.substr(2);
    std::size_t digits = 0;
    while (digits < body.size() && std::isdigit(static_cast<unsigned char>(body[digits])))
        ++digits;
    if (digits > 0 && digits + 1 < body.size() &&
        (body[digits] == '.' || body[digits] == ')') && body[digits + 1] == ' ')
        return body.substr(digits + 2);
    return body;
}

} // namespace

std::vector<std::string> extract_topic_keywords(const std::string& question, LlmBackend& llm,
                                                const PromptLibrary& prompts,
                                                const PipelineConfig& config) {
    if (question.empty()) throw PreconditionError("question must be non-empty");

    LlmRequest request;
    request.prompt = prompts.render("topic_extraction", {{"question", question}});
    request.purpose = Purpose::Extract;
    request.temperature = temperature_for(Purpose::Extract, config);
    request.max_tokens = config.max_tokens;

    std::string reply;
    for (int attempt = 0; attempt < 2; ++attempt) {
        reply = llm.complete(request);
        std::vector<std::string> keywords;
        std::istringstream in(reply);
        std::string line;
        while (std::getline(in, line)) {
            std::string kw = strip_bullet(line);
            if (!kw.empty()) keywords.push_back(kw);
        }
        if (!keywords.empty()) return keywords;
        if (attempt == 1)
            throw ParseError("keyword extraction reply has no entities", reply);
    }
    throw ParseError("keyword extraction failed", reply); // unreachable
}

TopicEntitySet align_to_kg(const std::vector<std::string>& keywords,
                           const std::vector<std::pair<EntityId, std::string>>& universe,
                           const EmbeddingProvider& embedder) {
    if (keywords.empty()) throw PreconditionError("align_to_kg requires keywords");
    if (universe.empty()) throw PreconditionError("align_to_kg requires a candidate universe");

    // Embed the universe once per call; keyword vectors on demand.
    std::vector<std::string> labels;
    labels.reserve(universe.size());
    for (const auto& [id, label] : universe) labels.push_back(label);
    std::vector<EmbeddingVector> universe_vecs = embedder.embed(labels);

    TopicEntitySet out;
    std::set<EntityId> taken;

    for (const std::string& keyword : keywords) {
        std::string folded = fold_text(keyword);

        // Exact label match short-circuits with score 1.
        const std::pair<EntityId, std::string>* exact = nullptr;
        for (const auto& cand : universe) {
            if (taken.count(cand.first)) continue;
            if (fold_text(cand.second) == folded) {
                exact = &cand;
                break;
            }
        }
        if (exact) {
            out.push_back(TopicEntity{keyword, exact->first, 1.0});
            taken.insert(exact->first);
            continue;
        }

        EmbeddingVector kv = embedder.embed_one(keyword);
        double best = -2.0;
        std::size_t best_idx = universe.size();
        for (std::size_t i = 0; i < universe.size(); ++i) {
            if (taken.count(universe[i].first)) continue;
            double sim = cosine_similarity(kv, universe_vecs[i]);
            if (sim > best) {
                best = sim;
                best_idx = i;
            }
        }
        if (best_idx == universe.size()) continue; // all entities taken
        out.push_back(TopicEntity{keyword, universe[best_idx].first, best});
        taken.insert(universe[best_idx].first);
    }
    return out;
}

} // namespace pog
