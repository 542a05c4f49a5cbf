#include "pog/analysis.hpp"

#include <algorithm>
#include <cctype>
#include <sstream>

namespace pog {

namespace {

std::string trim(const std::string& s) {
    std::size_t b = s.find_first_not_of(" \t\r\n\"'");
    if (b == std::string::npos) return "";
    std::size_t e = s.find_last_not_of(" \t\r\n\"'");
    return s.substr(b, e - b + 1);
}

std::string lower(const std::string& s) {
    std::string out = s;
    std::transform(out.begin(), out.end(), out.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    return out;
}

bool is_question_word(const std::string& token) {
    static const char* words[] = {"when", "what", "where", "who",
                                  "whom", "which", "how",   "why"};
    std::string t = lower(trim(token));
    for (const char* w : words)
        if (t == w) return true;
    return false;
}

// Split on "–" (U+2013) and "-" delimiters; labels themselves never carry
// the delimiters in the chains this grammar covers.
std::vector<std::string> split_chain(const std::string& raw) {
    std::vector<std::string> tokens;
    std::string current;
    for (std::size_t i = 0; i < raw.size();) {
        if (raw.compare(i, 3, "\xE2\x80\x93") == 0) { // en dash
            tokens.push_back(current);
            current.clear();
            i += 3;
        } else if (raw[i] == '-') {
            tokens.push_back(current);
            current.clear();
            ++i;
        } else {
            current += raw[i];
            ++i;
        }
    }
    tokens.push_back(current);
    std::vector<std::string> cleaned;
    for (auto& t : tokens) {
        std::string v = trim(t);
        if (!v.empty()) cleaned.push_back(std::move(v));
    }
    return cleaned;
}

} // namespace

Indicator parse_indicator(const std::string& raw,
                          const std::vector<std::pair<EntityId, std::string>>& refs,
                          const std::optional<std::pair<EntityId, std::string>>& predicted) {
    Indicator ind;
    ind.raw = raw;

    std::vector<std::string> tokens = split_chain(raw);

    // Longest label first so "Central Time Zone" wins over a shorter label
    // contained in the same token.
    struct Ref {
        EntityId entity;
        std::string label;
        bool is_predicted;
        bool seen = false;
    };
    std::vector<Ref> all_refs;
    for (const auto& [id, label] : refs) all_refs.push_back(Ref{id, label, false});
    if (predicted) all_refs.push_back(Ref{predicted->first, predicted->second, true});
    std::stable_sort(all_refs.begin(), all_refs.end(), [](const Ref& a, const Ref& b) {
        return a.label.size() > b.label.size();
    });

    enum class RawKind { Ref, Answer, Other };
    struct RawToken {
        RawKind kind;
        std::string text;
        Ref* ref = nullptr;
    };
    std::vector<RawToken> classified;
    bool have_answer = false;

    for (std::size_t i = 0; i < tokens.size(); ++i) {
        const std::string& tok = tokens[i];
        std::string tok_l = lower(tok);

        Ref* matched = nullptr;
        for (Ref& r : all_refs) {
            if (r.seen) continue;
            if (!r.label.empty() && tok_l.find(lower(r.label)) != std::string::npos) {
                matched = &r;
                break;
            }
        }
        if (matched) {
            matched->seen = true;
            classified.push_back(RawToken{RawKind::Ref, tok, matched});
            continue;
        }
        if (!have_answer && tok_l.find("(answer)") != std::string::npos) {
            have_answer = true;
            classified.push_back(RawToken{RawKind::Answer, tok});
            continue;
        }
        classified.push_back(RawToken{RawKind::Other, tok});
    }

    // Terminal question word doubles as the answer slot.
    if (!have_answer && !classified.empty() && classified.back().kind == RawKind::Other &&
        is_question_word(classified.back().text)) {
        classified.back().kind = RawKind::Answer;
        have_answer = true;
    }
    ind.missing_answer_slot = !have_answer;

    // Between anchors, tokens alternate relation / entity placeholder:
    // keep offsets 0, 2, 4, ... of each gap as relation hints.
    std::size_t gap_offset = 0;
    for (const RawToken& t : classified) {
        switch (t.kind) {
        case RawKind::Ref:
            ind.chain.push_back(IndicatorToken{t.ref->is_predicted
                                                   ? IndicatorToken::Kind::PredictedRef
                                                   : IndicatorToken::Kind::TopicRef,
                                               t.text, t.ref->entity});
            gap_offset = 0;
            break;
        case RawKind::Answer:
            ind.chain.push_back(
                IndicatorToken{IndicatorToken::Kind::AnswerSlot, t.text, {}});
            gap_offset = 0;
            break;
        case RawKind::Other:
            if (gap_offset % 2 == 0)
                ind.chain.push_back(
                    IndicatorToken{IndicatorToken::Kind::RelationHint, t.text, {}});
            ++gap_offset;
            break;
        }
    }
    return ind;
}

int derive_predicted_depth(const Indicator& indicator, std::vector<std::string>* warnings) {
    std::optional<std::size_t> answer_pos;
    for (std::size_t i = 0; i < indicator.chain.size(); ++i)
        if (indicator.chain[i].kind == IndicatorToken::Kind::AnswerSlot) {
            answer_pos = i;
            break;
        }
    if (!answer_pos) {
        if (warnings)
            warnings->push_back("indicator has no answer slot; predicted depth defaults to 1");
        return 1;
    }

    int depth = 1;
    for (std::size_t i = 0; i < indicator.chain.size(); ++i) {
        if (indicator.chain[i].kind != IndicatorToken::Kind::TopicRef) continue;
        std::size_t lo = std::min(i, *answer_pos);
        std::size_t hi = std::max(i, *answer_pos);
        int hints = 0;
        for (std::size_t j = lo + 1; j < hi; ++j)
            if (indicator.chain[j].kind == IndicatorToken::Kind::RelationHint) ++hints;
        depth = std::max(depth, hints);
    }
    return depth;
}

std::string QuestionBundle::joined_splits() const {
    std::ostringstream out;
    for (std::size_t i = 0; i < split_questions.size(); ++i) {
        if (i) out << " ";
        out << "split_question " << (i + 1) << ": " << split_questions[i];
    }
    return out.str();
}

QuestionAnalysis parse_analysis_reply(
    const std::string& reply, const std::vector<std::pair<EntityId, std::string>>& topics,
    std::vector<std::string>* warnings) {
    QuestionAnalysis analysis;
    std::string indicator_raw;

    std::istringstream in(reply);
    std::string line;
    while (std::getline(in, line)) {
        std::string l = lower(line);
        std::size_t colon = line.find(':');
        if (colon == std::string::npos) continue;
        std::string head = l.substr(0, colon);
        std::string value = trim(line.substr(colon + 1));
        if (value.empty()) continue;
        if (head.find("split") != std::string::npos &&
            head.find("question") != std::string::npos) {
            analysis.split_questions.push_back(value);
        } else if (head.find("indicator") != std::string::npos && indicator_raw.empty()) {
            // keep the raw chain exactly as written (no quote trimming)
            std::string raw = line.substr(colon + 1);
            std::size_t b = raw.find_first_not_of(" \t");
            indicator_raw = b == std::string::npos ? "" : raw.substr(b);
        }
    }

    if (indicator_raw.empty())
        throw ParseError("analysis reply has no indicator line", reply);
    if (analysis.split_questions.empty())
        throw ParseError("analysis reply has no split questions", reply);

    analysis.indicator = parse_indicator(indicator_raw, topics);
    analysis.d_predict = derive_predicted_depth(analysis.indicator, warnings);
    return analysis;
}

QuestionAnalysis analyze_question(const std::string& question,
                                  const std::vector<std::pair<EntityId, std::string>>& topics,
                                  LlmBackend& llm, const PromptLibrary& prompts,
                                  const PipelineConfig& config,
                                  std::vector<std::string>* warnings) {
    if (topics.empty()) throw PreconditionError("analyze_question requires topics");

    std::string topic_list;
    for (std::size_t i = 0; i < topics.size(); ++i) {
        if (i) topic_list += ", ";
        topic_list += topics[i].second;
    }
    LlmRequest request;
    request.prompt = prompts.render("question_analysis",
                                    {{"question", question}, {"topic_entities", topic_list}});
    request.purpose = Purpose::Analysis;
    request.temperature = temperature_for(Purpose::Analysis, config);
    request.max_tokens = config.max_tokens;

    std::string reply;
    for (int attempt = 0; attempt < 2; ++attempt) {
        reply = llm.complete(request);
        try {
            return parse_analysis_reply(reply, topics, warnings);
        } catch (const ParseError&) {
            if (attempt == 1) throw;
        }
    }
    throw ParseError("analysis reply unparseable", reply); // unreachable
}

} // namespace pog
