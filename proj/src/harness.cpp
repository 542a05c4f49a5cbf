#include "pog/harness.hpp"

#include "pog/linker.hpp"
#include "pog/prune.hpp"
#include "pog/subgraph.hpp"
#include "pog/text.hpp"

#include <atomic>
#include <fstream>
#include <mutex>
#include <sstream>
#include <thread>

namespace pog {

DatasetLoadResult load_dataset(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error("cannot open dataset: " + path);

    DatasetLoadResult result;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        auto reject = [&](const std::string& why) {
            result.errors.push_back("line " + std::to_string(line_no) + ": " + why);
        };
        nlohmann::json doc = nlohmann::json::parse(line, nullptr, false);
        if (doc.is_discarded()) {
            reject("invalid JSON");
            continue;
        }
        if (!doc.contains("id") || !doc.contains("question")) {
            reject("missing id or question");
            continue;
        }
        if (!doc.contains("answers") || !doc["answers"].is_array() ||
            doc["answers"].empty()) {
            reject("missing gold answers");
            continue;
        }
        QuestionRecord record;
        record.id = doc["id"].get<std::string>();
        record.question = doc["question"].get<std::string>();
        for (const auto& a : doc["answers"]) record.gold_answers.push_back(a.get<std::string>());
        if (doc.contains("topic_entities"))
            for (const auto& t : doc["topic_entities"])
                record.gold_topics.emplace_back(t.at("label").get<std::string>(),
                                                t.at("entity").get<std::string>());
        result.records.push_back(std::move(record));
    }
    return result;
}

void save_dataset(const std::string& path, const std::vector<QuestionRecord>& records) {
    std::ofstream out(path);
    if (!out) throw Error("cannot write dataset: " + path);
    for (const QuestionRecord& r : records) {
        nlohmann::ordered_json doc;
        doc["id"] = r.id;
        doc["question"] = r.question;
        doc["answers"] = r.gold_answers;
        if (!r.gold_topics.empty()) {
            doc["topic_entities"] = nlohmann::ordered_json::array();
            for (const auto& [label, entity] : r.gold_topics)
                doc["topic_entities"].push_back({{"label", label}, {"entity", entity}});
        }
        out << doc.dump() << "\n";
    }
}

bool hits_at_1(const std::string& predicted, const std::vector<std::string>& gold_answers) {
    std::string folded = fold_text(predicted);
    for (const std::string& gold : gold_answers)
        if (fold_text(gold) == folded) return true;
    return false;
}

nlohmann::ordered_json QuestionResult::to_json() const {
    nlohmann::ordered_json doc;
    doc["id"] = id;
    doc["failed"] = failed;
    if (failed) doc["error"] = error;
    doc["answer"] = outcome.answer;
    doc["verdict"] = outcome.verdict == Verdict::Sufficient ? "sufficient" : "insufficient";
    doc["reason"] = outcome.reason;
    doc["hit"] = hit;
    doc["phase"] = phase_to_string(answer_phase);
    doc["depth"] = depth;
    doc["evidence_source"] = evidence_source_to_string(outcome.evidence_source);
    doc["llm_calls"] = transcript.call_count();
    doc["prompt_chars"] = transcript.total_prompt_chars();
    doc["trace"] = trace.to_json();
    if (subgraph_dump) doc["subgraph"] = *subgraph_dump;
    return doc;
}

nlohmann::ordered_json RunMetrics::to_json() const {
    nlohmann::ordered_json doc;
    doc["questions"] = questions;
    doc["correct"] = correct;
    doc["failed"] = failed;
    doc["hits_at_1"] = hits_at_1;
    doc["total_llm_calls"] = total_llm_calls;
    doc["avg_llm_calls"] = avg_llm_calls;
    doc["total_prompt_chars"] = total_prompt_chars;
    doc["phase_tally"] = phase_tally;
    doc["evidence_tally"] = evidence_tally;
    doc["per_question"] = per_question;
    return doc;
}

Pipeline::Pipeline(const GraphSource& source, LlmBackend& llm,
                   const EmbeddingProvider& embedder, const PromptLibrary& prompts,
                   PipelineConfig config)
    : source_(source), llm_(llm), embedder_(embedder), prompts_(prompts),
      config_(std::move(config)) {
    config_.validate();
}

void Pipeline::set_alignment_universe(std::vector<std::pair<EntityId, std::string>> universe) {
    universe_ = std::move(universe);
}

std::vector<std::pair<EntityId, std::string>> Pipeline::resolve_topics(
    const QuestionRecord& record, LlmBackend& llm, TraceLog& trace) const {
    if (config_.use_gold_topics && !record.gold_topics.empty()) {
        std::vector<std::pair<EntityId, std::string>> topics;
        for (const auto& [label, entity] : record.gold_topics)
            topics.emplace_back(entity, label);
        return topics;
    }
    if (universe_.empty())
        throw ConfigError("no alignment universe configured; supply gold topics or a local "
                          "KG / name index");

    std::vector<std::string> keywords =
        extract_topic_keywords(record.question, llm, prompts_, config_);
    TopicEntitySet aligned = align_to_kg(keywords, universe_, embedder_);
    if (aligned.empty()) throw Error("no topic entity aligned for question " + record.id);

    std::vector<std::pair<EntityId, std::string>> topics;
    for (const TopicEntity& t : aligned) {
        std::string label;
        for (const auto& [id, l] : universe_)
            if (id == t.entity) {
                label = l;
                break;
            }
        topics.emplace_back(t.entity, label);
        std::ostringstream note;
        note << "linked '" << t.mention << "' -> " << t.entity << " (score " << t.score
             << ")";
        trace.notes.push_back(note.str());
    }
    return topics;
}

QuestionResult Pipeline::run_question(const QuestionRecord& record) const {
    QuestionResult result;
    result.id = record.id;
    TranscribingLlm llm(llm_, result.transcript);

    try {
        auto topics = resolve_topics(record, llm, result.trace);
        std::vector<EntityId> topic_ids;
        for (const auto& [id, label] : topics) topic_ids.push_back(id);

        QuestionSubgraph unclustered =
            build_question_subgraph(source_, topic_ids, config_.d_max);
        QuestionSubgraph clustered = cluster_supernodes(unclustered);
        QuestionSubgraph subgraph =
            reduce_by_topic_paths(clustered, config_.d_max, &result.trace.warnings);
        if (config_.dump_subgraph) result.subgraph_dump = subgraph.to_json();

        QuestionAnalysis analysis = analyze_question(record.question, topics, llm, prompts_,
                                                     config_, &result.trace.warnings);
        QuestionBundle bundle{record.question, analysis.split_questions};

        PhaseContext ctx{subgraph,  source_,   bundle,  analysis,
                         topics,    config_,   llm,     embedder_,
                         prompts_,  result.trace, &result.transcript};

        PhaseOutcome topic_outcome = run_topic_phase(ctx);
        if (topic_outcome.answered) {
            result.outcome = topic_outcome.outcome;
            result.answer_phase = Phase::Topic;
            result.depth = topic_outcome.depth;
        } else {
            PhaseOutcome supp_outcome = run_supplement_phase(ctx, topic_outcome.paths);
            if (supp_outcome.answered) {
                result.outcome = supp_outcome.outcome;
                result.answer_phase = Phase::Supplement;
                result.depth = supp_outcome.depth;
            } else {
                PhaseOutcome expand_outcome =
                    run_expand_phase(ctx, topic_outcome.paths, supp_outcome.paths);
                if (expand_outcome.answered) {
                    result.outcome = expand_outcome.outcome;
                    result.answer_phase = Phase::Expand;
                    result.depth = expand_outcome.depth;
                } else {
                    // Final fallback over everything the phases kept. The
                    // expand contribution is the last pruned path set.
                    result.trace.notes.push_back(
                        "final fallback unions the last pruned expand-phase paths");
                    PathSet pool;
                    pool.phase = Phase::Final;
                    auto add = [&](const PathSet& s) {
                        pool.paths.insert(pool.paths.end(), s.paths.begin(), s.paths.end());
                    };
                    add(topic_outcome.paths);
                    add(supp_outcome.paths);
                    add(expand_outcome.paths);
                    canonicalize(pool.paths);

                    OpContext op = ctx.op_context();
                    if (!pool.empty()) {
                        auto list_t = reorder(topics, analysis.indicator, nullptr);
                        std::vector<EntityId> anchor_ids;
                        for (const auto& [id, label] : list_t) anchor_ids.push_back(id);
                        pool = apply_strategy(pool, anchor_ids, op);
                        pool.phase = Phase::Final;
                    }
                    std::size_t calls0 = result.transcript.call_count();
                    result.outcome = generate_final_answer(pool, op);
                    result.answer_phase = Phase::Final;
                    result.depth = config_.d_max;
                    result.trace.phases.push_back(
                        PhaseRecord{"final", config_.d_max, pool.size(),
                                    result.transcript.call_count() - calls0});
                }
            }
        }
        // Evidence paths with their backing triples, while the subgraph is
        // still alive to resolve step edges.
        for (const EntityPath& p : result.outcome.evidence_paths.paths) {
            nlohmann::ordered_json entry;
            entry["rendered"] = render_path(p, subgraph, config_.pog_e, config_.seed);
            entry["triples"] = nlohmann::ordered_json::array();
            for (const PathStep& step : p.steps)
                for (const Triple& t : subgraph.edge(step.edge).backing)
                    entry["triples"].push_back({{"head", t.head},
                                                {"relation", t.relation},
                                                {"tail", t.tail}});
            result.trace.evidence.push_back(std::move(entry));
        }

        result.hit = hits_at_1(result.outcome.answer, record.gold_answers);
    } catch (const std::exception& e) {
        result.failed = true;
        result.error = e.what();
        result.hit = false;
    }
    return result;
}

RunMetrics run_dataset(const Pipeline& pipeline, const std::vector<QuestionRecord>& records,
                       int parallelism) {
    std::vector<QuestionResult> results(records.size());

    if (parallelism <= 1) {
        for (std::size_t i = 0; i < records.size(); ++i)
            results[i] = pipeline.run_question(records[i]);
    } else {
        std::atomic<std::size_t> next{0};
        auto worker = [&] {
            for (;;) {
                std::size_t i = next.fetch_add(1);
                if (i >= records.size()) return;
                results[i] = pipeline.run_question(records[i]);
            }
        };
        std::vector<std::thread> threads;
        int n = std::min<int>(parallelism, static_cast<int>(records.size()));
        for (int t = 0; t < n; ++t) threads.emplace_back(worker);
        for (auto& t : threads) t.join();
    }

    RunMetrics metrics;
    metrics.questions = records.size();
    for (const char* phase : {"topic", "supplement", "expand", "final", "failed"})
        metrics.phase_tally[phase] = 0;
    for (const char* src : {"kg_only", "llm_inspired_kg", "kg_inspired_llm", "failed"})
        metrics.evidence_tally[src] = 0;

    for (const QuestionResult& r : results) {
        if (r.hit) ++metrics.correct;
        if (r.failed) {
            ++metrics.failed;
            ++metrics.phase_tally["failed"];
            ++metrics.evidence_tally["failed"];
        } else {
            ++metrics.phase_tally[phase_to_string(r.answer_phase)];
            ++metrics.evidence_tally[evidence_source_to_string(r.outcome.evidence_source)];
        }
        metrics.total_llm_calls += r.transcript.call_count();
        metrics.total_prompt_chars += r.transcript.total_prompt_chars();
        metrics.per_question.push_back(r.to_json());
    }
    metrics.hits_at_1 =
        records.empty() ? 0.0 : static_cast<double>(metrics.correct) / records.size();
    metrics.avg_llm_calls =
        records.empty() ? 0.0
                        : static_cast<double>(metrics.total_llm_calls) / records.size();
    return metrics;
}

} // namespace pog
