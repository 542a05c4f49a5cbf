// pog: knowledge-graph path-reasoning engine over a pluggable LLM backend.
//
//   pog run --dataset questions.jsonl --kg graph.tsv --labels labels.tsv
//           --llm mock:script.json --strategy fuzzy-precise --out results/

#include "pog/embed.hpp"
#include "pog/harness.hpp"
#include "pog/kg.hpp"
#include "pog/llm.hpp"
#include "pog/prompts.hpp"
#include "pog/sparql.hpp"

#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>

namespace {

std::unique_ptr<pog::LlmBackend> make_llm(const std::string& spec, const std::string& model) {
    if (spec.rfind("mock:", 0) == 0)
        return std::make_unique<pog::MockLlm>(pog::MockLlm::from_json_file(spec.substr(5)));
    if (spec.rfind("http:", 0) == 0 || spec.rfind("https:", 0) == 0)
        return std::make_unique<pog::HttpLlm>(spec, model);
    throw pog::ConfigError("--llm must be mock:<script.json> or http:<url>");
}

std::unique_ptr<pog::EmbeddingProvider> make_embedder(const std::string& spec) {
    if (spec == "fallback") return std::make_unique<pog::HashingEmbedder>();
    if (spec.rfind("http:", 0) == 0 || spec.rfind("https:", 0) == 0)
        return std::make_unique<pog::HttpEmbedder>(spec);
    throw pog::ConfigError("--embedder must be 'fallback' or http:<url>");
}

std::vector<std::pair<pog::EntityId, std::string>> load_name_index(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw pog::Error("cannot open name index: " + path);
    std::vector<std::pair<pog::EntityId, std::string>> universe;
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::size_t tab = line.find('\t');
        if (tab == std::string::npos) continue;
        universe.emplace_back(line.substr(0, tab), line.substr(tab + 1));
    }
    return universe;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"knowledge-graph path reasoning engine"};
    app.require_subcommand(1);

    CLI::App* run = app.add_subcommand("run", "answer a dataset of questions");

    std::string dataset_path, kg_path, labels_path, sparql_url, llm_spec, model = "gpt-3.5-turbo";
    std::string embedder_spec = "fallback", strategy = "fuzzy-precise", out_dir = "out";
    std::string prompt_dir, name_index_path;
    pog::PipelineConfig config;
    int parallel = 1;
    bool dump_subgraphs = false;

    run->add_option("--dataset", dataset_path, "question JSONL file")->required();
    run->add_option("--kg", kg_path, "local triple file (head\\trelation\\ttail)");
    run->add_option("--labels", labels_path, "companion label file (id\\tlabel)");
    run->add_option("--sparql", sparql_url, "SPARQL endpoint URL");
    run->add_option("--llm", llm_spec, "mock:<script.json> or http:<url>")->required();
    run->add_option("--model", model, "model name for the HTTP backend");
    run->add_option("--embedder", embedder_spec, "fallback | http:<url>");
    run->add_option("--strategy", strategy, "fuzzy | fuzzy-precise | fuzzy-branch | three-step");
    run->add_option("--dmax", config.d_max, "maximum exploration depth");
    run->add_option("--w1", config.w1, "fuzzy selection width");
    run->add_option("--w2", config.w2, "internal narrowing width");
    run->add_option("--wmax", config.w_max, "final beam width");
    run->add_flag("--pog-e", config.pog_e, "sample one relation per clustered superedge");
    run->add_option("--seed", config.seed, "random seed");
    run->add_option("--out", out_dir, "output directory");
    run->add_option("--parallel", parallel, "concurrent questions");
    run->add_flag("--gold-topics", config.use_gold_topics,
                  "use dataset-provided topic entities, skipping extraction");
    run->add_option("--prompts", prompt_dir, "prompt assets directory");
    run->add_option("--name-index", name_index_path, "id\\tlabel file for entity alignment");
    run->add_flag("--dump-subgraphs", dump_subgraphs, "attach subgraph JSON to traces");

    CLI11_PARSE(app, argc, argv);

    try {
        config.strategy = pog::strategy_from_string(strategy);
        config.prompt_dir = prompt_dir;
        config.dump_subgraph = dump_subgraphs;
        config.validate();

        if (kg_path.empty() == sparql_url.empty())
            throw pog::ConfigError("exactly one of --kg or --sparql is required");

        pog::KnowledgeGraph graph;
        std::unique_ptr<pog::GraphSource> source;
        if (!kg_path.empty()) {
            graph = pog::KnowledgeGraph::load_files(kg_path, labels_path);
            source = std::make_unique<pog::LocalGraphSource>(graph);
        } else {
            source = std::make_unique<pog::SparqlGraphSource>(sparql_url);
        }

        auto llm = make_llm(llm_spec, model);
        auto embedder = make_embedder(embedder_spec);
        pog::PromptLibrary prompts(config.prompt_dir);

        pog::Pipeline pipeline(*source, *llm, *embedder, prompts, config);
        if (!name_index_path.empty()) {
            pipeline.set_alignment_universe(load_name_index(name_index_path));
        } else if (!kg_path.empty()) {
            std::vector<std::pair<pog::EntityId, std::string>> universe;
            for (const pog::EntityId& e : graph.entities())
                universe.emplace_back(e, graph.label(e));
            std::sort(universe.begin(), universe.end());
            pipeline.set_alignment_universe(std::move(universe));
        }

        pog::DatasetLoadResult loaded = pog::load_dataset(dataset_path);
        for (const std::string& err : loaded.errors)
            std::cerr << "dataset: " << err << "\n";

        pog::RunMetrics metrics = pog::run_dataset(pipeline, loaded.records, parallel);

        std::filesystem::create_directories(out_dir);
        {
            std::ofstream mf(out_dir + "/metrics.json");
            mf << metrics.to_json().dump(2) << "\n";
        }
        {
            std::ofstream tf(out_dir + "/trace.jsonl");
            for (const auto& q : metrics.per_question) tf << q.dump() << "\n";
        }

        std::cout << "questions: " << metrics.questions << "\n"
                  << "hits@1:    " << metrics.hits_at_1 << "\n"
                  << "avg calls: " << metrics.avg_llm_calls << "\n"
                  << "outputs:   " << out_dir << "/metrics.json, " << out_dir
                  << "/trace.jsonl\n";
        return metrics.failed == metrics.questions && metrics.questions > 0 ? 1 : 0;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}
