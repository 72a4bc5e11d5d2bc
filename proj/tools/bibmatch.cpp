// Command-line entry point: ingest, index, train, match, eval, sweep,
// links-stats, synth and serve subcommands over the bibmatch library.

#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>
#include <httplib.h>
#include <nlohmann/json.hpp>

#include "bibmatch/classifier.hpp"
#include "bibmatch/corpus.hpp"
#include "bibmatch/errors.hpp"
#include "bibmatch/eval.hpp"
#include "bibmatch/index.hpp"
#include "bibmatch/links.hpp"
#include "bibmatch/matcher.hpp"
#include "bibmatch/service.hpp"
#include "bibmatch/synth.hpp"

namespace {

using namespace bibmatch;

constexpr std::uint64_t kDefaultSeed = 42;

std::vector<double> parse_thresholds(const std::string& spec) {
    std::vector<double> thresholds;
    if (spec.find(':') != std::string::npos) {
        double start = 0, end = 0, step = 0;
        char c1 = 0, c2 = 0;
        std::istringstream in(spec);
        if (!(in >> start >> c1 >> end >> c2 >> step) || c1 != ':' || c2 != ':' || step <= 0)
            throw BadConfigError("thresholds must be start:end:step or a comma list");
        for (double t = start; t <= end + 1e-12; t += step) thresholds.push_back(t);
        // keep the endpoint exact when the step divides the range
        if (!thresholds.empty() && std::abs(thresholds.back() - end) < 1e-9)
            thresholds.back() = end;
        return thresholds;
    }
    std::istringstream in(spec);
    std::string item;
    while (std::getline(in, item, ',')) {
        if (item.empty()) continue;
        thresholds.push_back(std::stod(item));
    }
    if (thresholds.empty()) throw BadConfigError("empty threshold list");
    return thresholds;
}

PenaltyParams parse_penalty(const std::string& spec) {
    std::size_t comma = spec.find(',');
    if (comma == std::string::npos)
        throw BadConfigError("penalty must be 'alpha,beta', got '" + spec + "'");
    try {
        return {std::stod(spec.substr(0, comma)), std::stod(spec.substr(comma + 1))};
    } catch (const std::exception&) {
        throw BadConfigError("penalty must be 'alpha,beta', got '" + spec + "'");
    }
}

std::vector<MatchInput> read_match_inputs(const std::string& path, const std::string& format) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open input file '" + path + "'");
    std::vector<MatchInput> inputs;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (format == "text") {
            inputs.emplace_back(line);
            continue;
        }
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        nlohmann::json j;
        try {
            j = nlohmann::json::parse(line);
        } catch (const nlohmann::json::exception& e) {
            throw ParseError("line " + std::to_string(line_no) + ": " + e.what(), line_no);
        }
        if (j.is_string()) {
            inputs.emplace_back(j.get<std::string>());
        } else if (j.is_object()) {
            std::map<std::string, std::string> fields;
            for (const auto& [key, value] : j.items()) {
                if (!value.is_string())
                    throw ParseError("line " + std::to_string(line_no)
                                         + ": structured values must be strings",
                                     line_no);
                fields[key] = value.get<std::string>();
            }
            inputs.emplace_back(std::move(fields));
        } else {
            throw ParseError("line " + std::to_string(line_no)
                                 + ": entries must be strings or objects",
                             line_no);
        }
    }
    return inputs;
}

std::ostream& open_output(std::ofstream& file, const std::string& path) {
    if (path.empty() || path == "-") return std::cout;
    file.open(path, std::ios::binary);
    if (!file) throw IoError("cannot open '" + path + "' for writing");
    return file;
}

Model train_on_gold(const Corpus& corpus, const std::vector<GoldItem>& gold,
                    const ModelConfig& config, std::size_t k) {
    Index index = Index::build(corpus);
    TrainingSet data = build_training_set(gold, index, corpus, k);
    return train(data, config);
}

int run(int argc, char** argv) {
    CLI::App app{"bibliographic citation matching toolkit"};
    app.require_subcommand(1);

    // ingest
    std::string in_path, out_path;
    auto* ingest = app.add_subcommand("ingest", "validate and canonicalize a JSONL corpus");
    ingest->add_option("--corpus", in_path, "input corpus JSONL")->required();
    ingest->add_option("--out", out_path, "canonical output path")->required();
    ingest->callback([&] {
        Corpus corpus = load_corpus(in_path);
        save_corpus(corpus, out_path);
        std::cout << "ingested " << corpus.size() << " records\n";
    });

    // index
    std::string index_corpus, index_out;
    auto* index_cmd = app.add_subcommand("index", "build an index snapshot");
    index_cmd->add_option("--corpus", index_corpus, "corpus JSONL")->required();
    index_cmd->add_option("--out", index_out, "snapshot output path")->required();
    index_cmd->callback([&] {
        Corpus corpus = load_corpus(index_corpus);
        Index index = Index::build(corpus);
        index.save(index_out);
        std::cout << "indexed " << index.doc_count() << " records\n";
    });

    // train
    std::string train_corpus, train_gold, train_out, train_kind = "forest";
    std::size_t train_trees = 50, train_depth = 8, train_k = 20;
    std::uint64_t train_seed = kDefaultSeed;
    auto* train_cmd = app.add_subcommand("train", "train a match classifier from a gold set");
    train_cmd->add_option("--corpus", train_corpus)->required();
    train_cmd->add_option("--gold", train_gold)->required();
    train_cmd->add_option("--out", train_out, "model file")->required();
    train_cmd->add_option("--kind", train_kind, "forest or linear");
    train_cmd->add_option("--trees", train_trees);
    train_cmd->add_option("--max-depth", train_depth);
    train_cmd->add_option("--seed", train_seed);
    train_cmd->add_option("--k", train_k, "candidates per query");
    train_cmd->callback([&] {
        if (train_kind != "forest" && train_kind != "linear")
            throw BadConfigError("--kind must be forest or linear");
        Corpus corpus = load_corpus(train_corpus);
        std::vector<GoldItem> gold = load_gold(train_gold);
        ModelConfig config;
        config.kind = train_kind == "forest" ? ModelKind::forest : ModelKind::linear;
        config.tree_count = train_trees;
        config.max_depth = train_depth;
        config.seed = train_seed;
        Model model = train_on_gold(corpus, gold, config, train_k);
        save_model(model, train_out);
        if (model.single_class_warning)
            std::cerr << "warning: training data had a single class; model is constant\n";
        std::cout << "trained " << train_kind << " model on " << gold.size() << " gold items\n";
    });

    // match
    std::string match_corpus, match_model, match_input, match_out, match_format = "text";
    std::vector<std::string> match_citations;
    std::size_t match_k = 20;
    double match_min_score = 0.5;
    auto* match_cmd = app.add_subcommand("match", "match citation strings against the corpus");
    match_cmd->add_option("--corpus", match_corpus)->required();
    match_cmd->add_option("--model", match_model)->required();
    match_cmd->add_option("--input", match_input, "file with one citation per line");
    match_cmd->add_option("--format", match_format, "input format: text or jsonl");
    match_cmd->add_option("--citation", match_citations, "citation string (repeatable)");
    match_cmd->add_option("--k", match_k);
    match_cmd->add_option("--min-score", match_min_score);
    match_cmd->add_option("--out", match_out, "output JSONL ('-' for stdout)");
    match_cmd->callback([&] {
        if (match_format != "text" && match_format != "jsonl")
            throw BadConfigError("--format must be text or jsonl");
        if (match_input.empty() && match_citations.empty())
            throw BadConfigError("provide --input or --citation");
        Corpus corpus = load_corpus(match_corpus);
        Model model = load_model(match_model);
        Index index = Index::build(corpus);
        std::vector<MatchInput> inputs;
        for (const std::string& c : match_citations) inputs.emplace_back(c);
        if (!match_input.empty()) {
            auto file_inputs = read_match_inputs(match_input, match_format);
            inputs.insert(inputs.end(), file_inputs.begin(), file_inputs.end());
        }
        auto results = match_batch(inputs, index, corpus, model, {match_k, match_min_score});
        std::ofstream file;
        std::ostream& out = open_output(file, match_out);
        for (const MatchResult& r : results) out << match_result_to_json(r).dump() << '\n';
    });

    // eval
    std::string eval_corpus, eval_model, eval_gold;
    std::size_t eval_k = 20;
    double eval_min_score = 0.5;
    std::vector<std::string> eval_penalties = {"1,1", "2,2", "5,5"};
    auto* eval_cmd = app.add_subcommand("eval", "confusion counts and informedness on a gold set");
    eval_cmd->add_option("--corpus", eval_corpus)->required();
    eval_cmd->add_option("--model", eval_model)->required();
    eval_cmd->add_option("--gold", eval_gold)->required();
    eval_cmd->add_option("--k", eval_k);
    eval_cmd->add_option("--min-score", eval_min_score);
    eval_cmd->add_option("--penalties", eval_penalties, "alpha,beta pairs");
    eval_cmd->callback([&] {
        Corpus corpus = load_corpus(eval_corpus);
        Model model = load_model(eval_model);
        Index index = Index::build(corpus);
        std::vector<GoldItem> gold = load_gold(eval_gold);

        std::vector<std::pair<GoldItem, MatchResult>> results;
        for (const GoldItem& item : gold) {
            auto batch = match_batch({item.input}, index, corpus, model,
                                     {eval_k, eval_min_score});
            results.emplace_back(item, batch.front());
        }
        ConfusionCounts counts = confusion_counts(results);

        nlohmann::json report;
        report["min_score"] = eval_min_score;
        report["counts"] = {{"tp", counts.tp}, {"fm", counts.fm}, {"fn", counts.fn},
                            {"fp", counts.fp}, {"tn", counts.tn}, {"rp", counts.rp()},
                            {"rn", counts.rn()}, {"n", counts.n()}};
        report["rp_zero"] = counts.rp() == 0;
        report["rn_zero"] = counts.rn() == 0;
        auto metrics = nlohmann::json::array();
        for (const std::string& spec : eval_penalties) {
            PenaltyParams p = parse_penalty(spec);
            metrics.push_back({{"alpha", p.alpha},
                               {"beta", p.beta},
                               {"informedness", informedness(counts, p)}});
        }
        report["informedness"] = std::move(metrics);
        std::cout << report.dump(2) << '\n';
    });

    // sweep
    std::string sweep_corpus, sweep_model, sweep_gold, sweep_out;
    std::string sweep_thresholds = "0.5:1.0:0.05";
    std::vector<std::string> sweep_penalties = {"1,1", "2,2", "5,5"};
    std::size_t sweep_k = 20;
    auto* sweep_cmd = app.add_subcommand("sweep", "informedness vs minimum score CSV");
    sweep_cmd->add_option("--corpus", sweep_corpus)->required();
    sweep_cmd->add_option("--model", sweep_model)->required();
    sweep_cmd->add_option("--gold", sweep_gold)->required();
    sweep_cmd->add_option("--thresholds", sweep_thresholds, "start:end:step or comma list");
    sweep_cmd->add_option("--penalties", sweep_penalties, "alpha,beta pairs");
    sweep_cmd->add_option("--k", sweep_k);
    sweep_cmd->add_option("--out", sweep_out, "CSV path ('-' for stdout)");
    sweep_cmd->callback([&] {
        Corpus corpus = load_corpus(sweep_corpus);
        Model model = load_model(sweep_model);
        Index index = Index::build(corpus);
        std::vector<GoldItem> gold = load_gold(sweep_gold);
        std::vector<double> thresholds = parse_thresholds(sweep_thresholds);
        std::vector<PenaltyParams> penalties;
        for (const std::string& spec : sweep_penalties) penalties.push_back(parse_penalty(spec));
        auto rows = threshold_sweep(model, gold, index, corpus, thresholds, penalties, sweep_k);
        std::ofstream file;
        std::ostream& out = open_output(file, sweep_out);
        write_sweep_csv(out, rows);
    });

    // links-stats
    std::string links_corpus, links_path;
    auto* links_cmd = app.add_subcommand("links-stats", "link histograms by MSC and year");
    links_cmd->add_option("--corpus", links_corpus)->required();
    links_cmd->add_option("--links", links_path)->required();
    links_cmd->callback([&] {
        Corpus corpus = load_corpus(links_corpus);
        LinkLoadResult loaded = load_links(links_path, corpus);
        LinkStats stats = link_stats(loaded.set, corpus);
        nlohmann::json report;
        report["links"] = loaded.set.size();
        report["rejects"] = loaded.rejects.size();
        nlohmann::json msc = nlohmann::json::object();
        for (const auto& [code, count] : stats.msc_histogram) msc[code] = count;
        nlohmann::json years = nlohmann::json::object();
        for (const auto& [year, count] : stats.year_histogram)
            years[std::to_string(year)] = count;
        report["msc_histogram"] = std::move(msc);
        report["year_histogram"] = std::move(years);
        std::cout << report.dump(2) << '\n';
    });

    // synth
    SynthConfig synth_config;
    std::string synth_corpus_out, synth_gold_out;
    auto* synth_cmd = app.add_subcommand("synth", "generate a synthetic corpus and gold set");
    synth_cmd->add_option("--records", synth_config.records);
    synth_cmd->add_option("--gold", synth_config.gold);
    synth_cmd->add_option("--negative-fraction", synth_config.negative_fraction);
    synth_cmd->add_option("--token-drop-p", synth_config.token_drop_p);
    synth_cmd->add_option("--author-initial-p", synth_config.author_initial_p);
    synth_cmd->add_option("--year-jitter-p", synth_config.year_jitter_p);
    synth_cmd->add_option("--seed", synth_config.seed);
    synth_cmd->add_option("--corpus-out", synth_corpus_out)->required();
    synth_cmd->add_option("--gold-out", synth_gold_out)->required();
    synth_cmd->callback([&] {
        SynthOutput out = make_synthetic(synth_config);
        save_corpus(out.corpus, synth_corpus_out);
        save_gold(out.gold, synth_gold_out);
        std::cout << "wrote " << out.corpus.size() << " records and " << out.gold.size()
                  << " gold items\n";
    });

    // serve
    std::string serve_config_path;
    ServiceConfig serve_config;
    bool serve_deterministic = false;
    int serve_port = -1;
    std::string serve_corpus, serve_model, serve_links;
    long long serve_page_size = -1, serve_batch_cap = -1;
    auto* serve_cmd = app.add_subcommand("serve", "run the HTTP metadata service");
    serve_cmd->add_option("--config", serve_config_path, "key = value config file");
    serve_cmd->add_option("--corpus", serve_corpus);
    serve_cmd->add_option("--model", serve_model);
    serve_cmd->add_option("--links", serve_links);
    serve_cmd->add_option("--port", serve_port);
    serve_cmd->add_option("--page-size", serve_page_size);
    serve_cmd->add_option("--batch-cap", serve_batch_cap);
    serve_cmd->add_flag("--deterministic", serve_deterministic,
                        "zero timestamps in responses");
    serve_cmd->callback([&] {
        ServiceConfig config =
            serve_config_path.empty() ? ServiceConfig{} : load_service_config(serve_config_path);
        if (!serve_corpus.empty()) config.corpus_path = serve_corpus;
        if (!serve_model.empty()) config.model_path = serve_model;
        if (!serve_links.empty()) config.links_path = serve_links;
        if (serve_port >= 0) config.port = serve_port;
        if (serve_page_size >= 0) config.page_size = static_cast<std::size_t>(serve_page_size);
        if (serve_batch_cap >= 0) config.batch_cap = static_cast<std::size_t>(serve_batch_cap);
        if (serve_deterministic) config.deterministic_time = true;
        if (config.corpus_path.empty()) throw BadConfigError("serve needs a corpus path");

        Corpus corpus = load_corpus(config.corpus_path);
        Index index = Index::build(corpus);
        Model model;
        bool has_model = !config.model_path.empty();
        if (has_model) model = load_model(config.model_path);
        LinkSet links;
        if (!config.links_path.empty()) {
            LinkLoadResult loaded = load_links(config.links_path, corpus);
            links = std::move(loaded.set);
            if (!loaded.rejects.empty())
                std::cerr << "warning: " << loaded.rejects.size() << " links rejected\n";
        }

        Service service(corpus, index, has_model ? &model : nullptr, &links, config);
        httplib::Server server;
        service.mount(server);
        std::cerr << "serving " << corpus.size() << " records on port " << config.port << "\n";
        if (!server.listen("0.0.0.0", config.port))
            throw IoError("cannot bind port " + std::to_string(config.port));
    });

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 1;
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    try {
        return run(argc, argv);
    } catch (const bibmatch::Error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "internal error: " << e.what() << '\n';
        return 3;
    }
}
