// mmqo: cost-guided optimizer for multi-modal query plans.
//
// Subcommands:
//   generate  draw a corpus of random initial plans for a catalog
//   optimize  run an optimization method over a corpus and write reports
//   compare   align several reports side by side
//   classify  accuracy harness for the pairwise execution-time classifier

#include <atomic>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <set>
#include <sstream>

#include "CLI11.hpp"
#include "json.hpp"

#include "mmqo/classifier.hpp"
#include "mmqo/cost.hpp"
#include "mmqo/errors.hpp"
#include "mmqo/evaluate.hpp"
#include "mmqo/gcd.hpp"
#include "mmqo/generator.hpp"
#include "mmqo/plan_text.hpp"
#include "mmqo/proposer.hpp"
#include "mmqo/simulator.hpp"

namespace fs = std::filesystem;
using namespace mmqo;
using ordered_json = nlohmann::ordered_json;

namespace {

struct RunConfig {
    std::string catalog_path;
    std::string params_path;
    std::string corpus_path;
    std::string synonyms_path;
    std::string out;
    std::string method = "gcd";
    std::string proposer = "rule";
    int k = 5;
    int tolerance = 3;
    int iteration_cap = 25;
    int budget = 12;
    std::uint64_t seed = 0;
    std::string sim = "matched";
    std::uint64_t sim_seed = 1;
    int jobs = 1;
    LlmEndpointConfig llm;
    bool llm_configured = false;
    RemoteEmbeddingConfig embedding;
    bool embedding_configured = false;
};

std::string read_file(const std::string &path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError("cannot open file: " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

void write_file(const std::string &path, const std::string &text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ConfigError("cannot write file: " + path);
    out << text;
}

std::vector<PlanPtr> load_corpus(const std::string &path) {
    ordered_json doc;
    try {
        doc = ordered_json::parse(read_file(path));
    } catch (const nlohmann::json::parse_error &e) {
        throw ConfigError(std::string("corpus: ") + e.what());
    }
    if (!doc.is_array()) throw ConfigError("corpus: expected a JSON array of plan documents");
    std::vector<PlanPtr> out;
    for (const auto &entry : doc) {
        out.push_back(parse_plan(entry.dump()));
    }
    return out;
}

SimilarityChecker make_similarity(const RunConfig &config) {
    SynonymLexicon lexicon = config.synonyms_path.empty()
                                 ? SynonymLexicon::builtin()
                                 : SynonymLexicon::load_file(config.synonyms_path);
    std::shared_ptr<const EmbeddingProvider> backend;
    if (config.embedding_configured) {
        backend = std::make_shared<RemoteEmbeddingProvider>(config.embedding);
    } else {
        backend = std::make_shared<DefaultEmbeddingProvider>(lexicon);
    }
    return SimilarityChecker(std::move(backend), std::move(lexicon));
}

/// Applies JSON config-file values underneath the CLI flags: the file loads
/// first, any flag given on the command line wins.
void apply_config_file(RunConfig &config, const std::string &path) {
    ordered_json doc;
    try {
        doc = ordered_json::parse(read_file(path));
    } catch (const nlohmann::json::parse_error &e) {
        throw ConfigError(std::string("config: ") + e.what());
    }
    if (doc.contains("catalog")) config.catalog_path = doc["catalog"].get<std::string>();
    if (doc.contains("params")) config.params_path = doc["params"].get<std::string>();
    if (doc.contains("corpus")) config.corpus_path = doc["corpus"].get<std::string>();
    if (doc.contains("synonyms")) config.synonyms_path = doc["synonyms"].get<std::string>();
    if (doc.contains("out")) config.out = doc["out"].get<std::string>();
    if (doc.contains("method")) config.method = doc["method"].get<std::string>();
    if (doc.contains("proposer")) config.proposer = doc["proposer"].get<std::string>();
    if (doc.contains("k")) config.k = doc["k"].get<int>();
    if (doc.contains("tolerance")) config.tolerance = doc["tolerance"].get<int>();
    if (doc.contains("iteration_cap")) config.iteration_cap = doc["iteration_cap"].get<int>();
    if (doc.contains("budget")) config.budget = doc["budget"].get<int>();
    if (doc.contains("seed")) config.seed = doc["seed"].get<std::uint64_t>();
    if (doc.contains("sim")) config.sim = doc["sim"].get<std::string>();
    if (doc.contains("sim_seed")) config.sim_seed = doc["sim_seed"].get<std::uint64_t>();
    if (doc.contains("jobs")) config.jobs = doc["jobs"].get<int>();
    if (doc.contains("llm")) {
        const auto &llm = doc["llm"];
        if (llm.contains("url")) {
            config.llm.base_url = llm["url"].get<std::string>();
            config.llm_configured = true;
        }
        if (llm.contains("path")) config.llm.path = llm["path"].get<std::string>();
        if (llm.contains("model")) config.llm.model = llm["model"].get<std::string>();
        if (llm.contains("api_key_env")) config.llm.api_key_env = llm["api_key_env"].get<std::string>();
        if (llm.contains("temperature")) config.llm.temperature = llm["temperature"].get<double>();
        if (llm.contains("timeout")) config.llm.timeout_seconds = llm["timeout"].get<int>();
    }
}

ordered_json manifest_for(const RunConfig &config, const std::string &command) {
    ordered_json m;
    m["command"] = command;
    m["catalog"] = config.catalog_path;
    m["params"] = config.params_path.empty() ? "(defaults)" : config.params_path;
    m["corpus"] = config.corpus_path;
    m["method"] = config.method;
    m["proposer"] = config.proposer;
    m["k"] = config.k;
    m["tolerance"] = config.tolerance;
    m["iteration_cap"] = config.iteration_cap;
    m["seed"] = config.seed;
    m["sim"] = config.sim;
    m["sim_seed"] = config.sim_seed;
    m["jobs"] = config.jobs;
    return m;
}

int cmd_generate(const RunConfig &config, int n, GeneratorLimits limits) {
    Catalog catalog = Catalog::load_file(config.catalog_path);
    CostParams params = config.params_path.empty() ? CostParams::defaults()
                                                   : CostParams::load_file(config.params_path);
    std::vector<PlanPtr> corpus = generate_corpus(config.seed, n, catalog, limits, params);

    ordered_json doc = ordered_json::array();
    for (const auto &plan : corpus) doc.push_back(ordered_json::parse(serialize_plan(plan)));
    write_file(config.out, doc.dump(2));
    std::cout << "wrote " << corpus.size() << " queries to " << config.out << "\n";
    return 0;
}

int cmd_optimize(RunConfig &config) {
    Catalog catalog = Catalog::load_file(config.catalog_path);
    CostParams params = config.params_path.empty() ? CostParams::defaults()
                                                   : CostParams::load_file(config.params_path);
    params.validate();
    std::vector<PlanPtr> corpus = load_corpus(config.corpus_path);
    SimilarityChecker similarity = make_similarity(config);
    SimProfile profile = config.sim == "matched"
                             ? SimProfile::matched_profile(params)
                             : SimProfile::unmatched_profile(params, config.sim_seed);

    const bool agg = config.method == "gcd-agg" || config.method == "gcd-lite-agg";
    const bool lite = config.method == "gcd-lite" || config.method == "gcd-lite-agg";
    const bool llm = config.proposer == "llm";
    if (llm && !config.llm_configured)
        throw ConfigError("proposer 'llm' needs --llm-url (or llm.url in the config file)");
    if (agg && config.k < 1) throw ConfigError("aggregated methods need k >= 1");

    fs::create_directories(config.out);
    fs::create_directories(fs::path(config.out) / "traces");

    GcdOptions options;
    options.tolerance = config.tolerance;
    options.iteration_cap = config.iteration_cap;
    options.lite = lite;

    std::unique_ptr<ChatClient> chat;
    if (llm) chat = std::make_unique<HttpChatClient>(config.llm);

    auto make_proposer = [&](std::uint64_t seed) -> std::unique_ptr<Proposer> {
        if (llm) return std::make_unique<LlmProposer>(*chat, config.llm.temperature);
        return std::make_unique<GreedyRuleProposer>(catalog, params, similarity, seed);
    };

    std::atomic<int> counter{0};
    OptimizeFn method;
    if (config.method == "exhaustive") {
        method = [&](const PlanPtr &p) {
            ExhaustiveRuleProposer oracle(catalog, params, similarity, config.budget);
            return oracle.closure_minimum(p);
        };
    } else if (config.method == "greedy" || config.method == "gcd" ||
               config.method == "gcd-lite") {
        method = [&, options](const PlanPtr &p) {
            int index = counter.fetch_add(1);
            auto proposer = make_proposer(config.seed);
            GcdResult r = run_gcd(p, *proposer, catalog, params, similarity, options);
            write_file((fs::path(config.out) / "traces" /
                        ("query_" + std::to_string(index) + ".jsonl"))
                           .string(),
                       r.trace.to_jsonl());
            write_file((fs::path(config.out) / "traces" /
                        ("query_" + std::to_string(index) + ".summary.json"))
                           .string(),
                       r.trace.summary_json(r.best));
            return r.best;
        };
    } else if (agg) {
        method = [&, options](const PlanPtr &p) {
            int index = counter.fetch_add(1);
            AggregatedResult r = run_aggregated(
                p,
                [&](int run) { return make_proposer(config.seed + static_cast<std::uint64_t>(run)); },
                config.k, catalog, params, similarity, options);
            for (std::size_t run = 0; run < r.traces.size(); ++run) {
                write_file((fs::path(config.out) / "traces" /
                            ("query_" + std::to_string(index) + "_run_" + std::to_string(run) +
                             ".jsonl"))
                               .string(),
                           r.traces[run].to_jsonl());
            }
            return r.best;
        };
    } else {
        throw ConfigError("unknown method: " + config.method);
    }

    std::string method_label = config.method + "+" + (llm ? "llm" : "rule");
    OptimizationReport report = evaluate_method(corpus, method, method_label, catalog, params,
                                                profile, similarity, config.jobs);

    report.save_file((fs::path(config.out) / "report.json").string());
    write_file((fs::path(config.out) / "report.csv").string(), report.to_csv_text());
    write_file((fs::path(config.out) / "manifest.json").string(),
               manifest_for(config, "optimize").dump(2));

    std::cout << "method " << method_label << ": PoI " << render_cost(report.poi) << ", ToI "
              << render_cost(report.toi) << ", VR " << render_cost(report.vr) << ", avg time "
              << render_cost(report.avg_time_optimized) << " (reports in " << config.out
              << ")\n";
    return 0; // invalid results are recorded in the report, not fatal
}

int cmd_compare(const std::vector<std::string> &report_paths, const std::string &out_csv) {
    std::vector<OptimizationReport> reports;
    for (const auto &path : report_paths) reports.push_back(OptimizationReport::load_file(path));
    if (reports.empty()) throw ConfigError("compare needs at least one report");

    // all reports must describe the same query set
    std::multiset<std::string> reference;
    for (const auto &q : reports.front().queries) reference.insert(q.initial_canonical);
    for (std::size_t i = 1; i < reports.size(); ++i) {
        std::multiset<std::string> other;
        for (const auto &q : reports[i].queries) other.insert(q.initial_canonical);
        if (other != reference) {
            throw ConfigError("query sets differ between " + report_paths[0] + " and " +
                              report_paths[i] + " (" + std::to_string(reference.size()) +
                              " vs " + std::to_string(other.size()) + " queries)");
        }
    }

    std::ostringstream csv;
    csv << "method,queries,poi,toi,vr,avg_time_initial,avg_time_optimized\n";
    std::printf("%-24s %8s %12s %8s %14s\n", "method", "PoI", "ToI", "VR", "avg time");
    for (const auto &r : reports) {
        std::printf("%-24s %8.3f %12.1f %8.2f %14.1f\n", r.method.c_str(), r.poi, r.toi, r.vr,
                    r.avg_time_optimized);
        csv << r.method << ',' << r.queries.size() << ',' << render_cost(r.poi) << ','
            << render_cost(r.toi) << ',' << render_cost(r.vr) << ','
            << render_cost(r.avg_time_initial) << ',' << render_cost(r.avg_time_optimized)
            << "\n";
    }
    if (!out_csv.empty()) write_file(out_csv, csv.str());
    return 0;
}

int cmd_classify(RunConfig &config) {
    Catalog catalog = Catalog::load_file(config.catalog_path);
    CostParams params = config.params_path.empty() ? CostParams::defaults()
                                                   : CostParams::load_file(config.params_path);
    std::vector<PlanPtr> corpus = load_corpus(config.corpus_path);
    SimilarityChecker similarity = make_similarity(config);
    SimProfile profile = config.sim == "matched"
                             ? SimProfile::matched_profile(params)
                             : SimProfile::unmatched_profile(params, config.sim_seed);

    // pairs: each initial plan against its rule-optimized counterpart
    std::vector<LabeledPair> pairs;
    for (const auto &q : corpus) {
        GreedyRuleProposer greedy(catalog, params, similarity, config.seed);
        GcdOptions options;
        options.tolerance = config.tolerance;
        options.iteration_cap = config.iteration_cap;
        PlanPtr optimized = run_gcd(q, greedy, catalog, params, similarity, options).best;
        LabeledPair pair;
        pair.plan_a = serialize_plan(q);
        pair.plan_b = serialize_plan(optimized);
        pair.true_time_a = simulate_time(q, catalog, profile);
        pair.true_time_b = simulate_time(optimized, catalog, profile);
        pairs.push_back(std::move(pair));
    }

    fs::create_directories(config.out);
    ordered_json result;
    result["pairs"] = pairs.size();
    result["sim"] = config.sim;

    if (config.llm_configured) {
        HttpChatClient client(config.llm);
        HarnessResult harness = accuracy_harness(pairs, catalog, params, client);
        result["llm_accuracy"] = harness.llm_accuracy;
        result["cost_model_accuracy"] = harness.cost_model_accuracy;
        result["train_pairs"] = harness.train_pairs;
        result["test_pairs"] = harness.test_pairs;
        write_file((fs::path(config.out) / "session.json").string(), harness.session_json);
        std::cout << "classifier accuracy " << harness.llm_accuracy << ", cost model "
                  << harness.cost_model_accuracy << "\n";
    } else {
        // no endpoint: score the cost model on the back half, as the harness would
        std::size_t split = pairs.size() / 2;
        int correct = 0;
        int total = 0;
        for (std::size_t i = split; i < pairs.size(); ++i) {
            const LabeledPair &pair = pairs[i];
            double cost_a = plan_cost(parse_plan(pair.plan_a), catalog, params);
            double cost_b = plan_cost(parse_plan(pair.plan_b), catalog, params);
            bool tie = pair.true_time_a == pair.true_time_b;
            ++total;
            if (cost_a == cost_b ? tie
                                 : (tie || (cost_a < cost_b) ==
                                               (pair.true_time_a < pair.true_time_b)))
                ++correct;
        }
        double accuracy = total ? static_cast<double>(correct) / total : 0.0;
        result["llm_accuracy"] = nullptr;
        result["cost_model_accuracy"] = accuracy;
        result["test_pairs"] = total;
        std::cout << "cost model accuracy " << accuracy << " over " << total
                  << " pairs (no LLM endpoint configured)\n";
    }
    write_file((fs::path(config.out) / "classify.json").string(), result.dump(2));
    write_file((fs::path(config.out) / "manifest.json").string(),
               manifest_for(config, "classify").dump(2));
    return 0;
}

} // namespace

int main(int argc, char **argv) {
    CLI::App app{"cost-guided optimizer for multi-modal query plans"};
    app.require_subcommand(1);

    RunConfig config;

    // config file values load first; explicit flags override them
    for (int i = 1; i + 1 < argc; ++i) {
        if (std::string(argv[i]) == "--config") {
            try {
                apply_config_file(config, argv[i + 1]);
            } catch (const Error &e) {
                std::cerr << "error: " << e.what() << "\n";
                return 2;
            }
        }
    }
    std::string config_path;

    // generate
    auto *generate = app.add_subcommand("generate", "draw a corpus of random initial plans");
    int gen_n = 10;
    GeneratorLimits limits;
    generate->add_option("--catalog", config.catalog_path, "catalog JSON")->required();
    generate->add_option("--out", config.out, "corpus file to write")->required();
    generate->add_option("-n,--count", gen_n, "number of queries");
    generate->add_option("--seed", config.seed, "generator seed");
    generate->add_option("--params", config.params_path, "cost params JSON");
    generate->add_option("--max-joins", limits.max_joins);
    generate->add_option("--max-selects", limits.max_selects);
    generate->add_option("--max-detections", limits.max_detections);
    generate->add_option("--max-countings", limits.max_countings);
    generate->add_option("--min-operators", limits.min_operators);
    generate->add_option("--max-cost", limits.max_est_cost, "estimated-cost filter");

    // optimize
    auto *optimize = app.add_subcommand("optimize", "optimize a corpus and write reports");
    optimize->add_option("--config", config_path, "JSON config file (flags override it)");
    optimize->add_option("--catalog", config.catalog_path, "catalog JSON");
    optimize->add_option("--params", config.params_path, "cost params JSON");
    optimize->add_option("--corpus", config.corpus_path, "corpus file");
    optimize->add_option("--synonyms", config.synonyms_path, "synonym lexicon JSON");
    optimize->add_option("--out", config.out, "output directory");
    optimize->add_option("--method", config.method,
                         "gcd | gcd-lite | gcd-agg | gcd-lite-agg | greedy | exhaustive")
        ->check(CLI::IsMember(
            {"gcd", "gcd-lite", "gcd-agg", "gcd-lite-agg", "greedy", "exhaustive"}));
    optimize->add_option("--proposer", config.proposer, "rule | llm")
        ->check(CLI::IsMember({"rule", "llm"}));
    optimize->add_option("--k", config.k, "aggregation sample count");
    optimize->add_option("--tolerance", config.tolerance, "consecutive wrong optimizations");
    optimize->add_option("--iteration-cap", config.iteration_cap);
    optimize->add_option("--budget", config.budget, "exhaustive-search operator budget");
    optimize->add_option("--seed", config.seed);
    optimize->add_option("--sim", config.sim, "matched | unmatched")
        ->check(CLI::IsMember({"matched", "unmatched"}));
    optimize->add_option("--sim-seed", config.sim_seed);
    optimize->add_option("--jobs", config.jobs, "parallel per-query workers");
    bool llm_url_given = false;
    optimize->add_option_function<std::string>(
        "--llm-url",
        [&config, &llm_url_given](const std::string &url) {
            config.llm.base_url = url;
            config.llm_configured = true;
            llm_url_given = true;
        },
        "chat endpoint base URL");
    optimize->add_option("--llm-path", config.llm.path);
    optimize->add_option("--llm-model", config.llm.model);
    optimize->add_option("--llm-key-env", config.llm.api_key_env,
                         "environment variable holding the API key");
    optimize->add_option("--llm-timeout", config.llm.timeout_seconds);
    optimize->add_option("--temperature", config.llm.temperature);
    optimize->add_option_function<std::string>(
        "--embedding-url",
        [&config](const std::string &url) {
            config.embedding.base_url = url;
            config.embedding_configured = true;
        },
        "remote embedding endpoint base URL (default: offline n-gram backend)");
    optimize->add_option("--embedding-model", config.embedding.model);
    optimize->add_option("--embedding-key-env", config.embedding.api_key_env,
                         "environment variable holding the embedding API key");

    // compare
    auto *compare = app.add_subcommand("compare", "align reports side by side");
    std::vector<std::string> report_paths;
    std::string compare_out;
    compare->add_option("reports", report_paths, "report.json files")->required();
    compare->add_option("--out", compare_out, "CSV to write");

    // classify
    auto *classify = app.add_subcommand("classify", "pairwise execution-time classifier harness");
    classify->add_option("--config", config_path, "JSON config file (flags override it)");
    classify->add_option("--catalog", config.catalog_path)->required();
    classify->add_option("--params", config.params_path);
    classify->add_option("--corpus", config.corpus_path)->required();
    classify->add_option("--out", config.out)->required();
    classify->add_option("--seed", config.seed);
    classify->add_option("--tolerance", config.tolerance);
    classify->add_option("--iteration-cap", config.iteration_cap);
    classify->add_option("--sim", config.sim)->check(CLI::IsMember({"matched", "unmatched"}));
    classify->add_option("--sim-seed", config.sim_seed);
    classify->add_option_function<std::string>(
        "--llm-url",
        [&config](const std::string &url) {
            config.llm.base_url = url;
            config.llm_configured = true;
        },
        "chat endpoint base URL");
    classify->add_option("--llm-model", config.llm.model);

    CLI11_PARSE(app, argc, argv);

    try {
        if (generate->parsed()) return cmd_generate(config, gen_n, limits);
        if (optimize->parsed()) {
            if (config.catalog_path.empty()) throw ConfigError("optimize needs --catalog");
            if (config.corpus_path.empty()) throw ConfigError("optimize needs --corpus");
            if (config.out.empty()) throw ConfigError("optimize needs --out");
            return cmd_optimize(config);
        }
        if (compare->parsed()) return cmd_compare(report_paths, compare_out);
        if (classify->parsed()) return cmd_classify(config);
    } catch (const Error &e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception &e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 0;
}
