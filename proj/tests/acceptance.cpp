// Acceptance suite: one pass/fail line per criterion, nonzero exit on any
// failure. Each criterion carries its runtime budget and is checked against
// it.

#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <random>
#include <set>
#include <string>
#include <thread>
#include <vector>

#include "httplib.h"
#include "json.hpp"

#include "mmqo/classifier.hpp"
#include "mmqo/cost.hpp"
#include "mmqo/error_monitor.hpp"
#include "mmqo/evaluate.hpp"
#include "mmqo/gcd.hpp"
#include "mmqo/generator.hpp"
#include "mmqo/plan_text.hpp"
#include "mmqo/proposer.hpp"
#include "mmqo/rewrite.hpp"
#include "mmqo/simulator.hpp"

#include "support/fixtures.hpp"

using namespace mmqo;

namespace {

struct Checker {
    int failures = 0;
    std::vector<std::string> notes;

    void require(bool ok, const std::string &what) {
        if (!ok) {
            ++failures;
            notes.push_back(what);
        }
    }
    void note(const std::string &text) { notes.push_back(text); }
};

struct Criterion {
    int id;
    std::string label;
    double budget_seconds;
    std::function<void(Checker &)> run;
};

// --------------------------------------------------------------------------
// criterion 1: cost-model arithmetic against the independent evaluator
// --------------------------------------------------------------------------
void criterion_cost_arithmetic(Checker &c) {
    Catalog catalog = test::small_catalog();
    CostParams params = CostParams::defaults();
    test::OracleParams oracle = test::oracle_defaults();

    PlanPtr sel = select(scan("T"), {{ColumnRef{"T", "a"}, Comparator::Gt, int_literal(5)}});
    double sel_rows = output_rows(*sel, catalog, params);
    c.require(std::abs(sel_rows - 500.0) <= 1e-9, "select output rows != 500");
    c.require(std::abs(test::oracle_rows(*sel, oracle) - sel_rows) <= 1e-9,
              "oracle disagrees on select rows");

    PlanPtr j = join(scan("T"), scan("U"), ColumnRef{"T", "k"}, ColumnRef{"U", "k"});
    double join_rows = output_rows(*j, catalog, params);
    c.require(std::abs(join_rows - 2400.0) <= 1e-9, "join output rows != 2400");
    c.require(std::abs(test::oracle_rows(*j, oracle) - join_rows) <= 1e-9,
              "oracle disagrees on join rows");

    PlanPtr two_op = detect(sel, ColumnRef{"T", "img"}, {"dog"});
    double total = plan_cost(*two_op, catalog, params);
    c.require(std::abs(total - 51000.0) <= 1e-9, "two-operator plan cost != 51000");
    c.require(std::abs(test::oracle_cost(*two_op, oracle) - total) <= 1e-9,
              "oracle disagrees on plan cost");
}

// --------------------------------------------------------------------------
// criterion 2: the counting-over-detection fixture end to end
// --------------------------------------------------------------------------
void criterion_fixture_pair(Checker &c) {
    Catalog catalog = test::small_catalog();
    CostParams params = CostParams::defaults();
    SimilarityChecker similarity;

    PlanPtr initial = parse_plan(test::counting_pair_initial_text());
    c.require(plan_equal(initial, test::counting_pair_initial()), "fixture parse mismatch");

    std::vector<Rewrite> removals = enumerate_removals(*initial, similarity);
    bool emits_removal = false;
    for (const auto &r : removals)
        if (plan_equal(r.result, test::counting_pair_optimized())) emits_removal = true;
    c.require(emits_removal, "the removal rewrite is not emitted");

    c.require(check_equivalence(*initial, *test::counting_pair_optimized(), catalog, similarity)
                  .empty(),
              "equivalence rejects the pair");

    GreedyRuleProposer greedy(catalog, params, similarity);
    GcdResult result = run_gcd(initial, greedy, catalog, params, similarity, {});
    c.require(plan_equal(result.best, test::counting_pair_optimized()),
              "the loop does not land on the optimized structure");
}

// --------------------------------------------------------------------------
// criterion 3: control-flow fidelity with a scripted proposer
// --------------------------------------------------------------------------
class ScriptedProposer : public Proposer {
  public:
    explicit ScriptedProposer(std::vector<std::string> script) : script_(std::move(script)) {}
    Proposal propose(const ProposalContext &ctx) override {
        contexts.push_back(ctx);
        std::string text = script_.empty()
                               ? serialize_plan(ctx.latest_plan)
                               : script_[std::min(next_, script_.size() - 1)];
        ++next_;
        return {text, "", id()};
    }
    std::string id() const override { return "scripted"; }
    std::vector<ProposalContext> contexts;

  private:
    std::vector<std::string> script_;
    std::size_t next_ = 0;
};

void criterion_algorithm_fidelity(Checker &c) {
    Catalog catalog = test::small_catalog();
    CostParams params = CostParams::defaults();
    SimilarityChecker similarity;
    PlanPtr p0 = test::counting_pair_initial();
    std::string optimized_text = serialize_plan(test::counting_pair_optimized());
    double optimized_cost = plan_cost(test::counting_pair_optimized(), catalog, params);

    // improvement branch, then the no-improvement branch, exact strings
    {
        ScriptedProposer sp({optimized_text});
        GcdOptions opt;
        opt.tolerance = 3;
        GcdResult r = run_gcd(p0, sp, catalog, params, similarity, opt);
        c.require(r.trace.iterations.size() == 4, "expected 1 improvement + 3 echoes");
        c.require(r.trace.iterations[0].feedback ==
                      "Improved: " + render_cost(optimized_cost),
                  "improvement feedback string mismatch");
        for (std::size_t i = 1; i < r.trace.iterations.size(); ++i) {
            c.require(r.trace.iterations[i].feedback ==
                          "No improvement: " + render_cost(optimized_cost),
                      "no-improvement feedback string mismatch");
        }
    }

    // invalid branch: exact string, exact termination after t failures
    for (int tolerance : {1, 2, 3, 5}) {
        ScriptedProposer sp({"not a plan"});
        GcdOptions opt;
        opt.tolerance = tolerance;
        GcdResult r = run_gcd(p0, sp, catalog, params, similarity, opt);
        c.require(static_cast<int>(r.trace.iterations.size()) == tolerance,
                  "did not stop after exactly t consecutive failures");
        for (const auto &rec : r.trace.iterations) {
            c.require(rec.feedback == "No valid optimization generated",
                      "invalid feedback string mismatch");
        }
        c.require(plan_equal(r.best, p0), "best plan moved on invalid-only run");
    }

    // history purity: invalid proposals never enter it
    {
        ScriptedProposer sp({"junk", optimized_text, "junk", "junk", "junk"});
        GcdOptions opt;
        opt.tolerance = 3;
        GcdResult r = run_gcd(p0, sp, catalog, params, similarity, opt);
        for (const auto &ctx : sp.contexts) {
            for (const auto &plan : ctx.history_plans) {
                c.require(check_error(*plan, *p0, catalog, similarity).empty(),
                          "invalid plan found in history");
            }
        }
        c.require(plan_equal(r.best, test::counting_pair_optimized()),
                  "best lost across invalid streak");
    }
}

// --------------------------------------------------------------------------
// criterion 4: greedy against the breadth-first closure oracle
// --------------------------------------------------------------------------
void criterion_oracle_equivalence(Checker &c) {
    Catalog catalog = example_catalog();
    CostParams params = CostParams::defaults();
    SimilarityChecker similarity;
    GeneratorLimits limits;

    const int n = 50;
    std::vector<PlanPtr> queries = generate_corpus(4242, n, catalog, limits);

    GreedyRuleProposer greedy(catalog, params, similarity);
    ExhaustiveRuleProposer oracle(catalog, params, similarity, 12);

    int attained = 0;
    for (const auto &q : queries) {
        c.require(operator_census(*q).non_scan_total() <= 10, "query exceeds 10 operators");
        double initial_cost = plan_cost(q, catalog, params);
        GcdResult r = run_gcd(q, greedy, catalog, params, similarity, {});
        PlanPtr closure_best = oracle.closure_minimum(q);
        double oracle_cost = plan_cost(closure_best, catalog, params);
        c.require(r.best_cost >= oracle_cost - 1e-9, "greedy beat the closure minimum");
        c.require(r.best_cost <= initial_cost + 1e-9, "greedy exceeded the initial cost");
        if (std::abs(r.best_cost - oracle_cost) <= 1e-9) ++attained;
    }
    double fraction = static_cast<double>(attained) / n;
    c.note("greedy attains the closure minimum on " + std::to_string(attained) + "/" +
           std::to_string(n) + " queries (fraction " + render_cost(fraction) + ")");
    c.require(fraction >= 0.8, "greedy reaches the closure minimum on fewer than 80%");
}

// --------------------------------------------------------------------------
// criterion 5: end-to-end metrics in matched mode
// --------------------------------------------------------------------------
void criterion_end_to_end(Checker &c) {
    Catalog catalog = example_catalog();
    CostParams params = CostParams::defaults();
    SimilarityChecker similarity;
    SimProfile profile = SimProfile::matched_profile(params);
    GeneratorLimits limits;

    std::vector<PlanPtr> queries = generate_corpus(777, 50, catalog, limits);
    OptimizeFn method = [&](const PlanPtr &p) {
        GreedyRuleProposer greedy(catalog, params, similarity);
        return run_gcd(p, greedy, catalog, params, similarity, {}).best;
    };
    OptimizationReport report =
        evaluate_method(queries, method, "gcd+greedy", catalog, params, profile, similarity, 2);

    c.require(report.vr == 1.0, "VR != 1.0 in matched mode");
    for (const auto &q : report.queries) {
        c.require(q.time_optimized <= q.time_initial + 1e-9, "t_opt exceeds t_init");
        c.require(q.poi >= -1e-12, "negative per-query improvement");
    }
    c.require(report.poi > 0.0, "mean PoI is not positive");
    c.note("matched-mode mean PoI " + render_cost(report.poi) + ", mean ToI " +
           render_cost(report.toi));
}

// --------------------------------------------------------------------------
// criterion 6: aggregation properties over randomized candidate multisets
// --------------------------------------------------------------------------
void criterion_aggregation(Checker &c) {
    Catalog catalog = example_catalog();
    CostParams params = CostParams::defaults();
    GeneratorLimits limits;
    std::vector<PlanPtr> pool = generate_corpus(31337, 6, catalog, limits);
    std::vector<std::string> pool_texts;
    std::vector<std::string> pool_keys;
    std::vector<double> pool_costs;
    for (const auto &p : pool) {
        pool_texts.push_back(serialize_plan(p));
        pool_keys.push_back(canonical_key(p));
        pool_costs.push_back(plan_cost(p, catalog, params));
    }

    std::mt19937_64 rng(20240808);
    for (int trial = 0; trial < 1000; ++trial) {
        int k = 1 + static_cast<int>(rng() % 7);
        std::vector<AggregateCandidate> candidates;
        bool any_valid = false;
        for (int i = 0; i < k; ++i) {
            std::size_t pick = rng() % pool.size();
            bool valid = rng() % 4 != 0; // a quarter of candidates are invalid
            any_valid |= valid;
            candidates.push_back({valid ? pool_texts[pick] : "broken {",
                                  valid, pool_costs[pick]});
        }
        AggregateChoice choice = aggregate(candidates);
        if (!any_valid) {
            c.require(choice.plan == nullptr, "invalid-only multiset produced a plan");
            continue;
        }
        c.require(candidates[choice.index].valid, "an invalid candidate was selected");

        // independent recount: frequency by canonical key, then min cost
        std::map<std::string, int> freq;
        for (const auto &cand : candidates)
            if (cand.valid) ++freq[canonical_key(parse_plan(cand.plan_text))];
        int max_freq = 0;
        for (const auto &[key, f] : freq) max_freq = std::max(max_freq, f);
        std::string chosen_key = canonical_key(choice.plan);
        c.require(freq[chosen_key] == max_freq, "selected plan is not a modal canonical form");

        double min_cost_in_mode = std::numeric_limits<double>::infinity();
        for (const auto &cand : candidates) {
            if (!cand.valid) continue;
            if (freq[canonical_key(parse_plan(cand.plan_text))] == max_freq)
                min_cost_in_mode = std::min(min_cost_in_mode, cand.cost);
        }
        c.require(candidates[choice.index].cost <= min_cost_in_mode + 1e-9,
                  "frequency tie not resolved by minimum cost");
    }
}

// --------------------------------------------------------------------------
// criterion 7: seeded structural mutations, one per error kind
// --------------------------------------------------------------------------
Catalog mutation_catalog() {
    Catalog catalog = example_catalog();
    // a known table that generated plans never scan, for scope mutations
    catalog.add_table("spare", TableStats{100, {"sp_id", "sp_note"}, {"sp_id"}, {}});
    return catalog;
}

using Mutator = std::function<std::string(const PlanPtr &, std::mt19937_64 &)>;

std::vector<NodePath> paths_of_kind(const PlanNode &plan, OperatorKind kind) {
    std::vector<NodePath> out;
    for_each_node(plan, [&](const PlanNode &node, const NodePath &path) {
        if (kind_of(node.op) == kind) out.push_back(path);
    });
    return out;
}

void criterion_mutation_suite(Checker &c) {
    Catalog catalog = mutation_catalog();
    CostParams params = CostParams::defaults();
    SimilarityChecker similarity;
    GeneratorLimits limits;

    auto select_paths = [&](const PlanPtr &p) { return paths_of_kind(*p, OperatorKind::Select); };

    std::map<ErrorKind, Mutator> mutators;
    mutators[ErrorKind::Arity] = [&](const PlanPtr &p, std::mt19937_64 &rng) {
        auto joins = paths_of_kind(*p, OperatorKind::Join);
        const NodePath &site = joins[rng() % joins.size()];
        const PlanNode *join_node = node_at(*p, site);
        PlanPtr one_armed = make_node(join_node->op, join_node->left); // drop the right child
        return serialize_plan(replace_at(p, site, one_armed));
    };
    mutators[ErrorKind::UnknownTable] = [&](const PlanPtr &p, std::mt19937_64 &rng) {
        auto sites = select_paths(p);
        const NodePath &site = sites[rng() % sites.size()];
        const PlanNode *node = node_at(*p, site);
        SelectOp op = std::get<SelectOp>(node->op);
        op.predicates[0].target.table = "ghost_table";
        return serialize_plan(replace_at(p, site, make_node(op, node->left)));
    };
    mutators[ErrorKind::UnknownColumn] = [&](const PlanPtr &p, std::mt19937_64 &rng) {
        auto sites = select_paths(p);
        const NodePath &site = sites[rng() % sites.size()];
        const PlanNode *node = node_at(*p, site);
        SelectOp op = std::get<SelectOp>(node->op);
        op.predicates[0].target.column = "ghost_column";
        return serialize_plan(replace_at(p, site, make_node(op, node->left)));
    };
    mutators[ErrorKind::PredicateScope] = [&](const PlanPtr &p, std::mt19937_64 &rng) {
        auto sites = select_paths(p);
        const NodePath &site = sites[rng() % sites.size()];
        const PlanNode *node = node_at(*p, site);
        SelectOp op = std::get<SelectOp>(node->op);
        op.predicates[0].target = ColumnRef{"spare", "sp_note"}; // in catalog, never scanned
        return serialize_plan(replace_at(p, site, make_node(op, node->left)));
    };
    mutators[ErrorKind::NonImageColumn] = [&](const PlanPtr &p, std::mt19937_64 &rng) {
        auto dets = paths_of_kind(*p, OperatorKind::ObjectDetection);
        auto counts = paths_of_kind(*p, OperatorKind::ObjectCounting);
        bool use_det = !dets.empty() && (counts.empty() || rng() % 2 == 0);
        const NodePath &site = use_det ? dets[rng() % dets.size()] : counts[rng() % counts.size()];
        const PlanNode *node = node_at(*p, site);
        // artworks.title / photos.resolution are real non-image columns
        auto degrade = [&](ColumnRef target) {
            target.column = same_identifier(target.table, "artworks") ? "title" : "resolution";
            return target;
        };
        if (use_det) {
            ObjectDetectionOp op = std::get<ObjectDetectionOp>(node->op);
            op.target = degrade(op.target);
            return serialize_plan(replace_at(p, site, make_node(op, node->left)));
        }
        ObjectCountingOp op = std::get<ObjectCountingOp>(node->op);
        op.target = degrade(op.target);
        return serialize_plan(replace_at(p, site, make_node(op, node->left)));
    };
    mutators[ErrorKind::NegativeThreshold] = [&](const PlanPtr &p, std::mt19937_64 &rng) {
        auto counts = paths_of_kind(*p, OperatorKind::ObjectCounting);
        const NodePath &site = counts[rng() % counts.size()];
        const PlanNode *node = node_at(*p, site);
        ObjectCountingOp op = std::get<ObjectCountingOp>(node->op);
        op.threshold = -1 - static_cast<std::int64_t>(rng() % 5);
        return serialize_plan(replace_at(p, site, make_node(op, node->left)));
    };
    mutators[ErrorKind::LeafNotScan] = [&](const PlanPtr &p, std::mt19937_64 &rng) {
        auto leaves = paths_of_kind(*p, OperatorKind::TableScan);
        const NodePath &site = leaves[rng() % leaves.size()];
        const PlanNode *leaf = node_at(*p, site);
        const std::string table = std::get<TableScanOp>(leaf->op).table;
        PlanPtr childless = make_node(
            SelectOp{{{ColumnRef{table, "title"}, Comparator::Eq, int_literal(1)}}});
        return serialize_plan(replace_at(p, site, childless));
    };
    mutators[ErrorKind::Unparseable] = [&](const PlanPtr &p, std::mt19937_64 &rng) {
        std::string text = serialize_plan(p);
        switch (rng() % 3) {
            case 0: return text.substr(0, text.size() / 2);     // unbalanced braces
            case 1: return "][" + text;                          // junk prefix
            default: {
                std::string t = text;
                t[t.find("Operator")] = '#'; // breaks the required key
                return t;
            }
        }
    };

    const ErrorKind kinds[] = {ErrorKind::Arity,          ErrorKind::UnknownTable,
                               ErrorKind::UnknownColumn,  ErrorKind::PredicateScope,
                               ErrorKind::NonImageColumn, ErrorKind::NegativeThreshold,
                               ErrorKind::LeafNotScan,    ErrorKind::Unparseable};
    for (ErrorKind kind : kinds) {
        for (int i = 0; i < 20; ++i) {
            std::mt19937_64 rng(1000 + 77 * static_cast<int>(kind) + i);
            PlanPtr plan = generate_query(9000 + i, catalog, limits);
            std::string mutated = mutators[kind](plan, rng);
            std::vector<PlanError> errors = check_error_text(mutated, *plan, catalog, similarity);
            c.require(!errors.empty(), "mutation produced no errors");
            c.require(contains_kind(errors, kind),
                      std::string("mutation missed kind ") +
                          std::string(error_kind_name(kind)));
        }
    }

    // zero false positives on clean plans
    for (int i = 0; i < 100; ++i) {
        PlanPtr plan = generate_query(20000 + i, catalog, limits);
        c.require(check_error(*plan, *plan, catalog, similarity).empty(),
                  "false positive on a clean plan");
    }
}

// --------------------------------------------------------------------------
// criterion 8: similarity fixtures and properties
// --------------------------------------------------------------------------
void criterion_similarity(Checker &c) {
    SimilarityChecker checker;
    c.require(checker.compare("how many persons", "how many people").equivalent,
              "persons/people not equivalent");
    c.require(!checker.compare("men", "women").equivalent, "men/women equivalent");

    static const char *pool[] = {
        "man", "men", "woman", "women", "dog", "dogs", "cat", "cats", "tree", "car",
        "bird", "boat", "house", "person", "people", "child", "children",
        "how many dogs", "how many people", "are there trees", "red car", "blue boat",
    };
    std::mt19937_64 rng(88);
    for (int i = 0; i < 200; ++i) {
        std::string a = pool[rng() % std::size(pool)];
        std::string b = pool[rng() % std::size(pool)];
        SimilarityReport ab = checker.compare(a, b);
        SimilarityReport ba = checker.compare(b, a);
        c.require(ab.combined == ba.combined, "similarity is not symmetric");
        c.require(ab.equivalent == ba.equivalent, "equivalence is not symmetric");
        c.require(ab.combined >= 0.0 && ab.combined <= 1.0, "combined score out of range");
        SimilarityReport aa = checker.compare(a, a);
        c.require(aa.combined == 1.0 && aa.equivalent, "identity does not score 1");
    }
}

// --------------------------------------------------------------------------
// criterion 9: lite mode never leaks cost text into prompts
// --------------------------------------------------------------------------
class CapturingGreedy : public Proposer {
  public:
    CapturingGreedy(const Catalog &catalog, const CostParams &params,
                    const SimilarityChecker &similarity)
        : inner_(catalog, params, similarity) {}
    Proposal propose(const ProposalContext &ctx) override {
        prompts.push_back(compose_optimization_request(ctx, "instruction"));
        return inner_.propose(ctx);
    }
    std::string id() const override { return inner_.id(); }
    std::vector<std::string> prompts;

  private:
    GreedyRuleProposer inner_;
};

void criterion_lite_guarantee(Checker &c) {
    Catalog catalog = test::small_catalog();
    CostParams params = CostParams::defaults();
    SimilarityChecker similarity;
    PlanPtr p0 = test::counting_pair_initial();

    std::vector<std::string> cost_texts = {
        render_cost(plan_cost(p0, catalog, params)),
        render_cost(plan_cost(test::counting_pair_optimized(), catalog, params)),
    };

    GcdOptions lite;
    lite.lite = true;
    CapturingGreedy lite_proposer(catalog, params, similarity);
    run_gcd(p0, lite_proposer, catalog, params, similarity, lite);

    GcdOptions full;
    CapturingGreedy full_proposer(catalog, params, similarity);
    run_gcd(p0, full_proposer, catalog, params, similarity, full);

    for (const auto &prompt : lite_proposer.prompts) {
        c.require(prompt.find("Improved") == std::string::npos, "lite prompt says Improved");
        c.require(prompt.find("No improvement") == std::string::npos,
                  "lite prompt says No improvement");
        for (const auto &cost : cost_texts) {
            c.require(prompt.find(cost) == std::string::npos, "lite prompt leaks a cost");
        }
    }

    bool full_has_improved = false, full_has_cost = false;
    for (const auto &prompt : full_proposer.prompts) {
        if (prompt.find("Improved") != std::string::npos) full_has_improved = true;
        for (const auto &cost : cost_texts) {
            if (prompt.find(cost) != std::string::npos) full_has_cost = true;
        }
    }
    c.require(full_has_improved, "full-mode prompts never say Improved");
    c.require(full_has_cost, "full-mode prompts never show a cost");
}

// --------------------------------------------------------------------------
// criterion 10: mock-endpoint plumbing and classifier harness
// --------------------------------------------------------------------------
std::string chat_body(const std::string &content) {
    nlohmann::json j;
    j["choices"] =
        nlohmann::json::array({{{"message", {{"role", "assistant"}, {"content", content}}}}});
    return j.dump();
}

void criterion_llm_plumbing(Checker &c) {
    Catalog catalog = test::small_catalog();
    CostParams params = CostParams::defaults();
    SimilarityChecker similarity;
    PlanPtr p0 = test::counting_pair_initial();
    std::string optimized = serialize_plan(test::counting_pair_optimized());

    // scripted completions over a real HTTP endpoint drive the loop
    {
        httplib::Server server;
        std::atomic<int> calls{0};
        server.Post("/v1/chat/completions",
                    [&](const httplib::Request &, httplib::Response &res) {
                        int n = ++calls;
                        std::string reply = (n % 2 == 1)
                                                ? "instruction: drop the covered detection"
                                                : "Optimized plan below.\n" + optimized;
                        res.set_content(chat_body(reply), "application/json");
                    });
        int port = server.bind_to_any_port("127.0.0.1");
        std::thread listener([&] { server.listen_after_bind(); });
        server.wait_until_ready();

        LlmEndpointConfig config;
        config.base_url = "http://127.0.0.1:" + std::to_string(port);
        HttpChatClient client(config);
        LlmProposer proposer(client, 0.7);
        GcdResult r = run_gcd(p0, proposer, catalog, params, similarity, {});
        c.require(plan_equal(r.best, test::counting_pair_optimized()),
                  "mock-endpoint run missed the optimized plan");

        server.stop();
        listener.join();
    }

    // transport failures count toward the tolerance and never abort
    {
        LlmEndpointConfig config;
        config.base_url = "http://127.0.0.1:1";
        config.timeout_seconds = 1;
        HttpChatClient client(config);
        LlmProposer proposer(client, 0.7);
        GcdOptions opt;
        opt.tolerance = 2;
        GcdResult r = run_gcd(p0, proposer, catalog, params, similarity, opt);
        c.require(r.trace.iterations.size() == 2, "transport failures did not consume tolerance");
        c.require(plan_equal(r.best, p0), "transport failures corrupted the best plan");
    }

    // JSON extraction over twenty wrapped replies
    {
        std::vector<std::string> wrappings;
        for (int i = 0; i < 20; ++i) {
            std::string text;
            switch (i % 5) {
                case 0: text = "```json\n" + optimized + "\n```"; break;
                case 1: text = "Answer " + std::to_string(i) + ": " + optimized; break;
                case 2: text = "{ not the plan\n" + optimized; break;
                case 3: text = optimized + "\n-- explanation trails " + std::to_string(i); break;
                default: text = "note {\"aside\":\"" + std::to_string(i) + "\"} then " + optimized;
            }
            wrappings.push_back(text);
        }
        int extracted = 0;
        for (const auto &text : wrappings) {
            auto j = extract_first_json_object(text);
            if (!j) continue;
            try {
                PlanPtr plan = parse_plan(*j);
                // case 4 embeds an aside object first; accept either JSON
                // object, but a real plan must parse when it is the plan
                (void)plan;
                ++extracted;
            } catch (const ParseError &) {
                // the extracted object was the aside, confirm the plan follows
                auto rest = extract_first_json_object(
                    text.substr(text.find(*j) + j->size()));
                if (rest && plan_equal(parse_plan(*rest), test::counting_pair_optimized()))
                    ++extracted;
            }
        }
        c.require(extracted == 20, "wrapped-reply extraction failed");
    }

    // classifier harness end to end with scripted completions; cost model
    // accuracy on matched pairs is exactly 1.0
    {
        Catalog eval_catalog = example_catalog();
        SimProfile profile = SimProfile::matched_profile(params);
        GeneratorLimits limits;
        std::vector<PlanPtr> queries = generate_corpus(6000, 20, eval_catalog, limits);
        std::vector<LabeledPair> pairs;
        for (std::size_t i = 0; i + 1 < queries.size(); i += 2) {
            LabeledPair pair;
            pair.plan_a = serialize_plan(queries[i]);
            pair.plan_b = serialize_plan(queries[i + 1]);
            pair.true_time_a = simulate_time(queries[i], eval_catalog, profile);
            pair.true_time_b = simulate_time(queries[i + 1], eval_catalog, profile);
            pairs.push_back(std::move(pair));
        }
        ScriptedChatClient client;
        for (std::size_t i = 0; i < pairs.size(); ++i) {
            client.push_reply(pairs[i].true_time_a <= pairs[i].true_time_b ? "FASTER: first"
                                                                           : "FASTER: second");
        }
        HarnessResult result = accuracy_harness(pairs, eval_catalog, params, client);
        c.require(result.cost_model_accuracy == 1.0,
                  "cost model accuracy on matched pairs is not 1.0");
        c.require(result.llm_accuracy == 1.0, "scripted classifier missed a pair");
    }
}

} // namespace

int main() {
    std::vector<Criterion> criteria = {
        {1, "cost-model arithmetic matches the independent evaluator", 1.0,
         criterion_cost_arithmetic},
        {2, "counting-over-detection fixture optimizes end to end", 1.0, criterion_fixture_pair},
        {3, "descent-loop control flow and feedback strings", 1.0, criterion_algorithm_fidelity},
        {4, "greedy vs breadth-first closure oracle on 50 queries", 120.0,
         criterion_oracle_equivalence},
        {5, "matched-mode end-to-end metrics over 50 queries", 120.0, criterion_end_to_end},
        {6, "aggregation properties over 1000 candidate multisets", 10.0, criterion_aggregation},
        {7, "mutation suite: every structural error kind is caught", 30.0,
         criterion_mutation_suite},
        {8, "phrase similarity fixtures and properties", 10.0, criterion_similarity},
        {9, "lite mode leaks no cost feedback into prompts", 1.0, criterion_lite_guarantee},
        {10, "mock-endpoint plumbing and classifier harness", 10.0, criterion_llm_plumbing},
    };

    int failed = 0;
    for (const auto &criterion : criteria) {
        Checker checker;
        auto start = std::chrono::steady_clock::now();
        try {
            criterion.run(checker);
        } catch (const std::exception &e) {
            checker.require(false, std::string("exception: ") + e.what());
        }
        double elapsed =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        checker.require(elapsed < criterion.budget_seconds,
                        "runtime " + std::to_string(elapsed) + "s exceeds budget");

        bool ok = checker.failures == 0;
        failed += ok ? 0 : 1;
        std::printf("[%s] criterion %2d: %s (%.2fs)\n", ok ? "PASS" : "FAIL", criterion.id,
                    criterion.label.c_str(), elapsed);
        for (const auto &note : checker.notes) {
            std::printf("        %s\n", note.c_str());
        }
    }
    std::printf("%d/%zu criteria passed\n", static_cast<int>(criteria.size()) - failed,
                criteria.size());
    return failed == 0 ? 0 : 1;
}
