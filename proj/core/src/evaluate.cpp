#include "mmqo/evaluate.hpp"

#include <atomic>
#include <fstream>
#include <sstream>
#include <thread>

#include "json.hpp"

#include "mmqo/cost.hpp"
#include "mmqo/error_monitor.hpp"
#include "mmqo/errors.hpp"
#include "mmqo/plan_text.hpp"

namespace mmqo {

namespace {

using ordered_json = nlohmann::ordered_json;

QueryOutcome evaluate_one(int index, const PlanPtr &query, const OptimizeFn &optimize,
                          const Catalog &catalog, const CostParams &params,
                          const SimProfile &profile, const SimilarityChecker &similarity) {
    QueryOutcome outcome;
    outcome.index = index;
    outcome.initial_text = serialize_plan(query);
    outcome.initial_canonical = canonical_key(query);
    outcome.est_cost_initial = plan_cost(query, catalog, params);
    outcome.time_initial = simulate_time(query, catalog, profile);

    PlanPtr optimized;
    std::vector<PlanError> errors;
    try {
        optimized = optimize(query);
        if (!optimized) {
            errors.push_back({ErrorKind::Unparseable, {}, "optimizer returned no plan"});
        } else {
            errors = check_error(*optimized, *query, catalog, similarity);
        }
    } catch (const std::exception &e) {
        errors.push_back({ErrorKind::Unparseable, {}, std::string("optimizer failed: ") + e.what()});
    }

    outcome.valid = errors.empty();
    if (outcome.valid) {
        outcome.optimized_text = serialize_plan(optimized);
        outcome.est_cost_optimized = plan_cost(optimized, catalog, params);
        outcome.time_optimized = simulate_time(optimized, catalog, profile);
    } else {
        outcome.first_error = describe(errors.front());
        outcome.optimized_text = optimized ? serialize_plan(optimized) : "";
        outcome.est_cost_optimized = outcome.est_cost_initial;
        outcome.time_optimized = outcome.time_initial; // invalid: run the initial plan
    }
    outcome.poi = outcome.time_initial > 0
                      ? (outcome.time_initial - outcome.time_optimized) / outcome.time_initial
                      : 0.0;
    return outcome;
}

} // namespace

void OptimizationReport::recompute_summary() {
    double sum_ti = 0, sum_to = 0, sum_poi = 0, sum_toi = 0;
    int valid = 0;
    for (const auto &q : queries) {
        sum_ti += q.time_initial;
        sum_to += q.time_optimized;
        sum_poi += q.poi;
        sum_toi += q.time_initial - q.time_optimized;
        if (q.valid) ++valid;
    }
    const double n = queries.empty() ? 1.0 : static_cast<double>(queries.size());
    avg_time_initial = sum_ti / n;
    avg_time_optimized = sum_to / n;
    poi = sum_poi / n;
    toi = sum_toi / n;
    vr = queries.empty() ? 0.0 : static_cast<double>(valid) / n;
}

std::string OptimizationReport::to_json_text() const {
    ordered_json j;
    j["method"] = method;
    j["summary"] = {{"avg_time_initial", avg_time_initial},
                    {"avg_time_optimized", avg_time_optimized},
                    {"poi", poi},
                    {"toi", toi},
                    {"vr", vr},
                    {"queries", queries.size()}};
    ordered_json rows = ordered_json::array();
    for (const auto &q : queries) {
        ordered_json row;
        row["index"] = q.index;
        row["initial"] = q.initial_text;
        row["initial_canonical"] = q.initial_canonical;
        row["optimized"] = q.optimized_text;
        row["valid"] = q.valid;
        row["first_error"] = q.first_error;
        row["est_cost_initial"] = q.est_cost_initial;
        row["est_cost_optimized"] = q.est_cost_optimized;
        row["time_initial"] = q.time_initial;
        row["time_optimized"] = q.time_optimized;
        row["poi"] = q.poi;
        rows.push_back(std::move(row));
    }
    j["queries"] = std::move(rows);
    return j.dump(2);
}

OptimizationReport OptimizationReport::from_json_text(const std::string &text) {
    ordered_json j;
    try {
        j = ordered_json::parse(text);
    } catch (const nlohmann::json::parse_error &e) {
        throw ConfigError(std::string("report: ") + e.what());
    }
    OptimizationReport report;
    report.method = j.value("method", std::string{});
    for (const auto &row : j.value("queries", ordered_json::array())) {
        QueryOutcome q;
        q.index = row.value("index", 0);
        q.initial_text = row.value("initial", std::string{});
        q.initial_canonical = row.value("initial_canonical", std::string{});
        q.optimized_text = row.value("optimized", std::string{});
        q.valid = row.value("valid", false);
        q.first_error = row.value("first_error", std::string{});
        q.est_cost_initial = row.value("est_cost_initial", 0.0);
        q.est_cost_optimized = row.value("est_cost_optimized", 0.0);
        q.time_initial = row.value("time_initial", 0.0);
        q.time_optimized = row.value("time_optimized", 0.0);
        q.poi = row.value("poi", 0.0);
        report.queries.push_back(std::move(q));
    }
    report.recompute_summary();
    return report;
}

OptimizationReport OptimizationReport::load_file(const std::string &path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError("cannot open report: " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return from_json_text(buf.str());
}

void OptimizationReport::save_file(const std::string &path) const {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ConfigError("cannot write report: " + path);
    out << to_json_text();
}

std::string OptimizationReport::to_csv_text() const {
    std::ostringstream out;
    out << "index,valid,est_cost_initial,est_cost_optimized,time_initial,time_optimized,poi\n";
    for (const auto &q : queries) {
        out << q.index << ',' << (q.valid ? 1 : 0) << ',' << render_cost(q.est_cost_initial)
            << ',' << render_cost(q.est_cost_optimized) << ',' << render_cost(q.time_initial)
            << ',' << render_cost(q.time_optimized) << ',' << render_cost(q.poi) << "\n";
    }
    out << "summary," << method << ",poi=" << render_cost(poi) << ",toi=" << render_cost(toi)
        << ",vr=" << render_cost(vr) << ",avg_time=" << render_cost(avg_time_optimized) << "\n";
    return out.str();
}

OptimizationReport evaluate_method(const std::vector<PlanPtr> &queries,
                                   const OptimizeFn &optimize, const std::string &method_name,
                                   const Catalog &catalog, const CostParams &params,
                                   const SimProfile &profile,
                                   const SimilarityChecker &similarity, int jobs) {
    OptimizationReport report;
    report.method = method_name;
    report.queries.resize(queries.size());

    jobs = std::max(1, jobs);
    if (jobs == 1 || queries.size() <= 1) {
        for (std::size_t i = 0; i < queries.size(); ++i) {
            report.queries[i] = evaluate_one(static_cast<int>(i), queries[i], optimize, catalog,
                                             params, profile, similarity);
        }
    } else {
        std::atomic<std::size_t> next{0};
        auto worker = [&] {
            for (;;) {
                std::size_t i = next.fetch_add(1);
                if (i >= queries.size()) return;
                report.queries[i] = evaluate_one(static_cast<int>(i), queries[i], optimize,
                                                 catalog, params, profile, similarity);
            }
        };
        std::vector<std::thread> pool;
        for (int t = 0; t < jobs; ++t) pool.emplace_back(worker);
        for (auto &th : pool) th.join();
    }

    report.recompute_summary();
    return report;
}

} // namespace mmqo
