#pragma once

#include <functional>
#include <string>
#include <vector>

#include "mmqo/catalog.hpp"
#include "mmqo/plan.hpp"
#include "mmqo/similarity.hpp"
#include "mmqo/simulator.hpp"

namespace mmqo {

/// Optimizes one plan; may throw, which counts as an invalid result.
using OptimizeFn = std::function<PlanPtr(const PlanPtr &)>;

struct QueryOutcome {
    int index = 0;
    std::string initial_text;
    std::string initial_canonical; // identity for cross-report comparison
    std::string optimized_text;
    bool valid = false;
    std::string first_error; // empty when valid
    double est_cost_initial = 0;
    double est_cost_optimized = 0;
    double time_initial = 0;
    double time_optimized = 0; // = time_initial when the result is invalid
    double poi = 0;            // (t_init - t_opt) / t_init, 0 when t_init == 0
};

struct OptimizationReport {
    std::string method;
    std::vector<QueryOutcome> queries;

    double avg_time_initial = 0;
    double avg_time_optimized = 0;
    double poi = 0; // mean per-query relative improvement
    double toi = 0; // mean absolute improvement
    double vr = 0;  // valid / total

    /// Recomputes the summary fields from the per-query records.
    void recompute_summary();

    std::string to_json_text() const;
    static OptimizationReport from_json_text(const std::string &text);
    static OptimizationReport load_file(const std::string &path);
    void save_file(const std::string &path) const;

    /// Per-query rows plus a trailing summary row.
    std::string to_csv_text() const;
};

/// Runs `optimize` over every query, validates each result against its
/// initial plan, assigns invalid results the initial plan's simulated time,
/// and fills in the summary metrics.
OptimizationReport evaluate_method(const std::vector<PlanPtr> &queries,
                                   const OptimizeFn &optimize, const std::string &method_name,
                                   const Catalog &catalog, const CostParams &params,
                                   const SimProfile &profile,
                                   const SimilarityChecker &similarity, int jobs = 1);

} // namespace mmqo
