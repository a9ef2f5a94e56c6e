#pragma once

#include <cstdint>
#include <vector>

#include "mmqo/catalog.hpp"
#include "mmqo/plan.hpp"

namespace mmqo {

/// Bounds on generated queries. Counts refer to non-scan operators; the
/// shallow filter keeps shallow plans out and the cost filter rejects plans
/// whose estimated cost explodes.
struct GeneratorLimits {
    int max_joins = 3;
    int max_selects = 3;
    int max_detections = 2;
    int max_countings = 2;
    bool min_one_of_each = true;
    int min_operators = 5;         // non-scan operators
    double max_est_cost = 1e9;     // estimated-cost filter
    int max_attempts = 500;        // resample bound before giving up
};

/// Draws one structurally valid conjunctive multi-modal plan: a join tree
/// over distinct, pairwise-joinable tables with selects and visual filters
/// sprinkled over it, censuses within the limits, deterministic in `seed`.
/// Requires a catalog with at least two joinable tables and one image
/// column. Throws GenerationExhaustedError when the filters keep rejecting.
PlanPtr generate_query(std::uint64_t seed, const Catalog &catalog, const GeneratorLimits &limits,
                       const CostParams &params = CostParams::defaults());

/// A batch of `n` queries with distinct canonical forms, consuming seeds
/// seed, seed+1, ... as needed.
std::vector<PlanPtr> generate_corpus(std::uint64_t seed, int n, const Catalog &catalog,
                                     const GeneratorLimits &limits,
                                     const CostParams &params = CostParams::defaults());

/// Synthetic catalog used by the tests, the examples and `generate`'s
/// default demo: four joinable tables, two of them with image columns.
Catalog example_catalog();

} // namespace mmqo
