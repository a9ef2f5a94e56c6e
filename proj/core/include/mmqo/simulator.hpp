#pragma once

#include <cstdint>

#include "mmqo/catalog.hpp"
#include "mmqo/plan.hpp"

namespace mmqo {

/// Ground-truth execution profile for the simulated executor. In matched
/// mode the true factors equal the estimator's, so simulated time and
/// estimated cost agree exactly. In unmatched mode each operator kind's cost
/// factor and each operator instance's selectivity are perturbed by seeded
/// draws, reproducible from (seed, operator identity).
struct SimProfile {
    bool matched = true;
    std::uint64_t seed = 0;
    CostParams base;

    static SimProfile matched_profile(CostParams params);
    static SimProfile unmatched_profile(CostParams params, std::uint64_t seed);

    double true_rho(const Operator &op) const;
    double true_alpha(const Operator &op) const;
};

/// Simulated wall-clock time of a plan: the cost recursion evaluated with
/// the profile's true factors. Equals plan_cost exactly in matched mode.
double simulate_time(const PlanNode &plan, const Catalog &catalog, const SimProfile &profile);
double simulate_time(const PlanPtr &plan, const Catalog &catalog, const SimProfile &profile);

} // namespace mmqo
