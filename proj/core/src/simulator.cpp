#include "mmqo/simulator.hpp"

#include <cmath>

#include "mmqo/cost.hpp"
#include "mmqo/plan_text.hpp"

namespace mmqo {

namespace {

std::uint64_t fnv1a(std::string_view text, std::uint64_t seed) {
    std::uint64_t h = 1469598103934665603ULL ^ seed;
    for (unsigned char c : text) {
        h ^= c;
        h *= 1099511628211ULL;
    }
    return h;
}

std::uint64_t splitmix(std::uint64_t z) {
    z += 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

double unit_draw(std::uint64_t h) { // in [0, 1)
    return static_cast<double>(splitmix(h) >> 11) * 0x1.0p-53;
}

/// Identity of an operator instance, stable under movement: the canonical
/// rendering of its payload.
std::string op_identity(const Operator &op) {
    PlanPtr lone = canonicalize(*make_node(op));
    return render_operator(lone->op);
}

} // namespace

SimProfile SimProfile::matched_profile(CostParams params) {
    SimProfile profile;
    profile.matched = true;
    profile.base = std::move(params);
    return profile;
}

SimProfile SimProfile::unmatched_profile(CostParams params, std::uint64_t seed) {
    SimProfile profile;
    profile.matched = false;
    profile.seed = seed;
    profile.base = std::move(params);
    return profile;
}

double SimProfile::true_rho(const Operator &op) const {
    double rho = base.rho_for(kind_of(op));
    if (matched) return rho;
    // per-kind multiplier in [0.5, 2]
    std::uint64_t h = fnv1a(kind_name(kind_of(op)), seed ^ 0x72686fULL);
    return rho * std::exp2(2.0 * unit_draw(h) - 1.0);
}

double SimProfile::true_alpha(const Operator &op) const {
    if (matched) return base.alpha_for(kind_of(op));
    if (kind_of(op) == OperatorKind::TableScan) return 1.0;
    // per-instance selectivity in (0.05, 1]
    std::uint64_t h = fnv1a(op_identity(op), seed ^ 0x616c706861ULL);
    return 1.0 - 0.95 * unit_draw(h);
}

double simulate_time(const PlanNode &plan, const Catalog &catalog, const SimProfile &profile) {
    if (profile.matched) {
        // same functor shape as plan_cost, so the arithmetic is identical
        return plan_cost(plan, catalog, profile.base);
    }
    return evaluate_plan(
               plan, catalog,
               [&](const Operator &op) { return profile.true_rho(op); },
               [&](const Operator &op) { return profile.true_alpha(op); })
        .cost;
}

double simulate_time(const PlanPtr &plan, const Catalog &catalog, const SimProfile &profile) {
    return simulate_time(*plan, catalog, profile);
}

} // namespace mmqo
