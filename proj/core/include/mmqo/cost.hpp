#pragma once

#include <functional>

#include "mmqo/catalog.hpp"
#include "mmqo/plan.hpp"

namespace mmqo {

/// Cardinality estimate: a scan yields its table's row count, every other
/// operator yields alpha[kind] times the sum of its children's outputs
/// (a join sums its two inputs). Throws UnknownTableError.
double output_rows(const PlanNode &node, const Catalog &catalog, const CostParams &params);

/// Per-operator cost: rho[kind] times the sum of the children's output rows.
/// A scan has no children, so its cost is zero.
double node_cost(const PlanNode &node, const Catalog &catalog, const CostParams &params);

/// Total estimated plan cost: the sum of node_cost over every node.
double plan_cost(const PlanNode &plan, const Catalog &catalog, const CostParams &params);
double plan_cost(const PlanPtr &plan, const Catalog &catalog, const CostParams &params);

enum class PlanOrder { ACheaper, BCheaper, Equal };

/// Shortest round-trip decimal rendering, shared by feedback strings,
/// prompts and reports so a cost always prints the same way.
std::string render_cost(double cost);

inline constexpr double kCostEqualityTolerance = 1e-9;

/// Compares total plan costs with an absolute tolerance for equality.
PlanOrder compare_plans(const PlanNode &a, const PlanNode &b, const Catalog &catalog,
                        const CostParams &params, double tolerance = kCostEqualityTolerance);

/// Cost recursion parameterized over the per-operator factors, shared by the
/// estimator and the execution-time simulator so that matched configurations
/// agree bit for bit. Returns {output_rows, subtree_cost}.
struct RowsAndCost {
    double rows = 0;
    double cost = 0;
};

using RhoFn = std::function<double(const Operator &)>;
using AlphaFn = std::function<double(const Operator &)>;

RowsAndCost evaluate_plan(const PlanNode &node, const Catalog &catalog, const RhoFn &rho,
                          const AlphaFn &alpha);

} // namespace mmqo
