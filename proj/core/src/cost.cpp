#include "mmqo/cost.hpp"

#include <cassert>
#include <charconv>
#include <cmath>

#include "mmqo/errors.hpp"

namespace mmqo {

std::string render_cost(double cost) {
    char buf[64];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), cost);
    assert(ec == std::errc());
    return std::string(buf, ptr);
}

RowsAndCost evaluate_plan(const PlanNode &node, const Catalog &catalog, const RhoFn &rho,
                          const AlphaFn &alpha) {
    if (auto *leaf = std::get_if<TableScanOp>(&node.op)) {
        const TableStats *stats = catalog.find(leaf->table);
        if (!stats) throw UnknownTableError(leaf->table);
        return {static_cast<double>(stats->row_count), 0.0};
    }
    double child_rows = 0;
    double child_cost = 0;
    if (node.left) {
        RowsAndCost l = evaluate_plan(*node.left, catalog, rho, alpha);
        child_rows += l.rows;
        child_cost += l.cost;
    }
    if (node.right) {
        RowsAndCost r = evaluate_plan(*node.right, catalog, rho, alpha);
        child_rows += r.rows;
        child_cost += r.cost;
    }
    double own_cost = rho(node.op) * child_rows;
    double out_rows = alpha(node.op) * child_rows;
    return {out_rows, child_cost + own_cost};
}

namespace {

RhoFn params_rho(const CostParams &params) {
    return [&params](const Operator &op) { return params.rho_for(kind_of(op)); };
}

AlphaFn params_alpha(const CostParams &params) {
    return [&params](const Operator &op) { return params.alpha_for(kind_of(op)); };
}

} // namespace

double output_rows(const PlanNode &node, const Catalog &catalog, const CostParams &params) {
    return evaluate_plan(node, catalog, params_rho(params), params_alpha(params)).rows;
}

double node_cost(const PlanNode &node, const Catalog &catalog, const CostParams &params) {
    if (std::holds_alternative<TableScanOp>(node.op)) {
        // Still surfaces UnknownTableError for a scan of a missing table.
        output_rows(node, catalog, params);
        return 0.0;
    }
    double child_rows = 0;
    if (node.left) child_rows += output_rows(*node.left, catalog, params);
    if (node.right) child_rows += output_rows(*node.right, catalog, params);
    return params.rho_for(kind_of(node.op)) * child_rows;
}

double plan_cost(const PlanNode &plan, const Catalog &catalog, const CostParams &params) {
    return evaluate_plan(plan, catalog, params_rho(params), params_alpha(params)).cost;
}

double plan_cost(const PlanPtr &plan, const Catalog &catalog, const CostParams &params) {
    return plan_cost(*plan, catalog, params);
}

PlanOrder compare_plans(const PlanNode &a, const PlanNode &b, const Catalog &catalog,
                        const CostParams &params, double tolerance) {
    double cost_a = plan_cost(a, catalog, params);
    double cost_b = plan_cost(b, catalog, params);
    if (std::abs(cost_a - cost_b) <= tolerance) return PlanOrder::Equal;
    return cost_a < cost_b ? PlanOrder::ACheaper : PlanOrder::BCheaper;
}

} // namespace mmqo
