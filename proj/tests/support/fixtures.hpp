#pragma once

#include <map>
#include <string>

#include "mmqo/catalog.hpp"
#include "mmqo/plan.hpp"
#include "mmqo/plan_text.hpp"

namespace mmqo::test {

/// Two plain relational tables plus the visual fixture table.
inline Catalog small_catalog() {
    Catalog catalog;
    catalog.add_table("T", TableStats{1000, {"a", "b", "k", "img"}, {"k"}, {"img"}});
    catalog.add_table("U", TableStats{2000, {"c", "k"}, {}, {}});
    catalog.add_table("Table_3", TableStats{10000, {"col_1", "col_3"}, {"col_1"}, {"col_3"}});
    return catalog;
}

/// The counting-over-detection pair: detection of the same object under a
/// counting is redundant, removing it is the expected optimization.
inline PlanPtr counting_pair_initial() {
    PlanPtr leaf = scan("Table_3");
    PlanPtr det = detect(leaf, ColumnRef{"table_3", "col_3"}, {"man"});
    return count(det, ColumnRef{"table_3", "col_3"}, "men", 2);
}

inline PlanPtr counting_pair_optimized() {
    return count(scan("Table_3"), ColumnRef{"table_3", "col_3"}, "men", 2);
}

inline std::string counting_pair_initial_text() {
    return R"js({"Operator":"Object counting(table_3.col_3: how many men are there?: 2)",)js"
           R"js("Left_child":{"Operator":"Object detection(table_3.col_3: is there any man?)",)js"
           R"js("Left_child":{"Operator":"TableScan(Table_3)","Left_child":null,"Right_child":null},)js"
           R"js("Right_child":null},"Right_child":null})js";
}

/// Independent evaluator for the cost-model checks: same definitions,
/// separate code path, plain maps instead of the library types.
struct OracleParams {
    std::map<std::string, double> table_rows; // folded table name -> rows
    std::map<std::string, double> rho;        // kind name -> cost factor
    std::map<std::string, double> alpha;      // kind name -> selectivity
};

inline double oracle_rows(const PlanNode &node, const OracleParams &p) {
    if (auto *leaf = std::get_if<TableScanOp>(&node.op))
        return p.table_rows.at(fold_identifier(leaf->table));
    double in = 0;
    if (node.left) in += oracle_rows(*node.left, p);
    if (node.right) in += oracle_rows(*node.right, p);
    return p.alpha.at(std::string(kind_name(kind_of(node.op)))) * in;
}

inline double oracle_cost(const PlanNode &node, const OracleParams &p) {
    if (std::holds_alternative<TableScanOp>(node.op)) return 0.0;
    double in = 0, below = 0;
    if (node.left) {
        in += oracle_rows(*node.left, p);
        below += oracle_cost(*node.left, p);
    }
    if (node.right) {
        in += oracle_rows(*node.right, p);
        below += oracle_cost(*node.right, p);
    }
    return below + p.rho.at(std::string(kind_name(kind_of(node.op)))) * in;
}

inline OracleParams oracle_defaults() {
    OracleParams p;
    p.table_rows = {{"t", 1000}, {"u", 2000}, {"table_3", 10000}};
    p.rho = {{"TableScan", 0}, {"Select", 1}, {"Join", 5}, {"ObjectDetection", 100},
             {"ObjectCounting", 200}};
    p.alpha = {{"TableScan", 1}, {"Select", 0.5}, {"Join", 0.8}, {"ObjectDetection", 0.6},
               {"ObjectCounting", 0.3}};
    return p;
}

} // namespace mmqo::test
