#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace mmqo {

enum class OperatorKind : std::uint8_t {
    TableScan,
    Select,
    Join,
    ObjectDetection,
    ObjectCounting,
};
inline constexpr std::size_t kOperatorKindCount = 5;

std::string_view kind_name(OperatorKind kind);
std::optional<OperatorKind> kind_from_name(std::string_view name);

/// ASCII case-fold used for every identifier comparison. Identifiers keep
/// their original spelling everywhere else.
std::string fold_identifier(std::string_view ident);
bool same_identifier(std::string_view a, std::string_view b);

/// Table-qualified column reference.
struct ColumnRef {
    std::string table;
    std::string column;

    bool operator==(const ColumnRef &) const = default;
};
bool same_column(const ColumnRef &a, const ColumnRef &b);

enum class Comparator : std::uint8_t { Eq, Ne, Lt, Le, Gt, Ge };

std::string_view comparator_symbol(Comparator cmp);
std::optional<Comparator> comparator_from_symbol(std::string_view symbol);
/// <, <=, > and >= order their operands and therefore require numeric values.
bool is_ordering(Comparator cmp);

/// Predicate literal: integer, decimal or quoted string.
struct Literal {
    std::variant<std::int64_t, double, std::string> value;

    bool is_numeric() const;
    double as_number() const; // pre: is_numeric()
    const std::string *as_string() const;

    /// Canonical text form; whole-valued decimals keep a trailing ".0" so the
    /// integer/decimal distinction survives a round trip.
    std::string render() const;

    bool operator==(const Literal &) const = default;
};

Literal int_literal(std::int64_t v);
Literal decimal_literal(double v);
Literal string_literal(std::string v);

struct SimplePredicate {
    ColumnRef target;
    Comparator comparator = Comparator::Eq;
    Literal value;

    bool operator==(const SimplePredicate &) const = default;
};

struct TableScanOp {
    std::string table;
    bool operator==(const TableScanOp &) const = default;
};

struct SelectOp {
    std::vector<SimplePredicate> predicates; // non-empty, conjunctive
    bool operator==(const SelectOp &) const = default;
};

struct JoinOp { // equi-join only
    ColumnRef left_key;
    ColumnRef right_key;
    bool operator==(const JoinOp &) const = default;
};

struct ObjectDetectionOp {
    ColumnRef target;                 // image-path column
    std::vector<std::string> objects; // conjunction of object phrases
    bool operator==(const ObjectDetectionOp &) const = default;
};

struct ObjectCountingOp {
    ColumnRef target;
    std::string object;
    std::int64_t threshold = 0; // rows pass when count > threshold
    bool operator==(const ObjectCountingOp &) const = default;
};

using Operator = std::variant<TableScanOp, SelectOp, JoinOp, ObjectDetectionOp, ObjectCountingOp>;

OperatorKind kind_of(const Operator &op);
bool operator_equal(const Operator &a, const Operator &b);

struct PlanNode;
using PlanPtr = std::shared_ptr<const PlanNode>;

/// Binary operator tree. Nodes are immutable once built; trees share
/// subtrees internally but behave as values (no mutation is observable).
/// Parsed candidate plans may violate arity until the error monitor has
/// looked at them; plans produced by the builders below are well formed.
struct PlanNode {
    Operator op;
    PlanPtr left;
    PlanPtr right;
};

PlanPtr make_node(Operator op, PlanPtr left = nullptr, PlanPtr right = nullptr);

PlanPtr scan(std::string table);
PlanPtr select(PlanPtr child, std::vector<SimplePredicate> predicates);
PlanPtr join(PlanPtr left, PlanPtr right, ColumnRef left_key, ColumnRef right_key);
PlanPtr detect(PlanPtr child, ColumnRef target, std::vector<std::string> objects);
PlanPtr count(PlanPtr child, ColumnRef target, std::string object, std::int64_t threshold);

bool plan_equal(const PlanNode &a, const PlanNode &b);
bool plan_equal(const PlanPtr &a, const PlanPtr &b);

/// Arity invariants: scans are leaves, filters have exactly a left child,
/// joins have two children, every leaf is a scan.
bool is_well_formed(const PlanNode &node);

enum class ChildSide : std::uint8_t { Left, Right };
using NodePath = std::vector<ChildSide>;

std::string path_to_string(const NodePath &path); // "root", "root.L.R", ...
const PlanNode *node_at(const PlanNode &root, const NodePath &path);

/// Rebuilds the spine from `root` down to `path` with `replacement` grafted
/// in; untouched subtrees are shared. Empty replacement splices the old
/// subtree out (only meaningful for unary parents).
PlanPtr replace_at(const PlanPtr &root, const NodePath &path, PlanPtr replacement);

struct OperatorCensus {
    std::array<int, kOperatorKindCount> counts{};

    int &operator[](OperatorKind kind) { return counts[static_cast<std::size_t>(kind)]; }
    int operator[](OperatorKind kind) const { return counts[static_cast<std::size_t>(kind)]; }
    int total() const;
    int non_scan_total() const;

    bool operator==(const OperatorCensus &) const = default;
};

OperatorCensus operator_census(const PlanNode &plan);

/// All tables scanned in the (sub)tree, original spelling, first occurrence
/// wins when two spellings fold to the same identifier.
std::vector<std::string> referenced_tables(const PlanNode &plan);
std::set<std::string> folded_table_set(const PlanNode &plan);
bool subtree_contains_table(const PlanNode &plan, std::string_view table);

/// Tables an operator's own predicates / keys / targets mention (folded).
std::set<std::string> operator_target_tables(const Operator &op);

void for_each_node(const PlanNode &root,
                   const std::function<void(const PlanNode &, const NodePath &)> &fn);

int node_count(const PlanNode &plan);

} // namespace mmqo
