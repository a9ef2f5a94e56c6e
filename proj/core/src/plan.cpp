#include "mmqo/plan.hpp"

#include <algorithm>
#include <cassert>
#include <cctype>
#include <charconv>
#include <cmath>

namespace mmqo {

std::string_view kind_name(OperatorKind kind) {
    switch (kind) {
        case OperatorKind::TableScan: return "TableScan";
        case OperatorKind::Select: return "Select";
        case OperatorKind::Join: return "Join";
        case OperatorKind::ObjectDetection: return "ObjectDetection";
        case OperatorKind::ObjectCounting: return "ObjectCounting";
    }
    return "?";
}

std::optional<OperatorKind> kind_from_name(std::string_view name) {
    for (std::size_t i = 0; i < kOperatorKindCount; ++i) {
        auto kind = static_cast<OperatorKind>(i);
        if (name == kind_name(kind)) return kind;
    }
    return std::nullopt;
}

std::string fold_identifier(std::string_view ident) {
    std::string out;
    out.reserve(ident.size());
    for (unsigned char c : ident) out.push_back(static_cast<char>(std::tolower(c)));
    return out;
}

bool same_identifier(std::string_view a, std::string_view b) {
    if (a.size() != b.size()) return false;
    for (std::size_t i = 0; i < a.size(); ++i) {
        if (std::tolower(static_cast<unsigned char>(a[i])) !=
            std::tolower(static_cast<unsigned char>(b[i])))
            return false;
    }
    return true;
}

bool same_column(const ColumnRef &a, const ColumnRef &b) {
    return same_identifier(a.table, b.table) && same_identifier(a.column, b.column);
}

std::string_view comparator_symbol(Comparator cmp) {
    switch (cmp) {
        case Comparator::Eq: return "=";
        case Comparator::Ne: return "!=";
        case Comparator::Lt: return "<";
        case Comparator::Le: return "<=";
        case Comparator::Gt: return ">";
        case Comparator::Ge: return ">=";
    }
    return "?";
}

std::optional<Comparator> comparator_from_symbol(std::string_view symbol) {
    if (symbol == "=") return Comparator::Eq;
    if (symbol == "!=") return Comparator::Ne;
    if (symbol == "<") return Comparator::Lt;
    if (symbol == "<=") return Comparator::Le;
    if (symbol == ">") return Comparator::Gt;
    if (symbol == ">=") return Comparator::Ge;
    return std::nullopt;
}

bool is_ordering(Comparator cmp) {
    return cmp == Comparator::Lt || cmp == Comparator::Le || cmp == Comparator::Gt ||
           cmp == Comparator::Ge;
}

bool Literal::is_numeric() const {
    return !std::holds_alternative<std::string>(value);
}

double Literal::as_number() const {
    if (auto *i = std::get_if<std::int64_t>(&value)) return static_cast<double>(*i);
    return std::get<double>(value);
}

const std::string *Literal::as_string() const {
    return std::get_if<std::string>(&value);
}

std::string Literal::render() const {
    if (auto *i = std::get_if<std::int64_t>(&value)) {
        return std::to_string(*i);
    }
    if (auto *d = std::get_if<double>(&value)) {
        char buf[64];
        auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), *d);
        assert(ec == std::errc());
        std::string text(buf, ptr);
        // keep the decimal marker so the literal re-parses as a decimal
        if (text.find('.') == std::string::npos && text.find('e') == std::string::npos &&
            text.find("inf") == std::string::npos && text.find("nan") == std::string::npos) {
            text += ".0";
        }
        return text;
    }
    return "'" + std::get<std::string>(value) + "'";
}

Literal int_literal(std::int64_t v) { return Literal{v}; }
Literal decimal_literal(double v) { return Literal{v}; }
Literal string_literal(std::string v) { return Literal{std::move(v)}; }

OperatorKind kind_of(const Operator &op) {
    return static_cast<OperatorKind>(op.index());
}

bool operator_equal(const Operator &a, const Operator &b) {
    return a == b;
}

PlanPtr make_node(Operator op, PlanPtr left, PlanPtr right) {
    return std::make_shared<const PlanNode>(PlanNode{std::move(op), std::move(left), std::move(right)});
}

PlanPtr scan(std::string table) {
    return make_node(TableScanOp{std::move(table)});
}

PlanPtr select(PlanPtr child, std::vector<SimplePredicate> predicates) {
    return make_node(SelectOp{std::move(predicates)}, std::move(child));
}

PlanPtr join(PlanPtr left, PlanPtr right, ColumnRef left_key, ColumnRef right_key) {
    return make_node(JoinOp{std::move(left_key), std::move(right_key)}, std::move(left),
                     std::move(right));
}

PlanPtr detect(PlanPtr child, ColumnRef target, std::vector<std::string> objects) {
    return make_node(ObjectDetectionOp{std::move(target), std::move(objects)}, std::move(child));
}

PlanPtr count(PlanPtr child, ColumnRef target, std::string object, std::int64_t threshold) {
    return make_node(ObjectCountingOp{std::move(target), std::move(object), threshold},
                     std::move(child));
}

bool plan_equal(const PlanNode &a, const PlanNode &b) {
    if (!(a.op == b.op)) return false;
    if (static_cast<bool>(a.left) != static_cast<bool>(b.left)) return false;
    if (static_cast<bool>(a.right) != static_cast<bool>(b.right)) return false;
    if (a.left && !plan_equal(*a.left, *b.left)) return false;
    if (a.right && !plan_equal(*a.right, *b.right)) return false;
    return true;
}

bool plan_equal(const PlanPtr &a, const PlanPtr &b) {
    if (!a || !b) return a == b;
    return plan_equal(*a, *b);
}

bool is_well_formed(const PlanNode &node) {
    switch (kind_of(node.op)) {
        case OperatorKind::TableScan:
            if (node.left || node.right) return false;
            break;
        case OperatorKind::Select:
        case OperatorKind::ObjectDetection:
        case OperatorKind::ObjectCounting:
            if (!node.left || node.right) return false;
            break;
        case OperatorKind::Join:
            if (!node.left || !node.right) return false;
            break;
    }
    if (auto *sel = std::get_if<SelectOp>(&node.op); sel && sel->predicates.empty()) return false;
    if (auto *det = std::get_if<ObjectDetectionOp>(&node.op); det && det->objects.empty())
        return false;
    if (auto *cnt = std::get_if<ObjectCountingOp>(&node.op); cnt && cnt->threshold < 0)
        return false;
    if (node.left && !is_well_formed(*node.left)) return false;
    if (node.right && !is_well_formed(*node.right)) return false;
    return true;
}

std::string path_to_string(const NodePath &path) {
    std::string out = "root";
    for (ChildSide side : path) {
        out += side == ChildSide::Left ? ".L" : ".R";
    }
    return out;
}

const PlanNode *node_at(const PlanNode &root, const NodePath &path) {
    const PlanNode *cur = &root;
    for (ChildSide side : path) {
        const PlanPtr &next = side == ChildSide::Left ? cur->left : cur->right;
        if (!next) return nullptr;
        cur = next.get();
    }
    return cur;
}

PlanPtr replace_at(const PlanPtr &root, const NodePath &path, PlanPtr replacement) {
    if (path.empty()) return replacement;
    assert(root);
    ChildSide side = path.front();
    NodePath rest(path.begin() + 1, path.end());
    const PlanPtr &child = side == ChildSide::Left ? root->left : root->right;
    PlanPtr new_child = replace_at(child, rest, std::move(replacement));
    if (side == ChildSide::Left) return make_node(root->op, std::move(new_child), root->right);
    return make_node(root->op, root->left, std::move(new_child));
}

int OperatorCensus::total() const {
    int sum = 0;
    for (int c : counts) sum += c;
    return sum;
}

int OperatorCensus::non_scan_total() const {
    return total() - (*this)[OperatorKind::TableScan];
}

OperatorCensus operator_census(const PlanNode &plan) {
    OperatorCensus census;
    for_each_node(plan, [&](const PlanNode &node, const NodePath &) {
        ++census[kind_of(node.op)];
    });
    return census;
}

std::vector<std::string> referenced_tables(const PlanNode &plan) {
    std::vector<std::string> out;
    std::set<std::string> seen;
    for_each_node(plan, [&](const PlanNode &node, const NodePath &) {
        if (auto *leaf = std::get_if<TableScanOp>(&node.op)) {
            if (seen.insert(fold_identifier(leaf->table)).second) out.push_back(leaf->table);
        }
    });
    return out;
}

std::set<std::string> folded_table_set(const PlanNode &plan) {
    std::set<std::string> out;
    for_each_node(plan, [&](const PlanNode &node, const NodePath &) {
        if (auto *leaf = std::get_if<TableScanOp>(&node.op)) out.insert(fold_identifier(leaf->table));
    });
    return out;
}

bool subtree_contains_table(const PlanNode &plan, std::string_view table) {
    if (auto *leaf = std::get_if<TableScanOp>(&plan.op); leaf && same_identifier(leaf->table, table))
        return true;
    if (plan.left && subtree_contains_table(*plan.left, table)) return true;
    if (plan.right && subtree_contains_table(*plan.right, table)) return true;
    return false;
}

std::set<std::string> operator_target_tables(const Operator &op) {
    std::set<std::string> out;
    switch (kind_of(op)) {
        case OperatorKind::TableScan:
            break;
        case OperatorKind::Select:
            for (const auto &pred : std::get<SelectOp>(op).predicates)
                out.insert(fold_identifier(pred.target.table));
            break;
        case OperatorKind::Join: {
            const auto &j = std::get<JoinOp>(op);
            out.insert(fold_identifier(j.left_key.table));
            out.insert(fold_identifier(j.right_key.table));
            break;
        }
        case OperatorKind::ObjectDetection:
            out.insert(fold_identifier(std::get<ObjectDetectionOp>(op).target.table));
            break;
        case OperatorKind::ObjectCounting:
            out.insert(fold_identifier(std::get<ObjectCountingOp>(op).target.table));
            break;
    }
    return out;
}

namespace {
void walk(const PlanNode &node, NodePath &path,
          const std::function<void(const PlanNode &, const NodePath &)> &fn) {
    fn(node, path);
    if (node.left) {
        path.push_back(ChildSide::Left);
        walk(*node.left, path, fn);
        path.pop_back();
    }
    if (node.right) {
        path.push_back(ChildSide::Right);
        walk(*node.right, path, fn);
        path.pop_back();
    }
}
} // namespace

void for_each_node(const PlanNode &root,
                   const std::function<void(const PlanNode &, const NodePath &)> &fn) {
    NodePath path;
    walk(root, path, fn);
}

int node_count(const PlanNode &plan) {
    int n = 0;
    for_each_node(plan, [&](const PlanNode &, const NodePath &) { ++n; });
    return n;
}

} // namespace mmqo
