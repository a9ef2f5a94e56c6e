#include "mmqo/error_monitor.hpp"

#include <algorithm>
#include <optional>

#include "mmqo/errors.hpp"
#include "mmqo/plan_text.hpp"

namespace mmqo {

std::string_view error_kind_name(ErrorKind kind) {
    switch (kind) {
        case ErrorKind::Arity: return "Arity";
        case ErrorKind::UnknownTable: return "UnknownTable";
        case ErrorKind::UnknownColumn: return "UnknownColumn";
        case ErrorKind::PredicateScope: return "PredicateScope";
        case ErrorKind::NonImageColumn: return "NonImageColumn";
        case ErrorKind::NegativeThreshold: return "NegativeThreshold";
        case ErrorKind::LeafNotScan: return "LeafNotScan";
        case ErrorKind::Unparseable: return "Unparseable";
        case ErrorKind::Inequivalent: return "Inequivalent";
    }
    return "?";
}

std::string describe(const PlanError &error) {
    return std::string(error_kind_name(error.kind)) + " at " + path_to_string(error.location) +
           ": " + error.detail;
}

bool contains_kind(const std::vector<PlanError> &errors, ErrorKind kind) {
    return std::any_of(errors.begin(), errors.end(),
                       [&](const PlanError &e) { return e.kind == kind; });
}

namespace {

std::string column_text(const ColumnRef &ref) {
    return ref.table + "." + ref.column;
}

/// Common checks for a column referenced by a predicate, join key or visual
/// target sitting at `node`.
void check_target(const ColumnRef &ref, const PlanNode &node, const NodePath &path,
                  const Catalog &catalog, bool must_be_image, std::vector<PlanError> &out) {
    const TableStats *stats = catalog.find(ref.table);
    if (!stats) {
        out.push_back({ErrorKind::UnknownTable, path,
                       "references table " + ref.table + " which is not in the catalog"});
    } else if (!stats->has_column(ref.column)) {
        out.push_back({ErrorKind::UnknownColumn, path,
                       "table " + ref.table + " has no column " + ref.column});
    } else if (must_be_image && !stats->is_image(ref.column)) {
        out.push_back({ErrorKind::NonImageColumn, path,
                       column_text(ref) + " is not an image column"});
    }
    if (!subtree_contains_table(node, ref.table)) {
        out.push_back({ErrorKind::PredicateScope, path,
                       "references table " + ref.table + " which is not scanned in its sub-tree"});
    }
}

} // namespace

std::vector<PlanError> check_structure(const PlanNode &plan, const Catalog &catalog) {
    std::vector<PlanError> errors;
    for_each_node(plan, [&](const PlanNode &node, const NodePath &path) {
        const bool leaf = !node.left && !node.right;
        switch (kind_of(node.op)) {
            case OperatorKind::TableScan: {
                const auto &op = std::get<TableScanOp>(node.op);
                if (!leaf)
                    errors.push_back({ErrorKind::Arity, path, "table scan must be a leaf"});
                if (!catalog.has_table(op.table))
                    errors.push_back({ErrorKind::UnknownTable, path,
                                      "scan of unknown table " + op.table});
                break;
            }
            case OperatorKind::Select: {
                const auto &op = std::get<SelectOp>(node.op);
                if (!node.left || node.right)
                    errors.push_back(
                        {ErrorKind::Arity, path, "select must have exactly a left child"});
                if (leaf)
                    errors.push_back({ErrorKind::LeafNotScan, path, "leaf is a select, not a scan"});
                if (op.predicates.empty())
                    errors.push_back({ErrorKind::Arity, path, "select carries no predicates"});
                for (const auto &pred : op.predicates)
                    check_target(pred.target, node, path, catalog, false, errors);
                break;
            }
            case OperatorKind::Join: {
                const auto &op = std::get<JoinOp>(node.op);
                if (!node.left || !node.right)
                    errors.push_back({ErrorKind::Arity, path, "join must have two children"});
                if (leaf)
                    errors.push_back({ErrorKind::LeafNotScan, path, "leaf is a join, not a scan"});
                check_target(op.left_key, node, path, catalog, false, errors);
                check_target(op.right_key, node, path, catalog, false, errors);
                break;
            }
            case OperatorKind::ObjectDetection: {
                const auto &op = std::get<ObjectDetectionOp>(node.op);
                if (!node.left || node.right)
                    errors.push_back({ErrorKind::Arity, path,
                                      "object detection must have exactly a left child"});
                if (leaf)
                    errors.push_back(
                        {ErrorKind::LeafNotScan, path, "leaf is an object detection, not a scan"});
                if (op.objects.empty())
                    errors.push_back({ErrorKind::Arity, path, "object detection names no objects"});
                check_target(op.target, node, path, catalog, true, errors);
                break;
            }
            case OperatorKind::ObjectCounting: {
                const auto &op = std::get<ObjectCountingOp>(node.op);
                if (!node.left || node.right)
                    errors.push_back({ErrorKind::Arity, path,
                                      "object counting must have exactly a left child"});
                if (leaf)
                    errors.push_back(
                        {ErrorKind::LeafNotScan, path, "leaf is an object counting, not a scan"});
                if (op.threshold < 0)
                    errors.push_back({ErrorKind::NegativeThreshold, path,
                                      "threshold " + std::to_string(op.threshold) +
                                          " is negative"});
                check_target(op.target, node, path, catalog, true, errors);
                break;
            }
        }
    });
    return errors;
}

namespace {

bool literal_matches(const Literal &a, const Literal &b) {
    if (a.is_numeric() != b.is_numeric()) return false;
    if (a.is_numeric()) return a.as_number() == b.as_number();
    return *a.as_string() == *b.as_string();
}

} // namespace

bool predicate_implies(const SimplePredicate &strong, const SimplePredicate &weak) {
    if (!same_column(strong.target, weak.target)) return false;
    if (strong.comparator == weak.comparator && literal_matches(strong.value, weak.value))
        return true;
    if (!strong.value.is_numeric() || !weak.value.is_numeric()) return false;

    double s = strong.value.as_number();
    double w = weak.value.as_number();
    switch (strong.comparator) {
        case Comparator::Gt:
            return (weak.comparator == Comparator::Gt || weak.comparator == Comparator::Ge) &&
                   s >= w;
        case Comparator::Ge:
            return (weak.comparator == Comparator::Ge && s >= w) ||
                   (weak.comparator == Comparator::Gt && s > w);
        case Comparator::Lt:
            return (weak.comparator == Comparator::Lt || weak.comparator == Comparator::Le) &&
                   s <= w;
        case Comparator::Le:
            return (weak.comparator == Comparator::Le && s <= w) ||
                   (weak.comparator == Comparator::Lt && s < w);
        case Comparator::Eq:
            switch (weak.comparator) {
                case Comparator::Gt: return s > w;
                case Comparator::Ge: return s >= w;
                case Comparator::Lt: return s < w;
                case Comparator::Le: return s <= w;
                default: return false;
            }
        case Comparator::Ne:
            return false; // only the identical predicate, handled above
    }
    return false;
}

namespace {

struct RelPred {
    SimplePredicate pred; // folded identifiers
    std::string render;   // original spelling, for messages
};

struct VisualAtom {
    bool counting = false;
    std::string table, column; // folded
    std::string phrase;        // normalized
    std::int64_t threshold = 0;
    std::string render;
};

struct JoinPair {
    std::pair<std::string, std::string> a, b; // folded (table, column), a <= b
    std::string render;

    bool operator==(const JoinPair &other) const { return a == other.a && b == other.b; }
    bool operator<(const JoinPair &other) const {
        return std::tie(a, b) < std::tie(other.a, other.b);
    }
};

struct ConstraintSummary {
    std::set<std::string> tables; // folded
    std::vector<JoinPair> joins;
    std::vector<RelPred> predicates;
    std::vector<VisualAtom> visuals;
};

ConstraintSummary summarize(const PlanNode &plan) {
    ConstraintSummary sum;
    sum.tables = folded_table_set(plan);
    for_each_node(plan, [&](const PlanNode &node, const NodePath &) {
        switch (kind_of(node.op)) {
            case OperatorKind::Select: {
                for (const auto &pred : std::get<SelectOp>(node.op).predicates) {
                    SimplePredicate folded = pred;
                    folded.target.table = fold_identifier(folded.target.table);
                    folded.target.column = fold_identifier(folded.target.column);
                    sum.predicates.push_back(
                        {std::move(folded), column_text(pred.target) + " " +
                                                std::string(comparator_symbol(pred.comparator)) +
                                                " " + pred.value.render()});
                }
                break;
            }
            case OperatorKind::Join: {
                const auto &j = std::get<JoinOp>(node.op);
                std::pair<std::string, std::string> a{fold_identifier(j.left_key.table),
                                                      fold_identifier(j.left_key.column)};
                std::pair<std::string, std::string> b{fold_identifier(j.right_key.table),
                                                      fold_identifier(j.right_key.column)};
                if (b < a) std::swap(a, b);
                sum.joins.push_back({std::move(a), std::move(b),
                                     column_text(j.left_key) + " = " + column_text(j.right_key)});
                break;
            }
            case OperatorKind::ObjectDetection: {
                const auto &d = std::get<ObjectDetectionOp>(node.op);
                for (const auto &obj : d.objects) {
                    sum.visuals.push_back({false, fold_identifier(d.target.table),
                                           fold_identifier(d.target.column), normalize_phrase(obj),
                                           0,
                                           "detection of \"" + obj + "\" on " +
                                               column_text(d.target)});
                }
                break;
            }
            case OperatorKind::ObjectCounting: {
                const auto &c = std::get<ObjectCountingOp>(node.op);
                sum.visuals.push_back({true, fold_identifier(c.target.table),
                                       fold_identifier(c.target.column), normalize_phrase(c.object),
                                       c.threshold,
                                       "counting of \"" + c.object + "\" > " +
                                           std::to_string(c.threshold) + " on " +
                                           column_text(c.target)});
                break;
            }
            default:
                break;
        }
    });
    return sum;
}

/// strong covers weak: every row past strong also satisfies weak.
bool visual_implies(const VisualAtom &strong, const VisualAtom &weak,
                    const SimilarityChecker &similarity) {
    if (strong.table != weak.table || strong.column != weak.column) return false;
    if (!similarity.equivalent(strong.phrase, weak.phrase)) return false;
    if (!weak.counting) return true; // detection is covered by either kind
    return strong.counting && strong.threshold >= weak.threshold;
}

bool visual_mutual(const VisualAtom &a, const VisualAtom &b, const SimilarityChecker &similarity) {
    if (a.counting != b.counting) return false;
    if (a.counting && a.threshold != b.threshold) return false;
    return a.table == b.table && a.column == b.column &&
           similarity.equivalent(a.phrase, b.phrase);
}

/// Drops every element implied by a stronger one on the same side; of a
/// mutually-implying pair the earlier (in sorted order) survives.
template <typename T, typename Implies, typename Mutual>
std::vector<T> reduce_core(std::vector<T> items, const Implies &implies, const Mutual &mutual) {
    std::vector<T> out;
    for (std::size_t i = 0; i < items.size(); ++i) {
        bool dropped = false;
        for (std::size_t j = 0; j < items.size() && !dropped; ++j) {
            if (i == j) continue;
            if (!implies(items[j], items[i])) continue;
            if (mutual(items[i], items[j]))
                dropped = j < i; // duplicate class: keep the first
            else
                dropped = true;
        }
        if (!dropped) out.push_back(items[i]);
    }
    return out;
}

std::vector<RelPred> reduce_predicates(std::vector<RelPred> preds) {
    std::sort(preds.begin(), preds.end(),
              [](const RelPred &a, const RelPred &b) { return a.render < b.render; });
    return reduce_core(
        std::move(preds),
        [](const RelPred &s, const RelPred &w) { return predicate_implies(s.pred, w.pred); },
        [](const RelPred &a, const RelPred &b) {
            return predicate_implies(a.pred, b.pred) && predicate_implies(b.pred, a.pred);
        });
}

std::vector<VisualAtom> reduce_visuals(std::vector<VisualAtom> atoms,
                                       const SimilarityChecker &similarity) {
    std::sort(atoms.begin(), atoms.end(),
              [](const VisualAtom &a, const VisualAtom &b) { return a.render < b.render; });
    return reduce_core(
        std::move(atoms),
        [&](const VisualAtom &s, const VisualAtom &w) { return visual_implies(s, w, similarity); },
        [&](const VisualAtom &a, const VisualAtom &b) { return visual_mutual(a, b, similarity); });
}

bool predicates_match(const RelPred &a, const RelPred &b) {
    return same_column(a.pred.target, b.pred.target) &&
           a.pred.comparator == b.pred.comparator && literal_matches(a.pred.value, b.pred.value);
}

} // namespace

std::vector<PlanError> check_equivalence(const PlanNode &initial, const PlanNode &candidate,
                                         const Catalog &catalog,
                                         const SimilarityChecker &similarity) {
    (void)catalog;
    ConstraintSummary init = summarize(initial);
    ConstraintSummary cand = summarize(candidate);

    auto inequivalent = [&](const std::string &detail) {
        return std::vector<PlanError>{{ErrorKind::Inequivalent, {}, detail}};
    };

    if (init.tables != cand.tables) {
        for (const auto &t : init.tables)
            if (!cand.tables.count(t)) return inequivalent("candidate no longer scans table " + t);
        for (const auto &t : cand.tables)
            if (!init.tables.count(t)) return inequivalent("candidate scans extra table " + t);
    }

    std::vector<JoinPair> init_joins = init.joins, cand_joins = cand.joins;
    std::sort(init_joins.begin(), init_joins.end());
    std::sort(cand_joins.begin(), cand_joins.end());
    {
        std::vector<bool> used(cand_joins.size(), false);
        for (const auto &j : init_joins) {
            bool found = false;
            for (std::size_t i = 0; i < cand_joins.size(); ++i) {
                if (!used[i] && cand_joins[i] == j) {
                    used[i] = found = true;
                    break;
                }
            }
            if (!found) return inequivalent("candidate is missing join " + j.render);
        }
        for (std::size_t i = 0; i < cand_joins.size(); ++i)
            if (!used[i]) return inequivalent("candidate adds join " + cand_joins[i].render);
    }

    std::vector<RelPred> init_core = reduce_predicates(init.predicates);
    std::vector<RelPred> cand_core = reduce_predicates(cand.predicates);
    {
        std::vector<bool> used(cand_core.size(), false);
        for (const auto &p : init_core) {
            bool found = false;
            for (std::size_t i = 0; i < cand_core.size(); ++i) {
                if (!used[i] && predicates_match(p, cand_core[i])) {
                    used[i] = found = true;
                    break;
                }
            }
            if (!found) return inequivalent("candidate does not enforce predicate " + p.render);
        }
        for (std::size_t i = 0; i < cand_core.size(); ++i)
            if (!used[i])
                return inequivalent("candidate adds predicate " + cand_core[i].render);
    }

    std::vector<VisualAtom> init_visual = reduce_visuals(init.visuals, similarity);
    std::vector<VisualAtom> cand_visual = reduce_visuals(cand.visuals, similarity);
    {
        std::vector<bool> used(cand_visual.size(), false);
        for (const auto &v : init_visual) {
            bool found = false;
            for (std::size_t i = 0; i < cand_visual.size(); ++i) {
                if (!used[i] && visual_mutual(v, cand_visual[i], similarity)) {
                    used[i] = found = true;
                    break;
                }
            }
            if (!found)
                return inequivalent("candidate does not enforce visual constraint: " + v.render);
        }
        for (std::size_t i = 0; i < cand_visual.size(); ++i)
            if (!used[i])
                return inequivalent("candidate adds visual constraint: " +
                                    cand_visual[i].render);
    }

    return {};
}

std::vector<PlanError> check_error(const PlanNode &candidate, const PlanNode &initial,
                                   const Catalog &catalog, const SimilarityChecker &similarity) {
    std::vector<PlanError> errors = check_structure(candidate, catalog);
    if (!errors.empty()) return errors;
    return check_equivalence(initial, candidate, catalog, similarity);
}

std::vector<PlanError> check_error_text(const std::string &candidate_text, const PlanNode &initial,
                                        const Catalog &catalog,
                                        const SimilarityChecker &similarity) {
    PlanPtr candidate;
    try {
        candidate = parse_plan(candidate_text);
    } catch (const ParseError &e) {
        return {{ErrorKind::Unparseable, {},
                 std::string(e.what()) + " (byte " + std::to_string(e.offset) + ")"}};
    }
    return check_error(*candidate, initial, catalog, similarity);
}

} // namespace mmqo
