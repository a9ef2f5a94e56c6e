#include "mmqo/rewrite.hpp"

#include <algorithm>
#include <optional>

#include "mmqo/cost.hpp"
#include "mmqo/error_monitor.hpp"
#include "mmqo/plan_text.hpp"

namespace mmqo {

std::string_view policy_name(Policy policy) {
    switch (policy) {
        case Policy::Movement: return "Movement";
        case Policy::Merge: return "Merge";
        case Policy::Removal: return "Removal";
    }
    return "?";
}

namespace {

bool is_unary(OperatorKind kind) {
    return kind == OperatorKind::Select || kind == OperatorKind::ObjectDetection ||
           kind == OperatorKind::ObjectCounting;
}

std::string kind_label(const Operator &op) {
    switch (kind_of(op)) {
        case OperatorKind::TableScan: return "table scan";
        case OperatorKind::Select: return "select";
        case OperatorKind::Join: return "join";
        case OperatorKind::ObjectDetection: return "object detection";
        case OperatorKind::ObjectCounting: return "object counting";
    }
    return "?";
}

bool tables_covered(const std::set<std::string> &targets, const PlanNode &subtree) {
    return std::all_of(targets.begin(), targets.end(), [&](const std::string &t) {
        return subtree_contains_table(subtree, t);
    });
}

/// The one table a select filters, when all its predicates agree (folded).
std::optional<std::string> select_table(const SelectOp &op) {
    std::optional<std::string> table;
    for (const auto &pred : op.predicates) {
        std::string folded = fold_identifier(pred.target.table);
        if (!table) {
            table = folded;
        } else if (*table != folded) {
            return std::nullopt;
        }
    }
    return table;
}

/// Select with predicate `index` dropped; the node itself goes when that
/// empties it.
PlanPtr drop_predicate(const PlanPtr &root, const NodePath &path, const PlanNode &node,
                       std::size_t index) {
    const auto &sel = std::get<SelectOp>(node.op);
    if (sel.predicates.size() == 1) return replace_at(root, path, node.left);
    SelectOp trimmed = sel;
    trimmed.predicates.erase(trimmed.predicates.begin() + static_cast<std::ptrdiff_t>(index));
    return replace_at(root, path, make_node(std::move(trimmed), node.left, node.right));
}

bool objects_covered(const std::vector<std::string> &objects, const std::string &by,
                     const SimilarityChecker &similarity) {
    return std::all_of(objects.begin(), objects.end(),
                       [&](const std::string &obj) { return similarity.equivalent(obj, by); });
}

bool objects_subset(const std::vector<std::string> &small, const std::vector<std::string> &big,
                    const SimilarityChecker &similarity) {
    return std::all_of(small.begin(), small.end(), [&](const std::string &s) {
        return std::any_of(big.begin(), big.end(),
                           [&](const std::string &b) { return similarity.equivalent(s, b); });
    });
}

bool path_less(const NodePath &a, const NodePath &b) {
    return std::lexicographical_compare(a.begin(), a.end(), b.begin(), b.end(),
                                        [](ChildSide l, ChildSide r) {
                                            return static_cast<int>(l) < static_cast<int>(r);
                                        });
}

} // namespace

std::vector<Rewrite> enumerate_moves(const PlanNode &plan, const Catalog &catalog,
                                     const CostParams &params) {
    std::vector<Rewrite> out;
    PlanPtr root = make_node(plan.op, plan.left, plan.right);

    for_each_node(*root, [&](const PlanNode &node, const NodePath &path) {
        OperatorKind kind = kind_of(node.op);

        // (a) unary/unary swap when the cheaper operator sits on top
        if (is_unary(kind) && node.left && is_unary(kind_of(node.left->op))) {
            const PlanNode &child = *node.left;
            if (params.rho_for(kind) < params.rho_for(kind_of(child.op))) {
                PlanPtr swapped =
                    make_node(child.op, make_node(node.op, child.left));
                out.push_back({Policy::Movement, path,
                               "run the " + kind_label(node.op) + " below the " +
                                   kind_label(child.op),
                               replace_at(root, path, std::move(swapped))});
            }
        }

        // (b) push a filter cheaper than the join below it, into the input
        // that scans every table the filter references. A filter below the
        // join stops thinning the other branch, so the move is offered only
        // when it strictly lowers the estimated cost (moving through a join
        // helps only in some cases).
        const double join_rho = params.rho_for(OperatorKind::Join);
        if (is_unary(kind) && node.left && kind_of(node.left->op) == OperatorKind::Join &&
            params.rho_for(kind) < join_rho) {
            const PlanNode &j = *node.left;
            if (j.left && j.right) {
                double current_cost = plan_cost(*root, catalog, params);
                auto emit_push = [&](const char *where, PlanPtr pushed) {
                    PlanPtr candidate = replace_at(root, path, std::move(pushed));
                    if (plan_cost(*candidate, catalog, params) <
                        current_cost - kCostEqualityTolerance) {
                        out.push_back({Policy::Movement, path,
                                       "push the " + kind_label(node.op) + " into the " + where +
                                           " join input",
                                       std::move(candidate)});
                    }
                };
                std::set<std::string> targets = operator_target_tables(node.op);
                if (tables_covered(targets, *j.left)) {
                    emit_push("left", make_node(j.op, make_node(node.op, j.left), j.right));
                }
                if (tables_covered(targets, *j.right)) {
                    emit_push("right", make_node(j.op, j.left, make_node(node.op, j.right)));
                }
            }
        }

        // (b') symmetric pull-up: a filter costlier than the join rises above
        // it. Hoisting above a join helps only in some cases (the join can
        // widen the stream the filter sees), so the move is emitted only
        // when it strictly lowers the estimated cost.
        if (kind == OperatorKind::Join && node.left && node.right) {
            double current_cost = plan_cost(*root, catalog, params);
            auto emit_pull = [&](const PlanNode &f, PlanPtr pulled) {
                PlanPtr candidate = replace_at(root, path, std::move(pulled));
                if (plan_cost(*candidate, catalog, params) <
                    current_cost - kCostEqualityTolerance) {
                    out.push_back({Policy::Movement, path,
                                   "pull the " + kind_label(f.op) + " above the join",
                                   std::move(candidate)});
                }
            };
            if (is_unary(kind_of(node.left->op)) && node.left->left &&
                params.rho_for(kind_of(node.left->op)) > join_rho) {
                const PlanNode &f = *node.left;
                emit_pull(f, make_node(f.op, make_node(node.op, f.left, node.right)));
            }
            if (is_unary(kind_of(node.right->op)) && node.right->left &&
                params.rho_for(kind_of(node.right->op)) > join_rho) {
                const PlanNode &f = *node.right;
                emit_pull(f, make_node(f.op, make_node(node.op, node.left, f.left)));
            }
        }
    });
    return out;
}

std::vector<Rewrite> enumerate_merges(const PlanNode &plan, const SimilarityChecker &similarity) {
    std::vector<Rewrite> out;
    PlanPtr root = make_node(plan.op, plan.left, plan.right);

    for_each_node(*root, [&](const PlanNode &node, const NodePath &path) {
        if (!node.left) return;
        const PlanNode &child = *node.left;

        if (kind_of(node.op) == OperatorKind::Select &&
            kind_of(child.op) == OperatorKind::Select) {
            const auto &parent_op = std::get<SelectOp>(node.op);
            const auto &child_op = std::get<SelectOp>(child.op);
            auto pt = select_table(parent_op);
            auto ct = select_table(child_op);
            if (pt && ct && *pt == *ct) {
                SelectOp merged = parent_op;
                merged.predicates.insert(merged.predicates.end(), child_op.predicates.begin(),
                                         child_op.predicates.end());
                out.push_back({Policy::Merge, path, "merge adjacent selects on " + *pt,
                               replace_at(root, path, make_node(std::move(merged), child.left))});
            }
        }

        if (kind_of(node.op) == OperatorKind::ObjectDetection &&
            kind_of(child.op) == OperatorKind::ObjectDetection) {
            const auto &parent_op = std::get<ObjectDetectionOp>(node.op);
            const auto &child_op = std::get<ObjectDetectionOp>(child.op);
            if (same_column(parent_op.target, child_op.target)) {
                ObjectDetectionOp merged = parent_op;
                for (const auto &obj : child_op.objects) {
                    bool duplicate =
                        std::any_of(merged.objects.begin(), merged.objects.end(),
                                    [&](const std::string &existing) {
                                        return similarity.equivalent(existing, obj);
                                    });
                    if (!duplicate) merged.objects.push_back(obj);
                }
                out.push_back({Policy::Merge, path, "merge adjacent object detections",
                               replace_at(root, path, make_node(std::move(merged), child.left))});
            }
        }
    });
    return out;
}

std::vector<Rewrite> enumerate_removals(const PlanNode &plan, const SimilarityChecker &similarity) {
    std::vector<Rewrite> out;
    PlanPtr root = make_node(plan.op, plan.left, plan.right);

    for_each_node(*root, [&](const PlanNode &node, const NodePath &path) {
        // (c1) implied clause inside one select
        if (kind_of(node.op) == OperatorKind::Select && node.left) {
            const auto &sel = std::get<SelectOp>(node.op);
            for (std::size_t i = 0; i < sel.predicates.size(); ++i) {
                for (std::size_t j = 0; j < sel.predicates.size(); ++j) {
                    if (i == j) continue;
                    if (!predicate_implies(sel.predicates[j], sel.predicates[i])) continue;
                    bool mutual = predicate_implies(sel.predicates[i], sel.predicates[j]);
                    if (mutual && j > i) continue; // duplicates: drop the later copy only
                    out.push_back({Policy::Removal, path, "drop an implied select clause",
                                   drop_predicate(root, path, node, i)});
                    break;
                }
            }
        }

        if (!node.left) return;
        const PlanNode &child = *node.left;
        OperatorKind pk = kind_of(node.op);
        OperatorKind ck = kind_of(child.op);

        // (a) two countings of one object: the smaller threshold goes
        if (pk == OperatorKind::ObjectCounting && ck == OperatorKind::ObjectCounting) {
            const auto &p = std::get<ObjectCountingOp>(node.op);
            const auto &c = std::get<ObjectCountingOp>(child.op);
            if (same_column(p.target, c.target) && similarity.equivalent(p.object, c.object)) {
                if (p.threshold < c.threshold) {
                    out.push_back({Policy::Removal, path,
                                   "remove the smaller-threshold object counting",
                                   replace_at(root, path, node.left)});
                } else {
                    out.push_back({Policy::Removal, path,
                                   "remove the smaller-threshold object counting",
                                   replace_at(root, path, make_node(node.op, child.left))});
                }
            }
        }

        // (b) a detection covered by an adjacent counting of the same object
        if (pk == OperatorKind::ObjectDetection && ck == OperatorKind::ObjectCounting) {
            const auto &det = std::get<ObjectDetectionOp>(node.op);
            const auto &cnt = std::get<ObjectCountingOp>(child.op);
            if (same_column(det.target, cnt.target) &&
                objects_covered(det.objects, cnt.object, similarity)) {
                out.push_back({Policy::Removal, path,
                               "remove the object detection subsumed by the counting",
                               replace_at(root, path, node.left)});
            }
        }
        if (pk == OperatorKind::ObjectCounting && ck == OperatorKind::ObjectDetection) {
            const auto &cnt = std::get<ObjectCountingOp>(node.op);
            const auto &det = std::get<ObjectDetectionOp>(child.op);
            if (same_column(cnt.target, det.target) &&
                objects_covered(det.objects, cnt.object, similarity)) {
                out.push_back({Policy::Removal, path,
                               "remove the object detection subsumed by the counting",
                               replace_at(root, path, make_node(node.op, child.left))});
            }
        }

        // (d) a detection whose objects an adjacent detection already covers
        if (pk == OperatorKind::ObjectDetection && ck == OperatorKind::ObjectDetection) {
            const auto &p = std::get<ObjectDetectionOp>(node.op);
            const auto &c = std::get<ObjectDetectionOp>(child.op);
            if (same_column(p.target, c.target)) {
                if (objects_subset(p.objects, c.objects, similarity)) {
                    out.push_back({Policy::Removal, path,
                                   "remove the looser object detection",
                                   replace_at(root, path, node.left)});
                } else if (objects_subset(c.objects, p.objects, similarity)) {
                    out.push_back({Policy::Removal, path,
                                   "remove the looser object detection",
                                   replace_at(root, path, make_node(node.op, child.left))});
                }
            }
        }

        // (c2) implied clause across adjacent selects
        if (pk == OperatorKind::Select && ck == OperatorKind::Select && child.left) {
            const auto &p = std::get<SelectOp>(node.op);
            const auto &c = std::get<SelectOp>(child.op);
            NodePath child_path = path;
            child_path.push_back(ChildSide::Left);
            for (std::size_t i = 0; i < p.predicates.size(); ++i) {
                for (std::size_t j = 0; j < c.predicates.size(); ++j) {
                    if (predicate_implies(c.predicates[j], p.predicates[i])) {
                        // mutual duplicates drop the parent's copy only
                        out.push_back({Policy::Removal, path,
                                       "drop a select clause implied by the adjacent select",
                                       drop_predicate(root, path, node, i)});
                        break;
                    }
                }
            }
            for (std::size_t j = 0; j < c.predicates.size(); ++j) {
                for (std::size_t i = 0; i < p.predicates.size(); ++i) {
                    if (predicate_implies(p.predicates[i], c.predicates[j]) &&
                        !predicate_implies(c.predicates[j], p.predicates[i])) {
                        out.push_back({Policy::Removal, child_path,
                                       "drop a select clause implied by the adjacent select",
                                       drop_predicate(root, child_path, child, j)});
                        break;
                    }
                }
            }
        }
    });
    return out;
}

std::vector<Rewrite> all_rewrites(const PlanNode &plan, const Catalog &catalog,
                                  const CostParams &params, const SimilarityChecker &similarity) {
    std::vector<Rewrite> rewrites = enumerate_moves(plan, catalog, params);
    std::vector<Rewrite> merges = enumerate_merges(plan, similarity);
    std::vector<Rewrite> removals = enumerate_removals(plan, similarity);
    rewrites.insert(rewrites.end(), std::make_move_iterator(merges.begin()),
                    std::make_move_iterator(merges.end()));
    rewrites.insert(rewrites.end(), std::make_move_iterator(removals.begin()),
                    std::make_move_iterator(removals.end()));

    std::vector<std::string> keys(rewrites.size());
    for (std::size_t i = 0; i < rewrites.size(); ++i) keys[i] = canonical_key(rewrites[i].result);

    std::vector<std::size_t> order(rewrites.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        if (rewrites[a].policy != rewrites[b].policy) return rewrites[a].policy < rewrites[b].policy;
        if (rewrites[a].site != rewrites[b].site) return path_less(rewrites[a].site, rewrites[b].site);
        return keys[a] < keys[b];
    });

    std::vector<Rewrite> out;
    std::set<std::string> seen;
    for (std::size_t idx : order) {
        if (seen.insert(keys[idx]).second) out.push_back(std::move(rewrites[idx]));
    }
    return out;
}

} // namespace mmqo
