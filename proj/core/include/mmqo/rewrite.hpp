#pragma once

#include <string>
#include <vector>

#include "mmqo/catalog.hpp"
#include "mmqo/plan.hpp"
#include "mmqo/similarity.hpp"

namespace mmqo {

enum class Policy : std::uint8_t { Movement, Merge, Removal };

std::string_view policy_name(Policy policy);

/// One legality-checked single-step transformation of a plan.
struct Rewrite {
    Policy policy{};
    NodePath site;           // upper node of the pair the rewrite touches
    std::string description; // human-readable, for traces
    PlanPtr result;
};

/// Movement: (a) swaps a unary operator with its unary child when the
/// cheaper one sits closer to the root, (b) pushes a filter below a join
/// into the child whose subtree scans every table the filter references,
/// and the symmetric pull-up. All results keep the same operator census.
std::vector<Rewrite> enumerate_moves(const PlanNode &plan, const Catalog &catalog,
                                     const CostParams &params);

/// Merge: collapses a directly adjacent pair of same-kind filters on the
/// same target — selects on one table concatenate their predicate lists,
/// detections on one column take the union of their object phrases
/// (duplicates by phrase similarity collapse to the parent's spelling).
std::vector<Rewrite> enumerate_merges(const PlanNode &plan, const SimilarityChecker &similarity);

/// Removal: drops the looser of two directly adjacent operators on the same
/// target — of two countings on one object the smaller threshold goes; a
/// detection covered by an adjacent counting (or by an adjacent detection
/// with a superset of objects) goes; of two select predicates on one column
/// where one implies the other the looser clause goes, deleting the select
/// node when it empties. Implied clauses inside a single select are dropped
/// the same way.
std::vector<Rewrite> enumerate_removals(const PlanNode &plan, const SimilarityChecker &similarity);

/// The full move set: all three enumerators, deduplicated by canonical
/// form, in deterministic (policy, site, result) order.
std::vector<Rewrite> all_rewrites(const PlanNode &plan, const Catalog &catalog,
                                  const CostParams &params, const SimilarityChecker &similarity);

} // namespace mmqo
