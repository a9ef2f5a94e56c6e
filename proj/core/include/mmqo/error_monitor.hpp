#pragma once

#include <string>
#include <vector>

#include "mmqo/catalog.hpp"
#include "mmqo/plan.hpp"
#include "mmqo/similarity.hpp"

namespace mmqo {

enum class ErrorKind : std::uint8_t {
    Arity,             // wrong child count for the operator kind
    UnknownTable,      // table absent from the catalog
    UnknownColumn,     // column absent from its table
    PredicateScope,    // predicate/key/target table not scanned in the subtree
    NonImageColumn,    // visual operator targeting a non-image column
    NegativeThreshold, // counting threshold below zero
    LeafNotScan,       // childless node that is not a table scan
    Unparseable,       // the candidate text never became a tree
    Inequivalent,      // structurally fine but not equivalent to the initial plan
};
inline constexpr std::size_t kErrorKindCount = 9;

std::string_view error_kind_name(ErrorKind kind);

struct PlanError {
    ErrorKind kind{};
    NodePath location; // resolves to a node except for Unparseable/Inequivalent
    std::string detail;
};

std::string describe(const PlanError &error);
bool contains_kind(const std::vector<PlanError> &errors, ErrorKind kind);

/// Pattern-matches the tree against the known defect shapes: arity
/// violations, unknown tables/columns, out-of-scope predicate targets,
/// visual operators on non-image columns, negative thresholds, non-scan
/// leaves. Empty result means structurally valid.
std::vector<PlanError> check_structure(const PlanNode &plan, const Catalog &catalog);

/// Decides whether `candidate` is equivalent to `initial`: same scanned
/// tables, same join-key pairs, same relational predicates after dropping
/// any predicate implied by a stronger one on its own side, and visual
/// constraints matched pairwise by phrase similarity (a counting covers a
/// detection of the same object; of two countings on one object the larger
/// threshold subsumes the smaller). Both plans must already be structurally
/// valid. Returns [] or a single Inequivalent error naming the first
/// unmatched constraint.
std::vector<PlanError> check_equivalence(const PlanNode &initial, const PlanNode &candidate,
                                         const Catalog &catalog,
                                         const SimilarityChecker &similarity);

/// The full validity check run on every candidate: structural errors first,
/// equivalence only when the structure is clean.
std::vector<PlanError> check_error(const PlanNode &candidate, const PlanNode &initial,
                                   const Catalog &catalog, const SimilarityChecker &similarity);

/// Same, starting from candidate text; parse failure yields [Unparseable].
std::vector<PlanError> check_error_text(const std::string &candidate_text, const PlanNode &initial,
                                        const Catalog &catalog,
                                        const SimilarityChecker &similarity);

/// True when a numeric-bound implication holds: any row satisfying `strong`
/// also satisfies `weak`. Same-column predicates only; >/>= and </<= chains
/// plus equality against a satisfied bound. Exposed for the rewrite rules.
bool predicate_implies(const SimplePredicate &strong, const SimplePredicate &weak);

} // namespace mmqo
