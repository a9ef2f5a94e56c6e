#pragma once

#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "mmqo/catalog.hpp"
#include "mmqo/error_monitor.hpp"
#include "mmqo/plan.hpp"
#include "mmqo/proposer.hpp"

namespace mmqo {

struct GcdOptions {
    int tolerance = 3;      // consecutive wrong optimizations before stopping
    int iteration_cap = 25; // hard liveness bound on top of the tolerance
    bool lite = false;      // error feedback only, no costs reach the proposer
};

/// Feedback strings of the optimization loop. The cost-carrying forms append
/// ": <cost>".
inline constexpr std::string_view kFeedbackImproved = "Improved";
inline constexpr std::string_view kFeedbackNoImprovement = "No improvement";
inline constexpr std::string_view kFeedbackInvalid = "No valid optimization generated";

std::string improved_feedback(double cost);
std::string no_improvement_feedback(double cost);

struct IterationRecord {
    int index = 0;
    std::string proposal_text;
    std::string proposer_id;
    std::string rationale;
    std::vector<PlanError> errors;
    std::optional<double> cost; // absent for invalid proposals
    std::string feedback;       // as issued to the proposer (post lite filter)
    bool accepted = false;      // entered the valid-plan history
};

struct GcdTrace {
    std::vector<IterationRecord> iterations;
    double initial_cost = 0;
    double best_cost = 0;
    int wrong_streak_at_exit = 0;

    std::string to_jsonl() const; // one JSON object per iteration
    std::string summary_json(const PlanPtr &best) const;
};

struct GcdResult {
    PlanPtr best;
    double best_cost = 0;
    GcdTrace trace;
};

/// Guided cost descent: repeatedly asks the proposer for an optimized plan,
/// validates it, estimates its cost, and feeds back one of the three
/// feedback forms; a valid plan joins the history and becomes the new
/// reference whether or not it improved, the best valid plan is tracked
/// separately, and the loop stops after `tolerance` consecutive wrong
/// optimizations (or at the iteration cap). Proposer transport failures
/// count as wrong optimizations. Throws InvalidInitialPlanError when the
/// initial plan fails the structural check.
GcdResult run_gcd(const PlanPtr &initial, Proposer &proposer, const Catalog &catalog,
                  const CostParams &params, const SimilarityChecker &similarity,
                  const GcdOptions &options = {});

struct AggregateCandidate {
    std::string plan_text;
    bool valid = false;
    double cost = 0; // ignored for invalid candidates (treated as infinite)
};

struct AggregateChoice {
    std::size_t index = 0; // into the candidate list
    PlanPtr plan;          // parsed winner (null when every candidate is invalid text)
};

/// Cost-based aggregation over sampled candidates: invalid candidates carry
/// infinite cost; valid candidates vote by canonical form; frequency ties
/// resolve to the cheapest candidate, remaining ties to the smallest
/// canonical serialization. A valid candidate always beats any invalid one.
AggregateChoice aggregate(const std::vector<AggregateCandidate> &candidates);

using ProposerFactory = std::function<std::unique_ptr<Proposer>(int run_index)>;

struct AggregatedResult {
    PlanPtr best;
    double best_cost = 0;
    std::vector<GcdTrace> traces;
};

/// Runs the loop k times (a fresh proposer per run so rule-based tie-breaks
/// can be seeded differently) and aggregates the per-run best plans. A run
/// that throws contributes the initial plan as an invalid candidate.
AggregatedResult run_aggregated(const PlanPtr &initial, const ProposerFactory &make_proposer,
                                int k, const Catalog &catalog, const CostParams &params,
                                const SimilarityChecker &similarity,
                                const GcdOptions &options = {});

} // namespace mmqo
