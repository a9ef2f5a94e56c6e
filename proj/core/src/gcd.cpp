#include "mmqo/gcd.hpp"

#include <algorithm>
#include <limits>
#include <map>

#include "json.hpp"

#include "mmqo/cost.hpp"
#include "mmqo/errors.hpp"
#include "mmqo/plan_text.hpp"

namespace mmqo {

std::string improved_feedback(double cost) {
    return std::string(kFeedbackImproved) + ": " + render_cost(cost);
}

std::string no_improvement_feedback(double cost) {
    return std::string(kFeedbackNoImprovement) + ": " + render_cost(cost);
}

namespace {

using ordered_json = nlohmann::ordered_json;

ordered_json record_to_json(const IterationRecord &rec) {
    ordered_json j;
    j["iteration"] = rec.index;
    j["proposer"] = rec.proposer_id;
    j["proposal"] = rec.proposal_text;
    ordered_json errs = ordered_json::array();
    for (const auto &e : rec.errors) errs.push_back(describe(e));
    j["errors"] = std::move(errs);
    if (rec.cost) {
        j["cost"] = *rec.cost;
    } else {
        j["cost"] = nullptr;
    }
    j["feedback"] = rec.feedback;
    j["accepted"] = rec.accepted;
    j["rationale"] = rec.rationale;
    return j;
}

} // namespace

std::string GcdTrace::to_jsonl() const {
    std::string out;
    for (const auto &rec : iterations) {
        out += record_to_json(rec).dump();
        out += "\n";
    }
    return out;
}

std::string GcdTrace::summary_json(const PlanPtr &best) const {
    ordered_json j;
    j["initial_cost"] = initial_cost;
    j["best_cost"] = best_cost;
    j["iterations"] = iterations.size();
    j["wrong_streak_at_exit"] = wrong_streak_at_exit;
    j["best_plan"] = ordered_json::parse(serialize_plan(best));
    return j.dump(2);
}

GcdResult run_gcd(const PlanPtr &initial, Proposer &proposer, const Catalog &catalog,
                  const CostParams &params, const SimilarityChecker &similarity,
                  const GcdOptions &options) {
    if (!initial) throw InvalidInitialPlanError("initial plan is empty");
    {
        std::vector<PlanError> errors = check_structure(*initial, catalog);
        if (!errors.empty())
            throw InvalidInitialPlanError("initial plan is structurally invalid: " +
                                          describe(errors.front()));
    }

    const double initial_cost = plan_cost(initial, catalog, params);
    PlanPtr latest = initial;       // p: latest valid plan
    double latest_cost = initial_cost; // c
    PlanPtr best = initial;         // p*
    double best_cost = initial_cost;   // c*
    std::vector<PlanPtr> history_plans;
    std::vector<double> history_costs;
    std::string feedback;
    int wrong = 0; // n_w

    GcdTrace trace;
    trace.initial_cost = initial_cost;

    int iteration = 0;
    while (wrong < options.tolerance && iteration < options.iteration_cap) {
        ++iteration;

        ProposalContext ctx;
        ctx.policies = default_policies();
        ctx.examples = default_examples();
        ctx.history_plans = history_plans;
        ctx.history_costs = history_costs;
        ctx.latest_plan = latest;
        ctx.latest_cost = latest_cost;
        ctx.feedback = feedback;
        ctx.include_cost_feedback = !options.lite;

        IterationRecord rec;
        rec.index = iteration;

        Proposal proposal;
        bool transport_failure = false;
        try {
            proposal = proposer.propose(ctx);
        } catch (const Error &e) {
            transport_failure = true;
            rec.proposer_id = proposer.id();
            rec.proposal_text = "";
            rec.errors.push_back({ErrorKind::Unparseable, {},
                                  std::string("proposer failed: ") + e.what()});
        }
        if (!transport_failure) {
            rec.proposer_id = proposal.proposer_id;
            rec.proposal_text = proposal.plan_text;
            rec.rationale = proposal.rationale;
            rec.errors = check_error_text(proposal.plan_text, *initial, catalog, similarity);
        }

        if (rec.errors.empty()) {
            PlanPtr candidate = parse_plan(rec.proposal_text);
            double cost = plan_cost(candidate, catalog, params);
            rec.cost = cost;
            rec.accepted = true;
            if (cost >= latest_cost - kCostEqualityTolerance) {
                ++wrong;
                feedback = no_improvement_feedback(cost);
            } else {
                if (cost < best_cost) {
                    best = candidate;
                    best_cost = cost;
                }
                wrong = 0;
                feedback = improved_feedback(cost);
            }
            latest = candidate;
            latest_cost = cost;
            history_plans.push_back(candidate);
            history_costs.push_back(cost);
        } else {
            ++wrong;
            feedback = std::string(kFeedbackInvalid);
        }

        if (options.lite && rec.errors.empty()) {
            // lite mode withholds cost feedback; only error feedback flows
            feedback.clear();
        }
        rec.feedback = feedback;
        trace.iterations.push_back(std::move(rec));
    }

    trace.best_cost = best_cost;
    trace.wrong_streak_at_exit = wrong;
    return {best, best_cost, std::move(trace)};
}

AggregateChoice aggregate(const std::vector<AggregateCandidate> &candidates) {
    struct Parsed {
        std::size_t index;
        PlanPtr plan;
        std::string key;
        double cost;
    };
    std::vector<Parsed> valid;
    for (std::size_t i = 0; i < candidates.size(); ++i) {
        if (!candidates[i].valid) continue;
        PlanPtr plan;
        try {
            plan = parse_plan(candidates[i].plan_text);
        } catch (const ParseError &) {
            continue; // marked valid but unreadable: treat as invalid
        }
        valid.push_back({i, plan, canonical_key(plan), candidates[i].cost});
    }

    if (valid.empty()) {
        // Everyone is invalid: deterministic pick by text so callers still
        // get a stable answer (they normally fall back to the initial plan).
        std::size_t pick = 0;
        for (std::size_t i = 1; i < candidates.size(); ++i) {
            if (candidates[i].plan_text < candidates[pick].plan_text) pick = i;
        }
        return {pick, nullptr};
    }

    std::map<std::string, int> frequency;
    for (const auto &v : valid) ++frequency[v.key];

    const Parsed *winner = nullptr;
    int winner_freq = 0;
    for (const auto &v : valid) {
        int freq = frequency[v.key];
        if (!winner) {
            winner = &v;
            winner_freq = freq;
            continue;
        }
        if (freq != winner_freq) {
            if (freq > winner_freq) {
                winner = &v;
                winner_freq = freq;
            }
            continue;
        }
        // frequency tie: cheaper candidate, then smaller canonical form
        if (v.cost < winner->cost - kCostEqualityTolerance ||
            (std::abs(v.cost - winner->cost) <= kCostEqualityTolerance &&
             v.key < winner->key)) {
            winner = &v;
        }
    }
    return {winner->index, winner->plan};
}

AggregatedResult run_aggregated(const PlanPtr &initial, const ProposerFactory &make_proposer,
                                int k, const Catalog &catalog, const CostParams &params,
                                const SimilarityChecker &similarity, const GcdOptions &options) {
    AggregatedResult result;
    std::vector<AggregateCandidate> candidates;
    std::vector<PlanPtr> plans;

    for (int run = 0; run < k; ++run) {
        try {
            std::unique_ptr<Proposer> proposer = make_proposer(run);
            GcdResult r = run_gcd(initial, *proposer, catalog, params, similarity, options);
            candidates.push_back({serialize_plan(r.best), true, r.best_cost});
            plans.push_back(r.best);
            result.traces.push_back(std::move(r.trace));
        } catch (const std::exception &) {
            // a failed run contributes its initial plan as an invalid candidate
            candidates.push_back({serialize_plan(initial), false,
                                  std::numeric_limits<double>::infinity()});
            plans.push_back(nullptr);
            result.traces.emplace_back();
        }
    }

    AggregateChoice choice = aggregate(candidates);
    if (choice.plan) {
        result.best = plans[choice.index] ? plans[choice.index] : choice.plan;
        result.best_cost = candidates[choice.index].cost;
    } else {
        result.best = initial;
        result.best_cost = plan_cost(initial, catalog, params);
    }
    return result;
}

} // namespace mmqo
