#include "mmqo/proposer.hpp"

#include <algorithm>
#include <deque>
#include <map>
#include <random>

#include "mmqo/cost.hpp"
#include "mmqo/errors.hpp"
#include "mmqo/plan_text.hpp"
#include "mmqo/rewrite.hpp"

namespace mmqo {

GreedyRuleProposer::GreedyRuleProposer(const Catalog &catalog, const CostParams &params,
                                       const SimilarityChecker &similarity, std::uint64_t seed)
    : catalog_(catalog), params_(params), similarity_(similarity), seed_(seed) {}

Proposal GreedyRuleProposer::propose(const ProposalContext &ctx) {
    ++calls_;
    const PlanPtr &latest = ctx.latest_plan;
    double latest_cost = plan_cost(latest, catalog_, params_);

    std::vector<Rewrite> rewrites = all_rewrites(*latest, catalog_, params_, similarity_);

    std::vector<double> costs(rewrites.size());
    double min_cost = latest_cost;
    for (std::size_t i = 0; i < rewrites.size(); ++i) {
        costs[i] = plan_cost(rewrites[i].result, catalog_, params_);
        min_cost = std::min(min_cost, costs[i]);
    }
    if (rewrites.empty() || min_cost >= latest_cost - kCostEqualityTolerance) {
        return {serialize_plan(latest), "no rewrite improves the estimated cost", id()};
    }

    std::vector<std::size_t> best; // every rewrite within tolerance of the minimum
    for (std::size_t i = 0; i < rewrites.size(); ++i) {
        if (costs[i] <= min_cost + kCostEqualityTolerance) best.push_back(i);
    }

    std::size_t pick = best.front(); // (policy, site) order — all_rewrites is sorted
    if (seed_ != 0 && best.size() > 1) {
        std::mt19937_64 rng(seed_ * 0x9e3779b97f4a7c15ULL + calls_);
        pick = best[rng() % best.size()];
    }
    const Rewrite &chosen = rewrites[pick];
    return {serialize_plan(chosen.result),
            std::string(policy_name(chosen.policy)) + " at " + path_to_string(chosen.site) +
                ": " + chosen.description,
            id()};
}

ExhaustiveRuleProposer::ExhaustiveRuleProposer(const Catalog &catalog, const CostParams &params,
                                               const SimilarityChecker &similarity,
                                               int node_budget)
    : catalog_(catalog), params_(params), similarity_(similarity), node_budget_(node_budget) {}

PlanPtr ExhaustiveRuleProposer::closure_minimum(const PlanPtr &start,
                                                std::size_t *states_explored) const {
    OperatorCensus census = operator_census(*start);
    if (census.non_scan_total() > node_budget_) {
        throw BudgetExceededError("plan has " + std::to_string(census.non_scan_total()) +
                                  " operators, budget is " + std::to_string(node_budget_));
    }

    PlanPtr start_canonical = canonicalize(*start);
    std::string start_key = serialize_plan(start_canonical);

    std::map<std::string, PlanPtr> visited; // canonical key -> canonical plan
    visited.emplace(start_key, start_canonical);
    std::deque<PlanPtr> frontier{start_canonical};

    std::string best_key = start_key;
    double best_cost = plan_cost(start_canonical, catalog_, params_);

    while (!frontier.empty()) {
        PlanPtr current = frontier.front();
        frontier.pop_front();
        for (const Rewrite &rw : all_rewrites(*current, catalog_, params_, similarity_)) {
            PlanPtr next = canonicalize(*rw.result);
            std::string key = serialize_plan(next);
            if (!visited.emplace(key, next).second) continue;
            frontier.push_back(next);
            double cost = plan_cost(next, catalog_, params_);
            if (cost < best_cost - kCostEqualityTolerance ||
                (cost <= best_cost + kCostEqualityTolerance && key < best_key)) {
                best_cost = cost;
                best_key = key;
            }
        }
    }
    if (states_explored) *states_explored = visited.size();
    return visited.at(best_key);
}

Proposal ExhaustiveRuleProposer::propose(const ProposalContext &ctx) {
    std::size_t states = 0;
    PlanPtr best = closure_minimum(ctx.latest_plan, &states);
    return {serialize_plan(best),
            "breadth-first closure over " + std::to_string(states) + " plans", id()};
}

LlmProposer::LlmProposer(ChatClient &client, double temperature)
    : client_(client), temperature_(temperature) {}

Proposal LlmProposer::propose(const ProposalContext &ctx) {
    std::string instruction_request = compose_instruction_request(ctx);
    std::string instruction =
        client_.complete({{"user", instruction_request}}, temperature_);

    std::string optimization_request = compose_optimization_request(ctx, instruction);
    std::string reply = client_.complete({{"user", optimization_request}}, temperature_);

    std::optional<std::string> plan_text = extract_first_json_object(reply);
    if (!plan_text) {
        throw MalformedReplyError("no JSON plan document in the reply: " +
                                  reply.substr(0, 200));
    }
    return {*plan_text, "instruction: " + instruction + "\nreply: " + reply, id()};
}

} // namespace mmqo
