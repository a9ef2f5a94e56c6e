#pragma once

#include <string>
#include <utility>
#include <vector>

#include "mmqo/plan.hpp"

namespace mmqo {

/// One worked optimization shown to the model.
struct PlanExample {
    PlanPtr initial;
    PlanPtr optimized;
    std::string note;
};

/// Everything the plan proposer sees for one step. history_plans and
/// history_costs run in parallel and hold only plans that passed the error
/// monitor. include_cost_feedback is false in lite mode: no cost may reach
/// the proposer through any field.
struct ProposalContext {
    std::vector<std::string> policies;
    std::vector<PlanExample> examples;
    std::vector<PlanPtr> history_plans;
    std::vector<double> history_costs;
    PlanPtr latest_plan;
    double latest_cost = 0;
    std::string feedback;
    bool include_cost_feedback = true;
};

/// The three optimization policies in prompt form.
const std::vector<std::string> &default_policies();

/// Default worked examples: visual-operator pairs only (a merge and a
/// removal); the model already knows how to handle plain SQL operators.
const std::vector<PlanExample> &default_examples();

/// Prompt asking the model to state the instruction it will follow.
std::string compose_instruction_request(const ProposalContext &ctx);

/// Full optimization prompt: role preamble, policies, operator grammar with
/// the cost ordering, examples, accepted-plan history (newest last, capped
/// at 8, costs only when include_cost_feedback), the feedback string, the
/// current plan, the model's own instruction, and the output directive.
std::string compose_optimization_request(const ProposalContext &ctx,
                                         const std::string &self_instruction);

/// Both prompts at once.
std::pair<std::string, std::string> compose_prompts(const ProposalContext &ctx,
                                                    const std::string &self_instruction = "");

/// Number of history entries a prompt renders (most recent first dropped).
inline constexpr std::size_t kPromptHistoryCap = 8;

} // namespace mmqo
