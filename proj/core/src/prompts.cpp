#include "mmqo/prompts.hpp"

#include "mmqo/cost.hpp"
#include "mmqo/plan_text.hpp"

namespace mmqo {

const std::vector<std::string> &default_policies() {
    static const std::vector<std::string> policies = {
        "Movement: expensive operators belong near the root of the plan tree and cheap "
        "operators near the leaves, so the cheap ones shrink the data before the expensive "
        "ones touch it.",
        "Merge: same-kind filters on the same target that are direct parent and child can be "
        "combined into one operator carrying all of their conditions.",
        "Removal: when two operators on the same target are direct parent and child and one "
        "condition is looser than the other, the looser operator can be dropped outright.",
    };
    return policies;
}

namespace {

PlanPtr example_scan() {
    return scan("photos");
}

ColumnRef example_image_column() {
    return ColumnRef{"photos", "image"};
}

std::vector<PlanExample> build_examples() {
    std::vector<PlanExample> out;

    // merge: two adjacent detections on one column become one conjunction
    out.push_back({detect(detect(example_scan(), example_image_column(), {"women"}),
                          example_image_column(), {"men"}),
                   detect(example_scan(), example_image_column(), {"men", "women"}),
                   "two object detections on the same column merge into one"});

    // removal: a detection subsumed by a counting of the same object goes
    out.push_back({count(detect(example_scan(), example_image_column(), {"man"}),
                         example_image_column(), "men", 2),
                   count(example_scan(), example_image_column(), "men", 2),
                   "a counting with a non-negative threshold already guarantees the detection"});
    return out;
}

std::string grammar_block() {
    return "Plans are JSON trees. Every node is an object with exactly the keys \"Operator\", "
           "\"Left_child\" and \"Right_child\"; an absent child is null.\n"
           "Operator strings:\n"
           "  TableScan(T)\n"
           "  Select(T.col <comp> <value> [AND ...])   comparators: = != < <= > >=\n"
           "  Join(T.col = U.col)\n"
           "  Object detection(T.col: are there XXX [AND YYY]?)\n"
           "  Object counting(T.col: how many XXX are there?: <threshold>)\n"
           "Per-row operator cost ordering: (cheapest) Select < Join < Object detection < "
           "Object counting (most expensive).\n";
}

void append_policies(std::string &out, const std::vector<std::string> &policies) {
    out += "## Optimization policies\n";
    for (std::size_t i = 0; i < policies.size(); ++i) {
        out += std::to_string(i + 1) + ". " + policies[i] + "\n";
    }
}

} // namespace

const std::vector<PlanExample> &default_examples() {
    static const std::vector<PlanExample> examples = build_examples();
    return examples;
}

std::string compose_instruction_request(const ProposalContext &ctx) {
    std::string out;
    out += "You are a query optimizer for plans that mix SQL operators with visual operators "
           "over image columns.\n\n";
    append_policies(out, ctx.policies);
    out += "\n## Current plan\n";
    out += serialize_plan(ctx.latest_plan);
    out += "\n\nState, in at most three sentences, the instruction you will follow to optimize "
           "this plan. Do not output a plan yet.\n";
    return out;
}

std::string compose_optimization_request(const ProposalContext &ctx,
                                         const std::string &self_instruction) {
    std::string out;
    out += "You are a query optimizer for plans that mix SQL operators with visual operators "
           "over image columns. Rewrite the current plan into an equivalent plan that runs "
           "faster.\n\n";

    append_policies(out, ctx.policies);

    out += "\n## Plan format\n";
    out += grammar_block();

    if (!ctx.examples.empty()) {
        out += "\n## Examples\n";
        std::size_t index = 1;
        for (const auto &example : ctx.examples) {
            out += "Example " + std::to_string(index++);
            if (!example.note.empty()) out += " (" + example.note + ")";
            out += ":\n";
            out += "initial_plan = " + serialize_plan(example.initial) + "\n";
            out += "optimized_plan = " + serialize_plan(example.optimized) + "\n";
        }
    }

    if (!ctx.history_plans.empty()) {
        out += "\n## Accepted plans so far (most recent last)\n";
        std::size_t start = ctx.history_plans.size() > kPromptHistoryCap
                                ? ctx.history_plans.size() - kPromptHistoryCap
                                : 0;
        for (std::size_t i = start; i < ctx.history_plans.size(); ++i) {
            out += std::to_string(i + 1) + ". ";
            if (ctx.include_cost_feedback && i < ctx.history_costs.size()) {
                out += "cost " + render_cost(ctx.history_costs[i]) + ": ";
            }
            out += serialize_plan(ctx.history_plans[i]) + "\n";
        }
    }

    if (!ctx.feedback.empty()) {
        out += "\n## Feedback from the supervisor\n";
        out += ctx.feedback + "\n";
    }

    out += "\n## Current plan to optimize\n";
    out += serialize_plan(ctx.latest_plan) + "\n";
    if (ctx.include_cost_feedback) {
        out += "Estimated cost of this plan: " + render_cost(ctx.latest_cost) + "\n";
    }

    if (!self_instruction.empty()) {
        out += "\n## Your stated instruction\n";
        out += self_instruction + "\n";
    }

    out += "\nReply with exactly one JSON plan document in the format above and nothing "
           "else.\n";
    return out;
}

std::pair<std::string, std::string> compose_prompts(const ProposalContext &ctx,
                                                    const std::string &self_instruction) {
    return {compose_instruction_request(ctx),
            compose_optimization_request(ctx, self_instruction)};
}

} // namespace mmqo
