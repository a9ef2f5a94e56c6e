#pragma once

#include <cstdint>
#include <memory>
#include <string>

#include "mmqo/catalog.hpp"
#include "mmqo/chat_client.hpp"
#include "mmqo/plan.hpp"
#include "mmqo/prompts.hpp"
#include "mmqo/similarity.hpp"

namespace mmqo {

/// A candidate plan from a proposer. plan_text may be anything — deciding
/// validity is the error monitor's job, not the proposer's.
struct Proposal {
    std::string plan_text;
    std::string rationale;
    std::string proposer_id;
};

class Proposer {
  public:
    virtual ~Proposer() = default;
    virtual Proposal propose(const ProposalContext &ctx) = 0;
    virtual std::string id() const = 0;
};

/// Deterministic rule-based proposer: enumerates every applicable rewrite of
/// the latest plan and returns the cheapest strictly-improving one; ties
/// break by (policy, site) order, or by a seeded draw when seed != 0 so
/// aggregated runs diversify. Returns the plan unchanged when nothing
/// improves.
class GreedyRuleProposer : public Proposer {
  public:
    GreedyRuleProposer(const Catalog &catalog, const CostParams &params,
                       const SimilarityChecker &similarity, std::uint64_t seed = 0);
    Proposal propose(const ProposalContext &ctx) override;
    std::string id() const override { return "greedy-rules"; }

  private:
    const Catalog &catalog_;
    const CostParams &params_;
    const SimilarityChecker &similarity_;
    std::uint64_t seed_;
    std::uint64_t calls_ = 0;
};

/// Oracle proposer: breadth-first closure of the rewrite graph from the
/// latest plan, returning a global cost minimum (canonical form; ties break
/// by canonical serialization order). Throws BudgetExceededError when the
/// plan has more than `node_budget` non-scan operators.
class ExhaustiveRuleProposer : public Proposer {
  public:
    ExhaustiveRuleProposer(const Catalog &catalog, const CostParams &params,
                           const SimilarityChecker &similarity, int node_budget = 12);
    Proposal propose(const ProposalContext &ctx) override;
    std::string id() const override { return "exhaustive-rules"; }

    /// The closure minimum for a plan, exposed for the oracle comparisons.
    PlanPtr closure_minimum(const PlanPtr &start, std::size_t *states_explored = nullptr) const;

  private:
    const Catalog &catalog_;
    const CostParams &params_;
    const SimilarityChecker &similarity_;
    int node_budget_;
};

/// LLM-backed proposer: an instruction request followed by the optimization
/// request, both at the configured temperature; the first balanced JSON
/// object in the reply becomes the proposal. Throws TransportError /
/// MalformedReplyError; the optimization loop absorbs both as wrong
/// optimizations.
class LlmProposer : public Proposer {
  public:
    LlmProposer(ChatClient &client, double temperature = 0.7);
    Proposal propose(const ProposalContext &ctx) override;
    std::string id() const override { return "llm:" + client_.name(); }

  private:
    ChatClient &client_;
    double temperature_;
};

} // namespace mmqo
