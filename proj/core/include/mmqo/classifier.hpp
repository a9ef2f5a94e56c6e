#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "mmqo/catalog.hpp"
#include "mmqo/chat_client.hpp"
#include "mmqo/plan.hpp"

namespace mmqo {

/// The model's answer for one plan pair. The reply must end with a line
/// "FASTER: first" or "FASTER: second"; estimated times are optional
/// "TIME FIRST:" / "TIME SECOND:" lines and, when both are present and
/// differ, must agree with the verdict.
struct PairVerdict {
    enum class Which { First, Second };
    Which faster = Which::First;
    std::optional<std::pair<double, double>> estimated_times;
    std::string explanation;
};

PairVerdict parse_pair_verdict(const std::string &reply); // throws MalformedReplyError

struct TrainingRecord {
    std::string plan_a;
    std::string plan_b;
    std::string reply;              // raw model output, kept verbatim
    std::optional<PairVerdict> verdict; // absent when the reply was malformed
    bool correct = false;
    double true_time_a = 0;
    double true_time_b = 0;
};

/// Prompt-accumulating pairwise execution-time classifier. Training appends
/// each exchange (with the correctness judgment and ground truth) to the
/// prompt; freezing stops accumulation for inference.
class ClassifierSession {
  public:
    static ClassifierSession start(const Catalog &catalog);

    const std::string &initial_prompt() const { return initial_prompt_; }
    const std::vector<TrainingRecord> &records() const { return records_; }
    bool frozen() const { return frozen_; }
    void freeze() { frozen_ = true; }

    /// Prompt as it stands: initial prompt plus one history block per
    /// training record, in order.
    std::string current_prompt() const;

    /// Asks the client to compare the pair, judges the verdict against the
    /// true times (ties count as correct either way) and appends the record.
    /// A malformed reply is recorded as incorrect with the raw text kept.
    /// Throws std::logic_error when the session is frozen.
    void train_step(const std::string &plan_a, const std::string &plan_b, double true_time_a,
                    double true_time_b, ChatClient &client);

    /// One inference query; the session must be frozen and is not mutated.
    PairVerdict classify(const std::string &plan_a, const std::string &plan_b,
                         ChatClient &client) const;

    std::string to_json_text() const;
    static ClassifierSession from_json_text(const std::string &text);

  private:
    std::string initial_prompt_;
    std::vector<TrainingRecord> records_;
    bool frozen_ = false;
};

/// Deterministic classifier prompt: operator grammar, the cost ordering and
/// the catalog statistics (row counts, image volume, column uniqueness).
std::string build_initial_prompt(const Catalog &catalog);

struct LabeledPair {
    std::string plan_a;
    std::string plan_b;
    double true_time_a = 0;
    double true_time_b = 0;
};

struct HarnessResult {
    double llm_accuracy = 0;
    double cost_model_accuracy = 0;
    int train_pairs = 0;
    int test_pairs = 0;
    std::string session_json; // trained session, persisted for resume
};

/// Trains on the first half of the pairs, classifies the second half, and
/// scores the cost model (plan_cost comparison) on the same test pairs.
/// Ties in true time count any verdict as correct.
HarnessResult accuracy_harness(const std::vector<LabeledPair> &pairs, const Catalog &catalog,
                               const CostParams &params, ChatClient &client);

} // namespace mmqo
