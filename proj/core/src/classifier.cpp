#include "mmqo/classifier.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <sstream>
#include <stdexcept>

#include "json.hpp"

#include "mmqo/cost.hpp"
#include "mmqo/errors.hpp"
#include "mmqo/plan_text.hpp"

namespace mmqo {

namespace {

std::string lower(std::string s) {
    std::transform(s.begin(), s.end(), s.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    return s;
}

std::optional<double> parse_tail_number(const std::string &line, std::size_t after) {
    std::size_t pos = after;
    while (pos < line.size() && (std::isspace(static_cast<unsigned char>(line[pos])))) ++pos;
    if (pos >= line.size()) return std::nullopt;
    try {
        return std::stod(line.substr(pos));
    } catch (const std::exception &) {
        return std::nullopt;
    }
}

} // namespace

PairVerdict parse_pair_verdict(const std::string &reply) {
    PairVerdict verdict;
    std::optional<PairVerdict::Which> faster;
    std::optional<double> time_first, time_second;
    std::vector<std::string> explanation_lines;

    std::istringstream in(reply);
    std::string line;
    while (std::getline(in, line)) {
        std::string folded = lower(line);
        if (auto pos = folded.find("faster:"); pos != std::string::npos) {
            std::string tail = folded.substr(pos + 7);
            if (tail.find("first") != std::string::npos) {
                faster = PairVerdict::Which::First;
            } else if (tail.find("second") != std::string::npos) {
                faster = PairVerdict::Which::Second;
            }
            continue;
        }
        if (auto pos = folded.find("time first:"); pos != std::string::npos) {
            time_first = parse_tail_number(line, pos + 11);
            continue;
        }
        if (auto pos = folded.find("time second:"); pos != std::string::npos) {
            time_second = parse_tail_number(line, pos + 12);
            continue;
        }
        explanation_lines.push_back(line);
    }

    if (!faster) throw MalformedReplyError("reply lacks a 'FASTER: first|second' line");
    verdict.faster = *faster;
    if (time_first && time_second) {
        verdict.estimated_times = std::make_pair(*time_first, *time_second);
        if (*time_first != *time_second) {
            bool first_faster = *time_first < *time_second;
            if (first_faster != (verdict.faster == PairVerdict::Which::First))
                throw MalformedReplyError("verdict contradicts the estimated times");
        }
    }
    for (std::size_t i = 0; i < explanation_lines.size(); ++i) {
        if (i) verdict.explanation += "\n";
        verdict.explanation += explanation_lines[i];
    }
    return verdict;
}

std::string build_initial_prompt(const Catalog &catalog) {
    std::string out;
    out += "You estimate and compare the execution time of multi-modal query plans.\n\n";
    out += "Plans are JSON trees of operators:\n";
    out += "  TableScan(T)\n";
    out += "  Select(T.col <comp> <value> [AND ...])\n";
    out += "  Join(T.col = U.col)\n";
    out += "  Object detection(T.col: are there XXX?)\n";
    out += "  Object counting(T.col: how many XXX are there?: <threshold>)\n";
    out += "Per-row operator cost ordering: (cheapest) Select < Join < Object detection < "
           "Object counting (most expensive).\n\n";

    out += "Database statistics:\n";
    std::vector<std::string> names = catalog.table_names();
    std::sort(names.begin(), names.end());
    std::int64_t image_rows = 0;
    for (const auto &name : names) {
        const TableStats &stats = *catalog.find(name);
        out += "- table " + name + ": " + std::to_string(stats.row_count) + " rows";
        if (!stats.unique_columns.empty()) {
            out += "; unique columns:";
            for (const auto &c : stats.unique_columns) out += " " + c;
        }
        if (!stats.image_columns.empty()) {
            out += "; image columns:";
            for (const auto &c : stats.image_columns) out += " " + c;
            image_rows += stats.row_count;
        }
        out += "\n";
    }
    out += "Images in the database: " + std::to_string(image_rows) + "\n\n";

    out += "For each pair of plans, reply with:\n";
    out += "1. a short explanation of your reasoning,\n";
    out += "2. lines 'TIME FIRST: <number>' and 'TIME SECOND: <number>' with your estimates,\n";
    out += "3. a final line 'FASTER: first' or 'FASTER: second'.\n";
    return out;
}

ClassifierSession ClassifierSession::start(const Catalog &catalog) {
    ClassifierSession session;
    session.initial_prompt_ = build_initial_prompt(catalog);
    return session;
}

std::string ClassifierSession::current_prompt() const {
    std::string out = initial_prompt_;
    std::size_t index = 1;
    for (const auto &rec : records_) {
        out += "\n--- Training pair " + std::to_string(index++) + " ---\n";
        out += "First plan: " + rec.plan_a + "\n";
        out += "Second plan: " + rec.plan_b + "\n";
        out += "Your answer was:\n" + rec.reply + "\n";
        out += "Judgment: " + std::string(rec.correct ? "correct" : "incorrect") + "\n";
        out += "Ground truth execution time: first " + render_cost(rec.true_time_a) +
               ", second " + render_cost(rec.true_time_b) + "\n";
    }
    return out;
}

void ClassifierSession::train_step(const std::string &plan_a, const std::string &plan_b,
                                   double true_time_a, double true_time_b, ChatClient &client) {
    if (frozen_) throw std::logic_error("classifier session is frozen; no more training");

    std::string prompt = current_prompt();
    prompt += "\n--- New pair ---\n";
    prompt += "First plan: " + plan_a + "\n";
    prompt += "Second plan: " + plan_b + "\n";
    prompt += "Estimate and compare the execution time of the two plans.\n";

    std::string reply = client.complete({{"user", prompt}}, 0.0);

    TrainingRecord rec;
    rec.plan_a = plan_a;
    rec.plan_b = plan_b;
    rec.reply = reply;
    rec.true_time_a = true_time_a;
    rec.true_time_b = true_time_b;
    try {
        PairVerdict verdict = parse_pair_verdict(reply);
        rec.verdict = verdict;
        if (true_time_a == true_time_b) {
            rec.correct = true; // tie: either verdict counts
        } else {
            bool first_faster = true_time_a < true_time_b;
            rec.correct = first_faster == (verdict.faster == PairVerdict::Which::First);
        }
    } catch (const MalformedReplyError &) {
        rec.correct = false;
    }
    records_.push_back(std::move(rec));
}

PairVerdict ClassifierSession::classify(const std::string &plan_a, const std::string &plan_b,
                                        ChatClient &client) const {
    if (!frozen_) throw std::logic_error("classifier session must be frozen before inference");
    std::string prompt = current_prompt();
    prompt += "\n--- Test pair ---\n";
    prompt += "First plan: " + plan_a + "\n";
    prompt += "Second plan: " + plan_b + "\n";
    prompt += "Estimate and compare the execution time of the two plans.\n";
    return parse_pair_verdict(client.complete({{"user", prompt}}, 0.0));
}

std::string ClassifierSession::to_json_text() const {
    nlohmann::ordered_json j;
    j["initial_prompt"] = initial_prompt_;
    j["frozen"] = frozen_;
    nlohmann::ordered_json records = nlohmann::ordered_json::array();
    for (const auto &rec : records_) {
        nlohmann::ordered_json r;
        r["plan_a"] = rec.plan_a;
        r["plan_b"] = rec.plan_b;
        r["reply"] = rec.reply;
        r["correct"] = rec.correct;
        r["true_time_a"] = rec.true_time_a;
        r["true_time_b"] = rec.true_time_b;
        records.push_back(std::move(r));
    }
    j["records"] = std::move(records);
    return j.dump(2);
}

ClassifierSession ClassifierSession::from_json_text(const std::string &text) {
    nlohmann::ordered_json j;
    try {
        j = nlohmann::ordered_json::parse(text);
    } catch (const nlohmann::json::parse_error &e) {
        throw ConfigError(std::string("classifier session: ") + e.what());
    }
    ClassifierSession session;
    session.initial_prompt_ = j.value("initial_prompt", std::string{});
    session.frozen_ = j.value("frozen", false);
    for (const auto &r : j.value("records", nlohmann::ordered_json::array())) {
        TrainingRecord rec;
        rec.plan_a = r.value("plan_a", std::string{});
        rec.plan_b = r.value("plan_b", std::string{});
        rec.reply = r.value("reply", std::string{});
        rec.correct = r.value("correct", false);
        rec.true_time_a = r.value("true_time_a", 0.0);
        rec.true_time_b = r.value("true_time_b", 0.0);
        try {
            rec.verdict = parse_pair_verdict(rec.reply);
        } catch (const MalformedReplyError &) {
        }
        session.records_.push_back(std::move(rec));
    }
    return session;
}

HarnessResult accuracy_harness(const std::vector<LabeledPair> &pairs, const Catalog &catalog,
                               const CostParams &params, ChatClient &client) {
    HarnessResult result;
    const std::size_t split = pairs.size() / 2; // 5:5 train/test split
    result.train_pairs = static_cast<int>(split);
    result.test_pairs = static_cast<int>(pairs.size() - split);

    ClassifierSession session = ClassifierSession::start(catalog);
    for (std::size_t i = 0; i < split; ++i) {
        session.train_step(pairs[i].plan_a, pairs[i].plan_b, pairs[i].true_time_a,
                           pairs[i].true_time_b, client);
    }
    session.freeze();
    result.session_json = session.to_json_text();

    int llm_correct = 0;
    int cost_correct = 0;
    for (std::size_t i = split; i < pairs.size(); ++i) {
        const LabeledPair &pair = pairs[i];
        const bool tie = pair.true_time_a == pair.true_time_b;
        const bool first_faster = pair.true_time_a < pair.true_time_b;

        try {
            PairVerdict verdict = session.classify(pair.plan_a, pair.plan_b, client);
            bool said_first = verdict.faster == PairVerdict::Which::First;
            if (tie || said_first == first_faster) ++llm_correct;
        } catch (const MalformedReplyError &) {
            // counts as incorrect
        }

        double cost_a = plan_cost(parse_plan(pair.plan_a), catalog, params);
        double cost_b = plan_cost(parse_plan(pair.plan_b), catalog, params);
        if (cost_a == cost_b) {
            // the estimator predicts a tie; right only when the truth ties too
            if (tie) ++cost_correct;
        } else if (tie || (cost_a < cost_b) == first_faster) {
            ++cost_correct;
        }
    }

    const int tests = std::max(1, result.test_pairs);
    result.llm_accuracy = static_cast<double>(llm_correct) / tests;
    result.cost_model_accuracy = static_cast<double>(cost_correct) / tests;
    return result;
}

} // namespace mmqo
