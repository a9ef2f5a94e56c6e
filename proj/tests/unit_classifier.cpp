#include "doctest.h"

#include <stdexcept>

#include "mmqo/classifier.hpp"
#include "mmqo/cost.hpp"
#include "mmqo/errors.hpp"
#include "mmqo/generator.hpp"
#include "mmqo/plan_text.hpp"
#include "mmqo/simulator.hpp"

#include "support/fixtures.hpp"

using namespace mmqo;

namespace {

std::string good_reply(double a, double b) {
    std::string out = "The first plan filters earlier, so it processes fewer rows.\n";
    out += "TIME FIRST: " + render_cost(a) + "\n";
    out += "TIME SECOND: " + render_cost(b) + "\n";
    out += std::string("FASTER: ") + (a <= b ? "first" : "second") + "\n";
    return out;
}

} // namespace

TEST_CASE("the initial prompt lists statistics verbatim and deterministically") {
    Catalog catalog = test::small_catalog();
    std::string prompt = build_initial_prompt(catalog);
    CHECK(prompt.find("1000 rows") != std::string::npos);
    CHECK(prompt.find("2000 rows") != std::string::npos);
    CHECK(prompt.find("10000 rows") != std::string::npos);
    CHECK(prompt.find("unique columns: k") != std::string::npos);
    CHECK(prompt.find("image columns: img") != std::string::npos);
    CHECK(prompt.find("Select < Join < Object detection < Object counting") != std::string::npos);
    CHECK(prompt == build_initial_prompt(catalog));

    Catalog empty;
    std::string bare = build_initial_prompt(empty);
    CHECK(bare.find("Images in the database: 0") != std::string::npos);
}

TEST_CASE("verdict parsing accepts the pinned format and rejects contradictions") {
    PairVerdict v = parse_pair_verdict(good_reply(10, 20));
    CHECK(v.faster == PairVerdict::Which::First);
    REQUIRE(v.estimated_times.has_value());
    CHECK(v.estimated_times->first == 10);
    CHECK(v.estimated_times->second == 20);
    CHECK(!v.explanation.empty());

    PairVerdict second = parse_pair_verdict("FASTER: second");
    CHECK(second.faster == PairVerdict::Which::Second);
    CHECK(!second.estimated_times.has_value());

    CHECK_THROWS_AS((void)parse_pair_verdict("no verdict here"), MalformedReplyError);
    CHECK_THROWS_AS(
        (void)parse_pair_verdict("TIME FIRST: 30\nTIME SECOND: 10\nFASTER: first"),
        MalformedReplyError);
}

TEST_CASE("training appends records; freezing stops mutation") {
    Catalog catalog = test::small_catalog();
    ClassifierSession session = ClassifierSession::start(catalog);

    std::string a = serialize_plan(test::counting_pair_optimized());
    std::string b = serialize_plan(test::counting_pair_initial());

    ScriptedChatClient client;
    for (int i = 0; i < 10; ++i) client.push_reply(good_reply(10, 20));

    std::size_t last_len = session.current_prompt().size();
    for (int i = 0; i < 10; ++i) {
        session.train_step(a, b, 10, 20, client);
        std::size_t len = session.current_prompt().size();
        CHECK(len > last_len); // the prompt only ever grows
        last_len = len;
    }
    REQUIRE(session.records().size() == 10);
    for (const auto &rec : session.records()) CHECK(rec.correct);

    // history blocks render in order
    std::string prompt = session.current_prompt();
    CHECK(prompt.find("Training pair 1") != std::string::npos);
    CHECK(prompt.find("Training pair 10") != std::string::npos);
    CHECK(prompt.find("Training pair 11") == std::string::npos);

    session.freeze();
    CHECK_THROWS_AS(session.train_step(a, b, 1, 2, client), std::logic_error);

    ScriptedChatClient infer;
    infer.push_reply(good_reply(5, 9));
    PairVerdict v = session.classify(a, b, infer);
    CHECK(v.faster == PairVerdict::Which::First);
    CHECK(session.current_prompt().size() == last_len); // no growth after freeze
}

TEST_CASE("wrong and malformed replies are recorded, not dropped") {
    Catalog catalog = test::small_catalog();
    ClassifierSession session = ClassifierSession::start(catalog);
    std::string a = serialize_plan(test::counting_pair_optimized());
    std::string b = serialize_plan(test::counting_pair_initial());

    ScriptedChatClient client;
    client.push_reply("TIME FIRST: 50\nTIME SECOND: 20\nFASTER: second"); // wrong verdict
    client.push_reply("I refuse to answer in the requested format.");     // malformed

    session.train_step(a, b, 10, 20, client); // truth: first faster
    session.train_step(a, b, 10, 20, client);
    REQUIRE(session.records().size() == 2);
    CHECK(!session.records()[0].correct);
    CHECK(session.records()[0].verdict.has_value());
    CHECK(!session.records()[1].correct);
    CHECK(!session.records()[1].verdict.has_value());
    CHECK(session.records()[1].reply.find("refuse") != std::string::npos);

    // an unfrozen session refuses inference
    ScriptedChatClient infer;
    CHECK_THROWS_AS((void)session.classify(a, b, infer), std::logic_error);
}

TEST_CASE("ties in the ground truth accept either verdict") {
    Catalog catalog = test::small_catalog();
    ClassifierSession session = ClassifierSession::start(catalog);
    ScriptedChatClient client;
    client.push_reply("FASTER: second");
    session.train_step("{}", "{}", 7, 7, client);
    CHECK(session.records()[0].correct);
}

TEST_CASE("sessions persist and reload through JSON") {
    Catalog catalog = test::small_catalog();
    ClassifierSession session = ClassifierSession::start(catalog);
    ScriptedChatClient client;
    client.push_reply(good_reply(1, 2));
    session.train_step("planA", "planB", 1, 2, client);
    session.freeze();

    ClassifierSession back = ClassifierSession::from_json_text(session.to_json_text());
    CHECK(back.frozen());
    REQUIRE(back.records().size() == 1);
    CHECK(back.records()[0].plan_a == "planA");
    CHECK(back.records()[0].correct);
    CHECK(back.current_prompt() == session.current_prompt());
}

TEST_CASE("accuracy harness: scripted clients and the exact cost model") {
    Catalog catalog = example_catalog();
    CostParams params = CostParams::defaults();
    SimProfile profile = SimProfile::matched_profile(params);

    GeneratorLimits limits;
    std::vector<PlanPtr> queries = generate_corpus(55, 30, catalog, limits);
    std::vector<LabeledPair> pairs;
    for (std::size_t i = 0; i + 1 < queries.size(); i += 2) {
        LabeledPair pair;
        pair.plan_a = serialize_plan(queries[i]);
        pair.plan_b = serialize_plan(queries[i + 1]);
        pair.true_time_a = simulate_time(queries[i], catalog, profile);
        pair.true_time_b = simulate_time(queries[i + 1], catalog, profile);
        pairs.push_back(std::move(pair));
    }

    // an always-correct oracle client scores 1.0
    ScriptedChatClient oracle;
    for (std::size_t i = 0; i < pairs.size(); ++i) {
        oracle.push_handler([&pairs, i](const std::vector<ChatMessage> &) {
            // the prompt order matches the pair order: train then test
            const LabeledPair &p = pairs[i];
            return good_reply(p.true_time_a, p.true_time_b);
        });
    }
    HarnessResult result = accuracy_harness(pairs, catalog, params, oracle);
    CHECK(result.llm_accuracy == doctest::Approx(1.0));
    // matched mode makes the estimated cost the exact ground truth
    CHECK(result.cost_model_accuracy == doctest::Approx(1.0));
    CHECK(result.train_pairs + result.test_pairs == static_cast<int>(pairs.size()));

    // a deterministic "coin flip" client just runs; accuracy is recorded
    ScriptedChatClient flip;
    for (std::size_t i = 0; i < pairs.size(); ++i) {
        flip.push_reply(i % 2 ? "FASTER: first" : "FASTER: second");
    }
    HarnessResult noisy = accuracy_harness(pairs, catalog, params, flip);
    CHECK(noisy.llm_accuracy >= 0.0);
    CHECK(noisy.llm_accuracy <= 1.0);
    CHECK(noisy.cost_model_accuracy == doctest::Approx(1.0));
}
