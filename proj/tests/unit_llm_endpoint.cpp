#include "doctest.h"

#include <atomic>
#include <thread>

#include "httplib.h"
#include "json.hpp"

#include "mmqo/chat_client.hpp"
#include "mmqo/cost.hpp"
#include "mmqo/errors.hpp"
#include "mmqo/gcd.hpp"
#include "mmqo/plan_text.hpp"
#include "mmqo/proposer.hpp"

#include "support/fixtures.hpp"

using namespace mmqo;

namespace {

std::string chat_body(const std::string &content) {
    nlohmann::json j;
    j["choices"] = nlohmann::json::array({{{"message", {{"role", "assistant"},
                                                        {"content", content}}}}});
    return j.dump();
}

/// Local chat endpoint with a scripted reply sequence.
class MockEndpoint {
  public:
    explicit MockEndpoint(std::vector<std::string> replies, int fail_every = 0)
        : replies_(std::move(replies)), fail_every_(fail_every) {
        server_.Post("/v1/chat/completions",
                     [this](const httplib::Request &req, httplib::Response &res) {
                         int n = ++calls_;
                         last_request_ = req.body;
                         if (fail_every_ > 0 && n % fail_every_ == 0) {
                             res.status = 500;
                             res.set_content("internal error", "text/plain");
                             return;
                         }
                         std::size_t i = std::min(static_cast<std::size_t>(n - 1),
                                                  replies_.size() - 1);
                         res.set_content(chat_body(replies_[i]), "application/json");
                     });
        port_ = server_.bind_to_any_port("127.0.0.1");
        thread_ = std::thread([this] { server_.listen_after_bind(); });
        server_.wait_until_ready();
    }

    ~MockEndpoint() {
        server_.stop();
        thread_.join();
    }

    int port() const { return port_; }
    int calls() const { return calls_; }
    std::string last_request() const { return last_request_; }

  private:
    httplib::Server server_;
    std::vector<std::string> replies_;
    int fail_every_;
    std::thread thread_;
    int port_ = 0;
    std::atomic<int> calls_{0};
    std::string last_request_;
};

LlmEndpointConfig config_for(const MockEndpoint &endpoint) {
    LlmEndpointConfig config;
    config.base_url = "http://127.0.0.1:" + std::to_string(endpoint.port());
    config.model = "mock-model";
    config.temperature = 0.7;
    return config;
}

} // namespace

TEST_CASE("http client round-trips an OpenAI-style completion") {
    MockEndpoint endpoint({"hello from the mock"});
    HttpChatClient client(config_for(endpoint));
    std::string reply = client.complete({{"user", "ping"}}, 0.7);
    CHECK(reply == "hello from the mock");

    // temperature and model land in the request body
    nlohmann::json body = nlohmann::json::parse(endpoint.last_request());
    CHECK(body["model"] == "mock-model");
    CHECK(body["temperature"] == doctest::Approx(0.7));
    CHECK(body["messages"][0]["content"] == "ping");
}

TEST_CASE("http failures surface as TransportError") {
    MockEndpoint endpoint({"unused"}, 1); // every call fails
    HttpChatClient client(config_for(endpoint));
    CHECK_THROWS_AS((void)client.complete({{"user", "ping"}}, 0.0), TransportError);

    LlmEndpointConfig dead;
    dead.base_url = "http://127.0.0.1:1"; // nothing listens there
    dead.timeout_seconds = 1;
    HttpChatClient unreachable(dead);
    CHECK_THROWS_AS((void)unreachable.complete({{"user", "ping"}}, 0.0), TransportError);
}

TEST_CASE("the optimization loop runs end to end against the mock endpoint") {
    Catalog catalog = test::small_catalog();
    CostParams params = CostParams::defaults();
    SimilarityChecker similarity;
    PlanPtr p0 = test::counting_pair_initial();
    std::string optimized = serialize_plan(test::counting_pair_optimized());

    // replies alternate instruction/optimization; the model "finds" the
    // removal, then keeps answering with the same plan
    MockEndpoint endpoint({
        "I will drop the detection that the counting already covers.",
        "Here is the improved plan:\n" + optimized,
        "No further changes look possible.",
        optimized,
        "No further changes look possible.",
        optimized,
        "No further changes look possible.",
        optimized,
    });
    HttpChatClient client(config_for(endpoint));
    LlmProposer proposer(client, 0.7);
    GcdOptions options;
    options.tolerance = 3;
    GcdResult result = run_gcd(p0, proposer, catalog, params, similarity, options);

    CHECK(plan_equal(result.best, test::counting_pair_optimized()));
    CHECK(result.trace.iterations.size() == 4);
    CHECK(endpoint.calls() == 8); // two calls per iteration
}

TEST_CASE("remote embeddings flow through the similarity checker") {
    httplib::Server server;
    server.Post("/v1/embeddings", [](const httplib::Request &req, httplib::Response &res) {
        nlohmann::json body = nlohmann::json::parse(req.body);
        std::string input = body["input"].get<std::string>();
        // toy model: one fixed axis per known word
        nlohmann::json vec = nlohmann::json::array();
        for (const std::string word : {"man", "men", "woman"}) {
            vec.push_back(input.find(word) != std::string::npos ? 1.0 : 0.0);
        }
        nlohmann::json reply;
        reply["data"] = nlohmann::json::array({{{"embedding", vec}}});
        res.set_content(reply.dump(), "application/json");
    });
    int port = server.bind_to_any_port("127.0.0.1");
    std::thread listener([&] { server.listen_after_bind(); });
    server.wait_until_ready();

    RemoteEmbeddingConfig config;
    config.base_url = "http://127.0.0.1:" + std::to_string(port);
    SimilarityChecker checker(std::make_shared<RemoteEmbeddingProvider>(config));
    SimilarityReport same = checker.compare("man", "man");
    CHECK(same.semantic_score == doctest::Approx(1.0));
    CHECK(!same.degraded);

    server.stop();
    listener.join();

    // endpoint gone: scoring degrades to the lexical component
    SimilarityChecker degraded(std::make_shared<RemoteEmbeddingProvider>(config));
    int warnings = 0;
    degraded.set_warning_sink([&](const std::string &) { ++warnings; });
    SimilarityReport fallback = degraded.compare("how many persons", "how many people");
    CHECK(fallback.degraded);
    CHECK(fallback.combined == doctest::Approx(fallback.lexical_score));
    CHECK(fallback.equivalent);
    CHECK(warnings == 1);
}

TEST_CASE("transport failures count toward the tolerance without aborting") {
    Catalog catalog = test::small_catalog();
    CostParams params = CostParams::defaults();
    SimilarityChecker similarity;
    PlanPtr p0 = test::counting_pair_optimized();

    MockEndpoint endpoint({"irrelevant"}, 1); // all calls return HTTP 500
    HttpChatClient client(config_for(endpoint));
    LlmProposer proposer(client, 0.7);
    GcdOptions options;
    options.tolerance = 2;
    GcdResult result = run_gcd(p0, proposer, catalog, params, similarity, options);
    CHECK(plan_equal(result.best, p0));
    CHECK(result.trace.iterations.size() == 2);
    for (const auto &rec : result.trace.iterations) {
        CHECK(rec.feedback == std::string(kFeedbackInvalid));
    }
}
