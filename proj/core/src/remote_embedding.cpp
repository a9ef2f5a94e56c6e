#include <cstdlib>

#include "httplib.h"
#include "json.hpp"

#include "mmqo/errors.hpp"
#include "mmqo/similarity.hpp"

namespace mmqo {

RemoteEmbeddingProvider::RemoteEmbeddingProvider(RemoteEmbeddingConfig config)
    : config_(std::move(config)) {}

SparseVec RemoteEmbeddingProvider::embed(const std::string &text) const {
    nlohmann::json body;
    body["model"] = config_.model;
    body["input"] = text;

    httplib::Client client(config_.base_url);
    client.set_connection_timeout(config_.timeout_seconds);
    client.set_read_timeout(config_.timeout_seconds);

    httplib::Headers headers;
    if (const char *key = std::getenv(config_.api_key_env.c_str()); key && *key) {
        headers.emplace("Authorization", std::string("Bearer ") + key);
    }

    auto res = client.Post(config_.path, headers, body.dump(), "application/json");
    if (!res) {
        throw BackendUnavailableError("embedding endpoint unreachable: " + config_.base_url);
    }
    if (res->status != 200) {
        throw BackendUnavailableError("embedding endpoint returned HTTP " +
                                      std::to_string(res->status));
    }
    try {
        nlohmann::json reply = nlohmann::json::parse(res->body);
        const auto &vec = reply.at("data").at(0).at("embedding");
        SparseVec out;
        std::size_t i = 0;
        for (const auto &component : vec) {
            out[std::to_string(i++)] = component.get<double>();
        }
        if (out.empty()) throw BackendUnavailableError("embedding endpoint sent an empty vector");
        return out;
    } catch (const nlohmann::json::exception &e) {
        throw BackendUnavailableError(std::string("embedding endpoint reply malformed: ") +
                                      e.what());
    }
}

} // namespace mmqo
