#include "mmqo/chat_client.hpp"

#include <condition_variable>
#include <cstdlib>
#include <mutex>

#include "httplib.h"
#include "json.hpp"

#include "mmqo/errors.hpp"

namespace mmqo {

/// Counting gate bounding the number of in-flight requests.
struct HttpChatClient::Throttle {
    explicit Throttle(int limit) : slots(limit < 1 ? 1 : limit) {}

    std::mutex mutex;
    std::condition_variable ready;
    int slots;

    struct Slot {
        Throttle &t;
        explicit Slot(Throttle &t) : t(t) {
            std::unique_lock lock(t.mutex);
            t.ready.wait(lock, [&] { return t.slots > 0; });
            --t.slots;
        }
        ~Slot() {
            {
                std::lock_guard lock(t.mutex);
                ++t.slots;
            }
            t.ready.notify_one();
        }
    };
};

HttpChatClient::HttpChatClient(LlmEndpointConfig config)
    : config_(std::move(config)), throttle_(std::make_unique<Throttle>(config_.max_inflight)) {}

HttpChatClient::~HttpChatClient() = default;

std::string HttpChatClient::complete(const std::vector<ChatMessage> &messages,
                                     double temperature) {
    Throttle::Slot slot(*throttle_);
    nlohmann::json body;
    body["model"] = config_.model;
    body["temperature"] = temperature;
    nlohmann::json msgs = nlohmann::json::array();
    for (const auto &m : messages) {
        msgs.push_back({{"role", m.role}, {"content", m.content}});
    }
    body["messages"] = std::move(msgs);

    httplib::Client client(config_.base_url);
    client.set_connection_timeout(config_.timeout_seconds);
    client.set_read_timeout(config_.timeout_seconds);

    httplib::Headers headers;
    if (const char *key = std::getenv(config_.api_key_env.c_str()); key && *key) {
        headers.emplace("Authorization", std::string("Bearer ") + key);
    }

    auto res = client.Post(config_.path, headers, body.dump(), "application/json");
    if (!res) {
        throw TransportError("chat endpoint unreachable: " + config_.base_url +
                             " (" + httplib::to_string(res.error()) + ")");
    }
    if (res->status != 200) {
        throw TransportError("chat endpoint returned HTTP " + std::to_string(res->status));
    }
    nlohmann::json reply;
    try {
        reply = nlohmann::json::parse(res->body);
    } catch (const nlohmann::json::parse_error &e) {
        throw TransportError(std::string("chat endpoint sent invalid JSON: ") + e.what());
    }
    try {
        return reply.at("choices").at(0).at("message").at("content").get<std::string>();
    } catch (const nlohmann::json::exception &) {
        throw TransportError("chat endpoint reply missing choices[0].message.content");
    }
}

void ScriptedChatClient::push_reply(std::string reply) {
    handlers_.push_back([reply = std::move(reply)](const std::vector<ChatMessage> &) {
        return reply;
    });
}

void ScriptedChatClient::push_handler(Handler handler) {
    handlers_.push_back(std::move(handler));
}

std::string ScriptedChatClient::complete(const std::vector<ChatMessage> &messages,
                                         double /*temperature*/) {
    requests_.push_back(messages);
    if (next_ >= handlers_.size()) throw TransportError("scripted client: no replies left");
    return handlers_[next_++](messages);
}

std::optional<std::string> extract_first_json_object(const std::string &text) {
    std::size_t start = text.find('{');
    while (start != std::string::npos) {
        int depth = 0;
        bool in_string = false;
        bool escaped = false;
        for (std::size_t i = start; i < text.size(); ++i) {
            char c = text[i];
            if (in_string) {
                if (escaped) {
                    escaped = false;
                } else if (c == '\\') {
                    escaped = true;
                } else if (c == '"') {
                    in_string = false;
                }
                continue;
            }
            if (c == '"') {
                in_string = true;
            } else if (c == '{') {
                ++depth;
            } else if (c == '}') {
                --depth;
                if (depth == 0) return text.substr(start, i - start + 1);
            }
        }
        start = text.find('{', start + 1); // unbalanced head, try the next brace
    }
    return std::nullopt;
}

} // namespace mmqo
