#pragma once

#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

namespace mmqo {

struct ChatMessage {
    std::string role; // "system" | "user" | "assistant"
    std::string content;
};

/// Minimal chat-completion client. Implementations throw TransportError on
/// network or protocol failure.
class ChatClient {
  public:
    virtual ~ChatClient() = default;
    virtual std::string complete(const std::vector<ChatMessage> &messages, double temperature) = 0;
    virtual std::string name() const = 0;
};

struct LlmEndpointConfig {
    std::string base_url = "http://127.0.0.1:8080";
    std::string path = "/v1/chat/completions";
    std::string model = "default";
    std::string api_key_env = "MMQO_API_KEY"; // secret stays in the environment
    double temperature = 0.7;
    int timeout_seconds = 60;
    int max_inflight = 4; // concurrent requests allowed against the endpoint
};

/// OpenAI-style chat endpoint over HTTP. Safe for concurrent callers; at
/// most max_inflight requests are on the wire at once.
class HttpChatClient : public ChatClient {
  public:
    explicit HttpChatClient(LlmEndpointConfig config);
    ~HttpChatClient() override;
    std::string complete(const std::vector<ChatMessage> &messages, double temperature) override;
    std::string name() const override { return "http:" + config_.model; }

  private:
    LlmEndpointConfig config_;
    struct Throttle;
    std::unique_ptr<Throttle> throttle_;
};

/// Test double: replies come from a queue of handlers, each seeing the
/// request messages; handlers may throw to simulate failures. Records every
/// request it serves.
class ScriptedChatClient : public ChatClient {
  public:
    using Handler = std::function<std::string(const std::vector<ChatMessage> &)>;

    void push_reply(std::string reply);
    void push_handler(Handler handler);

    std::string complete(const std::vector<ChatMessage> &messages, double temperature) override;
    std::string name() const override { return "scripted"; }

    const std::vector<std::vector<ChatMessage>> &requests() const { return requests_; }
    std::size_t calls() const { return requests_.size(); }

  private:
    std::vector<Handler> handlers_;
    std::size_t next_ = 0;
    std::vector<std::vector<ChatMessage>> requests_;
};

/// First balanced top-level JSON object embedded in free text, string- and
/// escape-aware. nullopt when no complete object exists.
std::optional<std::string> extract_first_json_object(const std::string &text);

} // namespace mmqo
