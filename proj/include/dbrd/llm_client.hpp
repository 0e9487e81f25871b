#pragma once

#include <chrono>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <semaphore>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

namespace dbrd {

/// Anything that turns a prompt into assistant text.
class CompletionClient {
  public:
    virtual ~CompletionClient() = default;
    virtual std::string complete(const std::string& prompt) = 0;
};

struct LlmConfig {
    std::string endpoint = "https://api.openai.com/v1/chat/completions";
    std::string model_name = "gpt-3.5-turbo";
    double temperature = 0.0;
    std::int64_t seed = 42;
    int max_new_tokens = 2048;
    std::chrono::milliseconds timeout{60'000};
    int max_transport_retries = 3;
    std::chrono::milliseconds backoff_base{500};  // doubled after every failed attempt
    std::size_t max_in_flight = 4;
    std::string api_key;  // normally filled from LLM_API_KEY

    void validate() const;
};

/// Reads LLM_API_KEY from the environment; empty when unset.
std::string api_key_from_env();

struct HttpRequest {
    std::string url;
    std::string body;
    std::map<std::string, std::string> headers;
};

struct HttpResponse {
    int status = 0;
    std::string body;
};

/// Raised when the endpoint cannot be reached (or keeps failing) after retries.
class TransportError : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

/// Raised for a non-retryable HTTP status or an unparseable response body.
class LlmError : public std::runtime_error {
  public:
    LlmError(int status, const std::string& what) : std::runtime_error(what), status_(status) {}
    int status() const { return status_; }

  private:
    int status_;
};

class HttpTransport {
  public:
    virtual ~HttpTransport() = default;
    /// Throws TransportError on connection failures and timeouts.
    virtual HttpResponse post(const HttpRequest& request, std::chrono::milliseconds timeout) = 0;
};

/// cpp-httplib backed transport (http and https).
class HttplibTransport : public HttpTransport {
  public:
    HttpResponse post(const HttpRequest& request, std::chrono::milliseconds timeout) override;
};

nlohmann::json build_chat_request(const LlmConfig& cfg, const std::string& prompt);
/// Extracts choices[0].message.content verbatim. Throws LlmError on malformed bodies.
std::string parse_chat_response(const std::string& body);

/// OpenAI-compatible chat-completions client.
class ChatClient : public CompletionClient {
  public:
    using Sleeper = std::function<void(std::chrono::milliseconds)>;

    explicit ChatClient(LlmConfig cfg, std::shared_ptr<HttpTransport> transport = std::make_shared<HttplibTransport>(),
                        Sleeper sleeper = {});

    /// One request per call; transport failures, 429 and 5xx are retried with
    /// exponential backoff up to max_transport_retries times.
    std::string complete(const std::string& prompt) override;

    const LlmConfig& config() const { return cfg_; }

  private:
    LlmConfig cfg_;
    std::shared_ptr<HttpTransport> transport_;
    Sleeper sleeper_;
    std::counting_semaphore<> in_flight_;
};

/// Test double: records every request and answers from a script.
class ScriptedTransport : public HttpTransport {
  public:
    using Handler = std::function<HttpResponse(const HttpRequest&)>;

    explicit ScriptedTransport(Handler handler) : handler_(std::move(handler)) {}

    /// Replies with a chat-completions body carrying `content` every time.
    static std::shared_ptr<ScriptedTransport> replying(std::string content);

    HttpResponse post(const HttpRequest& request, std::chrono::milliseconds timeout) override;

    std::vector<HttpRequest> requests() const;
    std::size_t request_count() const;

  private:
    Handler handler_;
    mutable std::mutex mutex_;
    std::vector<HttpRequest> requests_;
};

/// A chat-completions response body carrying `content`.
std::string chat_response_body(const std::string& content);

}  // namespace dbrd
