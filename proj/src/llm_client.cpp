#include "dbrd/llm_client.hpp"

#include <cstdlib>
#include <thread>

#include <httplib.h>

namespace dbrd {

void LlmConfig::validate() const {
    if (temperature < 0.0) throw std::invalid_argument("temperature must be >= 0");
    if (max_new_tokens < 1) throw std::invalid_argument("max_new_tokens must be >= 1");
    if (max_transport_retries < 0) throw std::invalid_argument("max_transport_retries must be >= 0");
    if (max_in_flight < 1) throw std::invalid_argument("max_in_flight must be >= 1");
    if (endpoint.rfind("http://", 0) != 0 && endpoint.rfind("https://", 0) != 0) {
        throw std::invalid_argument("endpoint must be an http(s) URL: " + endpoint);
    }
}

std::string api_key_from_env() {
    const char* key = std::getenv("LLM_API_KEY");
    return key ? key : "";
}

namespace {

struct SplitUrl {
    std::string origin;  // scheme://host[:port]
    std::string path;
};

SplitUrl split_url(const std::string& url) {
    const auto scheme_end = url.find("://");
    if (scheme_end == std::string::npos) throw TransportError("not a URL: " + url);
    const auto path_start = url.find('/', scheme_end + 3);
    if (path_start == std::string::npos) return {url, "/"};
    return {url.substr(0, path_start), url.substr(path_start)};
}

std::string excerpt(const std::string& body, std::size_t limit = 300) {
    return body.size() <= limit ? body : body.substr(0, limit) + "...";
}

bool retryable_status(int status) { return status == 408 || status == 429 || status >= 500; }

}  // namespace

HttpResponse HttplibTransport::post(const HttpRequest& request, std::chrono::milliseconds timeout) {
    const auto [origin, path] = split_url(request.url);
    httplib::Client client(origin);
    if (!client.is_valid()) throw TransportError("unsupported endpoint " + request.url);
    client.set_connection_timeout(timeout);
    client.set_read_timeout(timeout);
    client.set_write_timeout(timeout);

    httplib::Headers headers;
    for (const auto& [k, v] : request.headers) {
        if (k != "Content-Type") headers.emplace(k, v);
    }
    auto result = client.Post(path, headers, request.body, "application/json");
    if (!result) throw TransportError("request to " + request.url + " failed: " + httplib::to_string(result.error()));
    return HttpResponse{result->status, result->body};
}

nlohmann::json build_chat_request(const LlmConfig& cfg, const std::string& prompt) {
    return {
        {"model", cfg.model_name},
        {"messages", nlohmann::json::array({{{"role", "user"}, {"content", prompt}}})},
        {"temperature", cfg.temperature},
        {"seed", cfg.seed},
        {"max_tokens", cfg.max_new_tokens},
    };
}

std::string parse_chat_response(const std::string& body) {
    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(body);
    } catch (const nlohmann::json::parse_error&) {
        throw LlmError(200, "response is not JSON: " + excerpt(body));
    }
    const auto* content = [&]() -> const nlohmann::json* {
        if (!doc.contains("choices") || !doc["choices"].is_array() || doc["choices"].empty()) return nullptr;
        const auto& choice = doc["choices"][0];
        if (!choice.contains("message") || !choice["message"].contains("content")) return nullptr;
        return &choice["message"]["content"];
    }();
    if (content == nullptr) throw LlmError(200, "response has no choices[0].message.content: " + excerpt(body));
    if (content->is_null()) return "";
    if (!content->is_string()) throw LlmError(200, "message content is not a string");
    return content->get<std::string>();
}

ChatClient::ChatClient(LlmConfig cfg, std::shared_ptr<HttpTransport> transport, Sleeper sleeper)
    : cfg_(std::move(cfg)),
      transport_(std::move(transport)),
      sleeper_(sleeper ? std::move(sleeper) : Sleeper([](std::chrono::milliseconds d) { std::this_thread::sleep_for(d); })),
      in_flight_(static_cast<std::ptrdiff_t>(cfg_.max_in_flight)) {
    cfg_.validate();
}

std::string ChatClient::complete(const std::string& prompt) {
    HttpRequest request;
    request.url = cfg_.endpoint;
    request.body = build_chat_request(cfg_, prompt).dump();
    request.headers["Content-Type"] = "application/json";
    if (!cfg_.api_key.empty()) request.headers["Authorization"] = "Bearer " + cfg_.api_key;

    in_flight_.acquire();
    struct Release {
        std::counting_semaphore<>& s;
        ~Release() { s.release(); }
    } release{in_flight_};

    auto delay = cfg_.backoff_base;
    std::string last_failure;
    for (int attempt = 0; attempt <= cfg_.max_transport_retries; ++attempt) {
        if (attempt > 0) {
            sleeper_(delay);
            delay *= 2;
        }
        HttpResponse response;
        try {
            response = transport_->post(request, cfg_.timeout);
        } catch (const TransportError& e) {
            last_failure = e.what();
            continue;
        }
        if (response.status >= 200 && response.status < 300) return parse_chat_response(response.body);
        if (!retryable_status(response.status)) {
            throw LlmError(response.status,
                           "HTTP " + std::to_string(response.status) + " from " + cfg_.endpoint + ": " + excerpt(response.body));
        }
        last_failure = "HTTP " + std::to_string(response.status) + ": " + excerpt(response.body);
    }
    throw TransportError("giving up on " + cfg_.endpoint + " after " + std::to_string(cfg_.max_transport_retries + 1) +
                         " attempts: " + last_failure);
}

std::shared_ptr<ScriptedTransport> ScriptedTransport::replying(std::string content) {
    return std::make_shared<ScriptedTransport>(
        [body = chat_response_body(content)](const HttpRequest&) { return HttpResponse{200, body}; });
}

HttpResponse ScriptedTransport::post(const HttpRequest& request, std::chrono::milliseconds) {
    {
        std::lock_guard lock(mutex_);
        requests_.push_back(request);
    }
    return handler_(request);
}

std::vector<HttpRequest> ScriptedTransport::requests() const {
    std::lock_guard lock(mutex_);
    return requests_;
}

std::size_t ScriptedTransport::request_count() const {
    std::lock_guard lock(mutex_);
    return requests_.size();
}

std::string chat_response_body(const std::string& content) {
    return nlohmann::json{
        {"id", "chatcmpl-scripted"},
        {"object", "chat.completion"},
        {"choices", nlohmann::json::array({{{"index", 0},
                                            {"message", {{"role", "assistant"}, {"content", content}}},
                                            {"finish_reason", "stop"}}})},
    }
        .dump();
}

}  // namespace dbrd
