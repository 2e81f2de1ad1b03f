#pragma once

#include <atomic>
#include <chrono>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <memory>
#include <mutex>
#include <optional>
#include <semaphore>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <vector>

#include <nlohmann/json.hpp>

#include "competeai/backend.hpp"

namespace competeai {

struct CompletionRequest {
    std::string model;
    std::string system;
    std::vector<ChatMessage> messages;
    double temperature = 0.7;
    int max_tokens = 1024;
    bool operator==(const CompletionRequest&) const = default;
};

/// SHA-256 hex over the canonical (sorted-key) JSON of every request field.
std::string fingerprint(const CompletionRequest& request);

struct CompletionRecord {
    std::string fingerprint;
    CompletionRequest request;
    std::string response;
    double latency_ms = 0.0;
    int prompt_tokens = 0;
    int completion_tokens = 0;
    std::string timestamp; // UTC, ISO 8601
};

void to_json(nlohmann::json& j, const ChatMessage& m);
void from_json(const nlohmann::json& j, ChatMessage& m);
void to_json(nlohmann::json& j, const CompletionRequest& r);
void from_json(const nlohmann::json& j, CompletionRequest& r);
void to_json(nlohmann::json& j, const CompletionRecord& r);
void from_json(const nlohmann::json& j, CompletionRecord& r);

/// Failure talking to the completion service. Transient ones (rate limit,
/// server error, connection trouble) are retried.
class TransportError : public std::runtime_error {
public:
    TransportError(const std::string& what, bool transient, int status = 0)
        : std::runtime_error(what), transient_(transient), status_(status)
    {
    }
    bool transient() const { return transient_; }
    int status() const { return status_; }

private:
    bool transient_;
    int status_;
};

struct TransportReply {
    std::string text;
    int prompt_tokens = 0;
    int completion_tokens = 0;
};

/// One request/response exchange with an upstream model.
class ChatTransport {
public:
    virtual ~ChatTransport() = default;
    /// `context` is the prompt's structured side channel; network transports ignore it.
    virtual TransportReply send(const CompletionRequest& request, const nlohmann::json& context) = 0;
    virtual std::string describe() const = 0;
};

/// OpenAI-style chat completions over HTTP(S): POST {base_url}/chat/completions.
class HttpChatTransport : public ChatTransport {
public:
    HttpChatTransport(std::string base_url, std::string api_key, std::chrono::seconds timeout = std::chrono::seconds(120));
    TransportReply send(const CompletionRequest& request, const nlohmann::json& context) override;
    std::string describe() const override { return "http " + base_url_; }

    /// Request body sent for `request`.
    static nlohmann::json body(const CompletionRequest& request);
    /// Extracts text and usage from a response body. Throws TransportError (permanent) on a malformed body.
    static TransportReply parse_reply(const std::string& body);

private:
    std::string base_url_;
    std::string origin_; // scheme://host[:port]
    std::string path_;   // path prefix, e.g. "/v1"
    std::string api_key_;
    std::chrono::seconds timeout_;
};

/// Serves requests from a local AgentBackend, e.g. to record scripted runs.
class BackendTransport : public ChatTransport {
public:
    explicit BackendTransport(std::shared_ptr<AgentBackend> backend) : backend_(std::move(backend)) {}
    TransportReply send(const CompletionRequest& request, const nlohmann::json& context) override;
    std::string describe() const override { return "backend " + backend_->identity(); }

private:
    std::shared_ptr<AgentBackend> backend_;
};

class CacheError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Append-only file of completion records: 8 magic bytes "CAICACHE", a
/// little-endian u32 format version, then records as u32 length + JSON.
/// The first record of each fingerprint is the canonical one.
class CacheStore {
public:
    static constexpr std::uint32_t kFormatVersion = 1;

    /// Opens an existing store, or creates an empty one when `create` is set.
    static std::shared_ptr<CacheStore> open(const std::filesystem::path& file, bool create);

    const CompletionRecord* find(const std::string& fingerprint) const;
    void append(const CompletionRecord& record);
    std::size_t size() const;
    const std::filesystem::path& path() const { return path_; }

private:
    explicit CacheStore(std::filesystem::path path) : path_(std::move(path)) {}

    std::filesystem::path path_;
    mutable std::mutex mutex_;
    std::vector<std::unique_ptr<CompletionRecord>> records_;
    std::unordered_map<std::string, const CompletionRecord*> index_;
};

enum class GatewayMode { live, record, replay };
std::string_view to_string(GatewayMode m);
GatewayMode gateway_mode_from_string(std::string_view s);

struct RetryPolicy {
    int attempts = 5;
    double base_seconds = 1.0;
    double cap_seconds = 60.0;
    double jitter = 0.25; // delays grow by up to this fraction
};

/// Delays before attempts 2..n. Never decreasing, never above the cap.
std::vector<double> backoff_delays(const RetryPolicy& policy, std::uint64_t seed);

struct GatewaySettings {
    std::string model = "gpt-4-0613";
    double temperature = 0.7;
    int max_tokens = 1024;
    RetryPolicy retry;
    int parallelism = 4;
    int requests_per_minute = 0; // 0 = unlimited
    std::int64_t request_cap = 5000;
};

/// The one path to an external model. Shared by every agent of a run and safe
/// for concurrent callers.
class Gateway : public AgentBackend {
public:
    using Sleeper = std::function<void(double seconds)>;
    using Clock = std::function<double()>; // seconds, monotonic

    /// `transport` may be null in replay mode; `cache` may be null in live mode.
    Gateway(GatewayMode mode, GatewaySettings settings, std::shared_ptr<ChatTransport> transport,
            std::shared_ptr<CacheStore> cache, Sleeper sleeper = {}, Clock clock = {});

    std::string complete(const Prompt& prompt) override;
    std::string identity() const override;

    CompletionRequest request_for(const Prompt& prompt) const;

    GatewayMode mode() const { return mode_; }
    const GatewaySettings& settings() const { return settings_; }
    std::int64_t requests() const { return requests_.load(); }
    /// Restores the counter when resuming from a checkpoint.
    void set_requests(std::int64_t n) { requests_.store(n); }
    std::int64_t transport_calls() const { return transport_calls_.load(); }

private:
    TransportReply send_with_retry(const CompletionRequest& request, const nlohmann::json& context,
                                   const std::string& fp);
    void wait_for_rate_slot();

    GatewayMode mode_;
    GatewaySettings settings_;
    std::shared_ptr<ChatTransport> transport_;
    std::shared_ptr<CacheStore> cache_;
    Sleeper sleep_;
    Clock now_;
    std::counting_semaphore<1024> in_flight_;
    std::mutex rate_mutex_;
    double next_slot_ = 0.0;
    std::atomic<std::int64_t> requests_{0};
    std::atomic<std::int64_t> transport_calls_{0};
};

} // namespace competeai
