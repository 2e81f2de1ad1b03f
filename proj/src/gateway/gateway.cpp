#include "competeai/gateway.hpp"

#include <algorithm>
#include <cmath>
#include <ctime>
#include <thread>

#include <fmt/format.h>

#include "competeai/hashing.hpp"
#include "competeai/rng.hpp"

namespace competeai {

namespace {

std::string utc_now()
{
    const auto t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    std::tm tm{};
    gmtime_r(&t, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

double steady_seconds()
{
    return std::chrono::duration<double>(std::chrono::steady_clock::now().time_since_epoch()).count();
}

// Releases a semaphore slot on scope exit.
struct SlotGuard {
    std::counting_semaphore<1024>& sem;
    ~SlotGuard() { sem.release(); }
};

} // namespace

void to_json(nlohmann::json& j, const ChatMessage& m) { j = {{"role", m.role}, {"content", m.content}}; }

void from_json(const nlohmann::json& j, ChatMessage& m)
{
    m.role = j.at("role").get<std::string>();
    m.content = j.at("content").get<std::string>();
}

void to_json(nlohmann::json& j, const CompletionRequest& r)
{
    j = {{"model", r.model},
         {"system", r.system},
         {"messages", r.messages},
         {"temperature", r.temperature},
         {"max_tokens", r.max_tokens}};
}

void from_json(const nlohmann::json& j, CompletionRequest& r)
{
    r.model = j.at("model").get<std::string>();
    r.system = j.at("system").get<std::string>();
    r.messages = j.at("messages").get<std::vector<ChatMessage>>();
    r.temperature = j.at("temperature").get<double>();
    r.max_tokens = j.at("max_tokens").get<int>();
}

void to_json(nlohmann::json& j, const CompletionRecord& r)
{
    j = {{"fingerprint", r.fingerprint},
         {"request", r.request},
         {"response", r.response},
         {"latency_ms", r.latency_ms},
         {"prompt_tokens", r.prompt_tokens},
         {"completion_tokens", r.completion_tokens},
         {"timestamp", r.timestamp}};
}

void from_json(const nlohmann::json& j, CompletionRecord& r)
{
    r.fingerprint = j.at("fingerprint").get<std::string>();
    r.request = j.at("request").get<CompletionRequest>();
    r.response = j.at("response").get<std::string>();
    r.latency_ms = j.value("latency_ms", 0.0);
    r.prompt_tokens = j.value("prompt_tokens", 0);
    r.completion_tokens = j.value("completion_tokens", 0);
    r.timestamp = j.value("timestamp", std::string{});
}

std::string fingerprint(const CompletionRequest& request)
{
    // nlohmann objects keep keys sorted, so dump() is already canonical.
    return sha256_hex(nlohmann::json(request).dump());
}

std::string_view to_string(GatewayMode m)
{
    switch (m) {
    case GatewayMode::live: return "live";
    case GatewayMode::record: return "record";
    case GatewayMode::replay: return "replay";
    }
    return "?";
}

GatewayMode gateway_mode_from_string(std::string_view s)
{
    if (s == "live")
        return GatewayMode::live;
    if (s == "record")
        return GatewayMode::record;
    if (s == "replay")
        return GatewayMode::replay;
    throw std::invalid_argument(fmt::format("unknown gateway mode '{}'", s));
}

std::vector<double> backoff_delays(const RetryPolicy& policy, std::uint64_t seed)
{
    UnitRng rng(seed);
    std::vector<double> out;
    double prev = 0.0;
    for (int n = 1; n < policy.attempts; ++n) {
        const double raw = policy.base_seconds * std::pow(2.0, n - 1) * (1.0 + policy.jitter * rng.uniform());
        prev = std::max(prev, std::min(policy.cap_seconds, raw));
        out.push_back(prev);
    }
    return out;
}

TransportReply BackendTransport::send(const CompletionRequest& request, const nlohmann::json& context)
{
    Prompt p{request.system, request.messages, context};
    try {
        return {backend_->complete(p), 0, 0};
    } catch (const BackendError& e) {
        throw TransportError(e.what(), false);
    }
}

Gateway::Gateway(GatewayMode mode, GatewaySettings settings, std::shared_ptr<ChatTransport> transport,
                 std::shared_ptr<CacheStore> cache, Sleeper sleeper, Clock clock)
    : mode_(mode),
      settings_(std::move(settings)),
      transport_(std::move(transport)),
      cache_(std::move(cache)),
      sleep_(sleeper ? std::move(sleeper) : Sleeper([](double s) {
          std::this_thread::sleep_for(std::chrono::duration<double>(s));
      })),
      now_(clock ? std::move(clock) : Clock(steady_seconds)),
      in_flight_(std::clamp(settings_.parallelism, 1, 1024))
{
    if (mode_ != GatewayMode::replay && !transport_)
        throw std::invalid_argument(fmt::format("{} gateway needs a transport", to_string(mode_)));
    if (mode_ != GatewayMode::live && !cache_)
        throw std::invalid_argument(fmt::format("{} gateway needs a cache store", to_string(mode_)));
    if (settings_.retry.attempts < 1)
        throw std::invalid_argument("retry attempts must be at least 1");
}

std::string Gateway::identity() const { return fmt::format("gateway:{}:{}", to_string(mode_), settings_.model); }

CompletionRequest Gateway::request_for(const Prompt& prompt) const
{
    return {settings_.model, prompt.system, prompt.messages, settings_.temperature, settings_.max_tokens};
}

std::string Gateway::complete(const Prompt& prompt)
{
    // Counted in every mode, so a replay stops at the same request as the recording.
    if (requests_.fetch_add(1) >= settings_.request_cap)
        throw RequestCapExceeded(fmt::format("request cap of {} reached", settings_.request_cap));

    const auto request = request_for(prompt);
    const auto fp = fingerprint(request);

    if (mode_ == GatewayMode::replay) {
        if (const auto* rec = cache_->find(fp))
            return rec->response;
        throw CacheError(fmt::format("replay cache miss for fingerprint {}", fp));
    }

    const double start = now_();
    auto reply = send_with_retry(request, prompt.context, fp);
    if (mode_ == GatewayMode::record) {
        CompletionRecord rec;
        rec.fingerprint = fp;
        rec.request = request;
        rec.response = reply.text;
        rec.latency_ms = (now_() - start) * 1000.0;
        rec.prompt_tokens = reply.prompt_tokens;
        rec.completion_tokens = reply.completion_tokens;
        rec.timestamp = utc_now();
        cache_->append(rec);
    }
    return reply.text;
}

void Gateway::wait_for_rate_slot()
{
    if (settings_.requests_per_minute <= 0)
        return;
    const double interval = 60.0 / settings_.requests_per_minute;
    double slot;
    {
        std::lock_guard lock(rate_mutex_);
        slot = std::max(now_(), next_slot_);
        next_slot_ = slot + interval;
    }
    const double wait = slot - now_();
    if (wait > 0)
        sleep_(wait);
}

TransportReply Gateway::send_with_retry(const CompletionRequest& request, const nlohmann::json& context,
                                        const std::string& fp)
{
    const auto delays = backoff_delays(settings_.retry, fnv1a64(fp));
    std::string last;
    for (int attempt = 1; attempt <= settings_.retry.attempts; ++attempt) {
        if (attempt > 1)
            sleep_(delays[static_cast<std::size_t>(attempt - 2)]);
        wait_for_rate_slot();
        in_flight_.acquire();
        SlotGuard guard{in_flight_};
        transport_calls_.fetch_add(1);
        try {
            return transport_->send(request, context);
        } catch (const TransportError& e) {
            if (!e.transient())
                throw BackendError(fmt::format("{} (not retried)", e.what()));
            last = e.what();
        }
    }
    throw BackendError(fmt::format("gave up after {} attempts: {}", settings_.retry.attempts, last));
}

} // namespace competeai
