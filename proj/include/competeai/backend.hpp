#pragma once

#include <functional>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

namespace competeai {

struct ChatMessage {
    std::string role; // "user" or "assistant"
    std::string content;
    bool operator==(const ChatMessage&) const = default;
};

struct Prompt {
    std::string system;
    std::vector<ChatMessage> messages;
    /// Structured copy of what the text says. Never sent over the wire or
    /// hashed; scripted backends read it instead of parsing prose.
    nlohmann::json context;
};

/// Backend could not produce a completion (transport failure after retries).
class BackendError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// The per-run request budget is spent. Ends the simulation; never absorbed by fallbacks.
class RequestCapExceeded : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Produces one text completion for a prompt. Implementations keep no
/// conversational state between calls and must tolerate concurrent callers.
class AgentBackend {
public:
    virtual ~AgentBackend() = default;
    virtual std::string complete(const Prompt& prompt) = 0;
    virtual std::string identity() const = 0;
};

template <typename T>
struct Parsed {
    std::optional<T> value;
    std::vector<std::string> problems;
};

template <typename T>
struct RepairOutcome {
    std::optional<T> value;
    int attempts = 0;
    std::vector<std::string> last_problems;
    std::vector<std::string> transcript; // raw completions, in order
};

std::string render_diagnostics(const std::vector<std::string>& problems);

/// Asks, parses, and on failure re-asks with the diagnostics appended, up to
/// `max_attempts` times. BackendError propagates to the caller.
template <typename T>
RepairOutcome<T> complete_with_repair(AgentBackend& backend, Prompt prompt, int max_attempts,
                                      const std::function<Parsed<T>(const std::string&)>& parse)
{
    RepairOutcome<T> out;
    for (int attempt = 1; attempt <= max_attempts; ++attempt) {
        out.attempts = attempt;
        std::string text = backend.complete(prompt);
        auto parsed = parse(text);
        out.transcript.push_back(text);
        if (parsed.value && parsed.problems.empty()) {
            out.value = std::move(parsed.value);
            out.last_problems.clear();
            return out;
        }
        out.last_problems = std::move(parsed.problems);
        if (out.last_problems.empty())
            out.last_problems.push_back("response could not be used");
        prompt.messages.push_back({"assistant", std::move(text)});
        prompt.messages.push_back({"user", render_diagnostics(out.last_problems)});
        prompt.context["repair_attempt"] = attempt;
    }
    return out;
}

} // namespace competeai
