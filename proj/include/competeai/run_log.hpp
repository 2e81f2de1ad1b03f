#pragma once

#include <cstdint>
#include <filesystem>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

namespace competeai {

inline constexpr int kRunLogSchemaVersion = 1;

/// Phases of a simulated day, in execution order.
enum class Phase { turns = 1, freeze, decisions, dining, settlement, memory, end };
std::string_view to_string(Phase p);
Phase phase_from_string(std::string_view s);

enum class EventType {
    TurnCommitted,
    MenuFrozen,
    DecisionMade,
    OrderPlaced,
    ExperienceRecorded,
    CommentPosted,
    DaySettled,
    MemoryUpdated,
    Warning,
    Terminated,
};
std::string_view to_string(EventType t);
EventType event_type_from_string(std::string_view s);

struct Event {
    std::int64_t seq = 0;
    int day = 0;
    Phase phase = Phase::turns;
    EventType type = EventType::Warning;
    nlohmann::json data = nlohmann::json::object();
    bool operator==(const Event&) const = default;
};

struct RunLogHeader {
    int schema_version = kRunLogSchemaVersion;
    std::string config_hash;
    std::string roster_hash;
    std::string template_version;
    std::string mode;    // dining mode
    std::uint64_t seed = 0;
    std::string backend; // "scripted" or "gateway"
    int horizon = 0;
    bool operator==(const RunLogHeader&) const = default;
};

/// Thrown for unreadable logs; `line` is 1-based (0 when not line-specific).
class RunLogError : public std::runtime_error {
public:
    RunLogError(const std::string& what, std::size_t line) : std::runtime_error(what), line_(line) {}
    std::size_t line() const { return line_; }

private:
    std::size_t line_;
};

/// Append-only event stream. Sequence numbers are assigned on append and
/// events must never go back in (day, phase).
class RunLog {
public:
    RunLog() = default;
    explicit RunLog(RunLogHeader header) : header_(std::move(header)) {}

    const RunLogHeader& header() const { return header_; }
    const std::vector<Event>& events() const { return events_; }

    /// Throws std::logic_error when (day, phase) would go backwards.
    const Event& append(int day, Phase phase, EventType type, nlohmann::json data);

    /// Header line, then one event per line; keys sorted, so output is canonical.
    std::string to_jsonl() const;
    static RunLog from_jsonl(std::string_view text);

    void write(const std::filesystem::path& file) const;
    static RunLog read(const std::filesystem::path& file);

    bool operator==(const RunLog&) const = default;

private:
    RunLogHeader header_;
    std::vector<Event> events_;
};

nlohmann::json to_json(const Event& e);
Event event_from_json(const nlohmann::json& j);
void to_json(nlohmann::json& j, const RunLogHeader& h);
void from_json(const nlohmann::json& j, RunLogHeader& h);

} // namespace competeai
