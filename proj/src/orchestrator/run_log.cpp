#include "competeai/run_log.hpp"

#include <array>
#include <fstream>
#include <sstream>

#include <fmt/format.h>

namespace competeai {

namespace {

constexpr std::array kPhaseNames{"turns", "freeze", "decisions", "dining", "settlement", "memory", "end"};
constexpr std::array kEventNames{"TurnCommitted", "MenuFrozen",  "DecisionMade", "OrderPlaced", "ExperienceRecorded",
                                 "CommentPosted", "DaySettled", "MemoryUpdated", "Warning",     "Terminated"};

} // namespace

std::string_view to_string(Phase p) { return kPhaseNames.at(static_cast<std::size_t>(p) - 1); }

Phase phase_from_string(std::string_view s)
{
    for (std::size_t i = 0; i < kPhaseNames.size(); ++i)
        if (s == kPhaseNames[i])
            return static_cast<Phase>(i + 1);
    throw std::invalid_argument(fmt::format("unknown phase '{}'", s));
}

std::string_view to_string(EventType t) { return kEventNames.at(static_cast<std::size_t>(t)); }

EventType event_type_from_string(std::string_view s)
{
    for (std::size_t i = 0; i < kEventNames.size(); ++i)
        if (s == kEventNames[i])
            return static_cast<EventType>(i);
    throw std::invalid_argument(fmt::format("unknown event type '{}'", s));
}

const Event& RunLog::append(int day, Phase phase, EventType type, nlohmann::json data)
{
    if (!events_.empty()) {
        const auto& last = events_.back();
        if (day < last.day || (day == last.day && phase < last.phase))
            throw std::logic_error(fmt::format("event {} on day {} phase {} would follow day {} phase {}",
                                               to_string(type), day, to_string(phase), last.day,
                                               to_string(last.phase)));
    }
    const auto seq = events_.empty() ? std::int64_t{1} : events_.back().seq + 1;
    events_.push_back({seq, day, phase, type, std::move(data)});
    return events_.back();
}

nlohmann::json to_json(const Event& e)
{
    return {{"seq", e.seq},
            {"day", e.day},
            {"phase", std::string(to_string(e.phase))},
            {"type", std::string(to_string(e.type))},
            {"data", e.data}};
}

Event event_from_json(const nlohmann::json& j)
{
    Event e;
    e.seq = j.at("seq").get<std::int64_t>();
    e.day = j.at("day").get<int>();
    e.phase = phase_from_string(j.at("phase").get<std::string>());
    e.type = event_type_from_string(j.at("type").get<std::string>());
    e.data = j.at("data");
    return e;
}

void to_json(nlohmann::json& j, const RunLogHeader& h)
{
    j = {{"kind", "header"},
         {"schema_version", h.schema_version},
         {"config_hash", h.config_hash},
         {"roster_hash", h.roster_hash},
         {"template_version", h.template_version},
         {"mode", h.mode},
         {"seed", h.seed},
         {"backend", h.backend},
         {"horizon", h.horizon}};
}

void from_json(const nlohmann::json& j, RunLogHeader& h)
{
    h.schema_version = j.at("schema_version").get<int>();
    h.config_hash = j.at("config_hash").get<std::string>();
    h.roster_hash = j.at("roster_hash").get<std::string>();
    h.template_version = j.at("template_version").get<std::string>();
    h.mode = j.at("mode").get<std::string>();
    h.seed = j.at("seed").get<std::uint64_t>();
    h.backend = j.at("backend").get<std::string>();
    h.horizon = j.at("horizon").get<int>();
}

std::string RunLog::to_jsonl() const
{
    std::string out = nlohmann::json(header_).dump() + "\n";
    for (const auto& e : events_)
        out += to_json(e).dump() + "\n";
    return out;
}

RunLog RunLog::from_jsonl(std::string_view text)
{
    RunLog log;
    std::istringstream in{std::string(text)};
    std::string line;
    std::size_t n = 0;
    bool have_header = false;
    while (std::getline(in, line)) {
        ++n;
        if (line.empty())
            continue;
        nlohmann::json j;
        try {
            j = nlohmann::json::parse(line);
        } catch (const nlohmann::json::parse_error& e) {
            throw RunLogError(fmt::format("line {}: invalid JSON: {}", n, e.what()), n);
        }
        try {
            if (!have_header) {
                if (j.value("kind", std::string{}) != "header")
                    throw RunLogError(fmt::format("line {}: expected the log header", n), n);
                log.header_ = j.get<RunLogHeader>();
                if (log.header_.schema_version != kRunLogSchemaVersion)
                    throw RunLogError(fmt::format("line {}: log schema version {} is not supported (expected {})", n,
                                                  log.header_.schema_version, kRunLogSchemaVersion),
                                      n);
                have_header = true;
                continue;
            }
            auto e = event_from_json(j);
            const auto expected = log.events_.empty() ? 1 : log.events_.back().seq + 1;
            if (e.seq != expected)
                throw RunLogError(fmt::format("line {}: sequence number {} (expected {})", n, e.seq, expected), n);
            log.append(e.day, e.phase, e.type, std::move(e.data));
        } catch (const RunLogError&) {
            throw;
        } catch (const std::exception& e) {
            throw RunLogError(fmt::format("line {}: {}", n, e.what()), n);
        }
    }
    if (!have_header)
        throw RunLogError("empty run log: no header line", 1);
    return log;
}

void RunLog::write(const std::filesystem::path& file) const
{
    if (file.has_parent_path())
        std::filesystem::create_directories(file.parent_path());
    std::ofstream out(file, std::ios::binary | std::ios::trunc);
    out << to_jsonl();
    if (!out)
        throw std::runtime_error("cannot write run log " + file.string());
}

RunLog RunLog::read(const std::filesystem::path& file)
{
    std::ifstream in(file, std::ios::binary);
    if (!in)
        throw RunLogError("cannot open run log " + file.string(), 0);
    std::ostringstream ss;
    ss << in.rdbuf();
    return from_jsonl(ss.str());
}

} // namespace competeai
