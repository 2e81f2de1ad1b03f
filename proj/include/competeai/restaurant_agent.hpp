#pragma once

#include <optional>
#include <string>
#include <vector>

#include "competeai/backend.hpp"
#include "competeai/restaurant_system.hpp"
#include "competeai/templates.hpp"

namespace competeai {

inline constexpr std::size_t kDaybookWindow = 3;
inline constexpr std::size_t kMemoryWindow = 5;
inline constexpr int kRetryBudget = 3;

/// Everything a restaurant agent is shown on the morning of `day`.
struct TurnContext {
    int day = 1;
    RestaurantState self;                 // own digest; chefs and cost prices visible
    std::vector<Daybook> recent_daybooks; // oldest first
    std::vector<Comment> previous_comments;
    std::optional<RivalInfo> rival; // absent before the first completed day
    std::vector<std::string> memory;
    std::size_t daybook_window = kDaybookWindow;
    std::size_t memory_window = kMemoryWindow;
    std::uint64_t seed = 0; // scripted backends only
};

TurnContext make_turn_context(const RestaurantState& self, const RestaurantState& rival, int day,
                              std::size_t daybook_window = kDaybookWindow, std::size_t memory_window = kMemoryWindow);

/// Same context and template version always give a byte-identical prompt.
/// Empty sections are left out entirely.
Prompt build_restaurant_prompt(const TurnContext& context, const TemplateSet& templates);
Prompt build_restaurant_prompt(const TurnContext& context, const std::string& template_id);

struct TurnResult {
    std::string analysis;
    std::vector<Action> actions; // committed, in order
    std::string summary;
    bool auto_summary = false;
    int attempts = 0;
    bool failed = false;                  // no-op day after exhausting retries or a transport error
    std::string failure;                  // why, when failed
    std::vector<std::string> diagnostics; // from the last rejected attempt
    RestaurantState state;                // after committing `actions`
};

/// Asks the backend for today's operations. A reply is committed only if
/// every operation parses and applies; otherwise the diagnostics go back to
/// the backend, up to `max_attempts` tries. Operations after a Quit are dropped.
TurnResult run_restaurant_turn(AgentBackend& backend, const RestaurantState& state, const TurnContext& context,
                               const TemplateSet& templates, const RestaurantRules& rules = {},
                               int max_attempts = kRetryBudget);

/// Appends and keeps the newest `window` entries.
std::vector<std::string> update_memory(std::vector<std::string> memory, std::string summary,
                                       std::size_t window = kMemoryWindow);

std::string auto_summary(int day, const std::vector<Action>& committed);

void to_json(nlohmann::json& j, const TurnContext& c);

} // namespace competeai
