#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "competeai/backend.hpp"
#include "competeai/domain.hpp"

namespace competeai {

struct ScriptedRestaurantPolicy {
    std::string style = "differentiator"; // or "imitator"
    std::optional<int> quit_on_day;
};

/// Declarative rules for the deterministic backend. Customer criteria are
/// tried in order until one separates the restaurants: needs, price, score,
/// loyalty, explore.
struct ScriptedPolicies {
    std::map<std::string, ScriptedRestaurantPolicy> restaurants; // by restaurant id
    std::map<std::string, std::vector<std::string>> presets;
    std::string default_preset = "score-first";
    std::map<std::string, std::string> by_income_band;
    std::string restricted; // preset for customers with a dietary restriction; empty = unused
    std::map<std::string, std::string> units; // customer name or unit id -> preset

    static ScriptedPolicies defaults();

    /// units > restricted > income band > default.
    const std::vector<std::string>& criteria_for(const CustomerProfile& person, const std::string& unit_id) const;
    ScriptedRestaurantPolicy restaurant(const std::string& id) const;
};

ScriptedPolicies parse_policies(const nlohmann::json& doc);
ScriptedPolicies load_policies(const std::filesystem::path& file);

/// Need keywords implied by a profile's restriction, health and taste
/// ("low sugar" -> "sugar-free", ...). Lowercase.
std::vector<std::string> restriction_keywords(const CustomerProfile& p);
std::vector<std::string> taste_keywords(const CustomerProfile& p);

/// Rule-driven stand-in for a chat model. Reads only Prompt::context, so its
/// replies depend on nothing but the structured situation and the seed in it.
class ScriptedBackend : public AgentBackend {
public:
    explicit ScriptedBackend(ScriptedPolicies policies = ScriptedPolicies::defaults());

    std::string complete(const Prompt& prompt) override;
    std::string identity() const override { return "scripted"; }

    const ScriptedPolicies& policies() const { return policies_; }

private:
    std::string restaurant_turn(const nlohmann::json& ctx) const;
    std::string choice(const nlohmann::json& ctx) const;
    std::string utterance(const nlohmann::json& ctx) const;
    std::string order(const nlohmann::json& ctx) const;
    std::string review(const nlohmann::json& ctx) const;

    ScriptedPolicies policies_;
};

} // namespace competeai
