#pragma once

#include <cstdint>
#include <filesystem>
#include <stdexcept>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "competeai/domain.hpp"
#include "competeai/roster.hpp"

namespace competeai {

inline constexpr int kConfigSchemaVersion = 1;

struct RestaurantConfig {
    std::string id;
    std::string name;
    Money funds;
    Money rent;
    std::vector<Chef> chefs;
    std::vector<Dish> menu;
    std::string advertisement;
    bool operator==(const RestaurantConfig&) const = default;
};

struct WtaConfig {
    double threshold = 0.8;
    int from_day = 6;
    bool operator==(const WtaConfig&) const = default;
};

struct GatewayConfig {
    std::string model = "gpt-4-0613";
    std::string base_url = "https://api.openai.com/v1";
    std::string api_key_env = "OPENAI_API_KEY";
    double temperature = 0.7;
    int max_tokens = 1024;
    int attempts = 5;
    double backoff_base_seconds = 1.0;
    double backoff_cap_seconds = 60.0;
    int parallelism = 4;
    int requests_per_minute = 0;
    std::int64_t request_cap = 5000;
    bool operator==(const GatewayConfig&) const = default;
};

struct SimulationConfig {
    int schema_version = kConfigSchemaVersion;
    int horizon = 15;
    DiningMode mode = DiningMode::group;
    std::uint64_t seed = 7;
    double comment_rate = 0.7;
    double budget_ratio = 0.004;
    int retry_budget = 3;
    int memory_window = 5;
    int daybook_window = 3;
    int history_window = 5;
    int public_comment_window = 20;
    int hiring_guard_days = 3;
    int workers = 4; // concurrent decision units
    WtaConfig wta;
    std::string roster = "assets/roster.json";
    std::string templates = "v1";
    std::string policies = "assets/policies/default.json";
    std::vector<RestaurantConfig> restaurants;
    GatewayConfig gateway;
    bool operator==(const SimulationConfig&) const = default;
};

/// One problem found while checking inputs; `code` is stable for scripting.
struct Finding {
    std::string code;
    std::string message;
};

class ConfigError : public std::runtime_error {
public:
    ConfigError(const std::string& what, std::vector<Finding> findings = {})
        : std::runtime_error(what), findings_(std::move(findings))
    {
    }
    const std::vector<Finding>& findings() const { return findings_; }

private:
    std::vector<Finding> findings_;
};

/// The bundled setup: two restaurants, 15 days, group mode, seed 7.
SimulationConfig default_config();

/// Missing keys take their defaults; unknown keys and wrong types are errors.
SimulationConfig parse_config(const nlohmann::json& doc);
SimulationConfig load_config(const std::filesystem::path& file);

/// Semantic checks: every finding, not just the first.
std::vector<Finding> validate_config(const SimulationConfig& config);

void to_json(nlohmann::json& j, const SimulationConfig& c);
void to_json(nlohmann::json& j, const RestaurantConfig& r);

/// SHA-256 of the canonical JSON form.
std::string config_hash(const SimulationConfig& config);

/// Starting state for a configured restaurant.
RestaurantState initial_state(const RestaurantConfig& r);

} // namespace competeai
