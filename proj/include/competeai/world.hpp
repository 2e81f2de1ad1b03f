#pragma once

#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "competeai/config.hpp"
#include "competeai/customer_engine.hpp"
#include "competeai/roster.hpp"
#include "competeai/run_log.hpp"

namespace competeai {

/// Everything that carries over from one simulated day to the next.
struct World {
    int day = 0; // last completed day
    std::vector<RestaurantState> restaurants; // in config order
    std::map<std::string, std::vector<MealMemory>> meals; // per decision unit
    std::string termination; // cause, empty while running
    bool operator==(const World&) const = default;

    bool finished() const { return !termination.empty(); }
    RestaurantState& restaurant(const std::string& id);
    const RestaurantState& restaurant(const std::string& id) const;
};

World initial_world(const SimulationConfig& config);

void to_json(nlohmann::json& j, const World& w);
void from_json(const nlohmann::json& j, World& w);

/// The log disagrees with what re-applying its own events produces.
class FoldError : public std::runtime_error {
public:
    FoldError(const std::string& what, std::int64_t seq) : std::runtime_error(what), seq_(seq) {}
    std::int64_t seq() const { return seq_; }

private:
    std::int64_t seq_;
};

/// Re-applies every event of `log` to `start`. Settlements are recomputed from
/// the logged orders and must match the logged daybooks exactly.
World fold(World start, const RunLog& log, const SimulationConfig& config);

} // namespace competeai
