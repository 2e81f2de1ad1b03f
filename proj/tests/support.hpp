#pragma once

#include <atomic>
#include <filesystem>
#include <functional>
#include <mutex>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "competeai/backend.hpp"
#include "competeai/config.hpp"
#include "competeai/domain.hpp"
#include "competeai/roster.hpp"
#include "competeai/run_log.hpp"
#include "competeai/scripted_backend.hpp"
#include "competeai/templates.hpp"
#include "competeai/world.hpp"

namespace competeai::test {

std::filesystem::path source_path(const std::string& rel);

/// Fresh directory under the system temp dir, removed on destruction.
class TempDir {
public:
    TempDir();
    ~TempDir();
    TempDir(const TempDir&) = delete;
    TempDir& operator=(const TempDir&) = delete;
    const std::filesystem::path& path() const { return path_; }
    std::filesystem::path operator/(const std::string& rel) const { return path_ / rel; }

private:
    std::filesystem::path path_;
};

/// Backend driven by a lambda; counts calls and keeps every prompt.
class FunctionBackend : public AgentBackend {
public:
    explicit FunctionBackend(std::function<std::string(const Prompt&)> fn) : fn_(std::move(fn)) {}
    std::string complete(const Prompt& prompt) override;
    std::string identity() const override { return "function"; }
    int calls() const { return calls_.load(); }
    std::vector<Prompt> prompts() const;

private:
    std::function<std::string(const Prompt&)> fn_;
    std::atomic<int> calls_{0};
    mutable std::mutex mutex_;
    std::vector<Prompt> prompts_;
};

/// Wraps a JSON value in a ```json fence.
std::string fenced(const nlohmann::json& j);

Roster bundled_roster();
ScriptedPolicies bundled_policies();
SimulationConfig bundled_config();
TemplateSet templates_v1();

struct RunResult {
    RunLog log;
    World world;
};

/// Whole run with the scripted backend, as the CLI does it.
RunResult run_scripted(const SimulationConfig& config, const ScriptedPolicies& policies = bundled_policies(),
                       int stop_after_day = 0);

/// Plain dish for fixtures.
Dish dish(const std::string& name, double price, double cost);

struct SyntheticDay {
    std::vector<Dish> menu[2];
    double salary[2] = {2500, 2500};
    int persons[2] = {25, 25};
    std::vector<int> comment_scores[2];
};

/// Minimal but well-formed log for analysis tests: MenuFrozen, CommentPosted
/// and DaySettled per restaurant and day. Dish scores come from the oracle formula.
RunLog synthetic_log(const std::string& mode, const std::vector<SyntheticDay>& days, int horizon = 15);

/// Days with the given person flows and a fixed two-dish menu on each side.
RunLog flow_log(const std::string& mode, const std::vector<std::pair<int, int>>& flows, int horizon = 15);

// Independent oracles, written from the definitions and sharing no code with the library.
double oracle_dish_score(double cost, double price, double salary);
std::string oracle_canonical(const std::string& name);
std::optional<double> oracle_jaccard(const std::vector<std::string>& a, const std::vector<std::string>& b);
/// Threshold as the exact fraction num/den. Returns -1 for "no winner", 0/1
/// for the winner, -2 when not evaluable.
int oracle_wta(const std::vector<std::pair<int, int>>& flows, int threshold_num, int threshold_den, int from_day,
               int horizon);
std::optional<double> oracle_customer_score(const std::vector<int>& scores);

} // namespace competeai::test
