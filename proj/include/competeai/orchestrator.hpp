#pragma once

#include <functional>
#include <stdexcept>
#include <string>
#include <vector>

#include "competeai/backend.hpp"
#include "competeai/config.hpp"
#include "competeai/roster.hpp"
#include "competeai/run_log.hpp"
#include "competeai/templates.hpp"
#include "competeai/world.hpp"

namespace competeai {

/// Termination causes as written to the log.
namespace cause {
inline constexpr const char* horizon = "horizon";
inline constexpr const char* voluntary_quit = "voluntary_quit";
inline constexpr const char* insolvency = "insolvency";
inline constexpr const char* request_cap = "request_cap";
inline constexpr const char* abort = "abort";
} // namespace cause

/// The run stopped on an unexpected error; the log ends with Terminated(abort).
class RunAborted : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Runs `fn(i)` for i in [0, n) on up to `workers` threads. The exception of
/// the lowest failing index is rethrown after all work finishes.
void parallel_for(std::size_t n, int workers, const std::function<void(std::size_t)>& fn);

class Simulation {
public:
    /// `backend_kind` goes into the log header ("scripted" or "gateway").
    /// Unmatched decision reasons are sent to the backend only when
    /// `classify_with_backend` is set.
    Simulation(SimulationConfig config, Roster roster, TemplateSet templates, AgentBackend& backend,
               std::string backend_kind, bool classify_with_backend);

    /// Continues from a saved world and log.
    void restore(World world, RunLog log);

    /// Runs one whole day; its events reach the log only if the day completes.
    void run_day();
    /// Runs days until termination, or until `stop_after_day` (0 = no limit)
    /// has been completed. Returns true when the run is finished.
    bool run(int stop_after_day = 0);

    bool finished() const { return world_.finished(); }
    const World& world() const { return world_; }
    const RunLog& log() const { return log_; }
    const SimulationConfig& config() const { return config_; }
    const Roster& roster() const { return roster_; }
    const std::vector<DecisionUnit>& units() const { return units_; }

private:
    void terminate(const std::string& cause, const std::string& message = {});

    SimulationConfig config_;
    Roster roster_;
    TemplateSet templates_;
    AgentBackend& backend_;
    bool classify_with_backend_;
    std::vector<DecisionUnit> units_;
    World world_;
    RunLog log_;
};

RunLogHeader make_header(const SimulationConfig& config, const Roster& roster, const std::string& template_version,
                         const std::string& backend_kind);

} // namespace competeai
