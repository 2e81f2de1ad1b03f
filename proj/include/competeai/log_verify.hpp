#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "competeai/config.hpp"
#include "competeai/roster.hpp"
#include "competeai/run_log.hpp"

namespace competeai {

struct Violation {
    std::string check; // "flow", "funds", "majority", "ordering", "fold", "units"
    int day = 0;
    std::int64_t seq = 0;
    std::string message;
};

/// Recomputes every cross-event invariant of a finished or partial log:
/// daily person flow equals the roster head count, funds follow
/// open + income - expense exactly, group choices equal the majority of the
/// recorded votes, each unit decides once a day, phases never go back, and
/// folding the events over the configured start state succeeds.
std::vector<Violation> verify_log(const RunLog& log, const SimulationConfig& config, const Roster& roster);

} // namespace competeai
