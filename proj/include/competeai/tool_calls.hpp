#pragma once

#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "competeai/action.hpp"

namespace competeai {

struct FencedBlock {
    std::string info; // text after the opening fence, e.g. "json"
    std::string body;
    std::size_t offset = 0; // position of the opening fence
};

/// Every ``` fenced block in order. An unterminated final fence is ignored.
std::vector<FencedBlock> fenced_blocks(std::string_view text);

/// Parses the last fenced block as JSON. Records "no action block" or
/// "invalid JSON: ..." in `problems` on failure.
std::optional<nlohmann::json> last_json_block(std::string_view text, std::vector<std::string>& problems);

struct ToolCallParse {
    std::vector<Action> actions;
    std::vector<std::string> diagnostics;
    bool ok() const { return diagnostics.empty(); }
};

/// Extracts the last fenced JSON array and maps each element onto an Action.
/// Diagnostics list every violation, prefixed with the element index.
ToolCallParse parse_tool_calls(std::string_view completion);

/// Renders actions as the fenced block parse_tool_calls accepts.
std::string serialize_tool_calls(std::span<const Action> actions);

/// The "Summary:" line of a restaurant reply, if present.
std::optional<std::string> extract_summary(std::string_view completion);

/// Reply text before the last fenced block, without the summary line.
std::string extract_analysis(std::string_view completion);

} // namespace competeai
