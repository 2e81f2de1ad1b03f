#include "competeai/tool_calls.hpp"

#include <algorithm>
#include <cctype>
#include <sstream>

#include <fmt/format.h>

namespace competeai {

namespace {

std::string trim(std::string_view s)
{
    std::size_t b = 0, e = s.size();
    while (b < e && std::isspace(static_cast<unsigned char>(s[b])))
        ++b;
    while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1])))
        --e;
    return std::string(s.substr(b, e - b));
}

std::string lower(std::string s)
{
    std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    return s;
}

} // namespace

std::vector<FencedBlock> fenced_blocks(std::string_view text)
{
    std::vector<FencedBlock> out;
    std::size_t pos = 0;
    while (true) {
        const auto open = text.find("```", pos);
        if (open == std::string_view::npos)
            break;
        const auto line_end = text.find('\n', open + 3);
        if (line_end == std::string_view::npos)
            break;
        const auto close = text.find("```", line_end + 1);
        if (close == std::string_view::npos)
            break;
        out.push_back({trim(text.substr(open + 3, line_end - open - 3)),
                       std::string(text.substr(line_end + 1, close - line_end - 1)), open});
        pos = close + 3;
    }
    return out;
}

std::optional<nlohmann::json> last_json_block(std::string_view text, std::vector<std::string>& problems)
{
    const auto blocks = fenced_blocks(text);
    if (blocks.empty()) {
        problems.push_back("no action block: reply must end with a fenced ```json block");
        return std::nullopt;
    }
    try {
        return nlohmann::json::parse(blocks.back().body);
    } catch (const nlohmann::json::parse_error& e) {
        problems.push_back(fmt::format("invalid JSON in the last fenced block: {}", e.what()));
        return std::nullopt;
    }
}

ToolCallParse parse_tool_calls(std::string_view completion)
{
    ToolCallParse out;
    auto doc = last_json_block(completion, out.diagnostics);
    if (!doc)
        return out;
    if (!doc->is_array()) {
        out.diagnostics.push_back("the action block must hold a JSON array of operations");
        return out;
    }
    for (std::size_t i = 0; i < doc->size(); ++i) {
        std::vector<std::string> problems;
        auto a = action_from_wire((*doc)[i], problems);
        for (auto& p : problems)
            out.diagnostics.push_back(fmt::format("operation #{}: {}", i + 1, p));
        if (a)
            out.actions.push_back(std::move(*a));
    }
    if (!out.ok())
        out.actions.clear();
    return out;
}

std::string serialize_tool_calls(std::span<const Action> actions)
{
    nlohmann::json arr = nlohmann::json::array();
    for (const auto& a : actions)
        arr.push_back(action_to_wire(a));
    return "```json\n" + arr.dump() + "\n```";
}

std::optional<std::string> extract_summary(std::string_view completion)
{
    std::optional<std::string> found;
    std::istringstream in{std::string(completion)};
    std::string line;
    while (std::getline(in, line)) {
        auto t = trim(line);
        // tolerate markdown emphasis around the label
        while (!t.empty() && (t.front() == '*' || t.front() == '#'))
            t.erase(t.begin());
        if (lower(t.substr(0, 8)) == "summary:") {
            auto rest = trim(t.substr(8));
            while (!rest.empty() && rest.front() == '*')
                rest.erase(rest.begin());
            found = trim(rest);
        }
    }
    if (found && found->empty())
        found.reset();
    return found;
}

std::string extract_analysis(std::string_view completion)
{
    const auto blocks = fenced_blocks(completion);
    const auto head = completion.substr(0, blocks.empty() ? completion.size() : blocks.back().offset);
    std::istringstream in{std::string(head)};
    std::string line, out;
    while (std::getline(in, line)) {
        auto t = trim(line);
        while (!t.empty() && (t.front() == '*' || t.front() == '#'))
            t.erase(t.begin());
        if (lower(t.substr(0, 8)) == "summary:")
            continue;
        out += line;
        out += '\n';
    }
    return trim(out);
}

} // namespace competeai
