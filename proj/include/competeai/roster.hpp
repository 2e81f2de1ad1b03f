#pragma once

#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "competeai/domain.hpp"

namespace competeai {

inline constexpr int kRosterSchemaVersion = 1;

class RosterError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct Roster {
    std::vector<CustomerProfile> customers;
    std::vector<GroupProfile> groups;

    const CustomerProfile* find(std::string_view name) const;
    bool operator==(const Roster&) const = default;
};

enum class DiningMode { single, group };

std::string_view to_string(DiningMode m);
DiningMode dining_mode_from_string(std::string_view s);

/// One decision-making unit: an individual or a group that picks a restaurant jointly.
struct DecisionUnit {
    std::string id; // customer name, or "<group type>-<ordinal>"
    std::vector<CustomerProfile> members;
    std::optional<GroupProfile> group;

    bool is_group() const { return group.has_value(); }
    int persons() const { return static_cast<int>(members.size()); }
    const CustomerProfile& leader() const { return members.front(); }
};

/// Parses and validates. Throws RosterError naming the offending record.
Roster parse_roster(const nlohmann::json& doc);
Roster load_roster(const std::filesystem::path& file);

/// Checks every invariant; throws RosterError on the first violation.
void validate_roster(const Roster& roster);

/// One record per line, stable field order.
std::string serialize_roster(const Roster& roster);

/// Single mode: every customer is a unit. Group mode: ungrouped customers
/// followed by the groups in file order.
std::vector<DecisionUnit> decision_units(const Roster& roster, DiningMode mode);

/// Ids for groups, e.g. "family-1", "couple-3".
std::vector<std::string> group_ids(const Roster& roster);

} // namespace competeai
