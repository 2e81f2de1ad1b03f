#include "competeai/roster.hpp"

#include <fstream>
#include <map>
#include <set>
#include <sstream>

namespace competeai {

const CustomerProfile* Roster::find(std::string_view name) const
{
    for (const auto& c : customers)
        if (c.name == name)
            return &c;
    return nullptr;
}

std::string_view to_string(DiningMode m) { return m == DiningMode::single ? "single" : "group"; }

DiningMode dining_mode_from_string(std::string_view s)
{
    if (s == "single")
        return DiningMode::single;
    if (s == "group")
        return DiningMode::group;
    throw DomainError("unknown dining mode '" + std::string(s) + "'");
}

std::vector<std::string> group_ids(const Roster& roster)
{
    std::map<GroupType, int> ordinal;
    std::vector<std::string> ids;
    ids.reserve(roster.groups.size());
    for (const auto& g : roster.groups)
        ids.push_back(std::string(to_string(g.group_type)) + "-" + std::to_string(++ordinal[g.group_type]));
    return ids;
}

void validate_roster(const Roster& roster)
{
    std::set<std::string> names;
    for (const auto& c : roster.customers) {
        if (c.name.empty())
            throw RosterError("customer with empty name");
        if (!names.insert(c.name).second)
            throw RosterError("duplicate customer name '" + c.name + "'");
        if (c.monthly_income.cents() <= 0)
            throw RosterError("customer '" + c.name + "': monthly income must be positive");
        if (income_band_for(c.monthly_income) != c.income_band)
            throw RosterError("customer '" + c.name + "': income band '" + std::string(to_string(c.income_band)) +
                              "' does not match income " + c.monthly_income.str());
    }

    const auto ids = group_ids(roster);
    std::set<std::string> grouped;
    for (std::size_t i = 0; i < roster.groups.size(); ++i) {
        const auto& g = roster.groups[i];
        const auto n = g.members.size();
        if (n < 2 || n > 4)
            throw RosterError("group '" + ids[i] + "': size " + std::to_string(n) + " outside [2,4]");
        for (const auto& m : g.members) {
            if (!names.count(m.name))
                throw RosterError("group '" + ids[i] + "': member '" + m.name + "' not in roster");
            if (!grouped.insert(m.name).second)
                throw RosterError("group '" + ids[i] + "': member '" + m.name + "' already belongs to another group");
        }
    }
}

Roster parse_roster(const nlohmann::json& doc)
{
    if (!doc.is_object())
        throw RosterError("roster document must be an object");
    const int version = doc.value("schema_version", 0);
    if (version != kRosterSchemaVersion)
        throw RosterError("unsupported roster schema_version " + std::to_string(version));

    Roster r;
    const auto& customers = doc.at("customers");
    for (std::size_t i = 0; i < customers.size(); ++i) {
        try {
            r.customers.push_back(customers[i].get<CustomerProfile>());
        } catch (const std::exception& e) {
            throw RosterError("customer record #" + std::to_string(i + 1) + ": " + e.what());
        }
    }
    const auto groups = doc.value("groups", nlohmann::json::array());
    for (std::size_t i = 0; i < groups.size(); ++i) {
        try {
            r.groups.push_back(groups[i].get<GroupProfile>());
        } catch (const std::exception& e) {
            throw RosterError("group record #" + std::to_string(i + 1) + ": " + e.what());
        }
    }
    validate_roster(r);
    return r;
}

Roster load_roster(const std::filesystem::path& file)
{
    std::ifstream in(file);
    if (!in)
        throw RosterError("cannot open roster file " + file.string());
    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(in);
    } catch (const nlohmann::json::parse_error& e) {
        throw RosterError("roster " + file.string() + ": " + e.what());
    }
    return parse_roster(doc);
}

std::string serialize_roster(const Roster& roster)
{
    std::ostringstream out;
    out << "{\n  \"schema_version\": " << kRosterSchemaVersion << ",\n  \"customers\": [\n";
    for (std::size_t i = 0; i < roster.customers.size(); ++i)
        out << "    " << nlohmann::json(roster.customers[i]).dump() << (i + 1 < roster.customers.size() ? ",\n" : "\n");
    out << "  ],\n  \"groups\": [\n";
    for (std::size_t i = 0; i < roster.groups.size(); ++i)
        out << "    " << nlohmann::json(roster.groups[i]).dump() << (i + 1 < roster.groups.size() ? ",\n" : "\n");
    out << "  ]\n}\n";
    return out.str();
}

std::vector<DecisionUnit> decision_units(const Roster& roster, DiningMode mode)
{
    std::vector<DecisionUnit> units;
    if (mode == DiningMode::single) {
        for (const auto& c : roster.customers)
            units.push_back({c.name, {c}, std::nullopt});
        return units;
    }

    std::set<std::string> grouped;
    for (const auto& g : roster.groups)
        for (const auto& m : g.members)
            grouped.insert(m.name);
    for (const auto& c : roster.customers)
        if (!grouped.count(c.name))
            units.push_back({c.name, {c}, std::nullopt});

    const auto ids = group_ids(roster);
    for (std::size_t i = 0; i < roster.groups.size(); ++i) {
        DecisionUnit u{ids[i], {}, roster.groups[i]};
        for (const auto& m : roster.groups[i].members)
            u.members.push_back(*roster.find(m.name));
        units.push_back(std::move(u));
    }
    return units;
}

} // namespace competeai
