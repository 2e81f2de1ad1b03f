#pragma once

#include <optional>
#include <string>
#include <variant>
#include <vector>

#include <nlohmann/json.hpp>

#include "competeai/domain.hpp"

namespace competeai {

namespace action {

struct ModifyName {
    std::string name;
    bool operator==(const ModifyName&) const = default;
};
struct HireChef {
    std::string name;
    Money salary;
    bool operator==(const HireChef&) const = default;
};
struct FireChef {
    std::string name;
    bool operator==(const FireChef&) const = default;
};
struct AdjustSalary {
    std::string name;
    Money salary;
    bool operator==(const AdjustSalary&) const = default;
};
struct AddDish {
    Dish dish;
    bool operator==(const AddDish&) const = default;
};
struct DeleteDish {
    std::string name;
    bool operator==(const DeleteDish&) const = default;
};
struct ModifyDish {
    std::string name;
    std::optional<std::string> new_name;
    std::optional<Money> price;
    std::optional<Money> cost_price;
    std::optional<std::string> description;
    bool operator==(const ModifyDish&) const = default;
};
struct ModifyAd {
    std::string content;
    bool operator==(const ModifyAd&) const = default;
};
struct Quit {
    bool operator==(const Quit&) const = default;
};

} // namespace action

using Action = std::variant<action::ModifyName, action::HireChef, action::FireChef, action::AdjustSalary,
                            action::AddDish, action::DeleteDish, action::ModifyDish, action::ModifyAd, action::Quit>;

/// Wire form: {"api": ..., "method": ..., "args": {...}}, one row of the management API table.
nlohmann::json action_to_wire(const Action& a);

/// Maps one wire object onto an Action. Every violation found is appended to
/// `problems`; returns nullopt when any were found.
std::optional<Action> action_from_wire(const nlohmann::json& j, std::vector<std::string>& problems);

/// Short human-readable rendering, used for auto-summaries.
std::string describe(const Action& a);

} // namespace competeai
