#pragma once

#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "competeai/action.hpp"
#include "competeai/domain.hpp"

namespace competeai {

enum class ActionErrorCode {
    unknown_entity,
    duplicate_dish,
    duplicate_chef,
    empty_menu,
    insufficient_funds,
    invalid_argument,
    restaurant_inactive,
};

std::string_view to_string(ActionErrorCode c);

/// Rejection of an agent-issued action. The code is echoed back to the agent.
class ActionError : public std::runtime_error {
public:
    ActionError(ActionErrorCode code, const std::string& what) : std::runtime_error(what), code_(code) {}
    ActionErrorCode code() const { return code_; }

private:
    ActionErrorCode code_;
};

/// Internal consistency failure (orchestrator bug, not agent error).
class SettlementError : public std::logic_error {
public:
    using std::logic_error::logic_error;
};

struct RestaurantRules {
    /// HireChef is rejected unless funds cover this many days of fixed costs after the hire.
    int hiring_guard_days = 3;
};

/// Rent plus salaries, prorated to one day.
Money daily_fixed_cost(Money monthly_rent, std::span<const Chef> chefs);

/// Pure transition. Throws ActionError; the input state is never modified.
RestaurantState apply_action(const RestaurantState& state, const Action& action, const RestaurantRules& rules = {});

struct DishScore {
    std::string dish;
    double score = 0.0;
    bool operator==(const DishScore&) const = default;
};

struct MenuScores {
    std::vector<DishScore> scores;
    Money chef_salary_used; // highest salary among employed chefs; zero with no chefs
    bool no_chef = false;
    bool operator==(const MenuScores&) const = default;
};

/// Immutable per-day menu snapshot used for views, orders and settlement.
struct FrozenMenu {
    std::string restaurant_id;
    int day = 0;
    std::vector<Dish> dishes;
    std::vector<Chef> chefs;

    const Dish* find(std::string_view name) const;
    bool operator==(const FrozenMenu&) const = default;
};

/// Snapshots the menu and staff for `day`. Throws std::logic_error when the day is already frozen.
FrozenMenu freeze_day_menu(RestaurantState& state, int day);

/// Per-dish scores using the highest-paid chef's salary.
MenuScores score_menu(std::span<const Dish> menu, std::span<const Chef> chefs);
MenuScores score_menu(const FrozenMenu& frozen);

struct Order {
    std::string unit_id;
    std::string restaurant_id;
    std::vector<DishSale> items;
    Money total;
    int persons = 1;
    bool over_budget = false;
    bool operator==(const Order&) const = default;
};

/// Prices `items` against the frozen menu. Throws SettlementError on an off-menu dish.
Order make_order(std::string unit_id, const FrozenMenu& menu, std::vector<DishSale> items, int persons);

struct Settlement {
    RestaurantState state;
    Daybook daybook;
};

/// Closes the day: books income and expense, appends the daybook, and forces
/// quit on negative funds.
Settlement settle_day(const RestaurantState& state, const FrozenMenu& menu, std::span<const Order> orders);

struct PublicDish {
    std::string name;
    Money price;
    std::string description;
    bool operator==(const PublicDish&) const = default;
};

/// What customers see. Never carries cost prices, funds or salaries.
struct PublicInfo {
    std::string restaurant_id;
    std::string name;
    std::optional<double> customer_score;
    std::string advertisement;
    std::vector<PublicDish> menu;
    std::vector<Comment> comments;
};

/// What a competitor sees of its rival, from the previous completed day.
struct RivalInfo {
    std::string restaurant_id;
    std::string name;
    std::vector<PublicDish> menu;
    std::optional<int> customer_flow;
    std::vector<Comment> comments;
};

inline constexpr std::size_t kPublicCommentWindow = 20;

PublicInfo public_view(const RestaurantState& state, const FrozenMenu& menu,
                       std::size_t comment_window = kPublicCommentWindow);
RivalInfo rival_view(const RestaurantState& rival, int day);

std::vector<PublicDish> public_menu(std::span<const Dish> dishes);

void to_json(nlohmann::json& j, const DishScore& s);
void from_json(const nlohmann::json& j, DishScore& s);
void to_json(nlohmann::json& j, const FrozenMenu& m);
void from_json(const nlohmann::json& j, FrozenMenu& m);
void to_json(nlohmann::json& j, const Order& o);
void from_json(const nlohmann::json& j, Order& o);
void to_json(nlohmann::json& j, const PublicDish& d);
void to_json(nlohmann::json& j, const PublicInfo& p);
void to_json(nlohmann::json& j, const RivalInfo& r);

} // namespace competeai
