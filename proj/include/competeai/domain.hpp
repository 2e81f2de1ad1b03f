#pragma once

#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "competeai/money.hpp"

namespace competeai {

/// Thrown when a domain value violates its type invariants.
class DomainError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

struct Dish {
    std::string name;
    Money price;      // selling price p
    Money cost_price; // ingredient cost c
    std::string description;

    bool operator==(const Dish&) const = default;
};

struct Chef {
    std::string name;
    Money salary; // monthly

    bool operator==(const Chef&) const = default;
};

struct Comment {
    int day = 1;
    std::string author;
    int score = 5; // 1..10
    std::string content;

    bool operator==(const Comment&) const = default;
};

struct DishSale {
    std::string dish;
    int quantity = 0;

    bool operator==(const DishSale&) const = default;
};

struct Daybook {
    int day = 1;
    Money income;
    Money expense;
    int num_of_customer = 0; // persons served
    int num_of_parties = 0;  // decision units served
    std::vector<DishSale> dishes_sold;

    Money profit() const { return income - expense; }
    bool operator==(const Daybook&) const = default;
};

enum class RestaurantStatus { active, quit };
enum class QuitCause { none, voluntary, insolvency };

struct RestaurantState {
    std::string id; // stable identifier ("R1", "R2"); name may change
    std::string name;
    Money funds;
    Money rent; // monthly
    std::vector<Chef> chefs;
    std::vector<Dish> menu;
    std::string advertisement;
    std::vector<Comment> comments;
    std::vector<Daybook> daybooks;
    std::vector<std::string> memory;
    RestaurantStatus status = RestaurantStatus::active;
    QuitCause quit_cause = QuitCause::none;
    int menu_frozen_day = 0;

    bool active() const { return status == RestaurantStatus::active; }
    const Dish* find_dish(std::string_view name) const;
    const Chef* find_chef(std::string_view name) const;

    bool operator==(const RestaurantState&) const = default;
};

enum class IncomeBand { very_poor, poor, middle_class, affluent };

struct CustomerProfile {
    std::string name;
    Money monthly_income;
    IncomeBand income_band = IncomeBand::middle_class;
    std::string taste;
    std::string health;
    std::string dietary_restriction; // "None" allowed
    std::string personality;

    bool operator==(const CustomerProfile&) const = default;
};

enum class GroupType { family, colleague, couple, friend_ };

struct GroupMember {
    std::string name;
    std::string role;

    bool operator==(const GroupMember&) const = default;
};

struct GroupProfile {
    GroupType group_type = GroupType::family;
    std::string feature;
    std::vector<GroupMember> members; // first member is the tie-break leader

    const GroupMember& leader() const { return members.front(); }
    bool operator==(const GroupProfile&) const = default;
};

/// Lowercase, strip punctuation, collapse internal whitespace, trim.
std::string canonical_dish_name(std::string_view name);

IncomeBand income_band_for(Money monthly_income);

std::string_view to_string(IncomeBand b);
std::string_view to_string(GroupType t);
std::string_view to_string(RestaurantStatus s);
std::string_view to_string(QuitCause c);
IncomeBand income_band_from_string(std::string_view s);
GroupType group_type_from_string(std::string_view s);
RestaurantStatus restaurant_status_from_string(std::string_view s);
QuitCause quit_cause_from_string(std::string_view s);

void validate(const Dish& d);
void validate(const Chef& c);
void validate(const Comment& c);

void to_json(nlohmann::json& j, const Dish& d);
void from_json(const nlohmann::json& j, Dish& d);
void to_json(nlohmann::json& j, const Chef& c);
void from_json(const nlohmann::json& j, Chef& c);
void to_json(nlohmann::json& j, const Comment& c);
void from_json(const nlohmann::json& j, Comment& c);
void to_json(nlohmann::json& j, const DishSale& s);
void from_json(const nlohmann::json& j, DishSale& s);
void to_json(nlohmann::json& j, const Daybook& d);
void from_json(const nlohmann::json& j, Daybook& d);
void to_json(nlohmann::json& j, const RestaurantState& s);
void from_json(const nlohmann::json& j, RestaurantState& s);
void to_json(nlohmann::json& j, const CustomerProfile& p);
void from_json(const nlohmann::json& j, CustomerProfile& p);
void to_json(nlohmann::json& j, const GroupMember& m);
void from_json(const nlohmann::json& j, GroupMember& m);
void to_json(nlohmann::json& j, const GroupProfile& g);
void from_json(const nlohmann::json& j, GroupProfile& g);

} // namespace competeai
