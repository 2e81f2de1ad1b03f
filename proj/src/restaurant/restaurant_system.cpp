#include "competeai/restaurant_system.hpp"

#include <algorithm>
#include <map>

#include <fmt/format.h>

#include "competeai/scoring.hpp"

namespace competeai {

namespace {

template <class... Ts>
struct overloaded : Ts... {
    using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

std::vector<Dish>::iterator find_dish(std::vector<Dish>& menu, std::string_view name)
{
    const auto key = canonical_dish_name(name);
    return std::find_if(menu.begin(), menu.end(), [&](const Dish& d) { return canonical_dish_name(d.name) == key; });
}

std::vector<Chef>::iterator find_chef(std::vector<Chef>& chefs, std::string_view name)
{
    return std::find_if(chefs.begin(), chefs.end(), [&](const Chef& c) { return c.name == name; });
}

void check_dish(const Dish& d)
{
    try {
        validate(d);
    } catch (const DomainError& e) {
        throw ActionError(ActionErrorCode::invalid_argument, e.what());
    }
}

} // namespace

std::string_view to_string(ActionErrorCode c)
{
    switch (c) {
    case ActionErrorCode::unknown_entity: return "unknown_entity";
    case ActionErrorCode::duplicate_dish: return "duplicate_dish";
    case ActionErrorCode::duplicate_chef: return "duplicate_chef";
    case ActionErrorCode::empty_menu: return "empty_menu";
    case ActionErrorCode::insufficient_funds: return "insufficient_funds";
    case ActionErrorCode::invalid_argument: return "invalid_argument";
    case ActionErrorCode::restaurant_inactive: return "restaurant_inactive";
    }
    return "?";
}

Money daily_fixed_cost(Money monthly_rent, std::span<const Chef> chefs)
{
    Money monthly = monthly_rent;
    for (const auto& c : chefs)
        monthly += c.salary;
    return prorate_daily(monthly);
}

RestaurantState apply_action(const RestaurantState& state, const Action& act, const RestaurantRules& rules)
{
    if (!state.active())
        throw ActionError(ActionErrorCode::restaurant_inactive, "restaurant '" + state.id + "' has quit");

    RestaurantState s = state;
    std::visit(
        overloaded{
            [&](const action::ModifyName& a) {
                if (a.name.empty())
                    throw ActionError(ActionErrorCode::invalid_argument, "empty restaurant name");
                s.name = a.name;
            },
            [&](const action::HireChef& a) {
                const Chef chef{a.name, a.salary};
                try {
                    validate(chef);
                } catch (const DomainError& e) {
                    throw ActionError(ActionErrorCode::invalid_argument, e.what());
                }
                if (find_chef(s.chefs, a.name) != s.chefs.end())
                    throw ActionError(ActionErrorCode::duplicate_chef, "chef '" + a.name + "' already employed");
                s.chefs.push_back(chef);
                const Money runway = daily_fixed_cost(s.rent, s.chefs) * rules.hiring_guard_days;
                if (s.funds < runway)
                    throw ActionError(ActionErrorCode::insufficient_funds,
                                      fmt::format("hiring '{}' needs funds >= {} ({} days of fixed costs), have {}",
                                                  a.name, runway.str(), rules.hiring_guard_days, s.funds.str()));
            },
            [&](const action::FireChef& a) {
                auto it = find_chef(s.chefs, a.name);
                if (it == s.chefs.end())
                    throw ActionError(ActionErrorCode::unknown_entity, "no chef named '" + a.name + "'");
                s.chefs.erase(it);
            },
            [&](const action::AdjustSalary& a) {
                auto it = find_chef(s.chefs, a.name);
                if (it == s.chefs.end())
                    throw ActionError(ActionErrorCode::unknown_entity, "no chef named '" + a.name + "'");
                if (a.salary.cents() < 0)
                    throw ActionError(ActionErrorCode::invalid_argument, "negative salary");
                it->salary = a.salary;
            },
            [&](const action::AddDish& a) {
                check_dish(a.dish);
                if (find_dish(s.menu, a.dish.name) != s.menu.end())
                    throw ActionError(ActionErrorCode::duplicate_dish, "dish '" + a.dish.name + "' already on the menu");
                s.menu.push_back(a.dish);
            },
            [&](const action::DeleteDish& a) {
                auto it = find_dish(s.menu, a.name);
                if (it == s.menu.end())
                    throw ActionError(ActionErrorCode::unknown_entity, "no dish named '" + a.name + "'");
                if (s.menu.size() == 1)
                    throw ActionError(ActionErrorCode::empty_menu, "cannot delete the last dish on the menu");
                s.menu.erase(it);
            },
            [&](const action::ModifyDish& a) {
                auto it = find_dish(s.menu, a.name);
                if (it == s.menu.end())
                    throw ActionError(ActionErrorCode::unknown_entity, "no dish named '" + a.name + "'");
                Dish d = *it;
                if (a.new_name) {
                    auto other = find_dish(s.menu, *a.new_name);
                    if (other != s.menu.end() && other != it)
                        throw ActionError(ActionErrorCode::duplicate_dish,
                                          "dish '" + *a.new_name + "' already on the menu");
                    d.name = *a.new_name;
                }
                if (a.price)
                    d.price = *a.price;
                if (a.cost_price)
                    d.cost_price = *a.cost_price;
                if (a.description)
                    d.description = *a.description;
                check_dish(d);
                *it = std::move(d);
            },
            [&](const action::ModifyAd& a) { s.advertisement = a.content; },
            [&](const action::Quit&) {
                s.status = RestaurantStatus::quit;
                s.quit_cause = QuitCause::voluntary;
            },
        },
        act);
    return s;
}

const Dish* FrozenMenu::find(std::string_view name) const
{
    const auto key = canonical_dish_name(name);
    for (const auto& d : dishes)
        if (canonical_dish_name(d.name) == key)
            return &d;
    return nullptr;
}

FrozenMenu freeze_day_menu(RestaurantState& state, int day)
{
    if (state.menu_frozen_day >= day)
        throw std::logic_error(fmt::format("menu of '{}' already frozen for day {}", state.id, day));
    state.menu_frozen_day = day;
    return FrozenMenu{state.id, day, state.menu, state.chefs};
}

MenuScores score_menu(std::span<const Dish> menu, std::span<const Chef> chefs)
{
    MenuScores out;
    out.no_chef = chefs.empty();
    for (const auto& c : chefs)
        out.chef_salary_used = std::max(out.chef_salary_used, c.salary);
    out.scores.reserve(menu.size());
    for (const auto& d : menu)
        out.scores.push_back({d.name, score_dish(d.cost_price, d.price, out.chef_salary_used)});
    return out;
}

MenuScores score_menu(const FrozenMenu& frozen) { return score_menu(frozen.dishes, frozen.chefs); }

Order make_order(std::string unit_id, const FrozenMenu& menu, std::vector<DishSale> items, int persons)
{
    Order o;
    o.unit_id = std::move(unit_id);
    o.restaurant_id = menu.restaurant_id;
    o.persons = persons;
    for (auto& item : items) {
        const Dish* d = menu.find(item.dish);
        if (!d)
            throw SettlementError(fmt::format("dish '{}' is not on the day-{} menu of {}", item.dish, menu.day,
                                              menu.restaurant_id));
        if (item.quantity < 1)
            throw SettlementError(fmt::format("dish '{}' ordered with quantity {}", item.dish, item.quantity));
        item.dish = d->name;
        o.total += d->price * item.quantity;
    }
    o.items = std::move(items);
    return o;
}

Settlement settle_day(const RestaurantState& state, const FrozenMenu& menu, std::span<const Order> orders)
{
    if (menu.restaurant_id != state.id)
        throw SettlementError("frozen menu belongs to '" + menu.restaurant_id + "', not '" + state.id + "'");
    if (!state.daybooks.empty() && state.daybooks.back().day >= menu.day)
        throw SettlementError(fmt::format("day {} of '{}' already settled", menu.day, state.id));

    Daybook book;
    book.day = menu.day;
    std::map<std::string, int> sold; // keyed by menu name
    Money variable_cost;
    for (const auto& o : orders) {
        if (o.restaurant_id != state.id)
            throw SettlementError("order of unit '" + o.unit_id + "' addressed to '" + o.restaurant_id + "'");
        Money total;
        for (const auto& item : o.items) {
            const Dish* d = menu.find(item.dish);
            if (!d)
                throw SettlementError(fmt::format("order of unit '{}' references unknown dish '{}'", o.unit_id,
                                                  item.dish));
            total += d->price * item.quantity;
            variable_cost += d->cost_price * item.quantity;
            sold[d->name] += item.quantity;
        }
        if (total != o.total)
            throw SettlementError(fmt::format("order of unit '{}' totals {} but items price to {}", o.unit_id,
                                              o.total.str(), total.str()));
        book.income += total;
        book.num_of_customer += o.persons;
        book.num_of_parties += 1;
    }
    for (const auto& d : menu.dishes)
        if (auto it = sold.find(d.name); it != sold.end())
            book.dishes_sold.push_back({d.name, it->second});
    book.expense = daily_fixed_cost(state.rent, menu.chefs) + variable_cost;

    Settlement out{state, book};
    out.state.funds += book.income - book.expense;
    out.state.daybooks.push_back(book);
    if (out.state.funds.cents() < 0 && out.state.active()) {
        out.state.status = RestaurantStatus::quit;
        out.state.quit_cause = QuitCause::insolvency;
    }
    return out;
}

std::vector<PublicDish> public_menu(std::span<const Dish> dishes)
{
    std::vector<PublicDish> out;
    out.reserve(dishes.size());
    for (const auto& d : dishes)
        out.push_back({d.name, d.price, d.description});
    return out;
}

PublicInfo public_view(const RestaurantState& state, const FrozenMenu& menu, std::size_t comment_window)
{
    PublicInfo p;
    p.restaurant_id = state.id;
    p.name = state.name;
    p.customer_score = customer_score(state.comments);
    p.advertisement = state.advertisement;
    p.menu = public_menu(menu.dishes);
    const auto n = state.comments.size();
    const auto first = n > comment_window ? n - comment_window : 0;
    p.comments.assign(state.comments.begin() + static_cast<std::ptrdiff_t>(first), state.comments.end());
    return p;
}

RivalInfo rival_view(const RestaurantState& rival, int day)
{
    RivalInfo r;
    r.restaurant_id = rival.id;
    r.name = rival.name;
    r.menu = public_menu(rival.menu);
    if (day >= 2) {
        for (const auto& b : rival.daybooks)
            if (b.day == day - 1)
                r.customer_flow = b.num_of_customer;
        for (const auto& c : rival.comments)
            if (c.day == day - 1)
                r.comments.push_back(c);
    }
    return r;
}

void to_json(nlohmann::json& j, const DishScore& s) { j = {{"dish", s.dish}, {"score", s.score}}; }

void from_json(const nlohmann::json& j, DishScore& s)
{
    s.dish = j.at("dish").get<std::string>();
    s.score = j.at("score").get<double>();
}

void to_json(nlohmann::json& j, const FrozenMenu& m)
{
    j = {{"restaurant_id", m.restaurant_id}, {"day", m.day}, {"dishes", m.dishes}, {"chefs", m.chefs}};
}

void from_json(const nlohmann::json& j, FrozenMenu& m)
{
    m.restaurant_id = j.at("restaurant_id").get<std::string>();
    m.day = j.at("day").get<int>();
    m.dishes = j.at("dishes").get<std::vector<Dish>>();
    m.chefs = j.at("chefs").get<std::vector<Chef>>();
}

void to_json(nlohmann::json& j, const Order& o)
{
    j = {{"unit", o.unit_id},     {"restaurant", o.restaurant_id}, {"items", o.items},
         {"total", o.total},      {"persons", o.persons},          {"over_budget", o.over_budget}};
}

void from_json(const nlohmann::json& j, Order& o)
{
    o.unit_id = j.at("unit").get<std::string>();
    o.restaurant_id = j.at("restaurant").get<std::string>();
    o.items = j.at("items").get<std::vector<DishSale>>();
    o.total = j.at("total").get<Money>();
    o.persons = j.at("persons").get<int>();
    o.over_budget = j.value("over_budget", false);
}

void to_json(nlohmann::json& j, const PublicDish& d)
{
    j = {{"name", d.name}, {"price", d.price}, {"description", d.description}};
}

void to_json(nlohmann::json& j, const PublicInfo& p)
{
    j = {{"id", p.restaurant_id},
         {"name", p.name},
         {"customer_score", p.customer_score ? nlohmann::json(*p.customer_score) : nlohmann::json(nullptr)},
         {"advertisement", p.advertisement},
         {"menu", p.menu},
         {"comments", p.comments}};
}

void to_json(nlohmann::json& j, const RivalInfo& r)
{
    j = {{"id", r.restaurant_id},
         {"name", r.name},
         {"menu", r.menu},
         {"customer_flow", r.customer_flow ? nlohmann::json(*r.customer_flow) : nlohmann::json(nullptr)},
         {"comments", r.comments}};
}

} // namespace competeai
