#include "competeai/domain.hpp"

#include <array>
#include <cctype>
#include <utility>

namespace competeai {

namespace {

template <typename E, std::size_t N>
E enum_from(std::string_view s, const std::array<std::pair<E, std::string_view>, N>& table, const char* what)
{
    for (const auto& [e, name] : table)
        if (name == s)
            return e;
    throw DomainError(std::string("unknown ") + what + " '" + std::string(s) + "'");
}

template <typename E, std::size_t N>
std::string_view enum_name(E e, const std::array<std::pair<E, std::string_view>, N>& table)
{
    for (const auto& [v, name] : table)
        if (v == e)
            return name;
    return "?";
}

constexpr std::array<std::pair<IncomeBand, std::string_view>, 4> kBands{{
    {IncomeBand::very_poor, "very_poor"},
    {IncomeBand::poor, "poor"},
    {IncomeBand::middle_class, "middle_class"},
    {IncomeBand::affluent, "affluent"},
}};

constexpr std::array<std::pair<GroupType, std::string_view>, 4> kGroupTypes{{
    {GroupType::family, "family"},
    {GroupType::colleague, "colleague"},
    {GroupType::couple, "couple"},
    {GroupType::friend_, "friend"},
}};

constexpr std::array<std::pair<RestaurantStatus, std::string_view>, 2> kStatuses{{
    {RestaurantStatus::active, "active"},
    {RestaurantStatus::quit, "quit"},
}};

constexpr std::array<std::pair<QuitCause, std::string_view>, 3> kQuitCauses{{
    {QuitCause::none, "none"},
    {QuitCause::voluntary, "voluntary"},
    {QuitCause::insolvency, "insolvency"},
}};

} // namespace

const Dish* RestaurantState::find_dish(std::string_view name) const
{
    const auto key = canonical_dish_name(name);
    for (const auto& d : menu)
        if (canonical_dish_name(d.name) == key)
            return &d;
    return nullptr;
}

const Chef* RestaurantState::find_chef(std::string_view name) const
{
    for (const auto& c : chefs)
        if (c.name == name)
            return &c;
    return nullptr;
}

std::string canonical_dish_name(std::string_view name)
{
    std::string out;
    out.reserve(name.size());
    bool pending_space = false;
    for (char ch : name) {
        const auto u = static_cast<unsigned char>(ch);
        if (std::ispunct(u))
            continue;
        if (std::isspace(u)) {
            pending_space = !out.empty();
            continue;
        }
        if (pending_space) {
            out.push_back(' ');
            pending_space = false;
        }
        out.push_back(static_cast<char>(std::tolower(u)));
    }
    return out;
}

IncomeBand income_band_for(Money monthly_income)
{
    const auto c = monthly_income.cents();
    if (c <= 5800'00)
        return IncomeBand::very_poor;
    if (c < 8000'00)
        return IncomeBand::poor;
    if (c < 12000'00)
        return IncomeBand::middle_class;
    return IncomeBand::affluent;
}

std::string_view to_string(IncomeBand b) { return enum_name(b, kBands); }
std::string_view to_string(GroupType t) { return enum_name(t, kGroupTypes); }
std::string_view to_string(RestaurantStatus s) { return enum_name(s, kStatuses); }
std::string_view to_string(QuitCause c) { return enum_name(c, kQuitCauses); }
IncomeBand income_band_from_string(std::string_view s) { return enum_from(s, kBands, "income band"); }
GroupType group_type_from_string(std::string_view s) { return enum_from(s, kGroupTypes, "group type"); }
RestaurantStatus restaurant_status_from_string(std::string_view s) { return enum_from(s, kStatuses, "status"); }
QuitCause quit_cause_from_string(std::string_view s) { return enum_from(s, kQuitCauses, "quit cause"); }

void validate(const Dish& d)
{
    if (canonical_dish_name(d.name).empty())
        throw DomainError("dish name must be non-empty");
    if (d.price.cents() <= 0)
        throw DomainError("non-positive price for dish '" + d.name + "'");
    if (d.cost_price.cents() < 0)
        throw DomainError("negative cost price for dish '" + d.name + "'");
}

void validate(const Chef& c)
{
    if (c.name.empty())
        throw DomainError("chef name must be non-empty");
    if (c.salary.cents() < 0)
        throw DomainError("negative salary for chef '" + c.name + "'");
}

void validate(const Comment& c)
{
    if (c.day < 1)
        throw DomainError("comment day must be >= 1");
    if (c.score < 1 || c.score > 10)
        throw DomainError("comment score must be in [1,10]");
}

void to_json(nlohmann::json& j, const Dish& d)
{
    j = {{"name", d.name}, {"price", d.price}, {"cost_price", d.cost_price}, {"description", d.description}};
}

void from_json(const nlohmann::json& j, Dish& d)
{
    d.name = j.at("name").get<std::string>();
    d.price = j.at("price").get<Money>();
    d.cost_price = j.at("cost_price").get<Money>();
    d.description = j.value("description", std::string{});
}

void to_json(nlohmann::json& j, const Chef& c) { j = {{"name", c.name}, {"salary", c.salary}}; }

void from_json(const nlohmann::json& j, Chef& c)
{
    c.name = j.at("name").get<std::string>();
    c.salary = j.at("salary").get<Money>();
}

void to_json(nlohmann::json& j, const Comment& c)
{
    j = {{"day", c.day}, {"author", c.author}, {"score", c.score}, {"content", c.content}};
}

void from_json(const nlohmann::json& j, Comment& c)
{
    c.day = j.at("day").get<int>();
    c.author = j.at("author").get<std::string>();
    c.score = j.at("score").get<int>();
    c.content = j.value("content", std::string{});
}

void to_json(nlohmann::json& j, const DishSale& s) { j = {{"dish", s.dish}, {"quantity", s.quantity}}; }

void from_json(const nlohmann::json& j, DishSale& s)
{
    s.dish = j.at("dish").get<std::string>();
    s.quantity = j.at("quantity").get<int>();
}

void to_json(nlohmann::json& j, const Daybook& d)
{
    j = {{"day", d.day},
         {"income", d.income},
         {"expense", d.expense},
         {"num_of_customer", d.num_of_customer},
         {"num_of_parties", d.num_of_parties},
         {"dishes_sold", d.dishes_sold}};
}

void from_json(const nlohmann::json& j, Daybook& d)
{
    d.day = j.at("day").get<int>();
    d.income = j.at("income").get<Money>();
    d.expense = j.at("expense").get<Money>();
    d.num_of_customer = j.at("num_of_customer").get<int>();
    d.num_of_parties = j.value("num_of_parties", 0);
    d.dishes_sold = j.at("dishes_sold").get<std::vector<DishSale>>();
}

void to_json(nlohmann::json& j, const RestaurantState& s)
{
    j = {{"id", s.id},
         {"name", s.name},
         {"funds", s.funds},
         {"rent", s.rent},
         {"chefs", s.chefs},
         {"menu", s.menu},
         {"advertisement", s.advertisement},
         {"comments", s.comments},
         {"daybooks", s.daybooks},
         {"memory", s.memory},
         {"status", to_string(s.status)},
         {"quit_cause", to_string(s.quit_cause)},
         {"menu_frozen_day", s.menu_frozen_day}};
}

void from_json(const nlohmann::json& j, RestaurantState& s)
{
    s.id = j.at("id").get<std::string>();
    s.name = j.at("name").get<std::string>();
    s.funds = j.at("funds").get<Money>();
    s.rent = j.at("rent").get<Money>();
    s.chefs = j.at("chefs").get<std::vector<Chef>>();
    s.menu = j.at("menu").get<std::vector<Dish>>();
    s.advertisement = j.value("advertisement", std::string{});
    s.comments = j.value("comments", std::vector<Comment>{});
    s.daybooks = j.value("daybooks", std::vector<Daybook>{});
    s.memory = j.value("memory", std::vector<std::string>{});
    s.status = restaurant_status_from_string(j.value("status", std::string{"active"}));
    s.quit_cause = quit_cause_from_string(j.value("quit_cause", std::string{"none"}));
    s.menu_frozen_day = j.value("menu_frozen_day", 0);
}

void to_json(nlohmann::json& j, const CustomerProfile& p)
{
    j = {{"name", p.name},
         {"monthly_income", p.monthly_income},
         {"income_band", to_string(p.income_band)},
         {"taste", p.taste},
         {"health", p.health},
         {"dietary_restriction", p.dietary_restriction},
         {"personality", p.personality}};
}

void from_json(const nlohmann::json& j, CustomerProfile& p)
{
    p.name = j.at("name").get<std::string>();
    p.monthly_income = j.at("monthly_income").get<Money>();
    p.income_band = income_band_from_string(j.at("income_band").get<std::string>());
    p.taste = j.at("taste").get<std::string>();
    p.health = j.at("health").get<std::string>();
    p.dietary_restriction = j.at("dietary_restriction").get<std::string>();
    p.personality = j.at("personality").get<std::string>();
}

void to_json(nlohmann::json& j, const GroupMember& m) { j = {{"name", m.name}, {"role", m.role}}; }

void from_json(const nlohmann::json& j, GroupMember& m)
{
    m.name = j.at("name").get<std::string>();
    m.role = j.value("role", std::string{});
}

void to_json(nlohmann::json& j, const GroupProfile& g)
{
    j = {{"group_type", to_string(g.group_type)}, {"feature", g.feature}, {"members", g.members}};
}

void from_json(const nlohmann::json& j, GroupProfile& g)
{
    g.group_type = group_type_from_string(j.at("group_type").get<std::string>());
    g.feature = j.value("feature", std::string{});
    g.members = j.at("members").get<std::vector<GroupMember>>();
}

} // namespace competeai
