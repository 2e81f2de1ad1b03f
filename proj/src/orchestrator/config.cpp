#include "competeai/config.hpp"

#include <fstream>
#include <set>

#include <fmt/format.h>

#include "competeai/hashing.hpp"

namespace competeai {

namespace {

Dish dish(const char* name, double price, double cost, const char* description)
{
    return {name, Money::from_units(price), Money::from_units(cost), description};
}

// Reads the keys of `obj` into fields; `fields` maps key -> setter.
using Setter = std::function<void(const nlohmann::json&)>;

void read_object(const nlohmann::json& obj, const std::string& where, const std::map<std::string, Setter>& fields)
{
    if (!obj.is_object())
        throw ConfigError(where + " must be an object", {{"bad_type", where + " must be an object"}});
    for (const auto& [key, value] : obj.items()) {
        auto it = fields.find(key);
        if (it == fields.end())
            throw ConfigError(fmt::format("unknown key '{}' in {}", key, where),
                              {{"unknown_key", fmt::format("unknown key '{}' in {}", key, where)}});
        try {
            it->second(value);
        } catch (const nlohmann::json::exception& e) {
            const auto msg = fmt::format("{}.{}: {}", where, key, e.what());
            throw ConfigError(msg, {{"bad_type", msg}});
        } catch (const std::invalid_argument& e) {
            const auto msg = fmt::format("{}.{}: {}", where, key, e.what());
            throw ConfigError(msg, {{"bad_value", msg}});
        }
    }
}

template <typename T>
Setter into(T& field)
{
    return [&field](const nlohmann::json& v) { field = v.get<T>(); };
}

RestaurantConfig parse_restaurant(const nlohmann::json& j, std::size_t index)
{
    RestaurantConfig r;
    read_object(j, fmt::format("restaurants[{}]", index),
                {{"id", into(r.id)},
                 {"name", into(r.name)},
                 {"funds", into(r.funds)},
                 {"rent", into(r.rent)},
                 {"chefs", into(r.chefs)},
                 {"menu", into(r.menu)},
                 {"advertisement", into(r.advertisement)}});
    return r;
}

} // namespace

SimulationConfig default_config()
{
    SimulationConfig c;
    RestaurantConfig r1{"R1",
                        "American Aroma",
                        Money::from_units(50000),
                        Money::from_units(3000),
                        {{"Chef Alex", Money::from_units(2500)}},
                        {dish("Classic Cheeseburger", 14, 5, "Beef patty, cheddar, lettuce and tomato on a toasted bun"),
                         dish("BBQ Ribs", 22, 8.5, "Slow-smoked pork ribs with house barbecue sauce"),
                         dish("Garden Salad", 9, 3, "Mixed greens, cucumber and cherry tomatoes"),
                         dish("Mac and Cheese", 10, 3.5, "Baked macaroni with three cheeses"),
                         dish("Grilled Chicken Sandwich", 12, 4.5, "Grilled chicken breast with honey mustard"),
                         dish("Apple Pie", 7, 2.5, "Warm apple pie with cinnamon")},
                        "American Aroma: classic American flavors made fresh every day."};
    RestaurantConfig r2{"R2",
                        "Stars & Stripes Diner",
                        Money::from_units(50000),
                        Money::from_units(3000),
                        {{"Chef Morgan", Money::from_units(2500)}},
                        {dish("Classic Cheeseburger", 13, 4.5, "Beef patty, cheddar, lettuce and tomato on a toasted bun"),
                         dish("Buffalo Wings", 11, 4, "Spicy chicken wings with blue cheese dip"),
                         dish("Pancake Stack", 8, 2.5, "Fluffy breakfast pancakes with maple syrup"),
                         dish("Clam Chowder", 10, 3.5, "Creamy clam soup with potatoes"),
                         dish("Fried Chicken", 15, 5.5, "Crispy buttermilk fried chicken"),
                         dish("Chocolate Milkshake", 6, 2, "Thick chocolate shake with whipped cream")},
                        "Stars & Stripes Diner: hearty diner favorites at friendly prices."};
    c.restaurants = {r1, r2};
    return c;
}

SimulationConfig parse_config(const nlohmann::json& doc)
{
    auto c = default_config();
    std::string mode = std::string(to_string(c.mode));
    nlohmann::json restaurants;
    nlohmann::json wta, gateway;
    read_object(doc, "config",
                {{"schema_version", into(c.schema_version)},
                 {"horizon", into(c.horizon)},
                 {"mode", into(mode)},
                 {"seed", into(c.seed)},
                 {"comment_rate", into(c.comment_rate)},
                 {"budget_ratio", into(c.budget_ratio)},
                 {"retry_budget", into(c.retry_budget)},
                 {"memory_window", into(c.memory_window)},
                 {"daybook_window", into(c.daybook_window)},
                 {"history_window", into(c.history_window)},
                 {"public_comment_window", into(c.public_comment_window)},
                 {"hiring_guard_days", into(c.hiring_guard_days)},
                 {"workers", into(c.workers)},
                 {"wta", into(wta)},
                 {"roster", into(c.roster)},
                 {"templates", into(c.templates)},
                 {"policies", into(c.policies)},
                 {"restaurants", into(restaurants)},
                 {"gateway", into(gateway)}});
    if (c.schema_version != kConfigSchemaVersion)
        throw ConfigError(fmt::format("config schema_version {} is not supported (expected {})", c.schema_version,
                                      kConfigSchemaVersion),
                          {{"schema_version", fmt::format("unsupported schema_version {}", c.schema_version)}});
    try {
        c.mode = dining_mode_from_string(mode);
    } catch (const std::exception& e) {
        throw ConfigError(e.what(), {{"bad_value", std::string("mode: ") + e.what()}});
    }
    if (!wta.is_null())
        read_object(wta, "wta", {{"threshold", into(c.wta.threshold)}, {"from_day", into(c.wta.from_day)}});
    if (!gateway.is_null()) {
        auto& g = c.gateway;
        read_object(gateway, "gateway",
                    {{"model", into(g.model)},
                     {"base_url", into(g.base_url)},
                     {"api_key_env", into(g.api_key_env)},
                     {"temperature", into(g.temperature)},
                     {"max_tokens", into(g.max_tokens)},
                     {"attempts", into(g.attempts)},
                     {"backoff_base_seconds", into(g.backoff_base_seconds)},
                     {"backoff_cap_seconds", into(g.backoff_cap_seconds)},
                     {"parallelism", into(g.parallelism)},
                     {"requests_per_minute", into(g.requests_per_minute)},
                     {"request_cap", into(g.request_cap)}});
    }
    if (!restaurants.is_null()) {
        if (!restaurants.is_array())
            throw ConfigError("restaurants must be an array", {{"bad_type", "restaurants must be an array"}});
        c.restaurants.clear();
        for (std::size_t i = 0; i < restaurants.size(); ++i)
            c.restaurants.push_back(parse_restaurant(restaurants[i], i));
    }
    return c;
}

SimulationConfig load_config(const std::filesystem::path& file)
{
    std::ifstream in(file);
    if (!in)
        throw ConfigError("cannot open config " + file.string(), {{"missing_file", "cannot open " + file.string()}});
    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(in);
    } catch (const nlohmann::json::parse_error& e) {
        throw ConfigError(file.string() + ": " + e.what(), {{"parse_error", e.what()}});
    }
    return parse_config(doc);
}

std::vector<Finding> validate_config(const SimulationConfig& c)
{
    std::vector<Finding> out;
    auto add = [&](const char* code, std::string msg) { out.push_back({code, std::move(msg)}); };
    if (c.horizon < 1)
        add("horizon", "horizon must be ≥ 1");
    if (!(c.comment_rate >= 0.0 && c.comment_rate <= 1.0))
        add("comment_rate", "comment_rate must be within [0, 1]");
    if (!(c.budget_ratio > 0.0))
        add("budget_ratio", "budget_ratio must be > 0");
    if (c.retry_budget < 1)
        add("retry_budget", "retry_budget must be ≥ 1");
    if (c.memory_window < 1 || c.daybook_window < 1 || c.history_window < 1 || c.public_comment_window < 1)
        add("window", "memory, daybook, history and comment windows must be ≥ 1");
    if (c.hiring_guard_days < 0)
        add("hiring_guard_days", "hiring_guard_days must be ≥ 0");
    if (c.workers < 1)
        add("workers", "workers must be ≥ 1");
    if (!(c.wta.threshold > 0.0 && c.wta.threshold < 1.0))
        add("wta", "wta.threshold must be within (0, 1)");
    if (c.wta.from_day < 1)
        add("wta", "wta.from_day must be ≥ 1");
    if (c.restaurants.size() != 2)
        add("restaurant_count", fmt::format("exactly 2 restaurants are required, found {}", c.restaurants.size()));
    std::set<std::string> ids;
    for (const auto& r : c.restaurants) {
        const auto who = r.id.empty() ? std::string("(unnamed)") : r.id;
        if (r.id.empty())
            add("restaurant_id", "restaurant id must not be empty");
        else if (!ids.insert(r.id).second)
            add("restaurant_id", "duplicate restaurant id " + r.id);
        if (r.name.empty())
            add("restaurant_name", who + ": name must not be empty");
        if (r.funds < Money{})
            add("restaurant_funds", who + ": starting funds must be ≥ 0");
        if (r.rent < Money{})
            add("restaurant_rent", who + ": rent must be ≥ 0");
        if (r.menu.empty())
            add("restaurant_menu", who + ": starting menu must not be empty");
        std::set<std::string> names;
        for (const auto& d : r.menu) {
            try {
                validate(d);
            } catch (const DomainError& e) {
                add("restaurant_menu", fmt::format("{}: dish '{}': {}", who, d.name, e.what()));
            }
            if (!names.insert(canonical_dish_name(d.name)).second)
                add("restaurant_menu", fmt::format("{}: duplicate dish '{}'", who, d.name));
        }
        for (const auto& ch : r.chefs) {
            try {
                validate(ch);
            } catch (const DomainError& e) {
                add("restaurant_chef", fmt::format("{}: chef '{}': {}", who, ch.name, e.what()));
            }
        }
    }
    const auto& g = c.gateway;
    if (g.model.empty())
        add("gateway", "gateway.model must not be empty");
    if (g.attempts < 1)
        add("gateway", "gateway.attempts must be ≥ 1");
    if (g.backoff_base_seconds < 0 || g.backoff_cap_seconds < g.backoff_base_seconds)
        add("gateway", "gateway backoff needs 0 ≤ base ≤ cap");
    if (g.parallelism < 1 || g.parallelism > 1024)
        add("gateway", "gateway.parallelism must be within [1, 1024]");
    if (g.requests_per_minute < 0)
        add("gateway", "gateway.requests_per_minute must be ≥ 0");
    if (g.request_cap < 1)
        add("gateway", "gateway.request_cap must be ≥ 1");
    if (g.max_tokens < 1)
        add("gateway", "gateway.max_tokens must be ≥ 1");
    return out;
}

void to_json(nlohmann::json& j, const RestaurantConfig& r)
{
    j = {{"id", r.id},           {"name", r.name}, {"funds", r.funds},
         {"rent", r.rent},       {"chefs", r.chefs}, {"menu", r.menu},
         {"advertisement", r.advertisement}};
}

void to_json(nlohmann::json& j, const SimulationConfig& c)
{
    const auto& g = c.gateway;
    j = {{"schema_version", c.schema_version},
         {"horizon", c.horizon},
         {"mode", std::string(to_string(c.mode))},
         {"seed", c.seed},
         {"comment_rate", c.comment_rate},
         {"budget_ratio", c.budget_ratio},
         {"retry_budget", c.retry_budget},
         {"memory_window", c.memory_window},
         {"daybook_window", c.daybook_window},
         {"history_window", c.history_window},
         {"public_comment_window", c.public_comment_window},
         {"hiring_guard_days", c.hiring_guard_days},
         {"workers", c.workers},
         {"wta", {{"threshold", c.wta.threshold}, {"from_day", c.wta.from_day}}},
         {"roster", c.roster},
         {"templates", c.templates},
         {"policies", c.policies},
         {"restaurants", c.restaurants},
         {"gateway",
          {{"model", g.model},
           {"base_url", g.base_url},
           {"api_key_env", g.api_key_env},
           {"temperature", g.temperature},
           {"max_tokens", g.max_tokens},
           {"attempts", g.attempts},
           {"backoff_base_seconds", g.backoff_base_seconds},
           {"backoff_cap_seconds", g.backoff_cap_seconds},
           {"parallelism", g.parallelism},
           {"requests_per_minute", g.requests_per_minute},
           {"request_cap", g.request_cap}}}};
}

std::string config_hash(const SimulationConfig& config) { return sha256_hex(nlohmann::json(config).dump()); }

RestaurantState initial_state(const RestaurantConfig& r)
{
    RestaurantState s;
    s.id = r.id;
    s.name = r.name;
    s.funds = r.funds;
    s.rent = r.rent;
    s.chefs = r.chefs;
    s.menu = r.menu;
    s.advertisement = r.advertisement;
    return s;
}

} // namespace competeai
