#include "competeai/scripted_backend.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>

#include <fmt/format.h>

#include "competeai/customer_engine.hpp"
#include "competeai/restaurant_system.hpp"
#include "competeai/rng.hpp"
#include "competeai/tool_calls.hpp"

namespace competeai {

namespace {

const std::set<std::string> kCriteria{"needs", "price", "score", "loyalty", "explore", "signature"};

std::string lower(std::string_view s)
{
    std::string out(s);
    for (auto& c : out)
        c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    return out;
}

// Lowercase with '-' read as a space, so "sugar-free" matches "sugar free".
std::string fold(std::string_view s)
{
    auto out = lower(s);
    std::replace(out.begin(), out.end(), '-', ' ');
    return out;
}

std::string stem(std::string w)
{
    if (w.size() > 3 && w.back() == 's')
        w.pop_back();
    return w;
}

std::vector<std::string> words(std::string_view text)
{
    std::vector<std::string> out;
    std::string cur;
    for (char c : text) {
        if (std::isalnum(static_cast<unsigned char>(c))) {
            cur += static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
        } else if (!cur.empty()) {
            out.push_back(stem(cur));
            cur.clear();
        }
    }
    if (!cur.empty())
        out.push_back(stem(cur));
    return out;
}

bool mentions(std::string_view haystack, std::string_view keyword)
{
    return fold(haystack).find(fold(keyword)) != std::string::npos;
}

struct ViewDish {
    std::string name;
    Money price;
    std::string description;
    std::string text() const { return name + " " + description; }
};

struct View {
    std::string id;
    std::string name;
    std::optional<double> score;
    std::string advertisement;
    std::vector<ViewDish> menu;
};

View parse_view(const nlohmann::json& j)
{
    View v;
    v.id = j.at("id").get<std::string>();
    v.name = j.at("name").get<std::string>();
    if (j.contains("customer_score") && j["customer_score"].is_number())
        v.score = j["customer_score"].get<double>();
    v.advertisement = j.value("advertisement", std::string{});
    for (const auto& d : j.at("menu"))
        v.menu.push_back({d.at("name").get<std::string>(), d.at("price").get<Money>(),
                          d.value("description", std::string{})});
    return v;
}

std::vector<View> parse_views(const nlohmann::json& ctx)
{
    std::vector<View> out;
    for (const auto& v : ctx.at("views"))
        out.push_back(parse_view(v));
    return out;
}

CustomerProfile speaker_profile(const nlohmann::json& ctx)
{
    const auto name = ctx.at("member").get<std::string>();
    for (const auto& m : ctx.at("unit").at("members"))
        if (m.at("name").get<std::string>() == name)
            return m.get<CustomerProfile>();
    throw BackendError("scripted backend: member " + name + " not in unit");
}

std::vector<CustomerProfile> unit_members(const nlohmann::json& ctx)
{
    return ctx.at("unit").at("members").get<std::vector<CustomerProfile>>();
}

bool has_restriction(const CustomerProfile& p) { return !restriction_keywords(p).empty(); }

int restriction_hits(const CustomerProfile& p, const std::string& text)
{
    for (const auto& k : restriction_keywords(p))
        if (mentions(text, k))
            return 1;
    return 0;
}

int taste_hits(const CustomerProfile& p, const std::string& text)
{
    const auto ws = words(text);
    int n = 0;
    for (const auto& k : taste_keywords(p))
        if (std::find(ws.begin(), ws.end(), k) != ws.end())
            ++n;
    return n;
}

// Short phrase a diner uses when a need goes unmet; restaurants scan comments for it.
std::string need_phrase(const CustomerProfile& p)
{
    const auto r = fold(p.dietary_restriction + " " + p.health + " " + p.taste);
    if (r.find("vegan") != std::string::npos || r.find("vegetarian") != std::string::npos ||
        r.find("plant") != std::string::npos)
        return "vegan";
    if (r.find("sugar") != std::string::npos || r.find("diabet") != std::string::npos)
        return "sugar-free";
    if (r.find("gluten") != std::string::npos)
        return "gluten-free";
    if (r.find("sodium") != std::string::npos || r.find("blood pressure") != std::string::npos)
        return "low-sodium";
    if (r.find("dairy") != std::string::npos || r.find("lactose") != std::string::npos)
        return "dairy-free";
    if (r.find("calorie") != std::string::npos || r.find("fat") != std::string::npos ||
        r.find("cholesterol") != std::string::npos || r.find("overweight") != std::string::npos)
        return "lighter";
    return {};
}

struct Pick {
    std::string id;
    std::string reason;
};

int menu_needs(const CustomerProfile& p, const View& v, bool restriction)
{
    int n = 0;
    for (const auto& d : v.menu)
        n += restriction ? restriction_hits(p, d.text()) : taste_hits(p, d.text());
    return n;
}

Money mean_price(const View& v)
{
    if (v.menu.empty())
        return {};
    Money sum;
    for (const auto& d : v.menu)
        sum += d.price;
    return Money::from_cents(sum.cents() / static_cast<std::int64_t>(v.menu.size()));
}

// Index of the strictly best view by `key`, or nullopt when tied at the top.
template <typename F>
std::optional<std::size_t> strict_best(const std::vector<View>& views, F key)
{
    std::optional<std::size_t> best;
    bool tied = false;
    for (std::size_t i = 0; i < views.size(); ++i) {
        if (!best || key(views[i]) > key(views[*best])) {
            best = i;
            tied = false;
        } else if (key(views[i]) == key(views[*best])) {
            tied = true;
        }
    }
    if (tied)
        return std::nullopt;
    return best;
}

std::optional<Pick> apply_criterion(const std::string& criterion, const CustomerProfile& p, const std::vector<View>& views,
                                    const std::vector<MealMemory>& history, bool group)
{
    if (criterion == "needs") {
        if (has_restriction(p)) {
            if (auto i = strict_best(views, [&](const View& v) { return menu_needs(p, v, true); }))
                return Pick{views[*i].id, fmt::format("I need {} food that fits my diet.", need_phrase(p))};
        }
        if (auto i = strict_best(views, [&](const View& v) { return menu_needs(p, v, false); }))
            return Pick{views[*i].id, fmt::format("Their dishes match my taste for {}.", lower(p.taste))};
        return std::nullopt;
    }
    if (criterion == "price") {
        if (auto i = strict_best(views, [](const View& v) { return -mean_price(v).cents(); }))
            return Pick{views[*i].id, "The prices there fit my budget better."};
        return std::nullopt;
    }
    if (criterion == "score") {
        if (auto i = strict_best(views, [](const View& v) { return v.score ? std::lround(*v.score * 10) : -1L; }))
            return Pick{views[*i].id, "It has the better customer score and reviews."};
        return std::nullopt;
    }
    if (criterion == "loyalty") {
        if (history.empty() || history.back().score < 7)
            return std::nullopt;
        for (const auto& v : views)
            if (v.id == history.back().restaurant_id)
                return Pick{v.id, group ? "We go back to the place we enjoyed last time."
                                        : "I always go back to the place I enjoyed last time."};
        return std::nullopt;
    }
    if (criterion == "explore") {
        if (history.empty())
            return std::nullopt;
        auto visits = [&](const View& v) {
            return -static_cast<long>(std::count_if(history.begin(), history.end(),
                                                    [&](const MealMemory& m) { return m.restaurant_id == v.id; }));
        };
        if (auto i = strict_best(views, visits))
            return Pick{views[*i].id, "I want to try something different from my usual spot."};
        return std::nullopt;
    }
    if (criterion == "signature") {
        if (auto i = strict_best(views, [&](const View& v) { return taste_hits(p, v.advertisement); }))
            return Pick{views[*i].id, "I have to get the signature dish they advertise."};
        return std::nullopt;
    }
    throw BackendError("scripted backend: unknown criterion " + criterion);
}

Pick preference(const ScriptedPolicies& policies, const nlohmann::json& ctx, const CustomerProfile& p)
{
    const auto views = parse_views(ctx);
    const auto history = ctx.value("history", nlohmann::json::array()).get<std::vector<MealMemory>>();
    const auto unit_id = ctx.at("unit").at("id").get<std::string>();
    const bool group = ctx.at("unit").contains("group") && !ctx.at("unit")["group"].is_null();
    for (const auto& c : policies.criteria_for(p, unit_id))
        if (auto pick = apply_criterion(c, p, views, history, group))
            return *pick;

    // Nothing separates them. Inside a group, side with whoever spoke first.
    if (ctx.contains("discussion") && !ctx["discussion"].empty()) {
        const auto first = ctx["discussion"].front().at("text").get<std::string>();
        for (const auto& v : views)
            if (mentions(first, v.name))
                return {v.id, fmt::format("{} made a fair case, and it fits what we need today.",
                                          ctx["discussion"].front().at("member").get<std::string>())};
    }
    UnitRng rng(ctx.at("seed").get<std::uint64_t>());
    const auto i = static_cast<std::size_t>(rng.next() % views.size());
    return {views[i].id, "Curious to try a different place today."};
}

const View& find_view(const std::vector<View>& views, const std::string& id)
{
    for (const auto& v : views)
        if (v.id == id)
            return v;
    throw BackendError("scripted backend: unknown restaurant " + id);
}

std::string json_reply(const nlohmann::json& j) { return "```json\n" + j.dump() + "\n```"; }

// Dishes a restaurant can add when comments ask for them, keyed by the phrase.
struct CatalogDish {
    const char* keyword;
    const char* name;
    double price;
    double cost;
    const char* description;
};

const std::vector<CatalogDish>& need_catalog()
{
    static const std::vector<CatalogDish> dishes{
        {"vegan", "Vegan Delight Salad", 12, 4, "Fresh greens, roasted chickpeas and avocado, vegan and plant-based"},
        {"sugar-free", "Sugar-free Berry Parfait", 8, 3, "Sugar-free yogurt parfait with fresh berries"},
        {"gluten-free", "Gluten-free Pasta", 15, 5, "Gluten-free penne with tomato basil sauce"},
        {"low-sodium", "Low-sodium Herb Chicken", 16, 6, "Low-sodium roast chicken with fresh herbs"},
        {"dairy-free", "Dairy-free Coconut Curry", 14, 5, "Dairy-free vegetable curry with coconut milk"},
        {"lighter", "Light Grilled Fish", 17, 7, "Light grilled white fish with steamed greens"},
        {"seafood", "Grilled Seafood Platter", 24, 10, "Grilled shrimp, scallops and seafood"},
    };
    return dishes;
}

Money round_dime(Money m) { return Money::from_cents((m.cents() + 5) / 10 * 10); }

} // namespace

std::vector<std::string> restriction_keywords(const CustomerProfile& p)
{
    const auto phrase = need_phrase(p);
    if (phrase == "vegan")
        return {"vegan", "vegetarian", "plant-based", "tofu"};
    if (phrase == "sugar-free")
        return {"sugar-free", "low-sugar"};
    if (phrase == "gluten-free")
        return {"gluten-free"};
    if (phrase == "low-sodium")
        return {"low-sodium"};
    if (phrase == "dairy-free")
        return {"dairy-free"};
    if (phrase == "lighter")
        return {"light", "steamed", "salad"};
    return {};
}

std::vector<std::string> taste_keywords(const CustomerProfile& p)
{
    static const std::set<std::string> stop{"food", "dish", "dishe", "cuisine", "meal", "option", "and", "the"};
    std::vector<std::string> out;
    for (auto& w : words(p.taste))
        if (!stop.count(w) && w.size() > 2)
            out.push_back(w);
    return out;
}

ScriptedPolicies ScriptedPolicies::defaults()
{
    ScriptedPolicies p;
    p.restaurants["R1"] = {"differentiator", std::nullopt};
    p.restaurants["R2"] = {"imitator", std::nullopt};
    p.presets = {
        {"needs-first", {"needs", "score", "price"}},
        {"price-first", {"price", "needs", "score"}},
        {"score-first", {"score", "needs", "price"}},
        {"loyal", {"loyalty", "score", "needs", "price"}},
        {"explorer", {"explore", "needs", "score"}},
        {"foodie", {"signature", "needs", "score"}},
    };
    p.default_preset = "score-first";
    p.by_income_band = {{"very_poor", "price-first"}, {"poor", "price-first"}};
    p.restricted = "needs-first";
    return p;
}

const std::vector<std::string>& ScriptedPolicies::criteria_for(const CustomerProfile& person,
                                                               const std::string& unit_id) const
{
    auto preset = [&](const std::string& name) -> const std::vector<std::string>& {
        auto it = presets.find(name);
        if (it == presets.end())
            throw BackendError("scripted policy: unknown preset " + name);
        return it->second;
    };
    if (auto it = units.find(person.name); it != units.end())
        return preset(it->second);
    if (auto it = units.find(unit_id); it != units.end())
        return preset(it->second);
    if (!restricted.empty() && has_restriction(person))
        return preset(restricted);
    if (auto it = by_income_band.find(std::string(to_string(person.income_band))); it != by_income_band.end())
        return preset(it->second);
    return preset(default_preset);
}

ScriptedRestaurantPolicy ScriptedPolicies::restaurant(const std::string& id) const
{
    auto it = restaurants.find(id);
    return it == restaurants.end() ? ScriptedRestaurantPolicy{} : it->second;
}

ScriptedPolicies parse_policies(const nlohmann::json& doc)
{
    auto p = ScriptedPolicies::defaults();
    if (doc.contains("restaurants")) {
        p.restaurants.clear();
        for (const auto& [id, r] : doc["restaurants"].items()) {
            ScriptedRestaurantPolicy rp;
            rp.style = r.value("style", std::string("differentiator"));
            if (rp.style != "differentiator" && rp.style != "imitator")
                throw std::invalid_argument("policy for " + id + ": unknown style '" + rp.style + "'");
            if (r.contains("quit_on_day") && !r["quit_on_day"].is_null())
                rp.quit_on_day = r["quit_on_day"].get<int>();
            p.restaurants[id] = rp;
        }
    }
    if (const auto c = doc.value("customers", nlohmann::json::object()); !c.empty()) {
        if (c.contains("presets"))
            for (const auto& [name, list] : c["presets"].items()) {
                auto crit = list.get<std::vector<std::string>>();
                for (const auto& k : crit)
                    if (!kCriteria.count(k))
                        throw std::invalid_argument("preset " + name + ": unknown criterion '" + k + "'");
                p.presets[name] = std::move(crit);
            }
        p.default_preset = c.value("default", p.default_preset);
        if (c.contains("by_income_band"))
            p.by_income_band = c["by_income_band"].get<std::map<std::string, std::string>>();
        p.restricted = c.value("restricted", p.restricted);
        if (c.contains("units"))
            p.units = c["units"].get<std::map<std::string, std::string>>();
    }
    auto check = [&](const std::string& name) {
        if (!name.empty() && !p.presets.count(name))
            throw std::invalid_argument("unknown preset '" + name + "'");
    };
    check(p.default_preset);
    check(p.restricted);
    for (const auto& [k, v] : p.by_income_band) {
        income_band_from_string(k);
        check(v);
    }
    for (const auto& [k, v] : p.units)
        check(v);
    return p;
}

ScriptedPolicies load_policies(const std::filesystem::path& file)
{
    std::ifstream in(file);
    if (!in)
        throw std::runtime_error("cannot open policy file " + file.string());
    try {
        return parse_policies(nlohmann::json::parse(in));
    } catch (const nlohmann::json::exception& e) {
        throw std::invalid_argument(file.string() + ": " + e.what());
    }
}

ScriptedBackend::ScriptedBackend(ScriptedPolicies policies) : policies_(std::move(policies)) {}

std::string ScriptedBackend::complete(const Prompt& prompt)
{
    const auto& ctx = prompt.context;
    if (!ctx.is_object() || !ctx.contains("task"))
        throw BackendError("scripted backend: prompt carries no structured context");
    const auto task = ctx["task"].get<std::string>();
    try {
        if (task == "restaurant_turn")
            return restaurant_turn(ctx);
        if (task == "customer_choice" || task == "group_vote")
            return choice(ctx);
        if (task == "group_utterance")
            return utterance(ctx);
        if (task == "customer_order")
            return order(ctx);
        if (task == "customer_review")
            return review(ctx);
        if (task == "reason_classifier")
            return "core_needs";
    } catch (const nlohmann::json::exception& e) {
        throw BackendError("scripted backend: malformed context for " + task + ": " + e.what());
    }
    throw BackendError("scripted backend: unsupported task " + task);
}

std::string ScriptedBackend::choice(const nlohmann::json& ctx) const
{
    const auto views = parse_views(ctx);
    const auto pick = preference(policies_, ctx, speaker_profile(ctx));
    return json_reply({{"restaurant", find_view(views, pick.id).name}, {"reason", pick.reason}});
}

std::string ScriptedBackend::utterance(const nlohmann::json& ctx) const
{
    const auto views = parse_views(ctx);
    const auto pick = preference(policies_, ctx, speaker_profile(ctx));
    return fmt::format("I'd like us to eat at {}. {}", find_view(views, pick.id).name, pick.reason);
}

std::string ScriptedBackend::order(const nlohmann::json& ctx) const
{
    const auto view = parse_view(ctx.at("restaurant"));
    const auto members = unit_members(ctx);
    Money left = ctx.at("budget").get<Money>();
    Money cheapest = view.menu.front().price;
    for (const auto& d : view.menu)
        cheapest = std::min(cheapest, d.price);
    UnitRng rng(ctx.at("seed").get<std::uint64_t>());

    std::vector<std::pair<std::string, int>> items;
    auto add = [&](const std::string& name) {
        for (auto& [n, q] : items)
            if (n == name) {
                ++q;
                return;
            }
        items.emplace_back(name, 1);
    };
    auto ranked = [&](const CustomerProfile& p) {
        std::vector<const ViewDish*> ds;
        for (const auto& d : view.menu)
            ds.push_back(&d);
        std::stable_sort(ds.begin(), ds.end(), [&](const ViewDish* a, const ViewDish* b) {
            const auto ka = std::make_tuple(-restriction_hits(p, a->text()), -taste_hits(p, a->text()), a->price);
            const auto kb = std::make_tuple(-restriction_hits(p, b->text()), -taste_hits(p, b->text()), b->price);
            return ka < kb;
        });
        return ds;
    };

    for (std::size_t i = 0; i < members.size(); ++i) {
        const auto reserve = cheapest * static_cast<std::int64_t>(members.size() - i - 1);
        for (const auto* d : ranked(members[i])) {
            if (d->price <= left - reserve) {
                add(d->name);
                left -= d->price;
                break;
            }
        }
    }
    for (const auto& m : members) {
        if (!rng.bernoulli(0.3))
            continue;
        for (const auto* d : ranked(m)) {
            if (d->price <= left) {
                add(d->name);
                left -= d->price;
                break;
            }
        }
    }
    nlohmann::json dishes = nlohmann::json::array();
    for (const auto& [n, q] : items)
        dishes.push_back({{"name", n}, {"quantity", q}});
    return json_reply({{"dishes", dishes}});
}

std::string ScriptedBackend::review(const nlohmann::json& ctx) const
{
    const auto view = parse_view(ctx.at("restaurant"));
    const auto members = unit_members(ctx);
    const auto order = ctx.at("order").get<Order>();
    const auto scores = ctx.at("dish_scores").get<std::vector<DishScore>>();
    UnitRng rng(ctx.at("seed").get<std::uint64_t>());

    double sum = 0.0;
    int n = 0;
    for (const auto& item : order.items)
        for (const auto& s : scores)
            if (s.dish == item.dish) {
                sum += s.score * item.quantity;
                n += item.quantity;
            }
    double value = 10.0 * (n ? sum / n : 0.0);

    std::string ordered_text;
    for (const auto& item : order.items) {
        ordered_text += ordered_text.empty() ? "" : " ";
        for (const auto& d : view.menu)
            if (d.name == item.dish)
                ordered_text += d.text();
    }
    std::vector<std::string> unmet;
    bool taste_met = false;
    for (const auto& m : members) {
        if (has_restriction(m)) {
            if (restriction_hits(m, ordered_text))
                value += 1.0;
            else {
                value -= 1.5;
                if (auto ph = need_phrase(m); std::find(unmet.begin(), unmet.end(), ph) == unmet.end())
                    unmet.push_back(ph);
            }
        }
        taste_met = taste_met || taste_hits(m, ordered_text) > 0;
        if (mentions(m.taste, "seafood") && !mentions(ordered_text, "seafood") &&
            std::find(unmet.begin(), unmet.end(), "seafood") == unmet.end())
            unmet.push_back("seafood");
    }
    if (taste_met)
        value += 0.5;
    value += rng.uniform() - 0.5;
    const int score = std::clamp(static_cast<int>(std::lround(value)), 1, 10);

    const char* feel = score >= 8 ? "excellent" : score >= 6 ? "decent" : "disappointing";
    std::string comment;
    if (!unmet.empty()) {
        std::string list;
        for (std::size_t i = 0; i < unmet.size(); ++i)
            list += (i ? (i + 1 == unmet.size() ? " and " : ", ") : "") + unmet[i];
        comment = fmt::format("The food was {}, but I wish there were more {} options.", feel, list);
    } else if (score >= 8) {
        comment = fmt::format("Excellent meal, the {} was great.", order.items.front().dish);
    } else {
        comment = fmt::format("The meal was {}; the dishes could use better ingredients.", feel);
    }
    return json_reply({{"experience", fmt::format("Dinner at {} was {}.", view.name, feel)},
                       {"score", score},
                       {"comment", comment}});
}

std::string ScriptedBackend::restaurant_turn(const nlohmann::json& ctx) const
{
    const int day = ctx.at("day").get<int>();
    const auto id = ctx.at("restaurant_id").get<std::string>();
    const auto policy = policies_.restaurant(id);
    const auto& self = ctx.at("self");

    RestaurantState state;
    state.id = id;
    state.name = self.at("name").get<std::string>();
    state.funds = self.at("funds").get<Money>();
    state.rent = self.at("rent").get<Money>();
    state.chefs = self.at("chefs").get<std::vector<Chef>>();
    state.menu = self.at("menu").get<std::vector<Dish>>();
    state.advertisement = self.value("advertisement", std::string{});

    const auto daybooks = ctx.value("daybooks", nlohmann::json::array()).get<std::vector<Daybook>>();
    const auto comments = ctx.value("comments", nlohmann::json::array()).get<std::vector<Comment>>();
    const nlohmann::json rival = ctx.contains("rival") ? ctx["rival"] : nlohmann::json(nullptr);

    std::vector<Action> actions;
    std::vector<std::string> notes;
    // Keep only what the management system accepts.
    auto propose = [&](Action a, std::string note) {
        try {
            state = apply_action(state, a);
        } catch (const ActionError&) {
            return;
        }
        actions.push_back(std::move(a));
        notes.push_back(std::move(note));
    };

    std::string analysis;
    if (daybooks.empty()) {
        analysis = "First day of business. We start with our opening menu and see how customers respond.";
    } else {
        const auto& last = daybooks.back();
        analysis = fmt::format("Yesterday we served {} guests in {} parties; income {}, expense {}, profit {}.",
                               last.num_of_customer, last.num_of_parties, last.income.str(), last.expense.str(),
                               last.profit().str());
        if (!rival.is_null() && rival["customer_flow"].is_number())
            analysis += fmt::format(" {} served {} guests.", rival["name"].get<std::string>(),
                                    rival["customer_flow"].get<int>());
    }

    if (policy.quit_on_day && *policy.quit_on_day == day) {
        propose(action::Quit{}, "leave the competition");
        return fmt::format("{}\nWe have decided to close.\nSummary: Closed the restaurant for good.\n{}", analysis,
                           serialize_tool_calls(actions));
    }

    // Requests heard in yesterday's comments, ours first, then the rival's.
    std::vector<Comment> heard = comments;
    if (!rival.is_null() && policy.style == "differentiator")
        for (const auto& c : rival.value("comments", nlohmann::json::array()))
            heard.push_back(c.get<Comment>());
    for (const auto& cat : need_catalog()) {
        const bool asked = std::any_of(heard.begin(), heard.end(), [&](const Comment& c) {
            return mentions(c.content, cat.keyword) && mentions(c.content, "wish");
        });
        if (!asked || state.find_dish(cat.name))
            continue;
        propose(action::AddDish{{cat.name, Money::from_units(cat.price), Money::from_units(cat.cost), cat.description}},
                fmt::format("added {} because customers asked for {} options", cat.name, cat.keyword));
        break;
    }

    if (policy.style == "imitator" && !rival.is_null()) {
        for (const auto& d : rival.value("menu", nlohmann::json::array())) {
            const auto name = d.at("name").get<std::string>();
            if (state.find_dish(name))
                continue;
            const auto price = round_dime(scale(d.at("price").get<Money>(), 0.95));
            propose(action::AddDish{{name, price, round_dime(scale(price, 0.4)), d.value("description", std::string{})}},
                    fmt::format("copied the rival's {} at a slightly lower price", name));
            break;
        }
    }

    // Better chef pay lifts every dish score.
    const int quality_period = policy.style == "imitator" ? 4 : 3;
    if (!daybooks.empty() && day % quality_period == 0 && daybooks.back().profit() > Money{} && !state.chefs.empty()) {
        auto top = std::max_element(state.chefs.begin(), state.chefs.end(),
                                    [](const Chef& a, const Chef& b) { return a.salary < b.salary; });
        if (top->salary < Money::from_units(5000))
            propose(action::AdjustSalary{top->name, std::min(top->salary + Money::from_units(500), Money::from_units(5000))},
                    fmt::format("raised {}'s salary to improve dish quality", top->name));
    }

    if (!comments.empty() && !daybooks.empty() && !daybooks.back().dishes_sold.empty()) {
        double mean = 0.0;
        for (const auto& c : comments)
            mean += c.score;
        mean /= static_cast<double>(comments.size());
        auto best = std::max_element(daybooks.back().dishes_sold.begin(), daybooks.back().dishes_sold.end(),
                                     [](const DishSale& a, const DishSale& b) { return a.quantity < b.quantity; });
        if (const Dish* d = state.find_dish(best->dish); mean < 7.0 && d) {
            const auto cost = std::min(round_dime(scale(d->cost_price, 1.15)), round_dime(scale(d->price, 0.6)));
            if (cost > d->cost_price)
                propose(action::ModifyDish{d->name, std::nullopt, std::nullopt, cost, std::nullopt},
                        fmt::format("used better ingredients for {}", d->name));
        }
    }

    if (!daybooks.empty() && state.menu.size() > 8) {
        const auto opening = self.at("menu").get<std::vector<Dish>>();
        for (const auto& d : state.menu) {
            const auto& sold = daybooks.back().dishes_sold;
            const bool was_offered = std::any_of(opening.begin(), opening.end(),
                                                 [&](const Dish& o) { return o.name == d.name; });
            if (was_offered && std::none_of(sold.begin(), sold.end(), [&](const DishSale& s) { return s.dish == d.name; })) {
                const auto name = d.name;
                propose(action::DeleteDish{name}, fmt::format("dropped {}, which nobody ordered", name));
                break;
            }
        }
    }

    if (!daybooks.empty() && !rival.is_null() && rival["customer_flow"].is_number()) {
        const int ours = daybooks.back().num_of_customer;
        const int theirs = rival["customer_flow"].get<int>();
        if (ours * 3 < (ours + theirs) * 1 && !state.menu.empty()) {
            auto priciest = std::max_element(state.menu.begin(), state.menu.end(),
                                             [](const Dish& a, const Dish& b) { return a.price < b.price; });
            const auto price = round_dime(scale(priciest->price, 0.9));
            if (price > priciest->cost_price)
                propose(action::ModifyDish{priciest->name, std::nullopt, price, std::nullopt, std::nullopt},
                        fmt::format("cut the price of {} to win back customers", priciest->name));
        }
    }

    if (day % 5 == 1 && day > 1 && !state.menu.empty()) {
        UnitRng rng(ctx.value("seed", std::uint64_t{0}));
        const auto& d = state.menu[static_cast<std::size_t>(rng.next() % state.menu.size())];
        propose(action::ModifyAd{fmt::format("Come try our signature {} at {}!", d.name, state.name)},
                fmt::format("refreshed the advertisement around {}", d.name));
    }

    std::string summary;
    if (notes.empty()) {
        summary = "Kept everything unchanged.";
    } else {
        for (std::size_t i = 0; i < notes.size(); ++i)
            summary += (i ? "; " : "") + notes[i];
        summary[0] = static_cast<char>(std::toupper(static_cast<unsigned char>(summary[0])));
        summary += ".";
    }
    return fmt::format("{}\nSummary: {}\n{}", analysis, summary, serialize_tool_calls(actions));
}

} // namespace competeai
