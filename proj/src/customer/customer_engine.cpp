#include "competeai/customer_engine.hpp"

#include <algorithm>
#include <cmath>
#include <map>

#include <fmt/format.h>

#include "competeai/rng.hpp"
#include "competeai/tool_calls.hpp"

namespace competeai {

namespace {

std::string render_views(std::span<const PublicInfo> views)
{
    std::string out;
    for (const auto& v : views) {
        out += fmt::format("Restaurant \"{}\"\n", v.name);
        if (v.customer_score)
            out += fmt::format("Customer score: {:.1f}\n", *v.customer_score);
        else
            out += "Customer score: no rating yet\n";
        out += fmt::format("Advertisement: {}\n", v.advertisement.empty() ? "(none)" : v.advertisement);
        out += "Menu:\n";
        for (const auto& d : v.menu)
            out += fmt::format("- {}: {} | {}\n", d.name, d.price.str(), d.description);
        if (!v.comments.empty()) {
            out += "Comments:\n";
            for (const auto& c : v.comments)
                out += fmt::format("- [day {}] {} ({}/10): {}\n", c.day, c.author, c.score, c.content);
        }
        out += "\n";
    }
    return out;
}

std::string render_history(std::span<const MealMemory> history, std::size_t window)
{
    std::string out;
    const auto first = history.size() > window ? history.size() - window : 0;
    for (auto i = first; i < history.size(); ++i) {
        const auto& m = history[i];
        out += fmt::format("- Day {}: {} (you rated it {}/10). {}\n", m.day, m.restaurant_name, m.score, m.experience);
    }
    return out;
}

std::vector<MealMemory> history_tail(std::span<const MealMemory> history, std::size_t window)
{
    const auto first = history.size() > window ? history.size() - window : 0;
    return {history.begin() + static_cast<std::ptrdiff_t>(first), history.end()};
}

nlohmann::json profile_vars(const CustomerProfile& p)
{
    return {{"name", p.name},
            {"income", p.monthly_income.str()},
            {"income_band", std::string(to_string(p.income_band))},
            {"taste", p.taste},
            {"health", p.health},
            {"restriction", p.dietary_restriction},
            {"personality", p.personality}};
}

std::string member_role(const DecisionUnit& unit, const std::string& name)
{
    if (unit.group)
        for (const auto& m : unit.group->members)
            if (m.name == name)
                return m.role.empty() ? "member" : m.role;
    return "member";
}

// System prompt for `speaker`, who speaks for the whole unit when it is a group.
std::string system_prompt(const CustomerEnv& env, const DecisionUnit& unit, const CustomerProfile& speaker)
{
    auto vars = profile_vars(speaker);
    if (!unit.is_group())
        return env.templates.render("customer_system", vars);
    std::string members;
    for (const auto& m : unit.group->members)
        members += fmt::format("- {} ({})\n", m.name, m.role.empty() ? "member" : m.role);
    vars["role"] = member_role(unit, speaker.name);
    vars["group_type"] = std::string(to_string(unit.group->group_type));
    vars["feature"] = unit.group->feature;
    vars["members"] = members;
    return env.templates.render("group_system", vars);
}

nlohmann::json base_context(const CustomerEnv& env, const char* task, const DecisionUnit& unit, std::string_view speaker,
                            std::string_view purpose)
{
    return {{"task", task},
            {"day", env.day},
            {"unit", unit_json(unit)},
            {"member", speaker},
            {"seed", derive_seed(env.seed, unit.id, env.day, std::string(purpose) + ":" + std::string(speaker))}};
}

struct Choice {
    std::string restaurant_id;
    std::string reason;
};

Parsed<Choice> parse_choice(const std::string& text, std::span<const PublicInfo> views)
{
    Parsed<Choice> out;
    auto doc = last_json_block(text, out.problems);
    if (!doc)
        return out;
    if (!doc->is_object() || !doc->contains("restaurant") || !(*doc)["restaurant"].is_string()) {
        out.problems.push_back("reply must be a JSON object with a string field 'restaurant'");
        return out;
    }
    auto id = resolve_restaurant((*doc)["restaurant"].get<std::string>(), views);
    if (!id) {
        std::string names;
        for (const auto& v : views)
            names += (names.empty() ? "\"" : ", \"") + v.name + "\"";
        out.problems.push_back(fmt::format("'{}' is not an open restaurant; choose one of {}",
                                           (*doc)["restaurant"].get<std::string>(), names));
        return out;
    }
    std::string reason = doc->value("reason", std::string{});
    if (reason.empty()) {
        out.problems.push_back("field 'reason' must be a non-empty string");
        return out;
    }
    out.value = Choice{*id, std::move(reason)};
    return out;
}

} // namespace

std::string majority_vote(std::span<const std::string> votes, const std::string& leader_vote)
{
    std::map<std::string, int> counts;
    for (const auto& v : votes)
        ++counts[v];
    int best = 0;
    for (const auto& [id, n] : counts)
        best = std::max(best, n);
    std::vector<std::string> tied;
    for (const auto& [id, n] : counts)
        if (n == best)
            tied.push_back(id);
    if (tied.size() == 1)
        return tied.front();
    if (std::find(tied.begin(), tied.end(), leader_vote) != tied.end())
        return leader_vote;
    return tied.empty() ? leader_vote : tied.front();
}

std::string fallback_choice(std::span<const PublicInfo> views)
{
    const PublicInfo* best = nullptr;
    for (const auto& v : views) {
        if (!best) {
            best = &v;
            continue;
        }
        const double a = v.customer_score.value_or(-1.0);
        const double b = best->customer_score.value_or(-1.0);
        if (a > b || (a == b && v.name < best->name))
            best = &v;
    }
    return best ? best->restaurant_id : std::string{};
}

std::optional<std::string> resolve_restaurant(std::string_view answer, std::span<const PublicInfo> views)
{
    const auto key = canonical_dish_name(answer);
    if (key.empty())
        return std::nullopt;
    for (const auto& v : views)
        if (key == canonical_dish_name(v.name) || key == canonical_dish_name(v.restaurant_id))
            return v.restaurant_id;
    // "I pick American Aroma!" style answers: exactly one name contained
    std::optional<std::string> hit;
    for (const auto& v : views) {
        if (key.find(canonical_dish_name(v.name)) != std::string::npos) {
            if (hit)
                return std::nullopt;
            hit = v.restaurant_id;
        }
    }
    return hit;
}

Money meal_budget(const CustomerProfile& person, double ratio) { return scale(person.monthly_income, ratio); }

Money meal_budget(const DecisionUnit& unit, double ratio)
{
    Money total;
    for (const auto& m : unit.members)
        total += meal_budget(m, ratio);
    return total;
}

nlohmann::json unit_json(const DecisionUnit& unit)
{
    nlohmann::json j{{"id", unit.id}, {"members", unit.members}};
    j["group"] = unit.group ? nlohmann::json(*unit.group) : nlohmann::json(nullptr);
    return j;
}

DecisionRecord decide_individual(const CustomerEnv& env, const DecisionUnit& unit, std::span<const PublicInfo> views,
                                 std::span<const MealMemory> history)
{
    DecisionRecord rec;
    rec.day = env.day;
    rec.unit_id = unit.id;
    if (views.empty())
        throw std::logic_error("no open restaurant for unit " + unit.id);
    if (views.size() == 1) {
        rec.restaurant_id = views.front().restaurant_id;
        rec.reason = "only option";
        return rec;
    }

    const auto& person = unit.leader();
    Prompt p;
    p.system = system_prompt(env, unit, person);
    p.messages.push_back({"user", env.templates.render("customer_choice",
                                                      {{"day", env.day},
                                                       {"restaurants", render_views(views)},
                                                       {"history", render_history(history, env.settings.history_window)}})});
    p.context = base_context(env, "customer_choice", unit, person.name, "choice");
    p.context["views"] = views;
    p.context["history"] = history_tail(history, env.settings.history_window);

    std::function<Parsed<Choice>(const std::string&)> parse = [&](const std::string& t) { return parse_choice(t, views); };
    std::string failure;
    try {
        auto outcome = complete_with_repair<Choice>(env.backend, p, env.settings.max_attempts, parse);
        rec.attempts = outcome.attempts;
        if (outcome.value) {
            rec.restaurant_id = outcome.value->restaurant_id;
            rec.reason = outcome.value->reason;
            return rec;
        }
        failure = fmt::format("no valid restaurant after {} attempts", outcome.attempts);
    } catch (const BackendError& e) {
        failure = std::string("backend failure: ") + e.what();
    }
    rec.fallback = true;
    rec.restaurant_id = fallback_choice(views);
    rec.reason = "fallback: chose the restaurant with the higher customer score";
    rec.warnings.push_back({"decision_fallback", unit.id + ": " + failure});
    return rec;
}

DecisionRecord group_discuss(const CustomerEnv& env, const DecisionUnit& unit, std::span<const PublicInfo> views,
                             std::span<const MealMemory> history)
{
    DecisionRecord rec;
    rec.day = env.day;
    rec.unit_id = unit.id;
    rec.group = true;
    if (views.empty())
        throw std::logic_error("no open restaurant for unit " + unit.id);
    if (views.size() == 1) {
        rec.restaurant_id = views.front().restaurant_id;
        rec.reason = "only option";
        for (const auto& m : unit.members)
            rec.votes.push_back({m.name, rec.restaurant_id, "only option", false});
        return rec;
    }

    const auto restaurants = render_views(views);
    const auto history_text = render_history(history, env.settings.history_window);
    const auto recent = history_tail(history, env.settings.history_window);

    auto transcript = [&] {
        std::string out;
        for (const auto& u : rec.discussion)
            out += fmt::format("{} ({}): {}\n", u.member, member_role(unit, u.member), u.text);
        return out;
    };

    // Discussion: strictly sequential, each member hears the ones before.
    for (const auto& member : unit.members) {
        Prompt p;
        p.system = system_prompt(env, unit, member);
        p.messages.push_back({"user", env.templates.render("group_utterance", {{"day", env.day},
                                                                               {"restaurants", restaurants},
                                                                               {"history", history_text},
                                                                               {"discussion", transcript()}})});
        p.context = base_context(env, "group_utterance", unit, member.name, "utterance");
        p.context["views"] = views;
        p.context["history"] = recent;
        p.context["discussion"] = rec.discussion;
        std::string text;
        try {
            text = env.backend.complete(p);
        } catch (const BackendError& e) {
            rec.warnings.push_back({"utterance_failed", fmt::format("{}/{}: {}", unit.id, member.name, e.what())});
        }
        // trailing whitespace would make the transcript depend on formatting noise
        while (!text.empty() && std::isspace(static_cast<unsigned char>(text.back())))
            text.pop_back();
        rec.discussion.push_back({member.name, text.empty() ? "(says nothing)" : text});
    }

    const auto discussion = transcript();
    std::vector<std::optional<Choice>> raw(unit.members.size());
    for (std::size_t i = 0; i < unit.members.size(); ++i) {
        const auto& member = unit.members[i];
        Prompt p;
        p.system = system_prompt(env, unit, member);
        p.messages.push_back({"user", env.templates.render("group_vote", {{"day", env.day},
                                                                          {"restaurants", restaurants},
                                                                          {"discussion", discussion}})});
        p.context = base_context(env, "group_vote", unit, member.name, "vote");
        p.context["views"] = views;
        p.context["history"] = recent;
        p.context["discussion"] = rec.discussion;
        std::function<Parsed<Choice>(const std::string&)> parse = [&](const std::string& t) {
            return parse_choice(t, views);
        };
        try {
            auto outcome = complete_with_repair<Choice>(env.backend, p, env.settings.max_attempts, parse);
            rec.attempts += outcome.attempts;
            raw[i] = outcome.value;
            if (!outcome.value)
                rec.warnings.push_back({"vote_defaulted", fmt::format("{}/{}: no valid vote after {} attempts", unit.id,
                                                                      member.name, outcome.attempts)});
        } catch (const BackendError& e) {
            rec.warnings.push_back({"vote_defaulted", fmt::format("{}/{}: {}", unit.id, member.name, e.what())});
        }
    }

    const std::string leader_pref = raw.front() ? raw.front()->restaurant_id : fallback_choice(views);
    std::vector<std::string> ids;
    for (std::size_t i = 0; i < unit.members.size(); ++i) {
        VoteRecord v{unit.members[i].name, leader_pref, "defaulted to the leader's preference", true};
        if (raw[i]) {
            v.restaurant_id = raw[i]->restaurant_id;
            v.reason = raw[i]->reason;
            v.defaulted = false;
        }
        ids.push_back(v.restaurant_id);
        rec.votes.push_back(std::move(v));
    }
    rec.restaurant_id = majority_vote(ids, rec.votes.front().restaurant_id);
    rec.reason = "majority decision";
    for (const auto& v : rec.votes) {
        if (v.restaurant_id == rec.restaurant_id && !v.defaulted) {
            rec.reason = v.reason;
            break;
        }
    }
    rec.fallback = std::all_of(rec.votes.begin(), rec.votes.end(), [](const VoteRecord& v) { return v.defaulted; });
    return rec;
}

OrderOutcome order_dishes(const CustomerEnv& env, const DecisionUnit& unit, const PublicInfo& view,
                          const FrozenMenu& menu)
{
    if (menu.dishes.empty())
        throw std::logic_error("order_dishes: empty menu at " + menu.restaurant_id);
    OrderOutcome out;
    const int persons = unit.persons();
    const Money budget = meal_budget(unit, env.settings.budget_ratio);

    const Dish* cheapest = &menu.dishes.front();
    for (const auto& d : menu.dishes)
        if (d.price < cheapest->price)
            cheapest = &d;

    auto fallback = [&](const std::string& why) {
        out.fallback = true;
        out.order = make_order(unit.id, menu, {{cheapest->name, persons}}, persons);
        out.order.over_budget = out.order.total > budget;
        if (out.order.over_budget)
            out.warnings.push_back({"over_budget", fmt::format("{}: cheapest dish '{}' x{} costs {} over budget {}",
                                                               unit.id, cheapest->name, persons,
                                                               out.order.total.str(), budget.str())});
        if (!why.empty())
            out.warnings.push_back({"order_fallback", unit.id + ": " + why});
        return out;
    };

    if (cheapest->price * persons > budget)
        return fallback("");

    std::string party;
    for (std::size_t i = 1; i < unit.members.size(); ++i)
        party += (i > 1 ? ", " : "") + unit.members[i].name;

    std::string menu_text;
    for (const auto& d : view.menu)
        menu_text += fmt::format("- {}: {} | {}\n", d.name, d.price.str(), d.description);

    Prompt p;
    p.system = system_prompt(env, unit, unit.leader());
    p.messages.push_back({"user", env.templates.render("customer_order", {{"day", env.day},
                                                                          {"restaurant", view.name},
                                                                          {"party", party},
                                                                          {"menu", menu_text},
                                                                          {"budget", budget.str()},
                                                                          {"persons", persons}})});
    p.context = base_context(env, "customer_order", unit, unit.leader().name, "order");
    p.context["restaurant"] = view;
    p.context["budget"] = budget;
    p.context["persons"] = persons;

    std::function<Parsed<Order>(const std::string&)> parse = [&](const std::string& text) {
        Parsed<Order> res;
        auto doc = last_json_block(text, res.problems);
        if (!doc)
            return res;
        if (!doc->is_object() || !doc->contains("dishes") || !(*doc)["dishes"].is_array() || (*doc)["dishes"].empty()) {
            res.problems.push_back("reply must be a JSON object with a non-empty array 'dishes'");
            return res;
        }
        std::vector<DishSale> items;
        int count = 0;
        for (const auto& it : (*doc)["dishes"]) {
            if (!it.is_object() || !it.contains("name") || !it["name"].is_string()) {
                res.problems.push_back("each dish needs a string 'name'");
                continue;
            }
            const auto name = it["name"].get<std::string>();
            const int qty = it.contains("quantity") && it["quantity"].is_number_integer() ? it["quantity"].get<int>() : 1;
            if (!menu.find(name)) {
                res.problems.push_back(fmt::format("'{}' is not on the menu", name));
                continue;
            }
            if (qty < 1) {
                res.problems.push_back(fmt::format("'{}' has quantity {}", name, qty));
                continue;
            }
            count += qty;
            items.push_back({name, qty});
        }
        if (!res.problems.empty())
            return res;
        if (count < persons || count > 2 * persons) {
            res.problems.push_back(
                fmt::format("order {} dishes in total: one or two per person for {} person(s)", count, persons));
            return res;
        }
        auto order = make_order(unit.id, menu, std::move(items), persons);
        if (order.total > budget) {
            res.problems.push_back(fmt::format("order costs {} but the budget is {}", order.total.str(), budget.str()));
            return res;
        }
        res.value = std::move(order);
        return res;
    };

    std::string failure;
    try {
        auto outcome = complete_with_repair<Order>(env.backend, p, env.settings.max_attempts, parse);
        out.attempts = outcome.attempts;
        if (outcome.value) {
            out.order = std::move(*outcome.value);
            return out;
        }
        failure = fmt::format("no valid order after {} attempts", outcome.attempts);
    } catch (const BackendError& e) {
        failure = std::string("backend failure: ") + e.what();
    }
    return fallback(failure);
}

int fallback_review_score(const Order& order, const MenuScores& scores)
{
    double sum = 0.0;
    int n = 0;
    for (const auto& item : order.items) {
        const auto key = canonical_dish_name(item.dish);
        for (const auto& s : scores.scores) {
            if (canonical_dish_name(s.dish) == key) {
                sum += s.score * item.quantity;
                n += item.quantity;
                break;
            }
        }
    }
    const double mean = n ? sum / n : 0.0;
    const auto score = static_cast<int>(std::lround(10.0 * mean));
    return std::clamp(score, 1, 10);
}

DiningExperience dine_and_review(const CustomerEnv& env, const DecisionUnit& unit, const Order& order,
                                 const MenuScores& scores, const PublicInfo& view)
{
    DiningExperience exp;
    exp.unit_id = unit.id;
    exp.day = env.day;
    exp.restaurant_id = order.restaurant_id;
    for (const auto& item : order.items)
        for (const auto& s : scores.scores)
            if (canonical_dish_name(s.dish) == canonical_dish_name(item.dish))
                exp.dish_scores.push_back(s);

    bool leave_comment = unit.is_group();
    if (!leave_comment) {
        UnitRng rng(derive_seed(env.seed, unit.id, env.day, "comment"));
        leave_comment = rng.bernoulli(env.settings.comment_rate);
    }

    std::string party, author;
    for (std::size_t i = 0; i < unit.members.size(); ++i) {
        if (i > 0)
            party += (i > 1 ? ", " : "") + unit.members[i].name;
        author += (i ? ", " : "") + unit.members[i].name;
    }
    std::string order_text, score_text;
    for (const auto& item : order.items)
        order_text += fmt::format("- {} x{}\n", item.dish, item.quantity);
    for (const auto& s : exp.dish_scores)
        score_text += fmt::format("- {}: {:.2f}\n", s.dish, s.score);

    Prompt p;
    p.system = system_prompt(env, unit, unit.leader());
    p.messages.push_back({"user", env.templates.render("customer_review", {{"day", env.day},
                                                                           {"restaurant", view.name},
                                                                           {"party", party},
                                                                           {"order", order_text},
                                                                           {"dish_scores", score_text},
                                                                           {"group_comment", unit.is_group()}})});
    p.context = base_context(env, "customer_review", unit, unit.leader().name, "review");
    p.context["restaurant"] = view;
    p.context["order"] = order;
    p.context["dish_scores"] = exp.dish_scores;
    p.context["leave_comment"] = leave_comment;

    struct Review {
        std::string experience;
        int score;
        std::string comment;
    };
    std::function<Parsed<Review>(const std::string&)> parse = [](const std::string& text) {
        Parsed<Review> res;
        auto doc = last_json_block(text, res.problems);
        if (!doc)
            return res;
        if (!doc->is_object() || !doc->contains("score") || !(*doc)["score"].is_number()) {
            res.problems.push_back("reply must be a JSON object with a numeric 'score'");
            return res;
        }
        const double raw = (*doc)["score"].get<double>();
        if (!std::isfinite(raw)) {
            res.problems.push_back("score must be finite");
            return res;
        }
        res.value = Review{doc->value("experience", std::string{}),
                           std::clamp(static_cast<int>(std::lround(raw)), 1, 10), doc->value("comment", std::string{})};
        return res;
    };

    std::string failure;
    std::optional<Review> review;
    try {
        auto outcome = complete_with_repair<Review>(env.backend, p, env.settings.max_attempts, parse);
        review = outcome.value;
        if (!review)
            failure = fmt::format("no usable review after {} attempts", outcome.attempts);
    } catch (const BackendError& e) {
        failure = std::string("backend failure: ") + e.what();
    }
    if (!review) {
        exp.fallback = true;
        const int s = fallback_review_score(order, scores);
        review = Review{fmt::format("The meal at {} was rated {}/10 from its dish quality.", view.name, s), s,
                        fmt::format("Rated {}/10.", s)};
        exp.warnings.push_back({"review_fallback", unit.id + ": " + failure});
    }
    exp.experience = review->experience;
    exp.score = review->score;
    if (leave_comment)
        exp.comment = Comment{env.day, author, review->score, review->comment};
    return exp;
}

void to_json(nlohmann::json& j, const MealMemory& m)
{
    j = {{"day", m.day},
         {"restaurant_id", m.restaurant_id},
         {"restaurant_name", m.restaurant_name},
         {"score", m.score},
         {"experience", m.experience}};
}

void from_json(const nlohmann::json& j, MealMemory& m)
{
    m.day = j.at("day").get<int>();
    m.restaurant_id = j.at("restaurant_id").get<std::string>();
    m.restaurant_name = j.at("restaurant_name").get<std::string>();
    m.score = j.at("score").get<int>();
    m.experience = j.at("experience").get<std::string>();
}

void to_json(nlohmann::json& j, const VoteRecord& v)
{
    j = {{"member", v.member}, {"restaurant", v.restaurant_id}, {"reason", v.reason}, {"defaulted", v.defaulted}};
}

void from_json(const nlohmann::json& j, VoteRecord& v)
{
    v.member = j.at("member").get<std::string>();
    v.restaurant_id = j.at("restaurant").get<std::string>();
    v.reason = j.value("reason", std::string{});
    v.defaulted = j.value("defaulted", false);
}

void to_json(nlohmann::json& j, const Utterance& u) { j = {{"member", u.member}, {"text", u.text}}; }

void from_json(const nlohmann::json& j, Utterance& u)
{
    u.member = j.at("member").get<std::string>();
    u.text = j.at("text").get<std::string>();
}

} // namespace competeai
