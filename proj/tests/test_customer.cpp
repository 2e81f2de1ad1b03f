#include <doctest.h>

#include <map>

#include "competeai/customer_engine.hpp"
#include "support.hpp"

using namespace competeai;
using competeai::test::dish;
using competeai::test::FunctionBackend;

namespace {

CustomerProfile person(const std::string& name, double income, const std::string& restriction = "None")
{
    CustomerProfile p;
    p.name = name;
    p.monthly_income = Money::from_units(income);
    p.income_band = income_band_for(p.monthly_income);
    p.taste = "Likes simple food";
    p.health = "Healthy";
    p.dietary_restriction = restriction;
    p.personality = "Calm";
    return p;
}

DecisionUnit single(const CustomerProfile& p) { return {p.name, {p}, std::nullopt}; }

DecisionUnit group_of(GroupType type, const std::vector<CustomerProfile>& members, const std::string& id)
{
    GroupProfile g;
    g.group_type = type;
    g.feature = "They eat together";
    for (const auto& m : members)
        g.members.push_back({m.name, "Member"});
    return {id, members, g};
}

PublicInfo view(const std::string& id, const std::string& name, std::vector<Dish> dishes,
                std::optional<double> score = std::nullopt)
{
    PublicInfo v;
    v.restaurant_id = id;
    v.name = name;
    v.customer_score = score;
    v.advertisement = "Welcome";
    v.menu = public_menu(dishes);
    return v;
}

std::vector<PublicInfo> two_views()
{
    return {view("R1", "American Aroma", {dish("Steak", 30, 12), dish("Lobster Roll", 28, 11)}, 8.0),
            view("R2", "Budget Bites", {dish("Hot Dog", 5, 2), dish("Vegan Delight Salad", 8, 3)}, 6.5)};
}

FrozenMenu frozen(const std::string& id, std::vector<Dish> dishes)
{
    FrozenMenu m;
    m.restaurant_id = id;
    m.day = 1;
    m.dishes = std::move(dishes);
    return m;
}

std::string choice_reply(const std::string& restaurant, const std::string& reason = "looks good")
{
    return test::fenced({{"restaurant", restaurant}, {"reason", reason}});
}

/// Votes by member name; utterances are fixed text.
FunctionBackend voter(std::map<std::string, std::string> votes)
{
    return FunctionBackend([votes](const Prompt& p) {
        const auto member = p.context.at("member").get<std::string>();
        if (p.context.at("task") == "group_utterance")
            return "I am " + member + ".";
        return choice_reply(votes.at(member), member + " wants it");
    });
}

} // namespace

TEST_CASE("majority vote")
{
    std::vector<std::string> a{"R1", "R1", "R2"};
    CHECK(majority_vote(a, "R2") == "R1");
    std::vector<std::string> tie{"R1", "R2"};
    CHECK(majority_vote(tie, "R2") == "R2");
    CHECK(majority_vote(tie, "R1") == "R1");
    std::vector<std::string> tie4{"R2", "R1", "R2", "R1"};
    CHECK(majority_vote(tie4, "R3") == "R1");
    std::vector<std::string> all{"R2", "R2", "R2", "R2"};
    CHECK(majority_vote(all, "R2") == "R2");
}

TEST_CASE("fallback choice prefers the higher customer score")
{
    auto v = two_views();
    CHECK(fallback_choice(v) == "R1");
    v[0].customer_score.reset();
    CHECK(fallback_choice(v) == "R2");
    v[1].customer_score.reset();
    CHECK(fallback_choice(v) == "R1"); // "American Aroma" < "Budget Bites"
}

TEST_CASE("restaurant answers resolve by id or name")
{
    const auto v = two_views();
    CHECK(resolve_restaurant("R2", v) == "R2");
    CHECK(resolve_restaurant("american aroma", v) == "R1");
    CHECK(resolve_restaurant("I pick Budget Bites!", v) == "R2");
    CHECK_FALSE(resolve_restaurant("Golden Dragon", v).has_value());
}

TEST_CASE("one open restaurant needs no model call")
{
    FunctionBackend backend([](const Prompt&) -> std::string { FAIL("unexpected call"); return ""; });
    const auto& tmpl = test::templates_v1();
    CustomerEnv env{backend, tmpl, {}, 1, 2};
    const std::vector<PublicInfo> only{two_views()[1]};
    const auto rec = decide_individual(env, single(person("Ann", 9000)), only, {});
    CHECK(rec.restaurant_id == "R2");
    CHECK(rec.reason == "only option");
    CHECK(backend.calls() == 0);
}

TEST_CASE("individual decision uses the reply")
{
    FunctionBackend backend([](const Prompt&) { return choice_reply("Budget Bites", "cheaper"); });
    const auto tmpl = test::templates_v1();
    CustomerEnv env{backend, tmpl, {}, 1, 1};
    const auto rec = decide_individual(env, single(person("Ann", 9000)), two_views(), {});
    CHECK(rec.restaurant_id == "R2");
    CHECK(rec.reason == "cheaper");
    CHECK(rec.attempts == 1);
    CHECK_FALSE(rec.fallback);
}

TEST_CASE("an unknown restaurant is retried, then falls back")
{
    FunctionBackend backend([](const Prompt&) { return choice_reply("Golden Dragon"); });
    const auto tmpl = test::templates_v1();
    CustomerEnv env{backend, tmpl, {}, 1, 1};
    const auto rec = decide_individual(env, single(person("Ann", 9000)), two_views(), {});
    CHECK(backend.calls() == 3);
    CHECK(rec.fallback);
    CHECK(rec.restaurant_id == "R1");
    REQUIRE(rec.warnings.size() == 1);
    CHECK(rec.warnings[0].code == "decision_fallback");
    const auto retry = backend.prompts()[1].messages.back().content;
    CHECK(retry.find("Golden Dragon") != std::string::npos);
}

TEST_CASE("scripted customers: price-first picks the cheaper restaurant")
{
    ScriptedBackend backend(test::bundled_policies());
    const auto tmpl = test::templates_v1();
    CustomerEnv env{backend, tmpl, {}, 5, 1};
    const auto rec = decide_individual(env, single(person("Zed", 5000)), two_views(), {});
    CHECK(rec.restaurant_id == "R2");
}

TEST_CASE("scripted customers: a vegan picks the menu with a vegan dish")
{
    ScriptedBackend backend(test::bundled_policies());
    const auto tmpl = test::templates_v1();
    CustomerEnv env{backend, tmpl, {}, 5, 1};
    auto views = two_views();
    views[0].customer_score = 9.5;
    const auto rec = decide_individual(env, single(person("Yan", 15000, "Vegan")), views, {});
    CHECK(rec.restaurant_id == "R2");
}

TEST_CASE("three-member group decides by majority")
{
    const auto unit = group_of(GroupType::friend_, {person("A", 9000), person("B", 9000), person("C", 9000)}, "friend-1");
    auto backend = voter({{"A", "R2"}, {"B", "American Aroma"}, {"C", "R1"}});
    const auto tmpl = test::templates_v1();
    CustomerEnv env{backend, tmpl, {}, 1, 1};
    const auto rec = group_discuss(env, unit, two_views(), {});
    CHECK(rec.group);
    CHECK(rec.restaurant_id == "R1");
    REQUIRE(rec.votes.size() == 3);
    CHECK(rec.votes[0].restaurant_id == "R2");
    CHECK(rec.reason == "B wants it");
    REQUIRE(rec.discussion.size() == 3);
    CHECK(rec.discussion[2].text == "I am C.");
    CHECK(backend.calls() == 6);
}

TEST_CASE("utterances see earlier members only")
{
    const auto unit = group_of(GroupType::friend_, {person("A", 9000), person("B", 9000), person("C", 9000)}, "friend-1");
    auto backend = voter({{"A", "R1"}, {"B", "R1"}, {"C", "R1"}});
    const auto tmpl = test::templates_v1();
    CustomerEnv env{backend, tmpl, {}, 1, 1};
    group_discuss(env, unit, two_views(), {});
    const auto prompts = backend.prompts();
    REQUIRE(prompts.size() == 6);
    CHECK(prompts[0].context.at("discussion").empty());
    CHECK(prompts[2].context.at("discussion").size() == 2);
    CHECK(prompts[2].messages[0].content.find("I am B.") != std::string::npos);
    CHECK(prompts[2].messages[0].content.find("I am C.") == std::string::npos);
}

TEST_CASE("a couple's tie goes to the leader")
{
    const auto unit = group_of(GroupType::couple, {person("Lea", 9000), person("Max", 9000)}, "couple-1");
    auto backend = voter({{"Lea", "R2"}, {"Max", "R1"}});
    const auto tmpl = test::templates_v1();
    CustomerEnv env{backend, tmpl, {}, 1, 1};
    CHECK(group_discuss(env, unit, two_views(), {}).restaurant_id == "R2");
}

TEST_CASE("a unanimous family")
{
    const auto unit = group_of(GroupType::family,
                               {person("P", 9000), person("Q", 9000), person("R", 9000), person("S", 9000)}, "family-1");
    auto backend = voter({{"P", "R2"}, {"Q", "R2"}, {"R", "R2"}, {"S", "R2"}});
    const auto tmpl = test::templates_v1();
    CustomerEnv env{backend, tmpl, {}, 1, 1};
    const auto rec = group_discuss(env, unit, two_views(), {});
    CHECK(rec.restaurant_id == "R2");
    CHECK(rec.votes.size() == 4);
}

TEST_CASE("an unusable vote defaults to the leader's preference")
{
    const auto unit = group_of(GroupType::friend_, {person("A", 9000), person("B", 9000), person("C", 9000)}, "friend-1");
    FunctionBackend backend([](const Prompt& p) -> std::string {
        const auto member = p.context.at("member").get<std::string>();
        if (p.context.at("task") == "group_utterance")
            return "hi";
        if (member == "A")
            return choice_reply("R2");
        if (member == "B")
            return choice_reply("R1");
        return "I cannot decide";
    });
    const auto tmpl = test::templates_v1();
    CustomerEnv env{backend, tmpl, {}, 1, 1};
    const auto rec = group_discuss(env, unit, two_views(), {});
    REQUIRE(rec.votes.size() == 3);
    CHECK(rec.votes[2].defaulted);
    CHECK(rec.votes[2].restaurant_id == "R2");
    CHECK(rec.restaurant_id == "R2");
    CHECK(rec.warnings.at(0).code == "vote_defaulted");
}

TEST_CASE("meal budgets")
{
    CHECK(meal_budget(person("A", 12000), 0.004) == Money::from_units(48));
    const auto unit = group_of(GroupType::couple, {person("A", 12000), person("B", 8000)}, "couple-1");
    CHECK(meal_budget(unit, 0.004) == Money::from_units(80));
}

TEST_CASE("orders within budget are accepted")
{
    FunctionBackend backend([](const Prompt&) {
        return test::fenced({{"dishes", {{{"name", "Hot Dog"}, {"quantity", 1}}, {{"name", "Vegan Delight Salad"}}}}});
    });
    const auto tmpl = test::templates_v1();
    CustomerEnv env{backend, tmpl, {}, 1, 1};
    const auto v = two_views()[1];
    const auto menu = frozen("R2", {dish("Hot Dog", 5, 2), dish("Vegan Delight Salad", 8, 3)});
    const auto out = order_dishes(env, single(person("A", 12000)), v, menu);
    CHECK_FALSE(out.fallback);
    CHECK(out.order.total == Money::from_units(13));
    CHECK_FALSE(out.order.over_budget);
}

TEST_CASE("an order over budget is retried then falls back to the cheapest dish")
{
    FunctionBackend backend([](const Prompt&) { return test::fenced({{"dishes", {{{"name", "Steak"}, {"quantity", 2}}}}}); });
    const auto tmpl = test::templates_v1();
    CustomerEnv env{backend, tmpl, {}, 1, 1};
    const auto menu = frozen("R1", {dish("Steak", 30, 12), dish("Lobster Roll", 28, 11)});
    const auto out = order_dishes(env, single(person("A", 12000)), two_views()[0], menu);
    CHECK(backend.calls() == 3);
    CHECK(out.fallback);
    REQUIRE(out.order.items.size() == 1);
    CHECK(out.order.items[0].dish == "Lobster Roll");
    CHECK_FALSE(out.order.over_budget);
}

TEST_CASE("when even the cheapest dish exceeds the budget it is still ordered")
{
    FunctionBackend backend([](const Prompt&) -> std::string { FAIL("unexpected call"); return ""; });
    const auto tmpl = test::templates_v1();
    CustomerEnv env{backend, tmpl, {}, 1, 1};
    const auto menu = frozen("R1", {dish("Tasting Menu", 60, 20)});
    const auto out = order_dishes(env, single(person("A", 12000)), view("R1", "Fancy", menu.dishes), menu);
    CHECK(out.order.total == Money::from_units(60));
    CHECK(out.order.over_budget);
    REQUIRE_FALSE(out.warnings.empty());
    CHECK(out.warnings[0].code == "over_budget");
}

TEST_CASE("groups order for every person from the pooled budget")
{
    FunctionBackend backend([](const Prompt&) { return test::fenced({{"dishes", {{{"name", "Hot Dog"}, {"quantity", 2}}}}}); });
    const auto tmpl = test::templates_v1();
    CustomerEnv env{backend, tmpl, {}, 1, 1};
    const auto unit = group_of(GroupType::couple, {person("A", 2000), person("B", 3000)}, "couple-1");
    const auto menu = frozen("R2", {dish("Hot Dog", 5, 2), dish("Vegan Delight Salad", 8, 3)});
    // pooled budget is 8 + 12 = 20, enough for two hot dogs
    const auto out = order_dishes(env, unit, two_views()[1], menu);
    CHECK_FALSE(out.fallback);
    CHECK(out.order.persons == 2);
    CHECK(out.order.total == Money::from_units(10));
}

TEST_CASE("groups leave one comment signed by all members")
{
    FunctionBackend backend([](const Prompt&) {
        return test::fenced({{"experience", "nice"}, {"score", 8}, {"comment", "We enjoyed it"}});
    });
    const auto tmpl = test::templates_v1();
    CustomerEnv env{backend, tmpl, {}, 1, 3};
    const auto unit = group_of(GroupType::couple, {person("Lea", 9000), person("Max", 9000)}, "couple-1");
    const auto menu = frozen("R2", {dish("Hot Dog", 5, 2)});
    const auto order = make_order(unit.id, menu, {{"Hot Dog", 2}}, 2);
    const auto exp = dine_and_review(env, unit, order, score_menu(menu), two_views()[1]);
    REQUIRE(exp.comment.has_value());
    CHECK(exp.comment->author == "Lea, Max");
    CHECK(exp.comment->score == 8);
    CHECK(exp.comment->day == 3);
}

TEST_CASE("review scores are clamped")
{
    FunctionBackend backend([](const Prompt&) { return test::fenced({{"experience", "wow"}, {"score", 12}, {"comment", "!"}}); });
    const auto tmpl = test::templates_v1();
    CustomerEnv env{backend, tmpl, {}, 1, 1};
    const auto unit = group_of(GroupType::couple, {person("Lea", 9000), person("Max", 9000)}, "couple-1");
    const auto menu = frozen("R2", {dish("Hot Dog", 5, 2)});
    const auto exp = dine_and_review(env, unit, make_order(unit.id, menu, {{"Hot Dog", 2}}, 2), score_menu(menu),
                                     two_views()[1]);
    CHECK(exp.score == 10);
}

TEST_CASE("fallback review score from dish quality")
{
    std::vector<Chef> chef{{"c", Money::from_units(4000)}};
    const auto menu = frozen("R1", {dish("Plate", 10, 5)});
    FrozenMenu staffed = menu;
    staffed.chefs = chef;
    const auto scores = score_menu(staffed); // 0.25 + 0.4 = 0.65
    const auto order = make_order("u", staffed, {{"Plate", 1}}, 1);
    CHECK(fallback_review_score(order, scores) == 7);

    FunctionBackend backend([](const Prompt&) { return std::string("no json"); });
    const auto tmpl = test::templates_v1();
    CustomerEnv env{backend, tmpl, {}, 1, 1};
    const auto unit = group_of(GroupType::couple, {person("Lea", 9000), person("Max", 9000)}, "couple-1");
    const auto exp = dine_and_review(env, unit, order, scores, view("R1", "Plates", menu.dishes));
    CHECK(exp.fallback);
    CHECK(exp.score == 7);
}

TEST_CASE("individual comments follow a seeded coin")
{
    FunctionBackend backend([](const Prompt&) { return test::fenced({{"experience", "ok"}, {"score", 6}, {"comment", "fine"}}); });
    const auto tmpl = test::templates_v1();
    const auto menu = frozen("R2", {dish("Hot Dog", 5, 2)});
    int with_comment = 0;
    for (int i = 0; i < 200; ++i) {
        const auto unit = single(person("P" + std::to_string(i), 9000));
        CustomerEnv env{backend, tmpl, {}, 42, 1};
        const auto a = dine_and_review(env, unit, make_order(unit.id, menu, {{"Hot Dog", 1}}, 1), score_menu(menu),
                                       two_views()[1]);
        const auto b = dine_and_review(env, unit, make_order(unit.id, menu, {{"Hot Dog", 1}}, 1), score_menu(menu),
                                       two_views()[1]);
        CHECK(a.comment.has_value() == b.comment.has_value());
        with_comment += a.comment ? 1 : 0;
    }
    // 0.7 of 200 is 140; a generous band
    CHECK(with_comment > 110);
    CHECK(with_comment < 170);
}
