#include <doctest.h>

#include "competeai/restaurant_agent.hpp"
#include "competeai/tool_calls.hpp"
#include "support.hpp"

using namespace competeai;
using competeai::test::dish;
using competeai::test::FunctionBackend;

namespace {

RestaurantState own_state()
{
    RestaurantState s;
    s.id = "R1";
    s.name = "Blue Door";
    s.funds = Money::from_units(20000);
    s.rent = Money::from_units(3000);
    s.chefs = {{"Chef Ann", Money::from_units(2500)}};
    s.menu = {dish("Pasta", 12, 4), dish("Soup", 6, 2)};
    s.advertisement = "Fresh every day";
    return s;
}

RestaurantState rival_state()
{
    auto s = own_state();
    s.id = "R2";
    s.name = "Red Lamp";
    s.menu = {dish("Noodles", 9, 3)};
    return s;
}

bool contains(const std::string& hay, const std::string& needle) { return hay.find(needle) != std::string::npos; }

std::string reply(const std::string& analysis, const nlohmann::json& ops, const std::string& summary = "")
{
    std::string out = analysis + "\n";
    if (!summary.empty())
        out += "Summary: " + summary + "\n";
    return out + test::fenced(ops);
}

} // namespace

TEST_CASE("prompts are deterministic")
{
    const auto ctx = make_turn_context(own_state(), rival_state(), 1);
    const auto a = build_restaurant_prompt(ctx, test::templates_v1());
    const auto b = build_restaurant_prompt(ctx, test::templates_v1());
    CHECK(a.system == b.system);
    CHECK(a.messages == b.messages);
}

TEST_CASE("empty sections are left out on day one")
{
    const auto ctx = make_turn_context(own_state(), rival_state(), 1);
    CHECK_FALSE(ctx.rival.has_value());
    const auto p = build_restaurant_prompt(ctx, test::templates_v1());
    const auto text = p.system + p.messages.at(0).content;
    CHECK(contains(text, "Blue Door"));
    CHECK(contains(text, "Pasta"));
    CHECK_FALSE(contains(text, "Red Lamp"));
    CHECK_FALSE(contains(text, "Noodles"));
}

TEST_CASE("the rival appears from day two")
{
    auto rival = rival_state();
    Daybook b;
    b.day = 1;
    b.num_of_customer = 21;
    rival.daybooks.push_back(b);
    const auto ctx = make_turn_context(own_state(), rival, 2);
    REQUIRE(ctx.rival.has_value());
    CHECK(ctx.rival->customer_flow == 21);
    const auto text = build_restaurant_prompt(ctx, test::templates_v1()).messages.at(0).content;
    CHECK(contains(text, "Noodles"));
    CHECK(contains(text, "21"));
}

TEST_CASE("daybook and memory windows")
{
    auto self = own_state();
    for (int d = 1; d <= 5; ++d) {
        Daybook b;
        b.day = d;
        b.num_of_customer = 100 + d;
        self.daybooks.push_back(b);
        self.memory.push_back("memo " + std::to_string(d));
    }
    for (int d = 1; d <= 7; ++d)
        self.memory.push_back("note " + std::to_string(d));
    self.comments.push_back({4, "x", 3, "old comment"});
    self.comments.push_back({5, "y", 9, "new comment"});

    const auto ctx = make_turn_context(self, rival_state(), 6);
    REQUIRE(ctx.recent_daybooks.size() == 3);
    CHECK(ctx.recent_daybooks.front().day == 3);
    CHECK(ctx.recent_daybooks.back().day == 5);
    REQUIRE(ctx.memory.size() == 5);
    CHECK(ctx.memory.front() == "note 3");
    REQUIRE(ctx.previous_comments.size() == 1);
    CHECK(ctx.previous_comments[0].content == "new comment");

    const auto text = build_restaurant_prompt(ctx, test::templates_v1()).messages.at(0).content;
    CHECK(contains(text, "customers 105"));
    CHECK(contains(text, "customers 103"));
    CHECK_FALSE(contains(text, "customers 102"));
    CHECK(contains(text, "note 7"));
    CHECK_FALSE(contains(text, "note 2\n"));
    CHECK(contains(text, "new comment"));
    CHECK_FALSE(contains(text, "old comment"));
}

TEST_CASE("prompts show cost prices of the own menu only")
{
    auto rival = rival_state();
    rival.menu = {dish("Noodles", 9, 3.21)};
    const auto ctx = make_turn_context(own_state(), rival, 2);
    const auto text = build_restaurant_prompt(ctx, test::templates_v1()).messages.at(0).content;
    CHECK(contains(text, "4.00"));
    CHECK_FALSE(contains(text, "3.21"));
}

TEST_CASE("a reply without a fenced block is reported")
{
    const auto r = parse_tool_calls("I will keep everything as is.");
    CHECK_FALSE(r.ok());
    REQUIRE(r.diagnostics.size() == 1);
    CHECK(contains(r.diagnostics[0], "no action block"));
}

TEST_CASE("malformed operations are all reported")
{
    const nlohmann::json ops = nlohmann::json::array({
        {{"api", "chef"}, {"method", "hire"}, {"args", {{"name", "Chef Bo"}, {"salary", -5}}}},
        {{"api", "menu"}, {"method", "fly"}, {"args", nlohmann::json::object()}},
        {{"api", "menu"}, {"method", "add"}, {"args", {{"name", "Pie"}}}},
    });
    const auto r = parse_tool_calls(test::fenced(ops));
    CHECK_FALSE(r.ok());
    CHECK(r.actions.empty());
    REQUIRE(r.diagnostics.size() >= 3);
    CHECK(contains(r.diagnostics[0], "operation #1"));
    CHECK(contains(r.diagnostics[0], "negative salary"));
    bool unknown = false, missing = false;
    for (const auto& d : r.diagnostics) {
        unknown = unknown || (contains(d, "operation #2") && contains(d, "unknown"));
        missing = missing || (contains(d, "operation #3") && contains(d, "missing argument 'price'"));
    }
    CHECK(unknown);
    CHECK(missing);
}

TEST_CASE("invalid JSON in the block")
{
    const auto r = parse_tool_calls("```json\n[{\"api\": \n```");
    REQUIRE_FALSE(r.ok());
    CHECK(contains(r.diagnostics[0], "invalid JSON"));
}

TEST_CASE("only the last fenced block counts")
{
    const std::string text = "```json\n[{\"api\":\"basic_info\",\"method\":\"quit\",\"args\":{}}]\n```\nthen\n```json\n[]\n```";
    const auto r = parse_tool_calls(text);
    CHECK(r.ok());
    CHECK(r.actions.empty());
}

TEST_CASE("tool calls round trip")
{
    const std::vector<Action> actions{
        action::ModifyName{"Green Door"},
        action::HireChef{"Chef Bo", Money::from_units(3100.5)},
        action::FireChef{"Chef Ann"},
        action::AdjustSalary{"Chef Bo", Money::from_units(3200)},
        action::AddDish{dish("Vegan Bowl", 11.25, 3.5)},
        action::DeleteDish{"Soup"},
        action::ModifyDish{"Pasta", std::string("Pasta Verde"), Money::from_units(13), std::nullopt, std::nullopt},
        action::ModifyAd{"Now with vegan options"},
        action::Quit{},
    };
    const auto r = parse_tool_calls(serialize_tool_calls(actions));
    REQUIRE(r.ok());
    CHECK(r.actions == actions);
}

TEST_CASE("summary and analysis extraction")
{
    const auto text = reply("We lost customers to the rival.", nlohmann::json::array(), "Cut prices next.");
    CHECK(extract_summary(text) == "Cut prices next.");
    CHECK(extract_analysis(text) == "We lost customers to the rival.");
    CHECK_FALSE(extract_summary("no summary here").has_value());
}

TEST_CASE("a good reply is committed in one attempt")
{
    FunctionBackend backend([](const Prompt&) {
        return reply("Add a vegan dish.",
                     nlohmann::json::array({{{"api", "menu"},
                                             {"method", "add"},
                                             {"args", {{"name", "Vegan Bowl"}, {"price", 11}, {"cost_price", 4},
                                                       {"description", "greens"}}}}}),
                     "Added a vegan bowl.");
    });
    const auto self = own_state();
    const auto ctx = make_turn_context(self, rival_state(), 1);
    const auto r = run_restaurant_turn(backend, self, ctx, test::templates_v1());
    CHECK_FALSE(r.failed);
    CHECK(r.attempts == 1);
    CHECK(backend.calls() == 1);
    REQUIRE(r.actions.size() == 1);
    CHECK(r.state.menu.size() == 3);
    CHECK(r.summary == "Day 1: Added a vegan bowl.");
    CHECK_FALSE(r.auto_summary);
}

TEST_CASE("rejected operations are sent back and retried")
{
    int call = 0;
    FunctionBackend backend([&](const Prompt&) {
        ++call;
        if (call == 1)
            return reply("x", nlohmann::json::array({{{"api", "menu"}, {"method", "delete"}, {"args", {{"name", "Ghost"}}}}}));
        return reply("y", nlohmann::json::array({{{"api", "menu"}, {"method", "delete"}, {"args", {{"name", "Soup"}}}}}));
    });
    const auto self = own_state();
    const auto r = run_restaurant_turn(backend, self, make_turn_context(self, rival_state(), 1), test::templates_v1());
    CHECK(r.attempts == 2);
    CHECK_FALSE(r.failed);
    CHECK(r.state.menu.size() == 1);
    CHECK(r.auto_summary);

    const auto prompts = backend.prompts();
    REQUIRE(prompts.size() == 2);
    const auto& retry = prompts[1].messages;
    REQUIRE(retry.size() == 3);
    CHECK(retry[1].role == "assistant");
    CHECK(contains(retry[2].content, "unknown_entity"));
}

TEST_CASE("three malformed replies give a no-op day")
{
    FunctionBackend backend([](const Prompt&) { return std::string("nothing to see"); });
    const auto self = own_state();
    const auto r = run_restaurant_turn(backend, self, make_turn_context(self, rival_state(), 4), test::templates_v1());
    CHECK(backend.calls() == 3);
    CHECK(r.failed);
    CHECK(r.attempts == 3);
    CHECK(r.actions.empty());
    CHECK(r.state == self);
    CHECK(r.summary == "Day 4: no changes to the restaurant.");
}

TEST_CASE("backend failures give a no-op day")
{
    FunctionBackend backend([](const Prompt&) -> std::string { throw BackendError("connection refused"); });
    const auto self = own_state();
    const auto r = run_restaurant_turn(backend, self, make_turn_context(self, rival_state(), 2), test::templates_v1());
    CHECK(r.failed);
    CHECK(contains(r.failure, "connection refused"));
    CHECK(r.state == self);
}

TEST_CASE("operations after quit are dropped")
{
    FunctionBackend backend([](const Prompt&) {
        return reply("done", nlohmann::json::array({
                                 {{"api", "basic_info"}, {"method", "quit"}, {"args", nlohmann::json::object()}},
                                 {{"api", "advertisement"}, {"method", "modify"}, {"args", {{"content", "late"}}}},
                             }));
    });
    const auto self = own_state();
    const auto r = run_restaurant_turn(backend, self, make_turn_context(self, rival_state(), 3), test::templates_v1());
    CHECK_FALSE(r.failed);
    REQUIRE(r.actions.size() == 1);
    CHECK(std::holds_alternative<action::Quit>(r.actions[0]));
    CHECK(r.state.status == RestaurantStatus::quit);
    CHECK(r.state.advertisement == self.advertisement);
}

TEST_CASE("memory keeps the newest entries")
{
    std::vector<std::string> m;
    for (int i = 1; i <= 7; ++i)
        m = update_memory(m, "s" + std::to_string(i));
    REQUIRE(m.size() == 5);
    CHECK(m.front() == "s3");
    CHECK(m.back() == "s7");
    CHECK(update_memory({}, "a", 1) == std::vector<std::string>{"a"});
}

TEST_CASE("templates reject unbound placeholders")
{
    TemplateSet t("x", {{"a", "hello {{who}}"}});
    CHECK(t.render("a", {{"who", "you"}}) == "hello you");
    CHECK_THROWS_AS(t.render("a", nlohmann::json::object()), TemplateError);
    CHECK_THROWS_AS(t.render("missing", nlohmann::json::object()), TemplateError);
    CHECK(render_template("{{#s}}[{{s}}]{{/s}}.", {{"s", ""}}) == ".");
    CHECK(render_template("{{#s}}[{{s}}]{{/s}}.", {{"s", "k"}}) == "[k].");
}

TEST_CASE("the builtin set provides every template")
{
    const auto t = test::templates_v1();
    for (const auto& name : required_templates())
        CHECK(t.has(name));
}
