#include "competeai/restaurant_agent.hpp"

#include <fmt/format.h>

#include "competeai/scoring.hpp"
#include "competeai/tool_calls.hpp"

namespace competeai {

namespace {

std::string render_own_state(const RestaurantState& s)
{
    std::string out = fmt::format("Name: {}\nFunds: {}\nMonthly rent: {}\n", s.name, s.funds.str(), s.rent.str());
    if (s.chefs.empty()) {
        out += "Chefs: none employed\n";
    } else {
        out += "Chefs:\n";
        for (const auto& c : s.chefs)
            out += fmt::format("- {} (salary {} per month)\n", c.name, c.salary.str());
    }
    out += fmt::format("Advertisement: {}\n", s.advertisement.empty() ? "(none)" : s.advertisement);
    const auto scores = score_menu(s.menu, s.chefs);
    out += "Menu (price | cost price | quality score):\n";
    for (std::size_t i = 0; i < s.menu.size(); ++i) {
        const auto& d = s.menu[i];
        out += fmt::format("- {}: {} | {} | {:.2f} | {}\n", d.name, d.price.str(), d.cost_price.str(),
                           scores.scores[i].score, d.description);
    }
    return out;
}

std::string render_daybooks(const std::vector<Daybook>& books)
{
    std::string out;
    for (const auto& b : books) {
        out += fmt::format("Day {}: income {}, expense {}, profit {}, customers {} in {} parties", b.day,
                           b.income.str(), b.expense.str(), b.profit().str(), b.num_of_customer, b.num_of_parties);
        if (!b.dishes_sold.empty()) {
            out += "; sold:";
            for (std::size_t i = 0; i < b.dishes_sold.size(); ++i)
                out += fmt::format("{} {} x{}", i ? "," : "", b.dishes_sold[i].dish, b.dishes_sold[i].quantity);
        }
        out += "\n";
    }
    return out;
}

std::string render_comments(const std::vector<Comment>& comments)
{
    std::string out;
    for (const auto& c : comments)
        out += fmt::format("- [day {}] {} ({}/10): {}\n", c.day, c.author, c.score, c.content);
    return out;
}

std::string render_rival(const RivalInfo& r)
{
    std::string out = fmt::format("Name: {}\n", r.name);
    if (r.customer_flow)
        out += fmt::format("Customers served: {}\n", *r.customer_flow);
    out += "Menu:\n";
    for (const auto& d : r.menu)
        out += fmt::format("- {}: {} | {}\n", d.name, d.price.str(), d.description);
    if (!r.comments.empty())
        out += "Comments:\n" + render_comments(r.comments);
    return out;
}

template <typename T>
std::vector<T> tail(const std::vector<T>& v, std::size_t n)
{
    if (v.size() <= n)
        return v;
    return std::vector<T>(v.end() - static_cast<std::ptrdiff_t>(n), v.end());
}

std::string join_lines(const std::vector<std::string>& items)
{
    std::string out;
    for (const auto& s : items)
        out += "- " + s + "\n";
    return out;
}

} // namespace

TurnContext make_turn_context(const RestaurantState& self, const RestaurantState& rival, int day,
                              std::size_t daybook_window, std::size_t memory_window)
{
    TurnContext c;
    c.day = day;
    c.self = self;
    c.self.comments.clear();
    c.self.daybooks.clear();
    c.self.memory.clear();
    c.recent_daybooks = tail(self.daybooks, daybook_window);
    for (const auto& cm : self.comments)
        if (cm.day == day - 1)
            c.previous_comments.push_back(cm);
    if (day >= 2)
        c.rival = rival_view(rival, day);
    c.memory = tail(self.memory, memory_window);
    c.daybook_window = daybook_window;
    c.memory_window = memory_window;
    return c;
}

void to_json(nlohmann::json& j, const TurnContext& c)
{
    j = {{"day", c.day},
         {"restaurant_id", c.self.id},
         {"self",
          {{"name", c.self.name},
           {"funds", c.self.funds},
           {"rent", c.self.rent},
           {"chefs", c.self.chefs},
           {"menu", c.self.menu},
           {"advertisement", c.self.advertisement}}},
         {"daybooks", tail(c.recent_daybooks, c.daybook_window)},
         {"comments", c.previous_comments},
         {"rival", c.rival ? nlohmann::json(*c.rival) : nlohmann::json(nullptr)},
         {"memory", tail(c.memory, c.memory_window)}};
}

Prompt build_restaurant_prompt(const TurnContext& context, const TemplateSet& templates)
{
    const nlohmann::json system_vars{
        {"restaurant_name", context.self.name},
        {"rival_name", context.rival ? context.rival->name : std::string("the other restaurant")},
        {"salary_reference", static_cast<int>(kReferenceChefSalary)},
    };
    const nlohmann::json turn_vars{
        {"day", context.day},
        {"own_state", render_own_state(context.self)},
        {"daybooks", render_daybooks(tail(context.recent_daybooks, context.daybook_window))},
        {"comments", render_comments(context.previous_comments)},
        {"rival", context.rival ? render_rival(*context.rival) : std::string()},
        {"memory", join_lines(tail(context.memory, context.memory_window))},
    };
    Prompt p;
    p.system = templates.render("restaurant_system", system_vars);
    p.messages.push_back({"user", templates.render("restaurant_turn", turn_vars)});
    p.context = context;
    p.context["task"] = "restaurant_turn";
    p.context["seed"] = context.seed;
    p.context["template_version"] = templates.version();
    return p;
}

Prompt build_restaurant_prompt(const TurnContext& context, const std::string& template_id)
{
    return build_restaurant_prompt(context, TemplateSet::builtin(template_id));
}

std::vector<std::string> update_memory(std::vector<std::string> memory, std::string summary, std::size_t window)
{
    memory.push_back(std::move(summary));
    if (memory.size() > window)
        memory.erase(memory.begin(), memory.end() - static_cast<std::ptrdiff_t>(window));
    return memory;
}

std::string auto_summary(int day, const std::vector<Action>& committed)
{
    if (committed.empty())
        return fmt::format("Day {}: no changes to the restaurant.", day);
    std::string out = fmt::format("Day {}:", day);
    for (std::size_t i = 0; i < committed.size(); ++i)
        out += (i ? "; " : " ") + describe(committed[i]);
    return out + ".";
}

TurnResult run_restaurant_turn(AgentBackend& backend, const RestaurantState& state, const TurnContext& context,
                               const TemplateSet& templates, const RestaurantRules& rules, int max_attempts)
{
    TurnResult result;
    result.state = state;

    std::string last_text;
    std::function<Parsed<std::vector<Action>>(const std::string&)> parse = [&](const std::string& text) {
        Parsed<std::vector<Action>> out;
        auto calls = parse_tool_calls(text);
        if (!calls.ok()) {
            out.problems = std::move(calls.diagnostics);
            return out;
        }
        std::vector<Action> committed;
        RestaurantState s = state;
        for (std::size_t i = 0; i < calls.actions.size(); ++i) {
            const auto& a = calls.actions[i];
            try {
                s = apply_action(s, a, rules);
            } catch (const ActionError& e) {
                const auto wire = action_to_wire(a);
                out.problems.push_back(fmt::format("operation #{} ({}.{}) rejected [{}]: {}", i + 1,
                                                   wire["api"].get<std::string>(),
                                                   wire["method"].get<std::string>(), to_string(e.code()), e.what()));
                continue;
            }
            committed.push_back(a);
            if (std::holds_alternative<action::Quit>(a))
                break;
        }
        if (out.problems.empty()) {
            out.value = std::move(committed);
            last_text = text;
        }
        return out;
    };

    RepairOutcome<std::vector<Action>> outcome;
    try {
        outcome = complete_with_repair<std::vector<Action>>(backend, build_restaurant_prompt(context, templates),
                                                            max_attempts, parse);
    } catch (const BackendError& e) {
        result.failed = true;
        result.failure = std::string("backend failure: ") + e.what();
        result.summary = auto_summary(context.day, {});
        result.auto_summary = true;
        return result;
    }
    result.attempts = outcome.attempts;

    if (!outcome.value) {
        result.failed = true;
        result.failure = fmt::format("no usable reply after {} attempts", outcome.attempts);
        result.diagnostics = outcome.last_problems;
        result.summary = auto_summary(context.day, {});
        result.auto_summary = true;
        return result;
    }

    result.actions = std::move(*outcome.value);
    for (const auto& a : result.actions)
        result.state = apply_action(result.state, a, rules);
    result.analysis = extract_analysis(last_text);
    if (auto s = extract_summary(last_text)) {
        result.summary = fmt::format("Day {}: {}", context.day, *s);
    } else {
        result.summary = auto_summary(context.day, result.actions);
        result.auto_summary = true;
    }
    return result;
}

} // namespace competeai
