#include "competeai/action.hpp"

#include <fmt/format.h>

namespace competeai {

namespace {

template <class... Ts>
struct overloaded : Ts... {
    using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

// Reads args[key] as text; records a problem if absent or mistyped.
std::optional<std::string> text_arg(const nlohmann::json& args, const char* key, bool required,
                                    std::vector<std::string>& problems)
{
    if (!args.contains(key)) {
        if (required)
            problems.push_back(fmt::format("missing argument '{}'", key));
        return std::nullopt;
    }
    const auto& v = args.at(key);
    if (!v.is_string()) {
        problems.push_back(fmt::format("argument '{}' must be a string", key));
        return std::nullopt;
    }
    return v.get<std::string>();
}

std::optional<Money> money_arg(const nlohmann::json& args, const char* key, bool required,
                               std::vector<std::string>& problems)
{
    if (!args.contains(key)) {
        if (required)
            problems.push_back(fmt::format("missing argument '{}'", key));
        return std::nullopt;
    }
    const auto& v = args.at(key);
    if (!v.is_number()) {
        problems.push_back(fmt::format("argument '{}' must be a number", key));
        return std::nullopt;
    }
    return Money::from_units(v.get<double>());
}

void require_name(const std::optional<std::string>& name, const char* what, std::vector<std::string>& problems)
{
    if (name && name->empty())
        problems.push_back(fmt::format("empty {} name", what));
}

void require_salary(const std::optional<Money>& salary, std::vector<std::string>& problems)
{
    if (salary && salary->cents() < 0)
        problems.push_back("negative salary");
}

void require_price(const std::optional<Money>& price, std::vector<std::string>& problems)
{
    if (price && price->cents() <= 0)
        problems.push_back("non-positive price");
}

void require_cost(const std::optional<Money>& cost, std::vector<std::string>& problems)
{
    if (cost && cost->cents() < 0)
        problems.push_back("negative cost_price");
}

} // namespace

nlohmann::json action_to_wire(const Action& a)
{
    using nlohmann::json;
    return std::visit(
        overloaded{
            [](const action::ModifyName& x) {
                return json{{"api", "basic_info"}, {"method", "modify_name"}, {"args", {{"name", x.name}}}};
            },
            [](const action::HireChef& x) {
                return json{{"api", "chef"}, {"method", "hire"}, {"args", {{"name", x.name}, {"salary", x.salary}}}};
            },
            [](const action::FireChef& x) {
                return json{{"api", "chef"}, {"method", "fire"}, {"args", {{"name", x.name}}}};
            },
            [](const action::AdjustSalary& x) {
                return json{{"api", "chef"},
                            {"method", "adjust_salary"},
                            {"args", {{"name", x.name}, {"salary", x.salary}}}};
            },
            [](const action::AddDish& x) { return json{{"api", "menu"}, {"method", "add"}, {"args", x.dish}}; },
            [](const action::DeleteDish& x) {
                return json{{"api", "menu"}, {"method", "delete"}, {"args", {{"name", x.name}}}};
            },
            [](const action::ModifyDish& x) {
                json args{{"name", x.name}};
                if (x.new_name)
                    args["new_name"] = *x.new_name;
                if (x.price)
                    args["price"] = *x.price;
                if (x.cost_price)
                    args["cost_price"] = *x.cost_price;
                if (x.description)
                    args["description"] = *x.description;
                return json{{"api", "menu"}, {"method", "modify"}, {"args", args}};
            },
            [](const action::ModifyAd& x) {
                return json{{"api", "advertisement"}, {"method", "modify"}, {"args", {{"content", x.content}}}};
            },
            [](const action::Quit&) {
                return json{{"api", "basic_info"}, {"method", "quit"}, {"args", json::object()}};
            },
        },
        a);
}

std::optional<Action> action_from_wire(const nlohmann::json& j, std::vector<std::string>& problems)
{
    const auto before = problems.size();
    if (!j.is_object()) {
        problems.push_back("action must be an object");
        return std::nullopt;
    }
    if (!j.contains("api") || !j.at("api").is_string() || !j.contains("method") || !j.at("method").is_string()) {
        problems.push_back("action needs string fields 'api' and 'method'");
        return std::nullopt;
    }
    const auto api = j.at("api").get<std::string>();
    const auto method = j.at("method").get<std::string>();
    const nlohmann::json args = j.value("args", nlohmann::json::object());
    if (!args.is_object()) {
        problems.push_back(fmt::format("{}.{}: 'args' must be an object", api, method));
        return std::nullopt;
    }

    auto ok = [&] { return problems.size() == before; };
    std::optional<Action> out;

    if (api == "basic_info" && method == "modify_name") {
        auto name = text_arg(args, "name", true, problems);
        require_name(name, "restaurant", problems);
        if (ok())
            out = action::ModifyName{*name};
    } else if (api == "basic_info" && method == "quit") {
        out = action::Quit{};
    } else if (api == "chef" && (method == "hire" || method == "adjust_salary")) {
        auto name = text_arg(args, "name", true, problems);
        auto salary = money_arg(args, "salary", true, problems);
        require_name(name, "chef", problems);
        require_salary(salary, problems);
        if (ok()) {
            if (method == "hire")
                out = action::HireChef{*name, *salary};
            else
                out = action::AdjustSalary{*name, *salary};
        }
    } else if (api == "chef" && method == "fire") {
        auto name = text_arg(args, "name", true, problems);
        if (ok())
            out = action::FireChef{*name};
    } else if (api == "menu" && method == "add") {
        auto name = text_arg(args, "name", true, problems);
        auto price = money_arg(args, "price", true, problems);
        auto cost = money_arg(args, "cost_price", true, problems);
        auto desc = text_arg(args, "description", false, problems);
        if (name && canonical_dish_name(*name).empty())
            problems.push_back("empty dish name");
        require_price(price, problems);
        require_cost(cost, problems);
        if (ok())
            out = action::AddDish{Dish{*name, *price, *cost, desc.value_or("")}};
    } else if (api == "menu" && method == "delete") {
        auto name = text_arg(args, "name", true, problems);
        if (ok())
            out = action::DeleteDish{*name};
    } else if (api == "menu" && method == "modify") {
        action::ModifyDish m;
        auto name = text_arg(args, "name", true, problems);
        m.new_name = text_arg(args, "new_name", false, problems);
        m.price = money_arg(args, "price", false, problems);
        m.cost_price = money_arg(args, "cost_price", false, problems);
        m.description = text_arg(args, "description", false, problems);
        if (m.new_name && canonical_dish_name(*m.new_name).empty())
            problems.push_back("empty dish name");
        require_price(m.price, problems);
        require_cost(m.cost_price, problems);
        if (ok()) {
            m.name = *name;
            out = std::move(m);
        }
    } else if (api == "advertisement" && method == "modify") {
        auto content = text_arg(args, "content", true, problems);
        if (ok())
            out = action::ModifyAd{*content};
    } else if ((api == "menu" || api == "comment" || api == "daybook" || api == "basic_info" ||
                api == "advertisement" || api == "chef") &&
               method.rfind("get", 0) == 0) {
        problems.push_back(fmt::format("{}.{} is read-only; its data is already in your context", api, method));
    } else {
        problems.push_back(fmt::format("unknown api/method '{}.{}'", api, method));
    }
    return ok() ? out : std::nullopt;
}

std::string describe(const Action& a)
{
    return std::visit(
        overloaded{
            [](const action::ModifyName& x) { return fmt::format("renamed restaurant to '{}'", x.name); },
            [](const action::HireChef& x) { return fmt::format("hired chef {} at {}", x.name, x.salary.str()); },
            [](const action::FireChef& x) { return fmt::format("fired chef {}", x.name); },
            [](const action::AdjustSalary& x) {
                return fmt::format("set chef {} salary to {}", x.name, x.salary.str());
            },
            [](const action::AddDish& x) {
                return fmt::format("added '{}' at {}", x.dish.name, x.dish.price.str());
            },
            [](const action::DeleteDish& x) { return fmt::format("removed '{}'", x.name); },
            [](const action::ModifyDish& x) { return fmt::format("modified '{}'", x.name); },
            [](const action::ModifyAd&) { return std::string("updated advertisement"); },
            [](const action::Quit&) { return std::string("quit the competition"); },
        },
        a);
}

} // namespace competeai
