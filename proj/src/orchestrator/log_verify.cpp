#include "competeai/log_verify.hpp"

#include <algorithm>
#include <map>
#include <set>

#include <fmt/format.h>

#include "competeai/customer_engine.hpp"
#include "competeai/restaurant_system.hpp"
#include "competeai/world.hpp"

namespace competeai {

std::vector<Violation> verify_log(const RunLog& log, const SimulationConfig& config, const Roster& roster)
{
    std::vector<Violation> out;
    auto flag = [&](const char* check, const Event& e, std::string msg) {
        out.push_back({check, e.day, e.seq, std::move(msg)});
    };

    const auto units = decision_units(roster, config.mode);
    int persons_total = 0;
    std::set<std::string> unit_ids;
    for (const auto& u : units) {
        persons_total += u.persons();
        unit_ids.insert(u.id);
    }

    std::map<std::string, Money> funds;
    for (const auto& r : config.restaurants)
        funds[r.id] = r.funds;

    struct DayState {
        std::map<std::string, std::vector<Dish>> menus;
        std::map<std::string, std::vector<Chef>> chefs;
        std::map<std::string, std::vector<Order>> orders;
        std::set<std::string> decided;
        int order_persons = 0;
        int settled_persons = 0;
        bool settled = false;
        const Event* first = nullptr;
    };
    std::map<int, DayState> days;
    std::map<std::string, Money> rents;
    for (const auto& r : config.restaurants)
        rents[r.id] = r.rent;

    const Event* prev = nullptr;
    for (const auto& e : log.events()) {
        if (prev) {
            if (e.seq != prev->seq + 1)
                flag("ordering", e, fmt::format("sequence jumps from {} to {}", prev->seq, e.seq));
            if (e.day < prev->day || (e.day == prev->day && e.phase < prev->phase))
                flag("ordering", e, "event goes back in (day, phase)");
            if (prev->type == EventType::Terminated)
                flag("ordering", e, "event after Terminated");
        }
        prev = &e;
        if (e.type == EventType::Terminated)
            continue;
        auto& d = days[e.day];
        if (!d.first)
            d.first = &e;
        try {
            switch (e.type) {
            case EventType::MenuFrozen: {
                const auto id = e.data.at("restaurant").get<std::string>();
                d.menus[id] = e.data.at("dishes").get<std::vector<Dish>>();
                d.chefs[id] = e.data.at("chefs").get<std::vector<Chef>>();
                break;
            }
            case EventType::DecisionMade: {
                const auto unit = e.data.at("unit").get<std::string>();
                const auto rid = e.data.at("restaurant").get<std::string>();
                if (d.menus.empty())
                    flag("ordering", e, "decision before any menu was frozen");
                else if (!d.menus.count(rid))
                    flag("ordering", e, fmt::format("{} chose {}, which has no frozen menu today", unit, rid));
                if (!unit_ids.count(unit))
                    flag("units", e, "unknown decision unit " + unit);
                if (!d.decided.insert(unit).second)
                    flag("units", e, unit + " decided twice");
                if (e.data.at("group").get<bool>()) {
                    const auto votes = e.data.at("votes").get<std::vector<VoteRecord>>();
                    if (votes.empty()) {
                        flag("majority", e, unit + " has no recorded votes");
                    } else {
                        std::vector<std::string> ids;
                        for (const auto& v : votes)
                            ids.push_back(v.restaurant_id);
                        if (const auto m = majority_vote(ids, ids.front()); m != rid)
                            flag("majority", e, fmt::format("{} chose {} but the votes give {}", unit, rid, m));
                    }
                }
                break;
            }
            case EventType::OrderPlaced: {
                auto o = e.data.get<Order>();
                d.order_persons += o.persons;
                d.orders[o.restaurant_id].push_back(std::move(o));
                break;
            }
            case EventType::DaySettled: {
                const auto id = e.data.at("restaurant").get<std::string>();
                const auto book = e.data.at("daybook").get<Daybook>();
                const auto open = e.data.at("funds_open").get<Money>();
                const auto close = e.data.at("funds").get<Money>();
                d.settled = true;
                d.settled_persons += book.num_of_customer;
                if (funds.count(id) && open != funds[id])
                    flag("funds", e, fmt::format("{} opens with {} but closed the day before with {}", id, open.str(),
                                                 funds[id].str()));
                if (close != open + book.income - book.expense)
                    flag("funds", e, fmt::format("{}: {} + {} - {} != {}", id, open.str(), book.income.str(),
                                                 book.expense.str(), close.str()));
                // Independent recomputation from the frozen menu and the orders.
                Money income, variable;
                int persons = 0;
                for (const auto& o : d.orders[id]) {
                    persons += o.persons;
                    for (const auto& item : o.items) {
                        const auto& menu = d.menus[id];
                        auto it = std::find_if(menu.begin(), menu.end(),
                                               [&](const Dish& x) { return x.name == item.dish; });
                        if (it == menu.end()) {
                            flag("funds", e, fmt::format("{}: order of {} names unknown dish {}", id, o.unit_id,
                                                         item.dish));
                            continue;
                        }
                        income += it->price * item.quantity;
                        variable += it->cost_price * item.quantity;
                    }
                }
                Money monthly = rents[id];
                for (const auto& c : d.chefs[id])
                    monthly += c.salary;
                const auto expense = prorate_daily(monthly) + variable;
                if (income != book.income)
                    flag("funds", e, fmt::format("{}: income {} but orders total {}", id, book.income.str(), income.str()));
                if (expense != book.expense)
                    flag("funds", e,
                         fmt::format("{}: expense {} but recomputed {}", id, book.expense.str(), expense.str()));
                if (persons != book.num_of_customer)
                    flag("flow", e, fmt::format("{}: {} customers booked, {} in orders", id, book.num_of_customer,
                                                persons));
                funds[id] = close;
                break;
            }
            default:
                break;
            }
        } catch (const std::exception& ex) {
            flag("ordering", e, std::string("malformed event: ") + ex.what());
        }
    }

    for (const auto& [day, d] : days) {
        if (!d.settled)
            continue;
        if (d.settled_persons != persons_total)
            flag("flow", *d.first, fmt::format("day {}: {} persons served, roster has {}", day, d.settled_persons,
                                               persons_total));
        if (d.order_persons != persons_total)
            flag("flow", *d.first, fmt::format("day {}: {} persons ordered, roster has {}", day, d.order_persons,
                                               persons_total));
        if (d.decided.size() != unit_ids.size())
            flag("units", *d.first, fmt::format("day {}: {} of {} units decided", day, d.decided.size(),
                                                unit_ids.size()));
    }

    try {
        fold(initial_world(config), log, config);
    } catch (const FoldError& e) {
        out.push_back({"fold", 0, e.seq(), e.what()});
    } catch (const std::exception& e) {
        out.push_back({"fold", 0, 0, e.what()});
    }
    return out;
}

} // namespace competeai
