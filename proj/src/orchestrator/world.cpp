#include "competeai/world.hpp"

#include <fmt/format.h>

#include "competeai/restaurant_agent.hpp"

namespace competeai {

RestaurantState& World::restaurant(const std::string& id)
{
    for (auto& r : restaurants)
        if (r.id == id)
            return r;
    throw std::out_of_range("no restaurant with id " + id);
}

const RestaurantState& World::restaurant(const std::string& id) const
{
    return const_cast<World*>(this)->restaurant(id);
}

World initial_world(const SimulationConfig& config)
{
    World w;
    for (const auto& r : config.restaurants)
        w.restaurants.push_back(initial_state(r));
    return w;
}

void to_json(nlohmann::json& j, const World& w)
{
    j = {{"day", w.day}, {"restaurants", w.restaurants}, {"meals", w.meals}, {"termination", w.termination}};
}

void from_json(const nlohmann::json& j, World& w)
{
    w.day = j.at("day").get<int>();
    w.restaurants = j.at("restaurants").get<std::vector<RestaurantState>>();
    w.meals = j.at("meals").get<std::map<std::string, std::vector<MealMemory>>>();
    w.termination = j.at("termination").get<std::string>();
}

World fold(World w, const RunLog& log, const SimulationConfig& config)
{
    const RestaurantRules rules{config.hiring_guard_days};
    std::map<std::string, FrozenMenu> frozen;
    std::map<std::string, std::vector<Order>> orders;
    int open_day = w.day; // days are logged whole, so a day's first event completes it

    for (const auto& e : log.events()) {
        auto fail = [&](const std::string& why) {
            return FoldError(fmt::format("event {} ({} on day {}): {}", e.seq, to_string(e.type), e.day, why), e.seq);
        };
        if (e.type == EventType::Terminated) {
            w.termination = e.data.at("cause").get<std::string>();
            continue;
        }
        if (e.day != open_day) {
            if (e.day != w.day + 1)
                throw fail(fmt::format("expected day {}", w.day + 1));
            open_day = w.day = e.day;
            frozen.clear();
            orders.clear();
        }
        try {
            switch (e.type) {
            case EventType::TurnCommitted: {
                auto& r = w.restaurant(e.data.at("restaurant").get<std::string>());
                for (const auto& wire : e.data.at("actions")) {
                    std::vector<std::string> problems;
                    auto a = action_from_wire(wire, problems);
                    if (!a)
                        throw fail("unparseable committed action: " + wire.dump());
                    r = apply_action(r, *a, rules);
                }
                break;
            }
            case EventType::MenuFrozen: {
                const auto id = e.data.at("restaurant").get<std::string>();
                auto snapshot = freeze_day_menu(w.restaurant(id), e.day);
                if (nlohmann::json(snapshot.dishes) != e.data.at("dishes") ||
                    nlohmann::json(snapshot.chefs) != e.data.at("chefs"))
                    throw fail("frozen menu differs from the restaurant's state");
                frozen[id] = std::move(snapshot);
                break;
            }
            case EventType::OrderPlaced: {
                auto o = e.data.get<Order>();
                orders[o.restaurant_id].push_back(std::move(o));
                break;
            }
            case EventType::ExperienceRecorded: {
                w.meals[e.data.at("unit").get<std::string>()].push_back(
                    {e.day, e.data.at("restaurant").get<std::string>(), e.data.at("restaurant_name").get<std::string>(),
                     e.data.at("score").get<int>(), e.data.at("experience").get<std::string>()});
                break;
            }
            case EventType::CommentPosted: {
                w.restaurant(e.data.at("restaurant").get<std::string>())
                    .comments.push_back(e.data.at("comment").get<Comment>());
                break;
            }
            case EventType::DaySettled: {
                const auto id = e.data.at("restaurant").get<std::string>();
                auto it = frozen.find(id);
                if (it == frozen.end())
                    throw fail("settlement without a frozen menu");
                auto& r = w.restaurant(id);
                auto s = settle_day(r, it->second, orders[id]);
                if (nlohmann::json(s.daybook) != e.data.at("daybook"))
                    throw fail("logged daybook differs from the recomputed one");
                if (s.state.funds != e.data.at("funds").get<Money>())
                    throw fail("logged funds differ from the recomputed ones");
                r = std::move(s.state);
                break;
            }
            case EventType::MemoryUpdated: {
                auto& r = w.restaurant(e.data.at("restaurant").get<std::string>());
                r.memory = update_memory(std::move(r.memory), e.data.at("summary").get<std::string>(),
                                         static_cast<std::size_t>(config.memory_window));
                break;
            }
            case EventType::DecisionMade:
            case EventType::Warning:
            case EventType::Terminated:
                break;
            }
        } catch (const FoldError&) {
            throw;
        } catch (const std::exception& ex) {
            throw fail(ex.what());
        }
    }
    return w;
}

} // namespace competeai
