#include "competeai/orchestrator.hpp"

#include <algorithm>
#include <atomic>
#include <exception>
#include <map>
#include <thread>

#include <fmt/format.h>

#include "competeai/customer_engine.hpp"
#include "competeai/hashing.hpp"
#include "competeai/reason_classifier.hpp"
#include "competeai/restaurant_agent.hpp"
#include "competeai/rng.hpp"

namespace competeai {

namespace {

struct PendingEvent {
    Phase phase;
    EventType type;
    nlohmann::json data;
};

nlohmann::json warning(const std::string& code, const std::string& message, const std::string& subject)
{
    return {{"code", code}, {"message", message}, {"subject", subject}};
}

nlohmann::json wire_actions(const std::vector<Action>& actions)
{
    auto out = nlohmann::json::array();
    for (const auto& a : actions)
        out.push_back(action_to_wire(a));
    return out;
}

} // namespace

void parallel_for(std::size_t n, int workers, const std::function<void(std::size_t)>& fn)
{
    std::vector<std::exception_ptr> errors(n);
    auto guarded = [&](std::size_t i) {
        try {
            fn(i);
        } catch (...) {
            errors[i] = std::current_exception();
        }
    };
    const auto threads = std::min<std::size_t>(n, static_cast<std::size_t>(std::max(1, workers)));
    if (threads <= 1) {
        for (std::size_t i = 0; i < n; ++i)
            guarded(i);
    } else {
        std::atomic<std::size_t> next{0};
        std::vector<std::thread> pool;
        for (std::size_t t = 0; t < threads; ++t)
            pool.emplace_back([&] {
                for (std::size_t i = next++; i < n; i = next++)
                    guarded(i);
            });
        for (auto& th : pool)
            th.join();
    }
    for (auto& e : errors)
        if (e)
            std::rethrow_exception(e);
}

RunLogHeader make_header(const SimulationConfig& config, const Roster& roster, const std::string& template_version,
                         const std::string& backend_kind)
{
    RunLogHeader h;
    h.config_hash = config_hash(config);
    h.roster_hash = sha256_hex(serialize_roster(roster));
    h.template_version = template_version;
    h.mode = std::string(to_string(config.mode));
    h.seed = config.seed;
    h.backend = backend_kind;
    h.horizon = config.horizon;
    return h;
}

Simulation::Simulation(SimulationConfig config, Roster roster, TemplateSet templates, AgentBackend& backend,
                       std::string backend_kind, bool classify_with_backend)
    : config_(std::move(config)),
      roster_(std::move(roster)),
      templates_(std::move(templates)),
      backend_(backend),
      classify_with_backend_(classify_with_backend),
      units_(decision_units(roster_, config_.mode)),
      world_(initial_world(config_)),
      log_(make_header(config_, roster_, templates_.version(), backend_kind))
{
    if (const auto findings = validate_config(config_); !findings.empty())
        throw ConfigError("invalid config: " + findings.front().message, findings);
}

void Simulation::restore(World world, RunLog log)
{
    if (log.header().config_hash != log_.header().config_hash)
        throw ConfigError("checkpoint was taken with a different config",
                          {{"config_mismatch", "config hash differs from the checkpoint"}});
    world_ = std::move(world);
    log_ = std::move(log);
}

void Simulation::terminate(const std::string& why, const std::string& message)
{
    world_.termination = why;
    nlohmann::json data{{"cause", why}, {"days_completed", world_.day}};
    if (!message.empty())
        data["message"] = message;
    log_.append(world_.day, Phase::end, EventType::Terminated, std::move(data));
}

bool Simulation::run(int stop_after_day)
{
    while (!finished() && (stop_after_day <= 0 || world_.day < stop_after_day))
        run_day();
    return finished();
}

void Simulation::run_day()
{
    if (finished())
        throw std::logic_error("simulation already terminated");
    const int day = world_.day + 1;
    World w = world_;
    std::vector<PendingEvent> pending;
    auto emit = [&](Phase p, EventType t, nlohmann::json data) { pending.push_back({p, t, std::move(data)}); };
    auto emit_warnings = [&](Phase p, const std::vector<EngineWarning>& ws, const std::string& subject) {
        for (const auto& x : ws)
            emit(p, EventType::Warning, warning(x.code, x.message, subject));
    };

    try {
        const RestaurantRules rules{config_.hiring_guard_days};

        // Phase 1: simultaneous turns on yesterday's information.
        std::vector<std::size_t> acting;
        for (std::size_t i = 0; i < w.restaurants.size(); ++i)
            if (w.restaurants[i].active())
                acting.push_back(i);
        std::vector<TurnContext> contexts;
        for (auto i : acting) {
            auto ctx = make_turn_context(w.restaurants[i], w.restaurants[1 - i], day,
                                         static_cast<std::size_t>(config_.daybook_window),
                                         static_cast<std::size_t>(config_.memory_window));
            ctx.seed = derive_seed(config_.seed, w.restaurants[i].id, day, "turn");
            contexts.push_back(std::move(ctx));
        }
        std::vector<TurnResult> turns(acting.size());
        parallel_for(acting.size(), 2, [&](std::size_t k) {
            turns[k] = run_restaurant_turn(backend_, w.restaurants[acting[k]], contexts[k], templates_, rules,
                                           config_.retry_budget);
        });
        for (std::size_t k = 0; k < acting.size(); ++k) {
            auto& r = w.restaurants[acting[k]];
            const auto& t = turns[k];
            r = t.state;
            emit(Phase::turns, EventType::TurnCommitted,
                 {{"restaurant", r.id},
                  {"actions", wire_actions(t.actions)},
                  {"analysis", t.analysis},
                  {"summary", t.summary},
                  {"auto_summary", t.auto_summary},
                  {"attempts", t.attempts},
                  {"failed", t.failed},
                  {"failure", t.failure},
                  {"diagnostics", t.diagnostics},
                  {"template_version", templates_.version()}});
            if (t.failed)
                emit(Phase::turns, EventType::Warning, warning("turn_failed", t.failure, r.id));
        }

        // Phase 2: freeze menus; customers see only open restaurants.
        std::map<std::string, FrozenMenu> frozen;
        std::map<std::string, MenuScores> scores;
        std::vector<PublicInfo> views;
        for (auto& r : w.restaurants) {
            if (!r.active())
                continue;
            auto menu = freeze_day_menu(r, day);
            auto s = score_menu(menu);
            emit(Phase::freeze, EventType::MenuFrozen,
                 {{"restaurant", r.id},
                  {"name", r.name},
                  {"dishes", menu.dishes},
                  {"chefs", menu.chefs},
                  {"scores", s.scores},
                  {"chef_salary", s.chef_salary_used},
                  {"no_chef", s.no_chef}});
            if (s.no_chef)
                emit(Phase::freeze, EventType::Warning,
                     warning("no_chef", "no chef employed; dish scores use a salary of 0", r.id));
            views.push_back(public_view(r, menu, static_cast<std::size_t>(config_.public_comment_window)));
            scores[r.id] = std::move(s);
            frozen[r.id] = std::move(menu);
        }
        auto view_of = [&](const std::string& id) -> const PublicInfo& {
            for (const auto& v : views)
                if (v.restaurant_id == id)
                    return v;
            throw std::logic_error("no open restaurant " + id);
        };

        if (!views.empty()) {
            const CustomerEnv env{backend_,
                                  templates_,
                                  {config_.budget_ratio, config_.comment_rate, config_.retry_budget,
                                   static_cast<std::size_t>(config_.history_window)},
                                  config_.seed,
                                  day};
            const std::vector<MealMemory> no_history;
            auto history = [&](const std::string& unit) -> const std::vector<MealMemory>& {
                auto it = w.meals.find(unit);
                return it == w.meals.end() ? no_history : it->second;
            };

            // Phase 3: decisions and orders, independent per unit.
            std::vector<DecisionRecord> decisions(units_.size());
            std::vector<OrderOutcome> orders(units_.size());
            parallel_for(units_.size(), config_.workers, [&](std::size_t i) {
                const auto& unit = units_[i];
                auto rec = unit.is_group() ? group_discuss(env, unit, views, history(unit.id))
                                           : decide_individual(env, unit, views, history(unit.id));
                if (views.size() == 1) {
                    rec.category = std::string(to_string(ReasonCategory::core_needs));
                    rec.low_confidence = true;
                } else {
                    const auto c =
                        classify_reason(rec.reason, classify_with_backend_ ? &backend_ : nullptr, &templates_);
                    rec.category = std::string(to_string(c.category));
                    rec.low_confidence = c.low_confidence;
                }
                orders[i] = order_dishes(env, unit, view_of(rec.restaurant_id), frozen.at(rec.restaurant_id));
                decisions[i] = std::move(rec);
            });
            for (std::size_t i = 0; i < units_.size(); ++i) {
                const auto& d = decisions[i];
                emit(Phase::decisions, EventType::DecisionMade,
                     {{"unit", d.unit_id},
                      {"group", d.group},
                      {"persons", units_[i].persons()},
                      {"restaurant", d.restaurant_id},
                      {"reason", d.reason},
                      {"category", d.category},
                      {"low_confidence", d.low_confidence},
                      {"votes", d.votes},
                      {"discussion", d.discussion},
                      {"fallback", d.fallback},
                      {"attempts", d.attempts}});
                emit_warnings(Phase::decisions, d.warnings, d.unit_id);
                emit(Phase::decisions, EventType::OrderPlaced, orders[i].order);
                emit_warnings(Phase::decisions, orders[i].warnings, d.unit_id);
            }

            // Phase 4: dining, experiences and comments.
            std::vector<DiningExperience> meals(units_.size());
            parallel_for(units_.size(), config_.workers, [&](std::size_t i) {
                const auto& o = orders[i].order;
                meals[i] = dine_and_review(env, units_[i], o, scores.at(o.restaurant_id), view_of(o.restaurant_id));
            });
            for (std::size_t i = 0; i < units_.size(); ++i) {
                const auto& m = meals[i];
                const auto& name = view_of(m.restaurant_id).name;
                emit(Phase::dining, EventType::ExperienceRecorded,
                     {{"unit", m.unit_id},
                      {"restaurant", m.restaurant_id},
                      {"restaurant_name", name},
                      {"dish_scores", m.dish_scores},
                      {"experience", m.experience},
                      {"score", m.score},
                      {"fallback", m.fallback}});
                w.meals[m.unit_id].push_back({day, m.restaurant_id, name, m.score, m.experience});
                if (m.comment) {
                    emit(Phase::dining, EventType::CommentPosted,
                         {{"restaurant", m.restaurant_id}, {"unit", m.unit_id}, {"comment", *m.comment}});
                    w.restaurant(m.restaurant_id).comments.push_back(*m.comment);
                }
                emit_warnings(Phase::dining, m.warnings, m.unit_id);
            }

            // Phase 5: settlement.
            for (auto& r : w.restaurants) {
                auto it = frozen.find(r.id);
                if (it == frozen.end())
                    continue;
                std::vector<Order> served;
                for (const auto& o : orders)
                    if (o.order.restaurant_id == r.id)
                        served.push_back(o.order);
                const auto funds_open = r.funds;
                auto s = settle_day(r, it->second, served);
                r = std::move(s.state);
                emit(Phase::settlement, EventType::DaySettled,
                     {{"restaurant", r.id},
                      {"daybook", s.daybook},
                      {"funds_open", funds_open},
                      {"funds", r.funds},
                      {"status", std::string(to_string(r.status))},
                      {"quit_cause", std::string(to_string(r.quit_cause))}});
                if (r.quit_cause == QuitCause::insolvency)
                    emit(Phase::settlement, EventType::Warning,
                         warning("insolvent", fmt::format("funds {} at close; forced out", r.funds.str()), r.id));
            }
        }

        // Phase 6: memory.
        for (std::size_t k = 0; k < acting.size(); ++k) {
            auto& r = w.restaurants[acting[k]];
            r.memory = update_memory(std::move(r.memory), turns[k].summary,
                                     static_cast<std::size_t>(config_.memory_window));
            emit(Phase::memory, EventType::MemoryUpdated, {{"restaurant", r.id}, {"summary", turns[k].summary}});
        }
    } catch (const RequestCapExceeded& e) {
        terminate(cause::request_cap, e.what());
        return;
    } catch (const std::exception& e) {
        const auto msg = fmt::format("day {}: {}", day, e.what());
        terminate(cause::abort, msg);
        throw RunAborted(msg);
    }

    for (auto& p : pending)
        log_.append(day, p.phase, p.type, std::move(p.data));
    w.day = day;
    world_ = std::move(w);

    bool voluntary = false, insolvent = false;
    for (const auto& r : world_.restaurants) {
        voluntary = voluntary || r.quit_cause == QuitCause::voluntary;
        insolvent = insolvent || r.quit_cause == QuitCause::insolvency;
    }
    if (voluntary)
        terminate(cause::voluntary_quit);
    else if (insolvent)
        terminate(cause::insolvency);
    else if (day >= config_.horizon)
        terminate(cause::horizon);
}

} // namespace competeai
