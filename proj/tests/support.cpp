#include "support.hpp"

#include <algorithm>
#include <cctype>
#include <random>
#include <set>

#include "competeai/orchestrator.hpp"
#include "competeai/restaurant_system.hpp"

namespace fs = std::filesystem;

namespace competeai::test {

fs::path source_path(const std::string& rel) { return fs::path(COMPETEAI_SOURCE_DIR) / rel; }

TempDir::TempDir()
{
    static std::atomic<int> counter{0};
    std::random_device rd;
    path_ = fs::temp_directory_path() /
            ("competeai-test-" + std::to_string(rd()) + "-" + std::to_string(counter.fetch_add(1)));
    fs::create_directories(path_);
}

TempDir::~TempDir()
{
    std::error_code ec;
    fs::remove_all(path_, ec);
}

std::string FunctionBackend::complete(const Prompt& prompt)
{
    calls_.fetch_add(1);
    {
        std::lock_guard lock(mutex_);
        prompts_.push_back(prompt);
    }
    return fn_(prompt);
}

std::vector<Prompt> FunctionBackend::prompts() const
{
    std::lock_guard lock(mutex_);
    return prompts_;
}

std::string fenced(const nlohmann::json& j) { return "```json\n" + j.dump() + "\n```"; }

Roster bundled_roster() { return load_roster(source_path("assets/roster.json")); }
ScriptedPolicies bundled_policies() { return load_policies(source_path("assets/policies/default.json")); }
SimulationConfig bundled_config() { return load_config(source_path("assets/config/default.json")); }
TemplateSet templates_v1() { return TemplateSet::builtin("v1"); }

RunResult run_scripted(const SimulationConfig& config, const ScriptedPolicies& policies, int stop_after_day)
{
    ScriptedBackend backend(policies);
    Simulation sim(config, bundled_roster(), templates_v1(), backend, "scripted", false);
    sim.run(stop_after_day);
    return {sim.log(), sim.world()};
}

Dish dish(const std::string& name, double price, double cost)
{
    return {name, Money::from_units(price), Money::from_units(cost), name + " of the house"};
}

RunLog synthetic_log(const std::string& mode, const std::vector<SyntheticDay>& days, int horizon)
{
    RunLogHeader h;
    h.config_hash = "synthetic";
    h.roster_hash = "synthetic";
    h.template_version = "v1";
    h.mode = mode;
    h.seed = 1;
    h.backend = "scripted";
    h.horizon = horizon;
    RunLog log(h);
    const char* ids[2] = {"R1", "R2"};
    for (std::size_t d = 0; d < days.size(); ++d) {
        const int day = static_cast<int>(d) + 1;
        const auto& sd = days[d];
        for (int r = 0; r < 2; ++r) {
            nlohmann::json scores = nlohmann::json::array();
            for (const auto& x : sd.menu[r])
                scores.push_back({{"dish", x.name},
                                  {"score", oracle_dish_score(x.cost_price.units(), x.price.units(), sd.salary[r])}});
            log.append(day, Phase::freeze, EventType::MenuFrozen,
                       {{"restaurant", ids[r]},
                        {"name", std::string("Restaurant ") + ids[r]},
                        {"dishes", sd.menu[r]},
                        {"chefs", std::vector<Chef>{{"Chef", Money::from_units(sd.salary[r])}}},
                        {"scores", scores},
                        {"chef_salary", Money::from_units(sd.salary[r])},
                        {"no_chef", false}});
        }
        for (int r = 0; r < 2; ++r)
            for (std::size_t k = 0; k < sd.comment_scores[r].size(); ++k)
                log.append(day, Phase::dining, EventType::CommentPosted,
                           {{"restaurant", ids[r]},
                            {"unit", "u" + std::to_string(k)},
                            {"comment", Comment{day, "u" + std::to_string(k), sd.comment_scores[r][k], "ok"}}});
        for (int r = 0; r < 2; ++r) {
            Daybook book;
            book.day = day;
            book.num_of_customer = sd.persons[r];
            book.num_of_parties = sd.persons[r];
            log.append(day, Phase::settlement, EventType::DaySettled,
                       {{"restaurant", ids[r]},
                        {"daybook", book},
                        {"funds_open", Money{}},
                        {"funds", Money{}},
                        {"status", "active"},
                        {"quit_cause", "none"}});
        }
    }
    log.append(static_cast<int>(days.size()), Phase::end, EventType::Terminated,
               {{"cause", "horizon"}, {"days_completed", days.size()}});
    return log;
}

RunLog flow_log(const std::string& mode, const std::vector<std::pair<int, int>>& flows, int horizon)
{
    std::vector<SyntheticDay> days(flows.size());
    for (std::size_t d = 0; d < flows.size(); ++d) {
        days[d].menu[0] = {dish("Burger", 10, 5), dish("Salad", 8, 3)};
        days[d].menu[1] = {dish("Burger", 10, 5), dish("Soup", 6, 2)};
        days[d].persons[0] = flows[d].first;
        days[d].persons[1] = flows[d].second;
    }
    return synthetic_log(mode, days, horizon);
}

double oracle_dish_score(double cost, double price, double salary) { return 0.5 * cost / price + 0.5 * salary / 5000.0; }

std::string oracle_canonical(const std::string& name)
{
    std::string out;
    bool space = false;
    for (const unsigned char ch : name) {
        if (std::isalnum(ch)) {
            if (space && !out.empty())
                out += ' ';
            space = false;
            out += static_cast<char>(std::tolower(ch));
        } else if (std::isspace(ch)) {
            space = true;
        }
        // other punctuation is dropped without splitting words
    }
    return out;
}

std::optional<double> oracle_jaccard(const std::vector<std::string>& a, const std::vector<std::string>& b)
{
    std::vector<std::string> ca, cb;
    for (const auto& x : a)
        ca.push_back(oracle_canonical(x));
    for (const auto& x : b)
        cb.push_back(oracle_canonical(x));
    std::sort(ca.begin(), ca.end());
    ca.erase(std::unique(ca.begin(), ca.end()), ca.end());
    std::sort(cb.begin(), cb.end());
    cb.erase(std::unique(cb.begin(), cb.end()), cb.end());
    if (ca.empty() || cb.empty())
        return std::nullopt;
    std::vector<std::string> inter, uni;
    std::set_intersection(ca.begin(), ca.end(), cb.begin(), cb.end(), std::back_inserter(inter));
    std::set_union(ca.begin(), ca.end(), cb.begin(), cb.end(), std::back_inserter(uni));
    return static_cast<double>(inter.size()) / static_cast<double>(uni.size());
}

int oracle_wta(const std::vector<std::pair<int, int>>& flows, int threshold_num, int threshold_den, int from_day,
               int horizon)
{
    if (static_cast<int>(flows.size()) < horizon || from_day > horizon)
        return -2;
    for (int r = 0; r < 2; ++r) {
        bool all = true;
        for (int day = from_day; day <= horizon && all; ++day) {
            const auto& f = flows[static_cast<std::size_t>(day - 1)];
            const int mine = r == 0 ? f.first : f.second;
            // share > num/den  <=>  mine * den > num * total, exact in integers
            const long long total = f.first + f.second;
            all = total > 0 && static_cast<long long>(mine) * threshold_den > threshold_num * total;
        }
        if (all)
            return r;
    }
    return -1;
}

std::optional<double> oracle_customer_score(const std::vector<int>& scores)
{
    if (scores.empty())
        return std::nullopt;
    long long sum = 0;
    for (int s : scores)
        sum += s;
    const long long n = static_cast<long long>(scores.size());
    // floor(10*sum/n + 1/2) in integers
    const long long tenths = (20 * sum + n) / (2 * n);
    return static_cast<double>(tenths) / 10.0;
}

} // namespace competeai::test
