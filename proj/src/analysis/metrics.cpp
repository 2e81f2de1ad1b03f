#include "competeai/metrics.hpp"

#include <algorithm>
#include <map>
#include <set>

#include "competeai/restaurant_system.hpp"
#include "competeai/scoring.hpp"

namespace competeai {

namespace {

std::set<std::string> canonical_set(std::span<const std::string> names)
{
    std::set<std::string> out;
    for (const auto& n : names)
        out.insert(canonical_dish_name(n));
    return out;
}

std::vector<std::string> dish_names(std::span<const Dish> dishes)
{
    std::vector<std::string> out;
    for (const auto& d : dishes)
        out.push_back(d.name);
    return out;
}

std::size_t index_of(const std::vector<std::string>& ids, const std::string& id)
{
    return static_cast<std::size_t>(std::find(ids.begin(), ids.end(), id) - ids.begin());
}

} // namespace

std::optional<double> menu_similarity(std::span<const std::string> a, std::span<const std::string> b)
{
    const auto sa = canonical_set(a);
    const auto sb = canonical_set(b);
    if (sa.empty() || sb.empty())
        return std::nullopt;
    std::size_t common = 0;
    for (const auto& n : sa)
        common += sb.count(n);
    const auto all = sa.size() + sb.size() - common;
    return static_cast<double>(common) / static_cast<double>(all);
}

std::optional<double> menu_similarity(std::span<const Dish> a, std::span<const Dish> b)
{
    const auto na = dish_names(a);
    const auto nb = dish_names(b);
    return menu_similarity(na, nb);
}

std::vector<std::string> restaurant_ids(const RunLog& log)
{
    std::vector<std::string> ids;
    for (const auto& e : log.events()) {
        if (e.type != EventType::MenuFrozen)
            continue;
        const auto id = e.data.at("restaurant").get<std::string>();
        if (std::find(ids.begin(), ids.end(), id) == ids.end())
            ids.push_back(id);
    }
    return ids;
}

int completed_days(const RunLog& log)
{
    int last = 0;
    for (const auto& e : log.events())
        if (e.type != EventType::Terminated)
            last = std::max(last, e.day);
    return last;
}

SimilaritySeries similarity_series(const RunLog& log)
{
    const auto ids = restaurant_ids(log);
    const int days = completed_days(log);
    std::vector<std::map<std::string, std::vector<Dish>>> menus(static_cast<std::size_t>(days));
    for (const auto& e : log.events())
        if (e.type == EventType::MenuFrozen)
            menus[static_cast<std::size_t>(e.day - 1)][e.data.at("restaurant").get<std::string>()] =
                e.data.at("dishes").get<std::vector<Dish>>();

    SimilaritySeries out;
    double sum = 0;
    int n = 0;
    for (const auto& day : menus) {
        std::optional<double> v;
        if (ids.size() >= 2 && day.count(ids[0]) && day.count(ids[1]))
            v = menu_similarity(day.at(ids[0]), day.at(ids[1]));
        if (v) {
            sum += *v;
            ++n;
        }
        out.by_day.push_back(v);
    }
    if (n > 0)
        out.mean = sum / n;
    return out;
}

std::vector<std::vector<DayFlow>> flow_series(const RunLog& log, const std::vector<std::string>& ids)
{
    std::vector<std::vector<DayFlow>> out(static_cast<std::size_t>(completed_days(log)),
                                          std::vector<DayFlow>(ids.size()));
    for (const auto& e : log.events()) {
        if (e.type != EventType::DaySettled)
            continue;
        const auto i = index_of(ids, e.data.at("restaurant").get<std::string>());
        if (i == ids.size())
            continue;
        const auto& book = e.data.at("daybook");
        auto& f = out[static_cast<std::size_t>(e.day - 1)][i];
        f.persons = book.at("num_of_customer").get<int>();
        f.parties = book.at("num_of_parties").get<int>();
    }
    return out;
}

WtaVerdict detect_winner_take_all(std::span<const std::pair<int, int>> flows, double threshold, int from_day,
                                  int horizon)
{
    WtaVerdict v;
    if (static_cast<int>(flows.size()) < horizon || from_day < 1 || from_day > horizon)
        return v;
    v.evaluable = true;
    std::optional<int> leader;
    for (int day = from_day; day <= horizon; ++day) {
        const auto [a, b] = flows[static_cast<std::size_t>(day - 1)];
        const int total = a + b;
        if (total <= 0)
            return v;
        const double share_a = static_cast<double>(a) / total;
        const double share_b = static_cast<double>(b) / total;
        int today;
        if (share_a > threshold)
            today = 0;
        else if (share_b > threshold)
            today = 1;
        else
            return v;
        if (leader && *leader != today)
            return v;
        leader = today;
    }
    v.winner_take_all = true;
    v.winner = leader;
    return v;
}

std::vector<ScoreTrend> dish_score_trend(const RunLog& log, const std::vector<std::string>& ids)
{
    const auto days = static_cast<std::size_t>(completed_days(log));
    std::vector<ScoreTrend> out;
    for (const auto& id : ids)
        out.push_back({id, std::vector<std::optional<double>>(days), std::nullopt});
    for (const auto& e : log.events()) {
        if (e.type != EventType::MenuFrozen)
            continue;
        const auto i = index_of(ids, e.data.at("restaurant").get<std::string>());
        if (i == ids.size())
            continue;
        const auto scores = e.data.at("scores").get<std::vector<DishScore>>();
        if (scores.empty())
            continue;
        double sum = 0;
        for (const auto& s : scores)
            sum += s.score;
        out[i].mean_by_day[static_cast<std::size_t>(e.day - 1)] = sum / static_cast<double>(scores.size());
    }
    for (auto& t : out) {
        if (t.mean_by_day.empty() || !t.mean_by_day.front())
            continue;
        for (auto it = t.mean_by_day.rbegin(); it != t.mean_by_day.rend(); ++it) {
            if (*it) {
                t.delta = **it - *t.mean_by_day.front();
                break;
            }
        }
    }
    return out;
}

std::vector<ReasonRow> reason_distribution(const RunLog& log)
{
    std::vector<ReasonRow> rows;
    std::map<std::string, std::size_t> at;
    for (const auto& e : log.events()) {
        if (e.type != EventType::DecisionMade)
            continue;
        const auto unit = e.data.at("unit").get<std::string>();
        auto [it, fresh] = at.emplace(unit, rows.size());
        if (fresh) {
            rows.emplace_back();
            rows.back().unit = unit;
            rows.back().group = e.data.at("group").get<bool>();
        }
        auto& row = rows[it->second];
        const auto cat = reason_category_from_string(e.data.at("category").get<std::string>());
        row.counts[static_cast<std::size_t>(cat)] += 1;
        row.decisions += 1;
    }
    for (auto& r : rows)
        for (std::size_t k = 0; k < r.counts.size(); ++k)
            r.percent[k] = 100.0 * r.counts[k] / r.decisions;

    for (const bool group : {false, true}) {
        ReasonRow avg;
        avg.unit = group ? "average:group" : "average:individual";
        avg.group = group;
        int units = 0;
        for (std::size_t i = 0; i < at.size(); ++i) {
            const auto& r = rows[i];
            if (r.group != group)
                continue;
            ++units;
            avg.decisions += r.decisions;
            for (std::size_t k = 0; k < r.counts.size(); ++k) {
                avg.counts[k] += r.counts[k];
                avg.percent[k] += r.percent[k];
            }
        }
        if (units == 0)
            continue;
        for (auto& p : avg.percent)
            p /= units;
        rows.push_back(avg);
    }
    return rows;
}

std::vector<MatthewPoint> matthew_series(const RunLog& log, const std::vector<std::string>& ids)
{
    const auto flows = flow_series(log, ids);
    const auto days = flows.size();
    std::vector<std::vector<std::vector<Comment>>> posted(days, std::vector<std::vector<Comment>>(ids.size()));
    for (const auto& e : log.events()) {
        if (e.type != EventType::CommentPosted)
            continue;
        const auto i = index_of(ids, e.data.at("restaurant").get<std::string>());
        if (i < ids.size())
            posted[static_cast<std::size_t>(e.day - 1)][i].push_back(e.data.at("comment").get<Comment>());
    }

    std::vector<MatthewPoint> out;
    std::vector<std::vector<Comment>> seen(ids.size());
    for (std::size_t d = 0; d < days; ++d) {
        int total = 0;
        for (const auto& f : flows[d])
            total += f.persons;
        for (std::size_t i = 0; i < ids.size(); ++i) {
            auto& all = seen[i];
            all.insert(all.end(), posted[d][i].begin(), posted[d][i].end());
            MatthewPoint p;
            p.day = static_cast<int>(d) + 1;
            p.restaurant = ids[i];
            if (total > 0)
                p.flow_share = static_cast<double>(flows[d][i].persons) / total;
            p.customer_score = customer_score(all);
            p.comments = static_cast<int>(posted[d][i].size());
            out.push_back(std::move(p));
        }
    }
    return out;
}

} // namespace competeai
