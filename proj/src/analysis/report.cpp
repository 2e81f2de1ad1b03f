#include "competeai/report.hpp"

#include <fstream>
#include <string>

#include <fmt/format.h>
#include <nlohmann/json.hpp>

#include "competeai/hashing.hpp"
#include "competeai/metrics.hpp"
#include "competeai/scoring.hpp"

namespace competeai {

namespace {

constexpr const char* kSimilarityNote =
    "Jaccard index of canonicalized dish-name sets over the two full menus. Whether a shared-category subset "
    "would be the better denominator is open, so absolute levels compare with other studies only qualitatively.";

std::string real(double v) { return fmt::format("{:.6f}", v); }
std::string cell(const std::optional<double>& v) { return v ? real(*v) : std::string(); }

// Numbers go into JSON through their six-decimal text so the output does not
// depend on the last bits of a platform's arithmetic.
nlohmann::json jreal(double v) { return std::stod(real(v)); }
nlohmann::json jreal(const std::optional<double>& v) { return v ? jreal(*v) : nlohmann::json(nullptr); }

int horizon_of(const RunLog& log, const AnalysisOptions& o)
{
    return o.horizon > 0 ? o.horizon : log.header().horizon;
}

std::vector<std::pair<int, int>> flow_pairs(const std::vector<std::vector<DayFlow>>& flows)
{
    std::vector<std::pair<int, int>> out;
    for (const auto& day : flows)
        out.emplace_back(day.size() > 0 ? day[0].persons : 0, day.size() > 1 ? day[1].persons : 0);
    return out;
}

std::string termination_cause(const RunLog& log)
{
    if (!log.events().empty() && log.events().back().type == EventType::Terminated)
        return log.events().back().data.value("cause", "");
    return "";
}

} // namespace

ReportFiles build_report(const RunLog& log, const AnalysisOptions& options)
{
    ReportFiles files;
    const auto ids = restaurant_ids(log);
    const int days = completed_days(log);

    std::map<std::string, std::string> names;
    for (const auto& e : log.events())
        if (e.type == EventType::MenuFrozen && !names.count(e.data.at("restaurant").get<std::string>()))
            names[e.data.at("restaurant").get<std::string>()] = e.data.at("name").get<std::string>();

    const auto sim = similarity_series(log);
    {
        std::string csv = "day,similarity\n";
        for (std::size_t d = 0; d < sim.by_day.size(); ++d)
            csv += fmt::format("{},{}\n", d + 1, cell(sim.by_day[d]));
        files["similarity.csv"] = csv;
    }

    const auto flows = flow_series(log, ids);
    {
        std::string csv = "day,restaurant,persons,parties,share\n";
        for (std::size_t d = 0; d < flows.size(); ++d) {
            int total = 0;
            for (const auto& f : flows[d])
                total += f.persons;
            for (std::size_t i = 0; i < ids.size(); ++i) {
                const auto& f = flows[d][i];
                csv += fmt::format("{},{},{},{},{}\n", d + 1, ids[i], f.persons, f.parties,
                                   total > 0 ? real(static_cast<double>(f.persons) / total) : std::string());
            }
        }
        files["flows.csv"] = csv;
    }

    const auto trends = dish_score_trend(log, ids);
    {
        std::string csv = "day,restaurant,mean_dish_score\n";
        for (int d = 0; d < days; ++d)
            for (const auto& t : trends)
                csv += fmt::format("{},{},{}\n", d + 1, t.restaurant, cell(t.mean_by_day[static_cast<std::size_t>(d)]));
        files["dish_scores.csv"] = csv;
    }

    const auto matthew = matthew_series(log, ids);
    {
        std::string csv = "day,restaurant,flow_share,customer_score,comments\n";
        for (const auto& p : matthew)
            csv += fmt::format("{},{},{},{},{}\n", p.day, p.restaurant, cell(p.flow_share),
                               p.customer_score ? fmt::format("{:.1f}", *p.customer_score) : std::string(),
                               p.comments);
        files["matthew.csv"] = csv;
    }

    const auto reasons = reason_distribution(log);
    {
        std::string csv = "unit,kind,decisions";
        for (const auto c : kReasonCategories)
            csv += fmt::format(",{}", to_string(c));
        csv += "\n";
        for (const auto& r : reasons) {
            const bool average = r.unit.rfind("average:", 0) == 0;
            csv += fmt::format("{},{},{}", r.unit, average ? "average" : (r.group ? "group" : "individual"),
                               r.decisions);
            for (const double p : r.percent)
                csv += "," + real(p);
            csv += "\n";
        }
        files["reasons.csv"] = csv;
    }

    const int horizon = horizon_of(log, options);
    const auto wta = detect_winner_take_all(flow_pairs(flows), options.wta_threshold, options.wta_from_day, horizon);

    nlohmann::json summary;
    const auto& h = log.header();
    summary["provenance"] = {{"run_log_sha256", sha256_hex(log.to_jsonl())},
                             {"config_hash", h.config_hash},
                             {"roster_hash", h.roster_hash},
                             {"template_version", h.template_version},
                             {"reason_rules_version", std::string(kReasonRulesVersion)},
                             {"backend", h.backend},
                             {"mode", h.mode},
                             {"seed", h.seed}};
    summary["days_completed"] = days;
    summary["horizon"] = h.horizon;
    summary["termination"] = termination_cause(log);
    summary["restaurants"] = nlohmann::json::array();
    for (std::size_t i = 0; i < ids.size(); ++i) {
        std::optional<double> final_score;
        int persons = 0;
        for (const auto& p : matthew)
            if (p.restaurant == ids[i])
                final_score = p.customer_score;
        for (const auto& day : flows)
            persons += day[i].persons;
        summary["restaurants"].push_back({{"id", ids[i]},
                                          {"name", names[ids[i]]},
                                          {"dish_score_day1", jreal(trends[i].mean_by_day.empty()
                                                                        ? std::nullopt
                                                                        : trends[i].mean_by_day.front())},
                                          {"dish_score_delta", jreal(trends[i].delta)},
                                          {"final_customer_score", jreal(final_score)},
                                          {"total_persons_served", persons}});
    }
    summary["similarity"] = {{"metric", "jaccard_canonical_names"}, {"note", kSimilarityNote}, {"mean", jreal(sim.mean)}};
    nlohmann::json verdict = {{"evaluable", wta.evaluable},
                              {"winner_take_all", wta.winner_take_all},
                              {"winner", nullptr},
                              {"threshold", jreal(options.wta_threshold)},
                              {"from_day", options.wta_from_day},
                              {"horizon", horizon}};
    if (wta.winner && static_cast<std::size_t>(*wta.winner) < ids.size())
        verdict["winner"] = ids[static_cast<std::size_t>(*wta.winner)];
    summary["winner_take_all"] = verdict;
    files["summary.json"] = summary.dump(2) + "\n";
    return files;
}

std::vector<AggregateRow> aggregate_runs(std::span<const RunLog> logs, const AnalysisOptions& options)
{
    std::vector<AggregateRow> rows;
    for (const char* mode : {"single", "group"}) {
        AggregateRow row;
        row.mode = mode;
        double delta_sum = 0;
        int delta_n = 0;
        for (const auto& log : logs) {
            if (log.header().mode != mode)
                continue;
            ++row.runs;
            const auto ids = restaurant_ids(log);
            const auto wta = detect_winner_take_all(flow_pairs(flow_series(log, ids)), options.wta_threshold,
                                                    options.wta_from_day, horizon_of(log, options));
            if (wta.evaluable) {
                ++row.evaluable;
                row.wta_runs += wta.winner_take_all ? 1 : 0;
            }
            for (const auto& t : dish_score_trend(log, ids)) {
                if (t.delta) {
                    delta_sum += *t.delta;
                    ++delta_n;
                }
            }
        }
        if (row.runs == 0)
            continue;
        if (row.evaluable > 0)
            row.wta_frequency_pct = round1(100.0 * row.wta_runs / row.evaluable);
        if (delta_n > 0)
            row.mean_dish_score_delta = delta_sum / delta_n;
        rows.push_back(row);
    }
    return rows;
}

ReportFiles build_aggregate_report(std::span<const RunLog> logs, const AnalysisOptions& options)
{
    const auto rows = aggregate_runs(logs, options);
    std::string csv = "mode,runs,evaluable,wta_runs,wta_frequency_pct,mean_dish_score_delta\n";
    nlohmann::json j = nlohmann::json::array();
    for (const auto& r : rows) {
        csv += fmt::format("{},{},{},{},{},{}\n", r.mode, r.runs, r.evaluable, r.wta_runs,
                           r.wta_frequency_pct ? fmt::format("{:.1f}", *r.wta_frequency_pct) : std::string(),
                           cell(r.mean_dish_score_delta));
        j.push_back({{"mode", r.mode},
                     {"runs", r.runs},
                     {"evaluable", r.evaluable},
                     {"wta_runs", r.wta_runs},
                     {"wta_frequency_pct", r.wta_frequency_pct ? nlohmann::json(*r.wta_frequency_pct) : nullptr},
                     {"mean_dish_score_delta", jreal(r.mean_dish_score_delta)}});
    }
    nlohmann::json doc = {{"modes", j},
                          {"wta", {{"threshold", jreal(options.wta_threshold)}, {"from_day", options.wta_from_day}}}};
    return {{"aggregate.csv", csv}, {"aggregate.json", doc.dump(2) + "\n"}};
}

void write_report(const ReportFiles& files, const std::filesystem::path& dir)
{
    std::filesystem::create_directories(dir);
    for (const auto& [name, body] : files) {
        std::ofstream out(dir / name, std::ios::binary | std::ios::trunc);
        out << body;
        if (!out)
            throw std::runtime_error("cannot write " + (dir / name).string());
    }
}

} // namespace competeai
