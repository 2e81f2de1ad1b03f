#pragma once

#include <array>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "competeai/domain.hpp"
#include "competeai/reason_classifier.hpp"
#include "competeai/run_log.hpp"

namespace competeai {

/// Jaccard index of the canonicalized dish-name sets. Absent when either menu is empty.
std::optional<double> menu_similarity(std::span<const std::string> a, std::span<const std::string> b);
std::optional<double> menu_similarity(std::span<const Dish> a, std::span<const Dish> b);

/// Restaurants in the order their first menu was frozen.
std::vector<std::string> restaurant_ids(const RunLog& log);

/// Last day with events; 0 for an empty log.
int completed_days(const RunLog& log);

struct SimilaritySeries {
    std::vector<std::optional<double>> by_day; // index 0 is day 1
    std::optional<double> mean;                // over days with a value
};

/// Similarity of the first two restaurants' frozen menus, day by day. A day on
/// which either restaurant froze no menu has no value.
SimilaritySeries similarity_series(const RunLog& log);

struct DayFlow {
    int persons = 0;
    int parties = 0;
};

/// [day - 1][restaurant index] from the daily settlements. Restaurants that
/// did not settle that day (closed) count zero.
std::vector<std::vector<DayFlow>> flow_series(const RunLog& log, const std::vector<std::string>& ids);

struct WtaVerdict {
    bool evaluable = false;
    bool winner_take_all = false;
    std::optional<int> winner; // index into the flow pair
};

/// One fixed restaurant has a share strictly above `threshold` on every day
/// from `from_day` through `horizon`. Series shorter than `horizon` days are
/// not evaluable.
WtaVerdict detect_winner_take_all(std::span<const std::pair<int, int>> flows, double threshold = 0.8,
                                  int from_day = 6, int horizon = 15);

struct ScoreTrend {
    std::string restaurant;
    std::vector<std::optional<double>> mean_by_day; // absent when no menu was frozen
    std::optional<double> delta;                    // last valued day minus day 1
};

std::vector<ScoreTrend> dish_score_trend(const RunLog& log, const std::vector<std::string>& ids);

struct ReasonRow {
    std::string unit; // unit id, or "average:individual" / "average:group"
    bool group = false;
    int decisions = 0;
    std::array<int, kReasonCategories.size()> counts{};
    std::array<double, kReasonCategories.size()> percent{};
};

/// One row per unit in order of first decision, then the mean row of
/// individuals and of groups (each present only if such units exist).
std::vector<ReasonRow> reason_distribution(const RunLog& log);

struct MatthewPoint {
    int day = 0;
    std::string restaurant;
    std::optional<double> flow_share;     // absent when nobody ate out that day
    std::optional<double> customer_score; // over every comment up to and including this day
    int comments = 0;                     // posted on this day
};

std::vector<MatthewPoint> matthew_series(const RunLog& log, const std::vector<std::string>& ids);

} // namespace competeai
