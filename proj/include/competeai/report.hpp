#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "competeai/run_log.hpp"

namespace competeai {

struct AnalysisOptions {
    double wta_threshold = 0.8;
    int wta_from_day = 6;
    int horizon = 0; // 0: take it from the log header
};

/// File name -> contents. Names and column orders are fixed:
///   similarity.csv  day,similarity
///   flows.csv       day,restaurant,persons,parties,share
///   dish_scores.csv day,restaurant,mean_dish_score
///   matthew.csv     day,restaurant,flow_share,customer_score,comments
///   reasons.csv     unit,kind,decisions,<one percentage column per category>
///   summary.json    scalar results and provenance
/// Reals are printed with six decimals; absent values are empty cells (null in JSON).
using ReportFiles = std::map<std::string, std::string>;

ReportFiles build_report(const RunLog& log, const AnalysisOptions& options = {});

struct AggregateRow {
    std::string mode;
    int runs = 0;
    int evaluable = 0;
    int wta_runs = 0;
    std::optional<double> wta_frequency_pct;     // rounded to one decimal
    std::optional<double> mean_dish_score_delta; // over every restaurant of every run
};

/// Rows per dining mode, in the order single, group; modes without runs are omitted.
std::vector<AggregateRow> aggregate_runs(std::span<const RunLog> logs, const AnalysisOptions& options = {});

///   aggregate.csv   mode,runs,evaluable,wta_runs,wta_frequency_pct,mean_dish_score_delta
///   aggregate.json
ReportFiles build_aggregate_report(std::span<const RunLog> logs, const AnalysisOptions& options = {});

void write_report(const ReportFiles& files, const std::filesystem::path& dir);

} // namespace competeai
