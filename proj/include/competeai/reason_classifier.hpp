#pragma once

#include <array>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "competeai/backend.hpp"
#include "competeai/templates.hpp"

namespace competeai {

enum class ReasonCategory { core_needs, brand_loyalty, reputation, affordable, signature_dish, explore_new };

/// Column order of every reason table.
inline constexpr std::array kReasonCategories{ReasonCategory::core_needs,   ReasonCategory::brand_loyalty,
                                              ReasonCategory::reputation,   ReasonCategory::affordable,
                                              ReasonCategory::signature_dish, ReasonCategory::explore_new};

inline constexpr std::string_view kReasonRulesVersion = "reason-rules-v1";

std::string_view to_string(ReasonCategory c);
ReasonCategory reason_category_from_string(std::string_view s);

struct ReasonRule {
    ReasonCategory category;
    std::vector<std::string> phrases; // whole-word, case-insensitive; punctuation counts as space
};

/// Checked in order; the first rule with a matching phrase decides.
const std::vector<ReasonRule>& reason_rules();

std::optional<ReasonCategory> match_reason_rules(std::string_view text);

struct ReasonClassification {
    ReasonCategory category = ReasonCategory::core_needs;
    bool low_confidence = false;
    std::string source; // "rule", "backend" or "default"
};

/// Rules first. Unmatched text goes to `fallback` with a single-label prompt
/// when one is given; otherwise, or when the reply names no category, the
/// result is core_needs flagged low-confidence. RequestCapExceeded propagates.
ReasonClassification classify_reason(std::string_view text, AgentBackend* fallback = nullptr,
                                     const TemplateSet* templates = nullptr);

} // namespace competeai
