#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "competeai/backend.hpp"
#include "competeai/restaurant_system.hpp"
#include "competeai/roster.hpp"
#include "competeai/templates.hpp"

namespace competeai {

struct CustomerSettings {
    double budget_ratio = 0.004; // per-meal budget as a share of monthly income
    double comment_rate = 0.7;   // chance an individual leaves a comment
    int max_attempts = 3;
    std::size_t history_window = 5;
};

/// One past meal of a decision unit, as the unit remembers it.
struct MealMemory {
    int day = 0;
    std::string restaurant_id;
    std::string restaurant_name;
    int score = 0;
    std::string experience;
    bool operator==(const MealMemory&) const = default;
};

/// Something the orchestrator should log as a Warning event.
struct EngineWarning {
    std::string code;
    std::string message;
    bool operator==(const EngineWarning&) const = default;
};

struct VoteRecord {
    std::string member;
    std::string restaurant_id;
    std::string reason;
    bool defaulted = false; // unusable vote replaced by the leader's preference
    bool operator==(const VoteRecord&) const = default;
};

struct Utterance {
    std::string member;
    std::string text;
    bool operator==(const Utterance&) const = default;
};

struct DecisionRecord {
    int day = 0;
    std::string unit_id;
    bool group = false;
    std::string restaurant_id;
    std::string reason;
    std::string category; // filled in by the reason classifier
    bool low_confidence = false;
    std::vector<VoteRecord> votes; // groups only
    std::vector<Utterance> discussion;
    bool fallback = false;
    int attempts = 0;
    std::vector<EngineWarning> warnings;
};

struct OrderOutcome {
    Order order;
    bool fallback = false;
    int attempts = 0;
    std::vector<EngineWarning> warnings;
};

struct DiningExperience {
    std::string unit_id;
    int day = 0;
    std::string restaurant_id;
    std::vector<DishScore> dish_scores; // one per ordered dish
    std::string experience;
    int score = 0;
    std::optional<Comment> comment;
    bool fallback = false;
    std::vector<EngineWarning> warnings;
};

/// Shared inputs of every customer-side call on one day.
struct CustomerEnv {
    AgentBackend& backend;
    const TemplateSet& templates;
    CustomerSettings settings;
    std::uint64_t seed = 0;
    int day = 1;
};

/// Plurality winner; a tie goes to the leader's vote when it is among the
/// tied, else to the lexicographically smallest tied id.
std::string majority_vote(std::span<const std::string> votes, const std::string& leader_vote);

/// Higher customer score wins (unrated counts below any rating); ties go to the lexicographically smaller name.
std::string fallback_choice(std::span<const PublicInfo> views);

/// Matches a free-text restaurant answer against ids and names.
std::optional<std::string> resolve_restaurant(std::string_view answer, std::span<const PublicInfo> views);

Money meal_budget(const CustomerProfile& person, double ratio);
Money meal_budget(const DecisionUnit& unit, double ratio);

DecisionRecord decide_individual(const CustomerEnv& env, const DecisionUnit& unit, std::span<const PublicInfo> views,
                                 std::span<const MealMemory> history);

/// One utterance per member in roster order, then one vote per member.
DecisionRecord group_discuss(const CustomerEnv& env, const DecisionUnit& unit, std::span<const PublicInfo> views,
                             std::span<const MealMemory> history);

/// 1-2 dishes per person within budget, else the cheapest dish per person.
OrderOutcome order_dishes(const CustomerEnv& env, const DecisionUnit& unit, const PublicInfo& view,
                          const FrozenMenu& menu);

/// round(10 * quantity-weighted mean dish score), clamped to [1,10].
int fallback_review_score(const Order& order, const MenuScores& scores);

DiningExperience dine_and_review(const CustomerEnv& env, const DecisionUnit& unit, const Order& order,
                                 const MenuScores& scores, const PublicInfo& view);

/// Serialized form used in prompts' structured context.
nlohmann::json unit_json(const DecisionUnit& unit);

void to_json(nlohmann::json& j, const MealMemory& m);
void from_json(const nlohmann::json& j, MealMemory& m);
void to_json(nlohmann::json& j, const VoteRecord& v);
void from_json(const nlohmann::json& j, VoteRecord& v);
void to_json(nlohmann::json& j, const Utterance& u);
void from_json(const nlohmann::json& j, Utterance& u);

} // namespace competeai
