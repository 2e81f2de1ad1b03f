#include "competeai/reason_classifier.hpp"

#include <algorithm>

#include <fmt/format.h>

namespace competeai {

namespace {

// " word word " with punctuation folded to single spaces.
std::string padded_words(std::string_view text)
{
    std::string out = " ";
    for (char c : text) {
        if (std::isalnum(static_cast<unsigned char>(c)) || c == '\'') {
            out += static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
        } else if (out.back() != ' ') {
            out += ' ';
        }
    }
    if (out.back() != ' ')
        out += ' ';
    return out;
}

} // namespace

std::string_view to_string(ReasonCategory c)
{
    switch (c) {
    case ReasonCategory::core_needs: return "core_needs";
    case ReasonCategory::brand_loyalty: return "brand_loyalty";
    case ReasonCategory::reputation: return "reputation";
    case ReasonCategory::affordable: return "affordable";
    case ReasonCategory::signature_dish: return "signature_dish";
    case ReasonCategory::explore_new: return "explore_new";
    }
    return "?";
}

ReasonCategory reason_category_from_string(std::string_view s)
{
    for (auto c : kReasonCategories)
        if (to_string(c) == s)
            return c;
    throw std::invalid_argument(fmt::format("unknown reason category '{}'", s));
}

const std::vector<ReasonRule>& reason_rules()
{
    // Specific intents go before the broad ones: "must-try" is a signature
    // dish, not exploration, and "cheap healthy food" is about price.
    static const std::vector<ReasonRule> rules{
        {ReasonCategory::signature_dish,
         {"signature", "specialty", "specialties", "speciality", "must try", "house special", "best known for",
          "known for their", "known for its"}},
        {ReasonCategory::explore_new,
         {"new", "try", "trying", "tried", "different", "curious", "curiosity", "explore", "exploring", "novel",
          "change of pace", "never been", "haven't been", "variety", "something else"}},
        {ReasonCategory::brand_loyalty,
         {"always", "again", "last time", "loyal", "loyalty", "our place", "my place", "go back", "going back",
          "regular", "regulars", "usual", "favorite", "favourite", "familiar", "trust", "stick with"}},
        {ReasonCategory::reputation,
         {"score", "scores", "rating", "ratings", "rated", "review", "reviews", "reviewed", "comment", "comments",
          "reputation", "popular", "popularity", "recommended", "recommendation", "word of mouth", "well regarded"}},
        {ReasonCategory::affordable,
         {"cheap", "cheaper", "cheapest", "afford", "affordable", "price", "prices", "priced", "pricing", "budget",
          "value", "inexpensive", "cost", "costs", "deal", "deals", "save money", "discount"}},
        {ReasonCategory::core_needs,
         {"vegan", "vegetarian", "diet", "dietary", "sugar", "gluten", "sodium", "salt", "health", "healthy",
          "need", "needs", "taste", "tastes", "allergy", "allergies", "nutritious", "nutrition", "craving", "dairy",
          "lactose", "cholesterol", "calorie", "calories", "hungry", "filling", "portion", "portions"}},
    };
    return rules;
}

std::optional<ReasonCategory> match_reason_rules(std::string_view text)
{
    const auto hay = padded_words(text);
    for (const auto& rule : reason_rules())
        for (const auto& phrase : rule.phrases)
            if (hay.find(padded_words(phrase)) != std::string::npos)
                return rule.category;
    return std::nullopt;
}

ReasonClassification classify_reason(std::string_view text, AgentBackend* fallback, const TemplateSet* templates)
{
    if (auto c = match_reason_rules(text))
        return {*c, false, "rule"};
    if (fallback && templates) {
        Prompt p;
        p.messages.push_back({"user", templates->render("reason_classifier", {{"reason", std::string(text)}})});
        p.context = {{"task", "reason_classifier"}, {"reason", std::string(text)}};
        try {
            const auto reply = padded_words(fallback->complete(p));
            for (auto c : kReasonCategories) {
                auto name = std::string(to_string(c));
                std::replace(name.begin(), name.end(), '_', ' ');
                if (reply.find(" " + name + " ") != std::string::npos)
                    return {c, false, "backend"};
            }
        } catch (const BackendError&) {
            // fall through to the default label
        }
    }
    return {ReasonCategory::core_needs, true, "default"};
}

} // namespace competeai
