#include "competeai/scoring.hpp"

#include <cmath>

namespace competeai {

double score_dish(double cost_price, double price, double chef_salary)
{
    if (!(price > 0.0))
        throw DomainError("non-positive price");
    return 0.5 * (cost_price / price) + 0.5 * (chef_salary / kReferenceChefSalary);
}

double score_dish(Money cost_price, Money price, Money chef_salary)
{
    // ratios on cents are exact for the first term
    if (price.cents() <= 0)
        throw DomainError("non-positive price");
    return 0.5 * (static_cast<double>(cost_price.cents()) / static_cast<double>(price.cents())) +
           0.5 * (chef_salary.units() / kReferenceChefSalary);
}

double round1(double v)
{
    // nudge absorbs binary representation error (7.25 stored as 7.2499999...)
    const double scaled = v * 10.0;
    return std::round(scaled + std::copysign(1e-9, scaled)) / 10.0;
}

std::optional<double> customer_score(std::span<const Comment> comments)
{
    if (comments.empty())
        return std::nullopt;
    long long sum = 0;
    for (const auto& c : comments)
        sum += c.score;
    // 10*sum/n is never within rounding error of a spurious .5, so this is exact.
    return std::round(10.0 * static_cast<double>(sum) / static_cast<double>(comments.size())) / 10.0;
}

} // namespace competeai
