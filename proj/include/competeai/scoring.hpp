#pragma once

#include <optional>
#include <span>

#include "competeai/domain.hpp"

namespace competeai {

/// Salary at which the chef term of the dish score saturates at 0.5.
inline constexpr double kReferenceChefSalary = 5000.0;

/// Dish quality proxy: 0.5 * cost/price + 0.5 * salary/5000. Not clamped.
/// Throws DomainError("non-positive price") when price <= 0.
double score_dish(double cost_price, double price, double chef_salary);
double score_dish(Money cost_price, Money price, Money chef_salary);

/// Running mean of every comment score, rounded to one decimal.
/// Empty when there are no comments yet.
std::optional<double> customer_score(std::span<const Comment> comments);

/// Rounds half away from zero to one decimal place.
double round1(double v);

} // namespace competeai
