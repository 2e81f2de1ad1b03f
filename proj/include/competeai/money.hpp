#pragma once

#include <compare>
#include <cstdint>
#include <string>

#include <nlohmann/json.hpp>

namespace competeai {

/// Two-decimal fixed-point currency amount stored as integer cents.
class Money {
public:
    constexpr Money() = default;

    static constexpr Money from_cents(std::int64_t cents) { return Money{cents}; }
    /// Rounds to the nearest cent, halves away from zero.
    static Money from_units(double units);

    constexpr std::int64_t cents() const { return cents_; }
    double units() const { return static_cast<double>(cents_) / 100.0; }

    /// "1234.50", "-3.07"
    std::string str() const;

    constexpr Money operator+(Money o) const { return Money{cents_ + o.cents_}; }
    constexpr Money operator-(Money o) const { return Money{cents_ - o.cents_}; }
    constexpr Money operator-() const { return Money{-cents_}; }
    constexpr Money operator*(std::int64_t k) const { return Money{cents_ * k}; }
    constexpr Money& operator+=(Money o) { cents_ += o.cents_; return *this; }
    constexpr Money& operator-=(Money o) { cents_ -= o.cents_; return *this; }

    constexpr auto operator<=>(const Money&) const = default;

private:
    constexpr explicit Money(std::int64_t cents) : cents_(cents) {}
    std::int64_t cents_ = 0;
};

/// Daily share of a monthly amount (1/30), rounded to the cent.
Money prorate_daily(Money monthly);

/// Scales by a real ratio, rounded to the cent.
Money scale(Money m, double ratio);

void to_json(nlohmann::json& j, const Money& m);
void from_json(const nlohmann::json& j, Money& m);

} // namespace competeai
