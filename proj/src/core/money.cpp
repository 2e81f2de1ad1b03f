#include "competeai/money.hpp"

#include <cmath>
#include <cstdlib>

#include <fmt/format.h>

namespace competeai {

Money Money::from_units(double units)
{
    return Money{static_cast<std::int64_t>(std::llround(units * 100.0))};
}

std::string Money::str() const
{
    const auto mag = std::llabs(cents_);
    return fmt::format("{}{}.{:02d}", cents_ < 0 ? "-" : "", mag / 100, mag % 100);
}

Money prorate_daily(Money monthly)
{
    const std::int64_t c = monthly.cents();
    // round half away from zero
    const std::int64_t q = (std::llabs(c) + 15) / 30;
    return Money::from_cents(c < 0 ? -q : q);
}

Money scale(Money m, double ratio)
{
    return Money::from_cents(static_cast<std::int64_t>(std::llround(static_cast<double>(m.cents()) * ratio)));
}

void to_json(nlohmann::json& j, const Money& m) { j = m.units(); }

void from_json(const nlohmann::json& j, Money& m)
{
    if (!j.is_number())
        throw nlohmann::json::type_error::create(302, "currency amount must be a number", &j);
    m = Money::from_units(j.get<double>());
}

} // namespace competeai
