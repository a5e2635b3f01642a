#include "dirt/transport/schedule.hpp"

#include <cmath>

#include <fmt/core.h>

#include "dirt/common/errors.hpp"

namespace dirt {

TemperingSchedule::TemperingSchedule(std::vector<double> betas) : betas_(std::move(betas)) {
    if (betas_.empty()) throw ConfigError("schedule: at least one tempering exponent is required");
    for (std::size_t l = 0; l < betas_.size(); ++l) {
        const double b = betas_[l];
        if (!(b > 0.0 && b <= 1.0)) throw ConfigError(fmt::format("schedule: beta_{} = {} not in (0, 1]", l, b));
        if (l > 0 && !(b > betas_[l - 1])) throw ConfigError("schedule: exponents must be strictly increasing");
    }
    if (betas_.back() != 1.0) throw ConfigError("schedule: final exponent must be exactly 1");
}

TemperingSchedule TemperingSchedule::geometric(double beta0, std::size_t steps) {
    if (!(beta0 > 0.0 && beta0 <= 1.0)) throw ConfigError("schedule: beta0 must lie in (0, 1]");
    if (steps == 0) {
        if (beta0 != 1.0) throw ConfigError("schedule: zero steps requires beta0 = 1");
        return TemperingSchedule({1.0});
    }
    if (beta0 == 1.0) throw ConfigError("schedule: beta0 = 1 admits no intermediate steps");
    std::vector<double> b(steps + 1);
    for (std::size_t l = 0; l <= steps; ++l)
        b[l] = std::pow(beta0, 1.0 - static_cast<double>(l) / static_cast<double>(steps));
    b.front() = beta0;
    b.back() = 1.0;
    return TemperingSchedule(std::move(b));
}

}  // namespace dirt
