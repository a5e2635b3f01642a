#pragma once

#include <cstddef>
#include <vector>

namespace dirt {

/// Tempering exponents beta_0 < ... < beta_L = 1. One transport layer is built per entry.
class TemperingSchedule {
public:
    TemperingSchedule() : betas_{1.0} {}
    explicit TemperingSchedule(std::vector<double> betas);

    /// beta_l = beta0^(1 - l/steps), l = 0..steps: steps + 1 exponents ending at exactly 1.
    static TemperingSchedule geometric(double beta0, std::size_t steps);

    [[nodiscard]] const std::vector<double>& betas() const noexcept { return betas_; }
    [[nodiscard]] std::size_t size() const noexcept { return betas_.size(); }
    [[nodiscard]] double operator[](std::size_t l) const { return betas_.at(l); }

    bool operator==(const TemperingSchedule&) const = default;

private:
    std::vector<double> betas_;
};

}  // namespace dirt
