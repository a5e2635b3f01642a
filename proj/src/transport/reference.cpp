#include "dirt/transport/reference.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "dirt/common/errors.hpp"
#include "dirt/common/math.hpp"

namespace dirt {

ReferenceDensity::ReferenceDensity(double sigma, double half_width) : sigma_(sigma), half_width_(half_width) {
    if (!(sigma > 0.0) || !std::isfinite(sigma)) throw ConfigError("reference: sigma must be positive");
    if (!(half_width > 0.0) || !std::isfinite(half_width)) throw ConfigError("reference: half_width must be positive");
    lower_mass_ = normal_cdf(-half_width_ / sigma_);
    mass_ = normal_cdf(half_width_ / sigma_) - lower_mass_;
    log_norm_ = std::log(sigma_) + kLogSqrt2Pi + std::log(mass_);
}

double ReferenceDensity::log_pdf(double u) const noexcept {
    if (!(u >= -half_width_ && u <= half_width_)) return -std::numeric_limits<double>::infinity();
    const double s = u / sigma_;
    return -0.5 * s * s - log_norm_;
}

double ReferenceDensity::cdf(double u) const noexcept {
    if (u <= -half_width_) return 0.0;
    if (u >= half_width_) return 1.0;
    return std::clamp((normal_cdf(u / sigma_) - lower_mass_) / mass_, 0.0, 1.0);
}

double ReferenceDensity::quantile(double z) const {
    if (!(z >= 0.0 && z <= 1.0)) throw DomainError("reference quantile: probability outside [0, 1]");
    if (z == 0.0) return -half_width_;
    if (z == 1.0) return half_width_;
    // Use the nearer tail for accuracy.
    double u;
    if (z < 0.5)
        u = sigma_ * normal_quantile(lower_mass_ + z * mass_);
    else
        u = -sigma_ * normal_quantile(lower_mass_ + (1.0 - z) * mass_);
    return std::clamp(u, -half_width_, half_width_);
}

double ReferenceDensity::sample(Rng& rng) const {
    return quantile(uniform01(rng));
}

}  // namespace dirt
