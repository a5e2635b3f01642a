#include "dirt/estimators/report.hpp"

#include <cmath>

#include "dirt/common/errors.hpp"
#include "dirt/common/math.hpp"

namespace dirt {

double cov_over_runs(std::span<const double> estimates) {
    if (estimates.size() < 2) throw ConfigError("cov_over_runs: need at least two estimates");
    const double m = mean(estimates);
    if (m == 0.0) throw DegenerateError("cov_over_runs: zero mean, coefficient of variation undefined");
    return sample_std(estimates) / std::abs(m);
}

std::vector<double> RunSummary::estimates() const {
    std::vector<double> v;
    v.reserve(runs.size());
    for (const auto& r : runs) v.push_back(r.estimate);
    return v;
}

double RunSummary::mean() const {
    const auto v = estimates();
    return v.empty() ? std::numeric_limits<double>::quiet_NaN() : dirt::mean(v);
}

double RunSummary::cov() const {
    const auto v = estimates();
    if (v.size() < 2 || dirt::mean(v) == 0.0) return std::numeric_limits<double>::quiet_NaN();
    return cov_over_runs(v);
}

double RunSummary::mean_lsf_evals() const {
    if (runs.empty()) return 0.0;
    double s = 0.0;
    for (const auto& r : runs) s += static_cast<double>(r.lsf_evals);
    return s / static_cast<double>(runs.size());
}

double RunSummary::seconds() const {
    double s = 0.0;
    for (const auto& r : runs) s += r.seconds;
    return s;
}

}  // namespace dirt
