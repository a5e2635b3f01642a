// Acceptance harness. `dirt_acceptance --criterion N` runs one criterion (all when omitted)
// and prints detail lines followed by exactly one PASS/FAIL line per criterion. The exit
// status is nonzero when any selected criterion fails.
//
// Tolerances are pinned here and must not be relaxed to make a run pass.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <random>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <fmt/core.h>

#include "dirt/cli/runner.hpp"
#include "dirt/cli/suites.hpp"
#include "dirt/common/errors.hpp"
#include "dirt/common/math.hpp"
#include "dirt/estimators/importance.hpp"
#include "dirt/models/cantilever.hpp"
#include "dirt/models/kl_field.hpp"
#include "dirt/models/linear.hpp"
#include "dirt/transport/dirt.hpp"
#include "dirt/transport/sirt.hpp"
#include "dirt/tt/cross.hpp"
#include "dirt/tt/maxvol.hpp"
#include "dirt/tt/tensor_train.hpp"

using namespace dirt;

namespace {

constexpr std::uint64_t kSeed = 20251016;
constexpr std::size_t kRuns = 10;
constexpr double kPhi35 = 2.326e-4;  // Phi(-3.5) to four digits

using Clock = std::chrono::steady_clock;
double since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

// Collects sub-checks of one criterion; the criterion passes when all of them do.
class Criterion {
public:
    explicit Criterion(int id) : id_(id) {}

    bool check(bool ok, const std::string& what) {
        std::printf("  [%s] %s\n", ok ? "ok" : "FAILED", what.c_str());
        std::fflush(stdout);
        all_ &= ok;
        return ok;
    }
    void note(const std::string& what) {
        std::printf("  %s\n", what.c_str());
        std::fflush(stdout);
    }
    bool finish(const std::string& title) const {
        std::printf("%s criterion %d: %s\n", all_ ? "PASS" : "FAIL", id_, title.c_str());
        std::fflush(stdout);
        return all_;
    }

private:
    int id_;
    bool all_ = true;
};

RunConfig linear_run(std::size_t d, double alpha, MethodConfig m, std::uint64_t seed) {
    RunConfig c;
    c.problem.name = "linear";
    c.problem.dim = d;
    c.problem.alpha = alpha;
    c.method = std::move(m);
    c.repetitions = kRuns;
    c.seed = seed;
    return c;
}

std::string describe(const RunSummary& s) {
    return fmt::format("mean {:.4e}  cov {:.4f}  mean lsf_evals {:.0f}  {:.1f} s", s.mean(), s.cov(), s.mean_lsf_evals(),
                       s.seconds());
}

double rel_err(double est, double truth) { return std::abs(est / truth - 1.0); }

const SuiteCell& find_cell(const std::vector<SuiteCell>& cells, const std::string& row, const std::string& column) {
    for (const auto& c : cells)
        if (c.row == row && c.column == column) return c;
    throw ConfigError(fmt::format("no suite cell {} / {}", row, column));
}

// ---------------------------------------------------------------------------------------------

bool criterion1() {
    Criterion c(1);
    for (std::size_t d : {2, 25}) {
        const auto t0 = Clock::now();
        const auto s = run_estimate(linear_run(d, 3.5, linear_dirt_method(d), kSeed + d));
        const double secs = since(t0);
        c.note(fmt::format("d={}: {}", d, describe(s)));
        c.check(rel_err(s.mean(), kPhi35) <= 0.10, fmt::format("d={} mean within 10% of 2.326e-4 (rel err {:.4f})", d, rel_err(s.mean(), kPhi35)));
        c.check(s.cov() <= 0.10, fmt::format("d={} CoV {:.4f} <= 0.10", d, s.cov()));
        c.check(secs < 300.0, fmt::format("d={} wall time {:.1f} s < 300 s", d, secs));
    }
    return c.finish("linear LSF alpha=3.5, d in {2, 25}: DIRT mean within 10%, CoV <= 0.10");
}

bool criterion2() {
    Criterion c(2);
    const auto t0 = Clock::now();
    double evals_25 = 0.0, evals_75 = 0.0;
    for (double alpha : {2.5, 3.5, 4.5, 7.5}) {
        const auto s = run_estimate(linear_run(100, alpha, linear_dirt_method(100), kSeed + static_cast<std::uint64_t>(alpha * 10)));
        const double truth = normal_cdf(-alpha);
        c.note(fmt::format("alpha={}: truth {:.4e}  {}", alpha, truth, describe(s)));
        if (alpha < 7.0) {
            c.check(rel_err(s.mean(), truth) <= 0.15, fmt::format("alpha={} mean within 15% (rel err {:.4f})", alpha, rel_err(s.mean(), truth)));
            c.check(s.cov() <= 0.15, fmt::format("alpha={} CoV {:.4f} <= 0.15", alpha, s.cov()));
        } else {
            const double ratio = s.mean() / truth;
            c.check(ratio >= 0.5 && ratio <= 2.0, fmt::format("alpha=7.5 estimate within a factor of 2 (ratio {:.4f})", ratio));
        }
        if (alpha == 2.5) evals_25 = s.mean_lsf_evals();
        if (alpha == 7.5) evals_75 = s.mean_lsf_evals();
    }
    const double diff = std::abs(evals_75 - evals_25) / evals_25;
    c.check(diff < 0.05, fmt::format("lsf_evals alpha=2.5 vs 7.5 differ by {:.4f} < 0.05 ({:.0f} vs {:.0f})", diff, evals_25, evals_75));
    const double secs = since(t0);
    c.check(secs <= 1200.0, fmt::format("wall time {:.1f} s <= 1200 s", secs));
    return c.finish("linear LSF d=100: DIRT within 15% (alpha <= 4.5), factor 2 at alpha=7.5, evals independent of P(F)");
}

bool criterion3() {
    Criterion c(3);
    MethodConfig sus;
    sus.name = "sus";
    sus.samples_per_level = 3000;
    sus.p0 = 0.1;
    const auto s = run_estimate(linear_run(100, 3.5, sus, kSeed + 3));
    c.note(fmt::format("SuS d=100: {}", describe(s)));
    const double ratio = s.mean() / kPhi35;
    c.check(ratio >= 1.0 / 1.5 && ratio <= 1.5, fmt::format("SuS mean within a factor of 1.5 (ratio {:.4f})", ratio));
    c.check(s.cov() >= 0.05 && s.cov() <= 0.5, fmt::format("SuS CoV {:.4f} in [0.05, 0.5]", s.cov()));

    MethodConfig ce;
    ce.name = "ce";
    ce.samples_per_level = 3000;
    ce.elite_fraction = 0.1;
    const auto e = run_estimate(linear_run(2, 3.5, ce, kSeed + 33));
    c.note(fmt::format("CE d=2: {}", describe(e)));
    const double r2 = e.mean() / kPhi35;
    c.check(r2 >= 0.5 && r2 <= 2.0, fmt::format("CE mean within a factor of 2 (ratio {:.4f})", r2));
    return c.finish("baselines: SuS d=100 within factor 1.5 with CoV in [0.05, 0.5]; CE d=2 within factor 2");
}

bool criterion4() {
    Criterion c(4);
    const double lo[] = {6.3e-2, 1.47e-1}, hi[] = {7.7e-2, 1.80e-1};
    for (int u : {1, 2}) {
        auto cells = suite_cells("corroded_beam", kSeed + static_cast<std::uint64_t>(u), kRuns);
        const auto row = fmt::format("update {}", u);
        const auto d = run_estimate(find_cell(cells, row, "dirt").config);
        const auto b = run_estimate(find_cell(cells, row, "bus_sus").config);
        c.note(fmt::format("update {} DIRT:    {}", u, describe(d)));
        c.note(fmt::format("update {} BUS-SuS: {}", u, describe(b)));
        const double m = d.mean();
        c.check(m >= lo[u - 1] && m <= hi[u - 1],
                fmt::format("update {} DIRT mean {:.4e} in [{:.3e}, {:.3e}]", u, m, lo[u - 1], hi[u - 1]));
        c.check(rel_err(b.mean(), m) <= 0.15, fmt::format("update {} BUS-SuS within 15% of DIRT (rel {:.4f})", u, rel_err(b.mean(), m)));
    }
    return c.finish("corroded beam: DIRT posterior P(F) within 10% of the reference values, BUS-SuS agrees within 15%");
}

bool criterion5() {
    Criterion c(5);
    constexpr double kReference = 2.37e-5;
    for (std::size_t m : {5, 10}) {
        const auto cells = suite_cells("cantilever", kSeed + m, kRuns);
        const auto row = fmt::format("M={}", m);
        const auto d = run_estimate(find_cell(cells, row, "dirt").config);
        const auto b = run_estimate(find_cell(cells, row, "bus_sus").config);
        c.note(fmt::format("M={} DIRT:    {}", m, describe(d)));
        c.note(fmt::format("M={} BUS-SuS: {}", m, describe(b)));
        const double ratio = d.mean() / kReference;
        c.check(ratio >= 1.0 / 1.5 && ratio <= 1.5, fmt::format("M={} DIRT within a factor of 1.5 of 2.37e-5 (ratio {:.4e})", m, ratio));
        const bool finite = std::isfinite(d.cov()) && std::isfinite(b.cov()) && d.cov() > 0.0;
        c.check(finite && b.cov() / d.cov() >= 5.0,
                fmt::format("M={} DIRT CoV {:.4f} at least 5x below BUS-SuS CoV {:.4f}", m, d.cov(), b.cov()));
    }
    return c.finish("cantilever m=10, l_c=2.5, M in {5, 10}: DIRT within factor 1.5 of 2.37e-5, CoV 5x below BUS-SuS");
}

// ---------------------------------------------------------------------------------------------
// Criterion 6: property suites.

TTTensor random_tt(std::mt19937_64& rng, const std::vector<std::size_t>& dims, const std::vector<std::size_t>& ranks) {
    std::normal_distribution<double> dist;
    std::vector<std::vector<double>> cores(dims.size());
    for (std::size_t k = 0; k < dims.size(); ++k) {
        cores[k].resize(ranks[k] * dims[k] * ranks[k + 1]);
        for (double& v : cores[k]) v = dist(rng);
    }
    return TTTensor(dims, ranks, cores);
}

std::vector<std::size_t> unravel(std::size_t flat, std::span<const std::size_t> dims) {
    std::vector<std::size_t> idx(dims.size());
    for (std::size_t k = dims.size(); k-- > 0;) {
        idx[k] = flat % dims[k];
        flat /= dims[k];
    }
    return idx;
}

bool tt_oracle() {
    std::mt19937_64 rng(101);
    for (int t = 0; t < 50; ++t) {
        const std::size_t d = 1 + rng() % 4;
        std::vector<std::size_t> dims(d), ranks(d + 1, 1);
        for (auto& n : dims) n = 2 + rng() % 4;
        for (std::size_t k = 1; k < d; ++k) ranks[k] = 1 + rng() % 3;
        const auto tt = random_tt(rng, dims, ranks);
        const auto dense = full_tensor(tt);
        for (std::size_t f = 0; f < dense.size(); ++f)
            if (dense[f] != eval_discrete(tt, unravel(f, dims))) return false;
    }
    return true;
}

double cross_error(const TTTensor& tt, const GridFunction& f, bool relative) {
    const auto dense = full_tensor(tt);
    double err = 0.0;
    for (std::size_t p = 0; p < dense.size(); ++p) {
        const double exact = f(unravel(p, tt.dims()));
        const double e = std::abs(dense[p] - exact);
        err = std::max(err, relative ? e / std::abs(exact) : e);
    }
    return err;
}

std::pair<double, double> cross_recovery() {
    const std::vector<Interval> unit(5, Interval{0.0, 1.0});
    const GridSpec g5 = GridSpec::uniform(unit, 7);
    LambdaGridFunction exact_rank(5, [&](std::span<const std::size_t> i) {
        double p1 = 1, p2 = 1, p3 = 1;
        for (std::size_t k = 0; k < 5; ++k) {
            const double x = g5.node(k, i[k]);
            p1 *= 1 + x;
            p2 *= std::cos(x + static_cast<double>(k));
            p3 *= std::exp(-x * static_cast<double>(k + 1) / 3.0);
        }
        return p1 + 0.5 * p2 + 2.0 * p3;
    });
    CrossConfig cfg;
    cfg.max_rank = 3;
    cfg.max_iterations = 6;
    cfg.tolerance = 1e-13;
    const double e1 = cross_error(tt_cross(exact_rank, g5, cfg).tt, exact_rank, false);

    const std::vector<Interval> box(3, Interval{-4.0, 4.0});
    const GridSpec g3 = GridSpec::uniform(box, 17);
    LambdaGridFunction gauss(3, [&](std::span<const std::size_t> i) {
        double s = 0.0;
        for (std::size_t k = 0; k < 3; ++k) s += g3.node(k, i[k]) * g3.node(k, i[k]);
        return std::exp(-0.5 * s);
    });
    CrossConfig gc;
    gc.max_rank = 4;
    gc.tolerance = 1e-6;
    const double e2 = cross_error(tt_cross(gauss, g3, gc).tt, gauss, true);
    return {e1, e2};
}

double maxvol_dominance() {
    std::mt19937_64 rng(102);
    std::normal_distribution<double> dist;
    double worst = 0.0;
    for (int t = 0; t < 100; ++t) {
        const Eigen::Index r = 1 + static_cast<Eigen::Index>(rng() % 6);
        const Eigen::Index m = r + static_cast<Eigen::Index>(rng() % 60);
        Eigen::MatrixXd a(m, r);
        for (Eigen::Index i = 0; i < m; ++i)
            for (Eigen::Index j = 0; j < r; ++j) a(i, j) = dist(rng);
        const auto res = maxvol(a);
        Eigen::MatrixXd sub(r, r);
        for (Eigen::Index j = 0; j < r; ++j) sub.row(j) = a.row(res.rows[static_cast<std::size_t>(j)]);
        const Eigen::MatrixXd coef = a * sub.inverse();
        worst = std::max(worst, coef.cwiseAbs().maxCoeff());
    }
    return worst;
}

double transport_round_trip() {
    // Correlated Gaussian through a two-layer map.
    auto target = [](std::span<const double> x) {
        const double rho = 0.6;
        return -0.5 * (x[0] * x[0] - 2 * rho * x[0] * x[1] + x[1] * x[1]) / (1 - rho * rho);
    };
    DirtConfig cfg;
    cfg.grid_nodes = 33;
    cfg.cross.max_rank = 6;
    cfg.cross.max_iterations = 3;
    cfg.cross.seed = 5;
    const std::vector<Interval> box{{-6, 6}, {-6, 6}};
    const auto map = dirt_build(target, box, TemperingSchedule({0.3, 1.0}), ReferenceDensity{}, cfg);
    Rng rng(6);
    double worst = 0.0;
    for (int p = 0; p < 1000; ++p) {
        const auto s = map.sample(rng);
        const auto back = map.pull(s.x);
        const auto again = map.push(back.x);
        for (std::size_t k = 0; k < 2; ++k) worst = std::max(worst, std::abs(again.x[k] - s.x[k]));
    }
    return worst;
}

double simpson_cell_integral(const SirtLayer& layer, std::size_t axis, std::vector<double> x) {
    const auto nodes = layer.grid().nodes(axis);
    double total = 0.0;
    for (std::size_t c = 0; c + 1 < nodes.size(); ++c) {
        const double a = nodes[c], b = nodes[c + 1];
        double s = 0.0;
        for (auto [t, w] : {std::pair{0.0, 1.0}, std::pair{0.5, 4.0}, std::pair{1.0, 1.0}}) {
            x[axis] = a + t * (b - a);
            s += w * (axis + 1 == layer.dim() ? std::exp(layer.log_density(x)) : simpson_cell_integral(layer, axis + 1, x));
        }
        total += s * (b - a) / 6.0;
    }
    return total;
}

double layer_normalization() {
    // Simpson per cell is exact for the piecewise-quadratic density.
    std::mt19937_64 rng(103);
    double worst = 0.0;
    for (int t = 0; t < 5; ++t) {
        const std::vector<Interval> box{{-2, 1}, {0, 5}, {-1, 1}};
        const SirtLayer layer(random_tt(rng, {9, 9, 9}, {1, 3, 2, 1}), GridSpec::uniform(box, 9));
        worst = std::max(worst, std::abs(simpson_cell_integral(layer, 0, {0, 0, 0}) - 1.0));
    }
    return worst;
}

bool cdf_monotone() {
    std::mt19937_64 rng(104);
    const std::vector<Interval> box(3, Interval{-4, 4});
    const SirtLayer layer(random_tt(rng, {17, 17, 17}, {1, 4, 4, 1}), GridSpec::uniform(box, 17));
    std::uniform_real_distribution<double> unif(-4.0, 4.0);
    for (int sweep = 0; sweep < 10000; ++sweep) {
        const std::size_t k = static_cast<std::size_t>(sweep % 3);
        std::vector<double> prefix(k);
        for (double& v : prefix) v = unif(rng);
        if (conditional_cdf(layer, k, prefix, -4.0) != 0.0 || conditional_cdf(layer, k, prefix, 4.0) != 1.0) return false;
        double prev = 0.0;
        for (int s = 0; s <= 40; ++s) {
            const double f = conditional_cdf(layer, k, prefix, -4.0 + 8.0 * s / 40.0);
            if (f < prev) return false;
            prev = f;
        }
    }
    return true;
}

double self_transport_weight() {
    const ReferenceDensity ref;
    const std::vector<Interval> box(3, ref.box());
    auto target = [&](std::span<const double> x) {
        double s = 0.0;
        for (double v : x) s += ref.log_pdf(v);
        return s;
    };
    DirtConfig cfg;
    cfg.grid_nodes = 65;
    cfg.cross.max_rank = 2;
    cfg.cross.max_iterations = 3;
    cfg.cross.seed = 5;
    const auto map = dirt_build(target, box, TemperingSchedule{}, ref, cfg);
    Rng rng(7);
    double worst = 0.0;
    for (int p = 0; p < 1000; ++p) {
        const auto s = map.sample(rng);
        worst = std::max(worst, std::abs(std::exp(target(s.x) - s.log_density) - 1.0));
    }
    return worst;
}

bool flat_likelihood_reduction(std::string& detail) {
    auto p = linear_problem(2, 2.0);
    p.log_likelihood = [](std::span<const double>) { return 0.0; };
    DirtConfig cfg;
    cfg.grid_nodes = 33;
    cfg.cross.max_rank = 2;
    cfg.cross.seed = 9;
    const auto map_q = build_map(p, MapTarget::posterior_failure, 10.0, {}, cfg);
    const auto map_z = build_map(p, MapTarget::posterior, 10.0, {}, cfg);
    const auto post = estimate_posterior_pf(map_q, map_z, p, 4000, 10.0, 8);
    const auto prior = estimate_prior_pf(map_q, p, 4000, 10.0, 9);
    const double truth = normal_cdf(-2.0);
    detail = fmt::format("posterior {:.5e} (se {:.1e}), prior {:.5e} (se {:.1e}), truth {:.5e}", post.estimate, post.std_error,
                         prior.estimate, prior.std_error, truth);
    return std::abs(post.estimate - prior.estimate) <= 3 * std::hypot(post.std_error, prior.std_error) &&
           std::abs(post.estimate - truth) <= 3 * post.std_error;
}

double kl_trace() {
    const auto kl = kl_expand({CovarianceKernel::Kind::exponential, 1.0, 2.0}, 2.0, 201, 10);
    double trace = 0.0;
    for (double l : kl.all_lambda) trace += l;
    return std::abs(trace / 2.0 - 1.0);
}

std::vector<double> cantilever_ratios() {
    const double exact = 20.0 * 8.0 * 1e-4 / 3.0;
    std::vector<double> ratios;
    double prev = 0.0;
    for (std::size_t n : {11u, 21u, 41u, 81u}) {
        const double err = std::abs(cantilever_deflection(std::vector<double>(n, 1e-4), 20.0, 2.0).back() - exact);
        if (prev > 0.0) ratios.push_back(prev / err);
        prev = err;
    }
    return ratios;
}

bool criterion6() {
    Criterion c(6);
    c.check(tt_oracle(), "TT: full_tensor == eval_discrete on 50 random tensors");
    const auto [e_rank, e_gauss] = cross_recovery();
    c.check(e_rank <= 1e-10, fmt::format("TT-cross: exact-rank function max error {:.2e} <= 1e-10", e_rank));
    c.check(e_gauss <= 1e-6, fmt::format("TT-cross: Gaussian density max relative error {:.2e} <= 1e-6", e_gauss));
    const double dom = maxvol_dominance();
    c.check(dom <= 1.01 + 1e-12, fmt::format("maxvol: dominance {:.6f} <= 1.01 on 100 random matrices", dom));
    const double rt = transport_round_trip();
    c.check(rt <= 1e-6, fmt::format("transport: push(pull(x)) round trip {:.2e} <= 1e-6", rt));
    const double norm = layer_normalization();
    c.check(norm <= 1e-8, fmt::format("transport: layer normalization error {:.2e} <= 1e-8", norm));
    c.check(cdf_monotone(), "transport: conditional CDF monotone with exact endpoints on 1e4 sweeps");
    const double w = self_transport_weight();
    c.check(w <= 1e-3, fmt::format("estimators: self-transport weight deviation {:.2e} <= 1e-3", w));
    std::string detail;
    const bool flat = flat_likelihood_reduction(detail);
    c.check(flat, "estimators: flat likelihood ratio estimator reduces to prior P(F): " + detail);
    const double tr = kl_trace();
    c.check(tr <= 0.01, fmt::format("models: KL trace identity relative error {:.4f} <= 0.01", tr));
    const auto ratios = cantilever_ratios();
    bool second = true;
    for (double r : ratios) second &= std::abs(r - 4.0) <= 0.2;
    c.check(second, fmt::format("models: cantilever error ratios under mesh halving {:.3f} {:.3f} {:.3f} (4 +- 0.2)", ratios[0],
                                ratios[1], ratios[2]));
    return c.finish("property suites");
}

}  // namespace

int main(int argc, char** argv) {
    int only = 0;
    for (int i = 1; i < argc; ++i) {
        const std::string a = argv[i];
        if (a == "--criterion" && i + 1 < argc) {
            only = std::atoi(argv[++i]);
        } else {
            std::fprintf(stderr, "usage: dirt_acceptance [--criterion N]\n");
            return 3;
        }
    }
    const std::vector<std::function<bool()>> criteria{criterion1, criterion2, criterion3, criterion4, criterion5, criterion6};
    if (only < 0 || only > static_cast<int>(criteria.size())) {
        std::fprintf(stderr, "criterion must lie in 1..%zu\n", criteria.size());
        return 3;
    }
    bool ok = true;
    for (std::size_t i = 0; i < criteria.size(); ++i) {
        if (only != 0 && static_cast<int>(i) + 1 != only) continue;
        try {
            ok &= criteria[i]();
        } catch (const std::exception& e) {
            std::printf("FAIL criterion %zu: error: %s\n", i + 1, e.what());
            ok = false;
        }
    }
    return ok ? 0 : 1;
}
