#include "dirt/transport/dirt.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <istream>
#include <limits>
#include <ostream>
#include <sstream>

#include <fmt/core.h>
#include <fmt/ostream.h>

namespace dirt {
namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

void expect(std::istream& is, const char* token) {
    std::string t;
    if (!(is >> t) || t != token) throw DomainError(fmt::format("map text: expected '{}', found '{}'", token, t));
}

double read_double(std::istream& is) {
    std::string tok;
    if (!(is >> tok)) throw DomainError("map text: truncated");
    char* end = nullptr;
    const double v = std::strtod(tok.c_str(), &end);
    if (end != tok.c_str() + tok.size()) throw DomainError(fmt::format("map text: bad number '{}'", tok));
    return v;
}

std::size_t read_size(std::istream& is) {
    std::size_t v = 0;
    if (!(is >> v)) throw DomainError("map text: expected a count");
    return v;
}

}  // namespace

// ---------------------------------------------------------------------------
// AffineScaling

AffineScaling::AffineScaling(Interval reference_box, std::vector<Interval> physical)
    : box_(reference_box), physical_(std::move(physical)) {
    if (!(box_.width() > 0.0)) throw ConfigError("AffineScaling: empty reference box");
    log_jacobian_ = 0.0;
    for (std::size_t k = 0; k < physical_.size(); ++k) {
        const auto& b = physical_[k];
        if (!(b.width() > 0.0) || !std::isfinite(b.lo) || !std::isfinite(b.hi))
            throw ConfigError(fmt::format("AffineScaling: bounds of dimension {} are not a finite interval", k));
        log_jacobian_ += std::log(b.width() / box_.width());
    }
}

double AffineScaling::to_physical(std::size_t k, double z) const {
    const auto& b = physical_[k];
    if (z == box_.hi) return b.hi;
    return b.lo + (z - box_.lo) / box_.width() * b.width();
}

double AffineScaling::to_reference(std::size_t k, double x) const {
    const auto& b = physical_[k];
    if (x == b.hi) return box_.hi;
    return box_.lo + (x - b.lo) / b.width() * box_.width();
}

// ---------------------------------------------------------------------------
// DirtConfig

void DirtConfig::validate(std::size_t dim) const {
    if (grid_nodes < 2) throw ConfigError("dirt: grid_nodes must be at least 2");
    if (!(floor_fraction > 0.0) || !(floor_fraction < 1.0)) throw ConfigError("dirt: floor_fraction must lie in (0, 1)");
    if (pilot_samples < 1) throw ConfigError("dirt: pilot_samples must be at least 1");
    cross.validate(std::vector<std::size_t>(dim, grid_nodes));
}

// ---------------------------------------------------------------------------
// DirtMap

DirtMap::DirtMap(std::vector<SirtLayer> layers, TemperingSchedule schedule, ReferenceDensity reference,
                 AffineScaling scaling, DirtBuildStats stats)
    : layers_(std::move(layers)), schedule_(std::move(schedule)), reference_(reference),
      scaling_(std::move(scaling)), stats_(std::move(stats)) {
    if (layers_.size() > schedule_.size())
        throw DomainError("DirtMap: more layers than tempering exponents");
    for (const auto& l : layers_) {
        if (l.dim() != scaling_.dim()) throw DomainError("DirtMap: layer dimension differs from the bounds");
        for (std::size_t k = 0; k < l.dim(); ++k) {
            const Interval b = l.grid().bounds(k);
            if (b.lo != reference_.box().lo || b.hi != reference_.box().hi)
                throw DomainError("DirtMap: layer grid does not span the reference box");
        }
    }
}

DirtMap::PushState DirtMap::begin(std::size_t layers) const {
    PushState s;
    const std::size_t n = std::min(layers, layers_.size());
    s.cursors.reserve(n);
    for (std::size_t l = 0; l < n; ++l) s.cursors.push_back(layers_[l].begin());
    s.z.reserve(dim());
    return s;
}

void DirtMap::advance(PushState& s, double u) const {
    if (s.z.size() >= dim()) throw DomainError("DirtMap: push state already complete");
    double w = u;
    double lp = reference_.log_pdf(w);
    if (lp == kNegInf) throw DomainError(fmt::format("DirtMap: reference coordinate {} outside the box", u));
    s.log_density += lp;
    // Newest layer acts first: T = S_0 o ... o S_{L-1}.
    for (std::size_t l = s.cursors.size(); l-- > 0;) {
        s.log_density -= reference_.log_pdf(w);
        w = layers_[l].invert_step(s.cursors[l], reference_.cdf(w), s.log_density);
    }
    s.z.push_back(w);
}

DirtMap::Sample DirtMap::push(std::span<const double> u) const {
    if (u.size() != dim()) throw DomainError("DirtMap::push: dimension mismatch");
    PushState s = begin();
    for (double v : u) advance(s, v);
    Sample out;
    out.x.resize(dim());
    for (std::size_t k = 0; k < dim(); ++k) out.x[k] = scaling_.to_physical(k, s.z[k]);
    out.log_density = s.log_density - scaling_.log_jacobian();
    return out;
}

DirtMap::Sample DirtMap::pull(std::span<const double> x) const {
    if (x.size() != dim()) throw DomainError("DirtMap::pull: dimension mismatch");
    std::vector<SirtLayer::Cursor> cursors;
    for (const auto& l : layers_) cursors.push_back(l.begin());
    Sample out;
    out.x.resize(dim());
    double ld = 0.0;
    for (std::size_t k = 0; k < dim(); ++k) {
        if (!scaling_.physical()[k].contains(x[k]))
            throw DomainError(fmt::format("DirtMap::pull: x[{}] = {} outside the bounds", k, x[k]));
        double v = std::clamp(scaling_.to_reference(k, x[k]), reference_.box().lo, reference_.box().hi);
        for (std::size_t l = 0; l < layers_.size(); ++l) {
            const double c = layers_[l].forward_step(cursors[l], v, ld);
            v = reference_.quantile(c);
            ld -= reference_.log_pdf(v);
        }
        ld += reference_.log_pdf(v);
        out.x[k] = v;
    }
    out.log_density = ld - scaling_.log_jacobian();
    return out;
}

double DirtMap::log_density(std::span<const double> x) const {
    if (x.size() != dim()) throw DomainError("DirtMap::log_density: dimension mismatch");
    for (std::size_t k = 0; k < dim(); ++k)
        if (!scaling_.physical()[k].contains(x[k])) return kNegInf;
    return pull(x).log_density;
}

DirtMap::Sample DirtMap::sample(Rng& rng) const {
    std::vector<double> u(dim());
    for (double& v : u) v = reference_.sample(rng);
    return push(u);
}

void DirtMap::write_text(std::ostream& os) const {
    fmt::print(os, "dirt-map 1\n");
    fmt::print(os, "reference {:.17g} {:.17g}\n", reference_.sigma(), reference_.half_width());
    fmt::print(os, "schedule {}", schedule_.size());
    for (double b : schedule_.betas()) fmt::print(os, " {:.17g}", b);
    fmt::print(os, "\nbounds {}", dim());
    for (const auto& b : scaling_.physical()) fmt::print(os, " {:.17g} {:.17g}", b.lo, b.hi);
    fmt::print(os, "\nstats {}\n", stats_.target_evaluations);
    fmt::print(os, "layers {}\n", layers_.size());
    for (std::size_t l = 0; l < layers_.size(); ++l) {
        const auto& layer = layers_[l];
        const CrossReport rep = l < stats_.layers.size() ? stats_.layers[l] : CrossReport{};
        fmt::print(os, "layer {} floor {:.17g} cross {} {} {:.17g}\n", l, layer.floor_fraction(), rep.iterations,
                   rep.evaluations, rep.final_change);
        for (std::size_t k = 0; k < layer.dim(); ++k) {
            fmt::print(os, "grid {} {}", k, layer.grid().size(k));
            for (double v : layer.grid().nodes(k)) fmt::print(os, " {:.17g}", v);
            fmt::print(os, "\n");
        }
        dirt::write_text(os, layer.tt());
    }
    fmt::print(os, "end\n");
}

std::string DirtMap::to_text() const {
    std::ostringstream os;
    write_text(os);
    return os.str();
}

DirtMap DirtMap::read_text(std::istream& is) {
    expect(is, "dirt-map");
    if (read_size(is) != 1) throw DomainError("map text: unsupported version");
    expect(is, "reference");
    const double sigma = read_double(is);
    const double half = read_double(is);
    const ReferenceDensity ref(sigma, half);
    expect(is, "schedule");
    std::vector<double> betas(read_size(is));
    for (double& b : betas) b = read_double(is);
    expect(is, "bounds");
    std::vector<Interval> bounds(read_size(is));
    for (auto& b : bounds) {
        b.lo = read_double(is);
        b.hi = read_double(is);
    }
    expect(is, "stats");
    DirtBuildStats stats;
    stats.target_evaluations = read_size(is);
    expect(is, "layers");
    const std::size_t n_layers = read_size(is);
    std::vector<SirtLayer> layers;
    for (std::size_t l = 0; l < n_layers; ++l) {
        expect(is, "layer");
        if (read_size(is) != l) throw DomainError("map text: layers out of order");
        expect(is, "floor");
        const double floor = read_double(is);
        expect(is, "cross");
        CrossReport rep;
        rep.iterations = read_size(is);
        rep.evaluations = read_size(is);
        rep.final_change = read_double(is);
        std::vector<std::vector<double>> nodes(bounds.size());
        for (std::size_t k = 0; k < bounds.size(); ++k) {
            expect(is, "grid");
            if (read_size(is) != k) throw DomainError("map text: grids out of order");
            nodes[k].resize(read_size(is));
            for (double& v : nodes[k]) v = read_double(is);
        }
        TTTensor tt = read_tt_text(is);
        rep.ranks.assign(tt.ranks().begin(), tt.ranks().end());
        stats.layers.push_back(rep);
        layers.emplace_back(std::move(tt), GridSpec(std::move(nodes)), floor);
    }
    expect(is, "end");
    return DirtMap(std::move(layers), TemperingSchedule(std::move(betas)), ref,
                   AffineScaling(ref.box(), std::move(bounds)), std::move(stats));
}

DirtMap DirtMap::from_text(const std::string& text) {
    std::istringstream is(text);
    return read_text(is);
}

// ---------------------------------------------------------------------------
// Construction

namespace {

/// Square root of the layer ratio pi^beta(T(v)) rho(v) / p_prev(T(v)) at reference-grid
/// points, shifted in log space. Block evaluation shares the push of common prefixes.
class LayerRatio final : public GridFunction {
public:
    LayerRatio(const DirtMap& prev, const LogTarget& target, double beta, const GridSpec& grid,
               std::atomic<std::size_t>& calls)
        : prev_(prev), target_(target), beta_(beta), grid_(grid), calls_(calls) {}

    void set_shift(double shift) { shift_ = shift; }

    [[nodiscard]] std::size_t dim() const override { return grid_.dim(); }

    [[nodiscard]] double log_ratio(std::span<const std::size_t> idx) const {
        auto s = prev_.begin();
        double log_ref = 0.0;
        for (std::size_t k = 0; k < idx.size(); ++k) {
            const double v = grid_.node(k, idx[k]);
            log_ref += prev_.reference().log_pdf(v);
            prev_.advance(s, v);
        }
        return finish(s, log_ref);
    }

    [[nodiscard]] double operator()(std::span<const std::size_t> idx) const override {
        return std::exp(0.5 * (log_ratio(idx) - shift_));
    }

    void evaluate_block(const IndexBlock& b, std::span<double> out) const override {
        const std::size_t k = b.core;
        const std::size_t nl = b.core;              // left prefix length
        const std::size_t nr = grid_.dim() - k - 1;  // right suffix length
        for (std::size_t a = 0; a < b.n_left; ++a) {
            auto sl = prev_.begin();
            double ref_l = 0.0;
            for (std::size_t j = 0; j < nl; ++j) {
                const double v = grid_.node(j, b.left[a * nl + j]);
                ref_l += prev_.reference().log_pdf(v);
                prev_.advance(sl, v);
            }
            for (std::size_t i = 0; i < b.n_mid; ++i) {
                auto sm = sl;
                const double v = grid_.node(k, i);
                const double ref_m = ref_l + prev_.reference().log_pdf(v);
                prev_.advance(sm, v);
                for (std::size_t c = 0; c < b.n_right; ++c) {
                    auto sr = sm;
                    double ref_r = ref_m;
                    for (std::size_t j = 0; j < nr; ++j) {
                        const double w = grid_.node(k + 1 + j, b.right[c * nr + j]);
                        ref_r += prev_.reference().log_pdf(w);
                        prev_.advance(sr, w);
                    }
                    out[(a * b.n_mid + i) * b.n_right + c] = std::exp(0.5 * (finish(sr, ref_r) - shift_));
                }
            }
        }
    }

private:
    double finish(const DirtMap::PushState& s, double log_ref) const {
        std::vector<double> x(s.z.size());
        for (std::size_t k = 0; k < x.size(); ++k) x[k] = prev_.scaling().to_physical(k, s.z[k]);
        calls_.fetch_add(1, std::memory_order_relaxed);
        const double lt = target_(x);
        if (std::isnan(lt)) return lt;
        if (lt == kNegInf) return kNegInf;
        return beta_ * lt + log_ref - s.log_density;
    }

    const DirtMap& prev_;
    const LogTarget& target_;
    double beta_;
    const GridSpec& grid_;
    std::atomic<std::size_t>& calls_;
    double shift_ = 0.0;
};

}  // namespace

DirtMap dirt_build(const LogTarget& log_target, std::span<const Interval> bounds,
                   const TemperingSchedule& schedule, const ReferenceDensity& reference,
                   const DirtConfig& cfg) {
    const std::size_t d = bounds.size();
    if (d == 0) throw ConfigError("dirt_build: empty bounds");
    cfg.validate(d);
    const AffineScaling scaling(reference.box(), std::vector<Interval>(bounds.begin(), bounds.end()));
    const GridSpec grid = GridSpec::uniform(std::vector<Interval>(d, reference.box()), cfg.grid_nodes);

    std::atomic<std::size_t> calls{0};
    DirtBuildStats stats;
    std::vector<SirtLayer> layers;
    for (std::size_t l = 0; l < schedule.size(); ++l) {
        try {
            const DirtMap prev(layers, schedule, reference, scaling);
            LayerRatio ratio(prev, log_target, schedule[l], grid, calls);

            CrossConfig cc = cfg.cross;
            cc.seed = derive_seed(cfg.cross.seed, l);
            if (!cc.index_sampler)
                cc.index_sampler = [&](Rng& rng, std::span<std::size_t> idx) {
                    for (std::size_t k = 0; k < idx.size(); ++k) idx[k] = grid.nearest(k, reference.sample(rng));
                };

            // Pilot: the largest log ratio over reference draws sets the exponent shift.
            Rng pilot_rng = make_rng(cc.seed, 7);
            double shift = kNegInf;
            std::vector<std::size_t> idx(d);
            for (std::size_t p = 0; p < cfg.pilot_samples; ++p) {
                cc.index_sampler(pilot_rng, idx);
                const double lr = ratio.log_ratio(idx);
                if (std::isnan(lr) || lr == std::numeric_limits<double>::infinity())
                    throw EvaluationError("dirt_build: target is not a number at a pilot point");
                shift = std::max(shift, lr);
            }
            if (shift == kNegInf) throw DomainError("dirt_build: target vanishes at every pilot point");
            ratio.set_shift(shift);

            auto res = tt_cross(ratio, grid, cc);
            stats.layers.push_back(res.report);
            layers.emplace_back(std::move(res.tt), grid, cfg.floor_fraction);
        } catch (const Error& e) {
            throw DirtBuildError(e.kind(),
                                 fmt::format("layer {} of {} failed ({} completed): {}", l + 1, schedule.size(), l,
                                             e.what()),
                                 l);
        }
    }
    stats.target_evaluations = calls.load();
    return DirtMap(std::move(layers), schedule, reference, scaling, std::move(stats));
}

DirtMap::Sample dirt_sample(const DirtMap& map, std::span<const double> u) { return map.push(u); }

}  // namespace dirt
