#include "dirt/tt/cross.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include <Eigen/Dense>
#include <fmt/core.h>
#include <fmt/ranges.h>

#include "dirt/common/parallel.hpp"
#include "dirt/tt/maxvol.hpp"

namespace dirt {

void IndexBlock::multi_index(std::size_t a, std::size_t i, std::size_t b,
                             std::span<std::size_t> idx) const {
    const std::size_t k = core;
    for (std::size_t j = 0; j < k; ++j) idx[j] = left[a * k + j];
    idx[k] = i;
    const std::size_t tail = idx.size() - k - 1;
    for (std::size_t j = 0; j < tail; ++j) idx[k + 1 + j] = right[b * tail + j];
}

void GridFunction::evaluate_block(const IndexBlock& block, std::span<double> out) const {
    std::vector<std::size_t> idx(dim());
    std::size_t pos = 0;
    for (std::size_t a = 0; a < block.n_left; ++a)
        for (std::size_t i = 0; i < block.n_mid; ++i)
            for (std::size_t b = 0; b < block.n_right; ++b) {
                block.multi_index(a, i, b, idx);
                out[pos++] = (*this)(idx);
            }
}

void CrossConfig::validate(std::span<const std::size_t> dims) const {
    if (max_rank < 1) throw ConfigError("cross: max_rank must be at least 1");
    if (!(tolerance > 0.0)) throw ConfigError("cross: tolerance must be positive");
    if (max_iterations < 1) throw ConfigError("cross: max_iterations must be at least 1");
    if (probe_count < 1) throw ConfigError("cross: probe_count must be at least 1");
    const std::size_t d = dims.size();
    if (!initial_right.empty()) {
        if (initial_right.size() != d - 1)
            throw ConfigError(fmt::format("cross: expected {} initial right index sets", d - 1));
        for (std::size_t k = 1; k < d; ++k) {
            const auto& set = initial_right[k - 1];
            const std::size_t len = d - k;
            if (set.empty() || set.size() % len != 0)
                throw ConfigError(fmt::format("cross: initial right set {} has malformed length", k));
            if (set.size() / len > max_rank)
                throw ConfigError(fmt::format("cross: initial right set {} has more than max_rank entries", k));
            for (std::size_t p = 0; p < set.size(); ++p)
                if (set[p] >= dims[k + p % len])
                    throw ConfigError(fmt::format("cross: initial right set {} has an out-of-range index", k));
        }
    }
}

namespace {

using RowMajor = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

std::size_t saturating_product(std::span<const std::size_t> v, std::size_t cap) {
    std::size_t p = 1;
    for (std::size_t x : v) {
        if (p >= cap) return cap;
        p *= x;
    }
    return std::min(p, cap);
}

/// Q from a thin QR of m, and the interpolation matrix Q Q[sel]^{-1} with maxvol rows sel.
struct Interpolant {
    Eigen::MatrixXd matrix;
    std::vector<Eigen::Index> rows;
};

Interpolant interpolate(const Eigen::MatrixXd& m) {
    Eigen::HouseholderQR<Eigen::MatrixXd> qr(m);
    const Eigen::MatrixXd q = qr.householderQ() * Eigen::MatrixXd::Identity(m.rows(), m.cols());
    Interpolant out;
    out.rows = maxvol(q).rows;
    Eigen::MatrixXd qs(m.cols(), m.cols());
    for (Eigen::Index j = 0; j < m.cols(); ++j) qs.row(j) = q.row(out.rows[static_cast<std::size_t>(j)]);
    out.matrix = qs.transpose().partialPivLu().solve(q.transpose()).transpose();
    // Selected rows hold the identity exactly.
    for (Eigen::Index j = 0; j < m.cols(); ++j) {
        out.matrix.row(out.rows[static_cast<std::size_t>(j)]).setZero();
        out.matrix(out.rows[static_cast<std::size_t>(j)], j) = 1.0;
    }
    return out;
}

class CrossEngine {
public:
    CrossEngine(const GridFunction& f, const GridSpec& grid, const CrossConfig& cfg)
        : f_(f), cfg_(cfg), dims_(grid.sizes()), d_(dims_.size()), rng_(make_rng(cfg.seed, 0)) {}

    CrossResult run();

private:
    void init_right_sets();
    std::vector<double> evaluate(std::size_t k);
    TTTensor assemble() const;

    const GridFunction& f_;
    const CrossConfig& cfg_;
    std::vector<std::size_t> dims_;
    std::size_t d_;
    Rng rng_;
    std::vector<std::size_t> ranks_;
    std::vector<std::vector<std::size_t>> left_;   // left_[k]: ranks_[k] prefixes of length k
    std::vector<std::vector<std::size_t>> right_;  // right_[k]: ranks_[k] suffixes of length d-k
    std::vector<std::vector<double>> cores_;
    CrossReport report_;
};

void CrossEngine::init_right_sets() {
    right_.assign(d_ + 1, {});
    left_.assign(d_, {});
    ranks_.assign(d_ + 1, 1);
    right_[d_] = {};
    std::vector<std::vector<std::size_t>> draws;
    auto draw = [&] {
        std::vector<std::size_t> idx(d_);
        if (cfg_.index_sampler) {
            cfg_.index_sampler(rng_, idx);
            for (std::size_t k = 0; k < d_; ++k) idx[k] = std::min(idx[k], dims_[k] - 1);
        } else {
            for (std::size_t k = 0; k < d_; ++k)
                idx[k] = std::uniform_int_distribution<std::size_t>(0, dims_[k] - 1)(rng_);
        }
        draws.push_back(std::move(idx));
    };
    for (std::size_t j = 0; j < cfg_.max_rank; ++j) draw();

    for (std::size_t k = d_ - 1; k >= 1; --k) {
        const std::size_t len = d_ - k;
        const std::size_t cap = std::min({cfg_.max_rank,
                                          saturating_product(std::span(dims_).first(k), cfg_.max_rank),
                                          saturating_product(std::span(dims_).subspan(k), cfg_.max_rank),
                                          ranks_[k + 1] * dims_[k]});
        std::vector<std::size_t> set;
        std::set<std::vector<std::size_t>> seen;
        auto offer = [&](std::span<const std::size_t> suffix) {
            if (set.size() / len >= cap) return;
            std::vector<std::size_t> s(suffix.begin(), suffix.end());
            if (seen.insert(s).second) set.insert(set.end(), s.begin(), s.end());
        };
        if (!cfg_.initial_right.empty()) {
            const auto& given = cfg_.initial_right[k - 1];
            for (std::size_t p = 0; p < given.size() / len; ++p)
                offer(std::span(given).subspan(p * len, len));
        } else {
            for (std::size_t j = 0; set.size() / len < cap && j < 64 * cfg_.max_rank; ++j) {
                if (j >= draws.size()) draw();
                offer(std::span(draws[j]).subspan(k));
            }
        }
        if (set.empty()) throw ConfigError(fmt::format("cross: empty right index set at interface {}", k));
        ranks_[k] = set.size() / len;
        right_[k] = std::move(set);
    }
    // Left capacity may be smaller than a right set; trim from the front interface on.
    for (std::size_t k = 1; k < d_; ++k) {
        const std::size_t cap = ranks_[k - 1] * dims_[k - 1];
        if (ranks_[k] > cap) {
            ranks_[k] = cap;
            right_[k].resize(cap * (d_ - k));
        }
    }
    left_[0] = {};
}

std::vector<double> CrossEngine::evaluate(std::size_t k) {
    IndexBlock block;
    block.core = k;
    block.left = left_[k];
    block.n_left = ranks_[k];
    block.n_mid = dims_[k];
    block.right = k + 1 < d_ ? std::span<const std::size_t>(right_[k + 1]) : std::span<const std::size_t>();
    block.n_right = ranks_[k + 1];
    const std::size_t count = block.count();
    if (cfg_.eval_budget > 0 && report_.evaluations + count > cfg_.eval_budget) {
        report_.ranks = ranks_;
        throw CrossBudgetError(fmt::format("cross: evaluation budget {} exhausted after {} evaluations",
                                           cfg_.eval_budget, report_.evaluations),
                               report_);
    }
    std::vector<double> values(count);
    const std::size_t stride = block.n_mid * block.n_right;
    if (cfg_.workers > 1 && block.n_left > 1) {
        parallel_for(block.n_left, cfg_.workers, [&](std::size_t begin, std::size_t end) {
            IndexBlock sub = block;
            sub.left = block.left.subspan(begin * k, (end - begin) * k);
            sub.n_left = end - begin;
            f_.evaluate_block(sub, std::span(values).subspan(begin * stride, (end - begin) * stride));
        });
    } else {
        f_.evaluate_block(block, values);
    }
    report_.evaluations += count;
    for (std::size_t p = 0; p < count; ++p) {
        if (std::isfinite(values[p])) continue;
        std::vector<std::size_t> idx(d_);
        block.multi_index(p / stride, (p / block.n_right) % block.n_mid, p % block.n_right, idx);
        throw EvaluationError(fmt::format("cross: function returned {} at index ({})", values[p],
                                          fmt::join(idx, ", ")));
    }
    return values;
}

TTTensor CrossEngine::assemble() const {
    return TTTensor(dims_, ranks_, cores_);
}

CrossResult CrossEngine::run() {
    cfg_.validate(dims_);
    if (f_.dim() != d_) throw DomainError("cross: function and grid dimensions differ");
    cores_.assign(d_, {});

    if (d_ == 1) {
        ranks_ = {1, 1};
        left_ = {{}};
        right_ = {{}, {}};
        cores_[0] = evaluate(0);
        report_.iterations = 1;
        report_.ranks = ranks_;
        return {assemble(), report_};
    }

    init_right_sets();

    Rng probe_rng = make_rng(cfg_.seed, 1);
    std::vector<std::size_t> probes(cfg_.probe_count * d_);
    for (std::size_t p = 0; p < cfg_.probe_count; ++p)
        for (std::size_t k = 0; k < d_; ++k)
            probes[p * d_ + k] = std::uniform_int_distribution<std::size_t>(0, dims_[k] - 1)(probe_rng);
    std::vector<double> previous(cfg_.probe_count, 0.0), current(cfg_.probe_count);

    std::vector<double> first_core_values;  // f(i_0, J_1) from the last backward sweep
    TTTensor tt;
    for (std::size_t iter = 0; iter < cfg_.max_iterations; ++iter) {
        // Forward sweep: choose prefixes I_{k+1} from the fibers f(I_k, i_k, J_{k+1}).
        std::vector<double> last_values;
        for (std::size_t k = 0; k < d_; ++k) {
            std::vector<double> values =
                (k == 0 && !first_core_values.empty()) ? first_core_values : evaluate(k);
            if (k + 1 == d_) {
                last_values = std::move(values);
                break;
            }
            const Eigen::Index rows = static_cast<Eigen::Index>(ranks_[k] * dims_[k]);
            const Eigen::Index cols = static_cast<Eigen::Index>(ranks_[k + 1]);
            const Eigen::MatrixXd v = Eigen::Map<const RowMajor>(values.data(), rows, cols);
            const Interpolant ip = interpolate(v);
            std::vector<std::size_t> next;
            next.reserve(static_cast<std::size_t>(cols) * (k + 1));
            for (Eigen::Index sel : ip.rows) {
                const std::size_t a = static_cast<std::size_t>(sel) / dims_[k];
                const std::size_t i = static_cast<std::size_t>(sel) % dims_[k];
                next.insert(next.end(), left_[k].begin() + static_cast<std::ptrdiff_t>(a * k),
                            left_[k].begin() + static_cast<std::ptrdiff_t>((a + 1) * k));
                next.push_back(i);
            }
            left_[k + 1] = std::move(next);
        }

        // Backward sweep: choose suffixes J_k from the fibers f(I_k, i_k, J_{k+1}).
        for (std::size_t k = d_ - 1; k >= 1; --k) {
            std::vector<double> values = (k + 1 == d_) ? std::move(last_values) : evaluate(k);
            const Eigen::Index rows = static_cast<Eigen::Index>(ranks_[k]);
            const Eigen::Index cols = static_cast<Eigen::Index>(dims_[k] * ranks_[k + 1]);
            const Eigen::MatrixXd vt = Eigen::Map<const RowMajor>(values.data(), rows, cols).transpose();
            const Interpolant ip = interpolate(vt);
            RowMajor core = ip.matrix.transpose();
            cores_[k].assign(core.data(), core.data() + core.size());

            const std::size_t tail = d_ - k - 1;
            std::vector<std::size_t> next;
            next.reserve(static_cast<std::size_t>(rows) * (tail + 1));
            for (Eigen::Index sel : ip.rows) {
                const std::size_t i = static_cast<std::size_t>(sel) / ranks_[k + 1];
                const std::size_t b = static_cast<std::size_t>(sel) % ranks_[k + 1];
                next.push_back(i);
                next.insert(next.end(), right_[k + 1].begin() + static_cast<std::ptrdiff_t>(b * tail),
                            right_[k + 1].begin() + static_cast<std::ptrdiff_t>((b + 1) * tail));
            }
            right_[k] = std::move(next);
        }
        first_core_values = evaluate(0);
        cores_[0] = first_core_values;

        tt = assemble();
        double diff = 0.0, norm = 0.0;
        for (std::size_t p = 0; p < cfg_.probe_count; ++p) {
            current[p] = eval_discrete(tt, std::span(probes).subspan(p * d_, d_));
            diff += (current[p] - previous[p]) * (current[p] - previous[p]);
            norm += current[p] * current[p];
        }
        report_.final_change = norm > 0.0 ? std::sqrt(diff / norm) : std::sqrt(diff);
        report_.iterations = iter + 1;
        previous.swap(current);
        if (report_.final_change <= cfg_.tolerance) break;
    }
    report_.ranks = ranks_;
    return {std::move(tt), report_};
}

}  // namespace

CrossResult tt_cross(const GridFunction& f, const GridSpec& grid, const CrossConfig& cfg) {
    CrossEngine engine(f, grid, cfg);
    return engine.run();
}

}  // namespace dirt
