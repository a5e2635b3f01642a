#include "dirt/tt/tensor_train.hpp"

#include <cstdlib>
#include <istream>
#include <limits>
#include <ostream>
#include <sstream>

#include <fmt/core.h>

#include "dirt/common/errors.hpp"

namespace dirt {
namespace {

// out[b] = sum_a row[a] * core(a, i, b), accumulated in increasing a from zero.
// Shared by eval_discrete, eval_continuous and full_tensor so they agree bit for bit.
void slice_product(const double* row, const double* core, std::size_t i, std::size_t r0,
                   std::size_t n, std::size_t r1, double* out) {
    for (std::size_t b = 0; b < r1; ++b) out[b] = 0.0;
    for (std::size_t a = 0; a < r0; ++a) {
        const double w = row[a];
        const double* src = core + (a * n + i) * r1;
        for (std::size_t b = 0; b < r1; ++b) out[b] += w * src[b];
    }
}

}  // namespace

TTTensor::TTTensor(std::vector<std::size_t> dims, std::vector<std::size_t> ranks,
                   std::vector<std::vector<double>> cores)
    : dims_(std::move(dims)), ranks_(std::move(ranks)), cores_(std::move(cores)) {
    const std::size_t d = dims_.size();
    if (d == 0) throw DomainError("TTTensor: d must be at least 1");
    if (ranks_.size() != d + 1) throw DomainError("TTTensor: expected d + 1 ranks");
    if (cores_.size() != d) throw DomainError("TTTensor: expected d cores");
    if (ranks_.front() != 1 || ranks_.back() != 1) throw DomainError("TTTensor: boundary ranks must be 1");
    for (std::size_t k = 0; k < d; ++k) {
        if (dims_[k] < 2) throw DomainError(fmt::format("TTTensor: dimension {} has size {} < 2", k, dims_[k]));
        if (ranks_[k + 1] == 0) throw DomainError("TTTensor: ranks must be positive");
        const std::size_t expected = ranks_[k] * dims_[k] * ranks_[k + 1];
        if (cores_[k].size() != expected)
            throw DomainError(fmt::format("TTTensor: core {} has {} entries, shape requires {}", k,
                                          cores_[k].size(), expected));
    }
}

TTTensor TTTensor::rank_one(const std::vector<std::vector<double>>& fibers) {
    std::vector<std::size_t> dims;
    for (const auto& f : fibers) dims.push_back(f.size());
    return TTTensor(dims, std::vector<std::size_t>(fibers.size() + 1, 1), fibers);
}

double eval_discrete(const TTTensor& tt, std::span<const std::size_t> idx) {
    const std::size_t d = tt.dim();
    if (idx.size() != d) throw BoundsError(fmt::format("eval_discrete: index has {} entries, tensor has {} dims", idx.size(), d));
    for (std::size_t k = 0; k < d; ++k)
        if (idx[k] >= tt.size(k))
            throw BoundsError(fmt::format("eval_discrete: index {} = {} out of range [0, {})", k, idx[k], tt.size(k)));

    std::vector<double> row{1.0}, next;
    for (std::size_t k = 0; k < d; ++k) {
        const std::size_t r0 = tt.rank(k), n = tt.size(k), r1 = tt.rank(k + 1);
        next.resize(r1);
        slice_product(row.data(), tt.core(k).data(), idx[k], r0, n, r1, next.data());
        row.swap(next);
    }
    return row[0];
}

double eval_continuous(const TTTensor& tt, const GridSpec& grid, std::span<const double> x) {
    const std::size_t d = tt.dim();
    if (x.size() != d || grid.dim() != d)
        throw DomainError("eval_continuous: point, grid and tensor dimensions differ");
    std::vector<double> row{1.0}, lo, hi;
    for (std::size_t k = 0; k < d; ++k) {
        if (grid.size(k) != tt.size(k)) throw DomainError("eval_continuous: grid does not match tensor dims");
        const auto [i, t] = grid.locate(k, x[k]);
        const std::size_t r0 = tt.rank(k), n = tt.size(k), r1 = tt.rank(k + 1);
        const double* c = tt.core(k).data();
        lo.resize(r1);
        hi.resize(r1);
        slice_product(row.data(), c, i, r0, n, r1, lo.data());
        slice_product(row.data(), c, i + 1, r0, n, r1, hi.data());
        row.resize(r1);
        for (std::size_t b = 0; b < r1; ++b) row[b] = (1.0 - t) * lo[b] + t * hi[b];
    }
    return row[0];
}

std::vector<double> full_tensor(const TTTensor& tt, std::size_t cap) {
    std::size_t total = 1;
    for (std::size_t n : tt.dims()) {
        if (total > cap / n) throw ResourceError(fmt::format("full_tensor: size exceeds cap {}", cap));
        total *= n;
    }
    // left holds (prefix multi-index, rank) pairs row-major.
    std::vector<double> left{1.0}, next;
    std::size_t prefixes = 1;
    for (std::size_t k = 0; k < tt.dim(); ++k) {
        const std::size_t r0 = tt.rank(k), n = tt.size(k), r1 = tt.rank(k + 1);
        next.resize(prefixes * n * r1);
        const double* c = tt.core(k).data();
        for (std::size_t p = 0; p < prefixes; ++p)
            for (std::size_t i = 0; i < n; ++i)
                slice_product(left.data() + p * r0, c, i, r0, n, r1, next.data() + (p * n + i) * r1);
        left.swap(next);
        prefixes *= n;
    }
    return left;
}

std::size_t storage_size(const TTTensor& tt) noexcept {
    std::size_t s = 0;
    for (std::size_t k = 0; k < tt.dim(); ++k) s += tt.rank(k) * tt.size(k) * tt.rank(k + 1);
    return s;
}

namespace {

void expect_token(std::istream& is, const char* token) {
    std::string word;
    if (!(is >> word) || word != token)
        throw DomainError(fmt::format("tensor text: expected '{}', found '{}'", token, word));
}

}  // namespace

void write_text(std::ostream& os, const TTTensor& tt) {
    os << "tt-tensor 1\n";
    os << "dims";
    for (std::size_t n : tt.dims()) os << ' ' << n;
    os << "\nranks";
    for (std::size_t r : tt.ranks()) os << ' ' << r;
    os << '\n';
    for (std::size_t k = 0; k < tt.dim(); ++k) {
        os << "core " << k;
        for (double v : tt.core(k)) os << ' ' << fmt::format("{:.17g}", v);
        os << '\n';
    }
}

TTTensor read_tt_text(std::istream& is) {
    expect_token(is, "tt-tensor");
    int version = 0;
    if (!(is >> version) || version != 1) throw DomainError("tensor text: unsupported version");
    std::string line;
    std::getline(is, line);

    auto read_list = [&](const char* key) {
        std::getline(is, line);
        std::istringstream ls(line);
        expect_token(ls, key);
        std::vector<std::size_t> out;
        std::size_t v;
        while (ls >> v) out.push_back(v);
        return out;
    };
    auto dims = read_list("dims");
    auto ranks = read_list("ranks");
    if (ranks.size() != dims.size() + 1) throw DomainError("tensor text: ranks/dims length mismatch");

    std::vector<std::vector<double>> cores(dims.size());
    for (std::size_t k = 0; k < dims.size(); ++k) {
        expect_token(is, "core");
        std::size_t kk = 0;
        if (!(is >> kk) || kk != k) throw DomainError("tensor text: cores out of order");
        cores[k].resize(ranks[k] * dims[k] * ranks[k + 1]);
        for (double& v : cores[k]) {
            std::string tok;
            if (!(is >> tok)) throw DomainError(fmt::format("tensor text: core {} truncated", k));
            // strtod keeps subnormals, which std::stod rejects as out of range.
            char* end = nullptr;
            v = std::strtod(tok.c_str(), &end);
            if (end != tok.c_str() + tok.size()) throw DomainError(fmt::format("tensor text: bad value '{}'", tok));
        }
    }
    std::getline(is, line);
    return TTTensor(std::move(dims), std::move(ranks), std::move(cores));
}

std::string to_text(const TTTensor& tt) {
    std::ostringstream os;
    write_text(os, tt);
    return os.str();
}

TTTensor tt_from_text(const std::string& text) {
    std::istringstream is(text);
    return read_tt_text(is);
}

}  // namespace dirt
