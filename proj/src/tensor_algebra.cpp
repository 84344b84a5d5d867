#include "seqkern/tensor_algebra.hpp"

#include <array>
#include <cmath>
#include <sstream>

#include <json.hpp>

namespace seqkern {

namespace {

constexpr std::array<double, kMaxLevel + 1> make_inverse_factorials() {
    std::array<double, kMaxLevel + 1> out{};
    double f = 1.0;
    for (std::size_t m = 0; m <= kMaxLevel; ++m) {
        if (m > 0) f *= static_cast<double>(m);
        out[m] = 1.0 / f;
    }
    return out;
}

constexpr auto kInverseFactorials = make_inverse_factorials();

std::size_t ipow(std::size_t base, std::size_t exp) {
    std::size_t r = 1;
    for (std::size_t k = 0; k < exp; ++k) r *= base;
    return r;
}

void require_same_dim(const TruncatedTensor& a, const TruncatedTensor& b) {
    if (a.dim() != b.dim()) throw Error("tensor dimension mismatch");
}

}  // namespace

double inverse_factorial(std::size_t m) {
    if (m > kMaxLevel) throw Error("level too large");
    return kInverseFactorials[m];
}

TruncatedTensor::TruncatedTensor(std::size_t dim, std::size_t level) : dim_(dim) {
    if (dim < 1) throw Error("tensor dimension must be >= 1");
    if (level > kMaxLevel) throw Error("level too large");
    levels_.reserve(level + 1);
    for (std::size_t m = 0; m <= level; ++m) levels_.emplace_back(ipow(dim, m), 0.0);
}

TruncatedTensor TruncatedTensor::unit(std::size_t dim, std::size_t level) {
    TruncatedTensor t(dim, level);
    t.levels_[0][0] = 1.0;
    return t;
}

TruncatedTensor TruncatedTensor::degree_one(std::span<const double> v, std::size_t level) {
    TruncatedTensor t(v.size(), level);
    if (level >= 1) std::copy(v.begin(), v.end(), t.levels_[1].begin());
    return t;
}

TruncatedTensor TruncatedTensor::exp_truncated(std::span<const double> v, std::size_t level, std::size_t order) {
    TruncatedTensor t = unit(v.size(), level);
    const std::size_t d = v.size();
    const std::size_t top = std::min(level, order);
    // v^{(x)m}/m! = (v^{(x)(m-1)}/(m-1)!) (x) v / m
    for (std::size_t m = 1; m <= top; ++m) {
        const auto& prev = t.levels_[m - 1];
        auto& cur = t.levels_[m];
        const double scale = 1.0 / static_cast<double>(m);
        for (std::size_t p = 0; p < prev.size(); ++p)
            for (std::size_t k = 0; k < d; ++k) cur[p * d + k] = prev[p] * v[k] * scale;
    }
    return t;
}

double TruncatedTensor::norm() const {
    double s = 0.0;
    for (const auto& lvl : levels_)
        for (double x : lvl) s += x * x;
    return std::sqrt(s);
}

TruncatedTensor TruncatedTensor::operator+(const TruncatedTensor& other) const {
    require_same_dim(*this, other);
    TruncatedTensor out = truncated(std::min(level(), other.level()));
    for (std::size_t m = 0; m <= out.level(); ++m)
        for (std::size_t k = 0; k < out.levels_[m].size(); ++k) out.levels_[m][k] += other.levels_[m][k];
    return out;
}

TruncatedTensor TruncatedTensor::operator-(const TruncatedTensor& other) const {
    require_same_dim(*this, other);
    TruncatedTensor out = truncated(std::min(level(), other.level()));
    for (std::size_t m = 0; m <= out.level(); ++m)
        for (std::size_t k = 0; k < out.levels_[m].size(); ++k) out.levels_[m][k] -= other.levels_[m][k];
    return out;
}

TruncatedTensor TruncatedTensor::truncated(std::size_t lvl) const {
    if (lvl > level()) throw Error("cannot truncate above current level");
    TruncatedTensor out(dim_, lvl);
    for (std::size_t m = 0; m <= lvl; ++m) out.levels_[m] = levels_[m];
    return out;
}

std::string TruncatedTensor::to_json() const {
    nlohmann::json j;
    j["dim"] = dim_;
    j["level"] = level();
    std::vector<double> flat;
    for (const auto& lvl : levels_) flat.insert(flat.end(), lvl.begin(), lvl.end());
    j["data"] = flat;
    return j.dump();
}

TruncatedTensor tensor_mul(const TruncatedTensor& a, const TruncatedTensor& b) {
    require_same_dim(a, b);
    const std::size_t M = std::min(a.level(), b.level());
    TruncatedTensor out(a.dim(), M);
    for (std::size_t m = 0; m <= M; ++m) {
        auto dst = out[m];
        for (std::size_t i = 0; i <= m; ++i) {
            const auto lhs = a[i];
            const auto rhs = b[m - i];
            const std::size_t stride = rhs.size();
            for (std::size_t p = 0; p < lhs.size(); ++p) {
                const double x = lhs[p];
                if (x == 0.0) continue;
                double* row = dst.data() + p * stride;
                for (std::size_t q = 0; q < stride; ++q) row[q] += x * rhs[q];
            }
        }
    }
    return out;
}

double tensor_inner(const TruncatedTensor& a, const TruncatedTensor& b) {
    require_same_dim(a, b);
    const std::size_t M = std::min(a.level(), b.level());
    double s = 0.0;
    for (std::size_t m = 0; m <= M; ++m) {
        const auto x = a[m];
        const auto y = b[m];
        for (std::size_t k = 0; k < x.size(); ++k) s += x[k] * y[k];
    }
    return s;
}

TruncatedTensor discrete_signature(const Sequence& s, std::size_t level, std::size_t order) {
    if (order < 1) throw Error("order must be >= 1");
    if (level > kMaxLevel) throw Error("level too large");
    const RowMatrix inc = increments(s);
    TruncatedTensor sig = TruncatedTensor::unit(s.dim(), level);
    std::vector<double> v(s.dim());
    for (Eigen::Index i = 0; i < inc.rows(); ++i) {
        for (std::size_t k = 0; k < v.size(); ++k) v[k] = inc(i, static_cast<Eigen::Index>(k));
        sig = tensor_mul(sig, TruncatedTensor::exp_truncated(v, level, order));
    }
    return sig;
}

TruncatedTensor exact_pcwlinear_signature(const Sequence& s, std::size_t level) {
    // A linear segment's signature is the full tensor exponential of its
    // increment; Chen's identity glues the segments.
    return discrete_signature(s, level, std::max<std::size_t>(level, 1));
}

double shuffle_defect_level2(const TruncatedTensor& t) {
    if (t.level() < 2) throw Error("shuffle defect requires level >= 2");
    const std::size_t d = t.dim();
    const auto x1 = t[1];
    const auto x2 = t[2];
    double s = 0.0;
    for (std::size_t i = 0; i < d; ++i)
        for (std::size_t j = 0; j < d; ++j) {
            const double r = x1[i] * x1[j] - x2[i * d + j] - x2[j * d + i];
            s += r * r;
        }
    return std::sqrt(s);
}

double discretization_error_bound(std::span<const double> segment_variations) {
    if (segment_variations.empty()) throw Error("at least one segment variation required");
    double total = 0.0;
    double prod = 1.0;
    for (double v : segment_variations) {
        if (!(v >= 0.0)) throw Error("segment variations must be nonnegative");
        total += v;
        prod *= 1.0 + v;
    }
    return std::exp(total) - prod;
}

}  // namespace seqkern
