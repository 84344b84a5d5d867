#ifndef SEQKERN_TENSOR_ALGEBRA_HPP
#define SEQKERN_TENSOR_ALGEBRA_HPP

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "seqkern/seq_core.hpp"

namespace seqkern {

/// Largest truncation level for which factorial weights are tabulated.
inline constexpr std::size_t kMaxLevel = 20;

/// 1/m! for m <= kMaxLevel; throws "level too large" beyond.
double inverse_factorial(std::size_t m);

/// Element of the tensor algebra over R^d truncated at level M.
///
/// Level m is a dense row-major array of d^m entries; the multi-index
/// (i1, ..., im) maps to sum_k i_k * d^(m-k) (0-based). Level 0 is a scalar.
class TruncatedTensor {
public:
    TruncatedTensor(std::size_t dim, std::size_t level);

    /// The multiplicative unit (1, 0, ..., 0).
    static TruncatedTensor unit(std::size_t dim, std::size_t level);
    /// Element concentrated in degree 1.
    static TruncatedTensor degree_one(std::span<const double> v, std::size_t level);
    /// Truncated exponential sum_{m<=order} v^{(x)m} / m!, levels above `order` zero.
    static TruncatedTensor exp_truncated(std::span<const double> v, std::size_t level, std::size_t order);

    std::size_t dim() const { return dim_; }
    std::size_t level() const { return levels_.size() - 1; }

    std::span<double> operator[](std::size_t m) { return levels_.at(m); }
    std::span<const double> operator[](std::size_t m) const { return levels_.at(m); }

    /// Level-wise inner product summed over all levels (Hilbert-Schmidt norm).
    double norm() const;

    TruncatedTensor operator+(const TruncatedTensor& other) const;
    TruncatedTensor operator-(const TruncatedTensor& other) const;

    /// Drops all levels above `level`.
    TruncatedTensor truncated(std::size_t level) const;

    /// Flat JSON: {"dim": d, "level": M, "data": [level 0, level 1, ...]}.
    /// Debug output only; the layout is not a stability promise.
    std::string to_json() const;

private:
    std::size_t dim_;
    std::vector<std::vector<double>> levels_;
};

/// Truncated product: level m of the result is sum_i a_i (x) b_{m-i}, at
/// level min(a.level, b.level).
TruncatedTensor tensor_mul(const TruncatedTensor& a, const TruncatedTensor& b);

/// Sum over shared levels of the flat dot products.
double tensor_inner(const TruncatedTensor& a, const TruncatedTensor& b);

/// prod_i sum_{m=0}^{order} (dx_i)^{(x)m} / m!, truncated at `level` inside
/// every multiplication. order = 1 gives the plain discrete signature.
TruncatedTensor discrete_signature(const Sequence& s, std::size_t level, std::size_t order = 1);

/// Truncated signature of the piecewise-linear path through the points of `s`.
TruncatedTensor exact_pcwlinear_signature(const Sequence& s, std::size_t level);

/// Frobenius norm of x1 (x) x1 - x2 - x2^T; zero for group-like elements.
double shuffle_defect_level2(const TruncatedTensor& t);

/// exp(sum v_i) - prod (1 + v_i): bound on the distance between the
/// discrete and the continuous signature given per-segment variations.
double discretization_error_bound(std::span<const double> segment_variations);

}  // namespace seqkern

#endif  // SEQKERN_TENSOR_ALGEBRA_HPP
