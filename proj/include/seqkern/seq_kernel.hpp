#ifndef SEQKERN_SEQ_KERNEL_HPP
#define SEQKERN_SEQ_KERNEL_HPP

#include <cstddef>
#include <cstdint>
#include <span>
#include <string_view>
#include <vector>

#include "seqkern/base_kernels.hpp"
#include "seqkern/seq_core.hpp"

namespace seqkern {

enum class Algorithm { naive, dp, dp_high, lowrank, lowrank_joint };

std::string_view to_string(Algorithm algo);
Algorithm parse_algorithm(std::string_view name);

/// Options for the factorized algorithms.
struct LowRankOptions {
    /// Nystrom landmark count for non-linear base kernels; 0 uses every pooled point.
    std::size_t landmarks = 0;
    /// Rank compression after every level; 0 disables the cap.
    std::size_t rank_cap = 0;
    /// Relative Frobenius tolerance for rank compression; negative disables it.
    double rank_tol = -1.0;
    std::uint64_t seed = 0;

    bool reduces() const { return rank_cap > 0 || rank_tol >= 0.0; }
};

/// Sequential kernel configuration: truncation level M, approximation order D
/// (1 <= D <= M <= 20) and the static kernel being sequentialized.
struct SeqKernelConfig {
    std::size_t level = 2;
    std::size_t order = 1;
    KernelSpec base = KernelSpec::linear();
    /// false feeds the raw kernel matrix k(s[i], t[j]) to the recursion
    /// instead of the increment matrix. Numerically fragile: the sums grow
    /// quickly with sequence length.
    bool use_increments = true;
    Algorithm algorithm = Algorithm::dp;
    LowRankOptions lowrank;

    void validate() const;
    /// validate() plus: dp and the low-rank algorithms require order 1.
    void validate_algorithm() const;
};

/// The matrix consumed by every recursion: increment_matrix or, with
/// use_increments = false, kernel_matrix.
Eigen::MatrixXd base_matrix(const SeqKernelConfig& cfg, const Sequence& s, const Sequence& t);

/// Oracle guard for the enumeration route.
inline constexpr std::size_t kNaiveMaxLevel = 6;
inline constexpr std::size_t kNaiveMaxLength = 10;

/// Explicit sum over monotone index-tuple pairs of equal length <= M, each
/// tuple repeating no index more than D times, weighted by 1/(i! j!).
/// Exponential cost; throws "use dp" outside the oracle guard.
double seq_kernel_naive(const SeqKernelConfig& cfg, const Sequence& s, const Sequence& t);
double seq_kernel_naive(const Eigen::MatrixXd& K, std::size_t level, std::size_t order);

/// Horner-type dynamic programme, O(M L L') time; beyond the base matrix
/// it keeps O(M L) working memory; the linear kernel on increments streams
/// its base matrix column by column instead of storing it.
/// Requires D = 1.
double seq_kernel_dp(const SeqKernelConfig& cfg, const Sequence& s, const Sequence& t);
double seq_kernel_dp(const Eigen::MatrixXd& K, std::size_t level);

/// Values for every truncation level 1..M from a single pass; entry m-1 is
/// the kernel truncated at level m.
std::vector<double> seq_kernel_dp_levels(const Eigen::MatrixXd& K, std::size_t level);

/// Higher-order dynamic programme, O(D^2 M L L') time.
double seq_kernel_dp_high(const SeqKernelConfig& cfg, const Sequence& s, const Sequence& t);
double seq_kernel_dp_high(const Eigen::MatrixXd& K, std::size_t level, std::size_t order);

/// Strict-shifted 2-D cumulative sum: out[i,j] = sum over i' < i, j' < j.
Eigen::MatrixXd strict_cumsum2(const Eigen::MatrixXd& A);

/// Subsequence string kernel with gap decay lambda: sum over index pairs of
/// equal length <= max_len with matching symbols of lambda^(span(i)+span(j)),
/// plus 1 for the empty pair. O(max_len |s| |t|).
double string_kernel(double lambda, std::span<const int> sigma, std::span<const int> tau, std::size_t max_len);
double string_kernel(double lambda, std::string_view sigma, std::string_view tau, std::size_t max_len);

/// Cumulative one-hot embedding (0, e_a1, e_a1 + e_a2, ...) of a string over
/// symbols 0..alphabet-1.
Sequence cumulative_one_hot(std::span<const int> symbols, std::size_t alphabet);

}  // namespace seqkern

#endif  // SEQKERN_SEQ_KERNEL_HPP
