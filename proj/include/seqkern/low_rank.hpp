#ifndef SEQKERN_LOW_RANK_HPP
#define SEQKERN_LOW_RANK_HPP

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "seqkern/base_kernels.hpp"
#include "seqkern/seq_kernel.hpp"

namespace seqkern {

// ---------------------------------------------------------------------------
// Cumulative sums

/// Inclusive running sum, in place.
void cumsum_inplace(std::span<double> v);
std::vector<double> cumsum_vector(std::vector<double> v);

/// Dense k-fold array, row-major (last axis fastest).
class NdArray {
public:
    NdArray() = default;
    NdArray(std::vector<std::size_t> shape, std::vector<double> data);
    explicit NdArray(std::vector<std::size_t> shape);

    const std::vector<std::size_t>& shape() const { return shape_; }
    std::size_t rank() const { return shape_.size(); }
    std::size_t size() const { return data_.size(); }
    std::span<double> data() { return data_; }
    std::span<const double> data() const { return data_; }

    double& operator()(std::span<const std::size_t> index);
    double operator()(std::span<const std::size_t> index) const;

    friend bool operator==(const NdArray&, const NdArray&) = default;

private:
    std::size_t offset(std::span<const std::size_t> index) const;

    std::vector<std::size_t> shape_;
    std::vector<double> data_;
};

/// Slice-wise inclusive cumulative sum along each listed axis in turn.
/// Throws on an axis outside the array's rank.
NdArray cumsum_array(NdArray a, std::span<const std::size_t> axes);

// ---------------------------------------------------------------------------
// Low-rank presentations

/// Factor pair presenting A = U * V^T. The presentation rank is the number
/// of factor columns and may exceed the rank of A.
struct LowRankPair {
    Eigen::MatrixXd U;
    Eigen::MatrixXd V;

    LowRankPair() = default;
    LowRankPair(Eigen::MatrixXd u, Eigen::MatrixXd v);

    Eigen::Index rows() const { return U.rows(); }
    Eigen::Index cols() const { return V.rows(); }
    Eigen::Index rank() const { return U.cols(); }

    Eigen::MatrixXd densify() const { return U * V.transpose(); }
    /// Sum of all entries of the presented matrix.
    double sum() const;
};

enum class Side { row, col };

/// Strict shift-cumsum of the presented matrix along rows (entry i
/// accumulates rows i' < i) or columns; only one factor is touched.
LowRankPair lr_shift_cumsum(const LowRankPair& p, Side side);

/// Entrywise sum, by factor concatenation (rank r_p + r_q).
LowRankPair lr_add(const LowRankPair& p, const LowRankPair& q);

/// Entrywise (Hadamard) product, rank r_p * r_q. Column a * r_q + b of the
/// result is the product of column a of p with column b of q.
LowRankPair lr_mul(const LowRankPair& p, const LowRankPair& q);

/// Recompresses a presentation through a thin QR of each factor and an SVD
/// of the r x r core, without forming U V^T. Keeps the fewest singular
/// directions whose discarded Frobenius mass is <= tol * |A|_F, then caps
/// the rank at `rank_cap` when nonzero. tol < 0 disables the tolerance test
/// (only exact zeros are dropped).
LowRankPair lr_reduce(const LowRankPair& p, double tol, std::size_t rank_cap = 0);

/// Column-wise Khatri-Rao style product of two factors with equal row counts.
Eigen::MatrixXd column_products(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b);

// ---------------------------------------------------------------------------
// Base factors

/// Exact factor for the linear kernel: sqrt(gamma) times the increments (or
/// the points, when use_increments is false).
Eigen::MatrixXd linear_factor(const SeqKernelConfig& cfg, const Sequence& s);

/// Nystrom feature map phi(x) = Lambda^{-1/2} Q^T k(Z, x) for landmarks Z,
/// with eigenvalues below 1e-10 * lambda_max discarded.
class NystromMap {
public:
    NystromMap(const KernelSpec& spec, RowMatrix landmarks);

    /// Uniformly samples `count` landmarks from the pooled points of every
    /// sequence with a fixed seed; count 0 or >= pool size takes them all.
    static NystromMap fit(const KernelSpec& spec, std::span<const Sequence> pool, std::size_t count,
                          std::uint64_t seed);

    std::size_t feature_dim() const { return static_cast<std::size_t>(projection_.cols()); }
    Eigen::MatrixXd features(const Sequence& s) const;

private:
    KernelSpec spec_;
    RowMatrix landmarks_;
    Eigen::MatrixXd projection_;  // landmarks x features
};

/// Factor whose pairwise products present the base matrix of the recursion:
/// exact for the linear kernel, Nystrom-approximate otherwise.
Eigen::MatrixXd base_factor(const SeqKernelConfig& cfg, const Sequence& s, const NystromMap* nystrom);

// ---------------------------------------------------------------------------
// Factorized sequential kernels

/// Low-rank evaluation of the order-1 sequential kernel for one pair given a
/// presentation of its base matrix. O((L + L') rho M).
double seq_kernel_lowrank(const SeqKernelConfig& cfg, const LowRankPair& base_factors);
double seq_kernel_lowrank(const SeqKernelConfig& cfg, const Sequence& s, const Sequence& t);

/// Presentation rank reached at the last level of the most recent
/// seq_kernel_lowrank call made by this thread (diagnostic).
Eigen::Index last_lowrank_rank();

/// One-sided factor recursion: given U presenting a joint base matrix,
/// returns B with B_m = U (x)col [strict_shift_cumsum(B_{m-1}), 1].
Eigen::MatrixXd lowrank_sequence_factor(const Eigen::MatrixXd& U, std::size_t level);

struct JointGram {
    /// Output of the shared recursion, one factor block per sequence.
    std::vector<Eigen::MatrixXd> factors;
    Eigen::MatrixXd gram;
};

/// Joint low-rank Gram: per-sequence factors from one shared recursion;
/// gram(i,j) = 1 + <colsum F_i, colsum F_j>. O(N L rho M).
JointGram gram_lowrank_joint(const SeqKernelConfig& cfg, std::span<const Sequence> dataset, std::size_t landmarks);

}  // namespace seqkern

#endif  // SEQKERN_LOW_RANK_HPP
