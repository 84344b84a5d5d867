#include "seqkern/seq_kernel.hpp"

#include <string>

#include "seqkern/tensor_algebra.hpp"

namespace seqkern {

std::string_view to_string(Algorithm algo) {
    switch (algo) {
        case Algorithm::naive: return "naive";
        case Algorithm::dp: return "dp";
        case Algorithm::dp_high: return "dp-high";
        case Algorithm::lowrank: return "lowrank";
        case Algorithm::lowrank_joint: return "lowrank-joint";
    }
    return "unknown";
}

Algorithm parse_algorithm(std::string_view name) {
    if (name == "naive") return Algorithm::naive;
    if (name == "dp") return Algorithm::dp;
    if (name == "dp-high") return Algorithm::dp_high;
    if (name == "lowrank") return Algorithm::lowrank;
    if (name == "lowrank-joint") return Algorithm::lowrank_joint;
    throw Error("unknown algorithm '" + std::string(name) + "'");
}

void SeqKernelConfig::validate() const {
    if (level < 1) throw Error("level must be >= 1");
    if (level > kMaxLevel) throw Error("level too large");
    if (order < 1) throw Error("order must be >= 1");
    if (order > level) throw Error("order must not exceed level");
    base.validate();
}

void SeqKernelConfig::validate_algorithm() const {
    validate();
    if ((algorithm == Algorithm::dp || algorithm == Algorithm::lowrank || algorithm == Algorithm::lowrank_joint) &&
        order != 1)
        throw Error(std::string("algorithm ") + std::string(to_string(algorithm)) + " requires order 1; use dp-high");
}

Eigen::MatrixXd base_matrix(const SeqKernelConfig& cfg, const Sequence& s, const Sequence& t) {
    return cfg.use_increments ? increment_matrix(cfg.base, s, t) : kernel_matrix(cfg.base, s, t);
}

double seq_kernel_naive(const Eigen::MatrixXd& K, std::size_t level, std::size_t order) {
    if (level > kNaiveMaxLevel) throw Error("naive evaluation limited to level <= 6; use dp");
    if (static_cast<std::size_t>(K.rows()) > kNaiveMaxLength || static_cast<std::size_t>(K.cols()) > kNaiveMaxLength)
        throw Error("naive evaluation limited to short sequences; use dp");
    if (order < 1) throw Error("order must be >= 1");

    const auto rows = static_cast<std::size_t>(K.rows());
    const auto cols = static_cast<std::size_t>(K.cols());
    std::vector<std::vector<IndexTuple>> row_tuples(level + 1), col_tuples(level + 1);
    for_each_monotone_subtuple(rows, level, order, [&](const IndexTuple& t) { row_tuples[t.size()].push_back(t); });
    for_each_monotone_subtuple(cols, level, order, [&](const IndexTuple& t) { col_tuples[t.size()].push_back(t); });

    double total = 1.0;
    for (std::size_t m = 1; m <= level; ++m) {
        for (const auto& i : row_tuples[m]) {
            const double wi = 1.0 / i.multiplicity_factorial();
            for (const auto& j : col_tuples[m]) {
                double prod = wi / j.multiplicity_factorial();
                for (std::size_t r = 0; r < m; ++r)
                    prod *= K(static_cast<Eigen::Index>(i.indices[r]), static_cast<Eigen::Index>(j.indices[r]));
                total += prod;
            }
        }
    }
    return total;
}

double seq_kernel_naive(const SeqKernelConfig& cfg, const Sequence& s, const Sequence& t) {
    cfg.validate();
    if (cfg.level > kNaiveMaxLevel || s.length() > kNaiveMaxLength || t.length() > kNaiveMaxLength)
        throw Error("naive evaluation limited to level <= 6 and length <= 10; use dp");
    return seq_kernel_naive(base_matrix(cfg, s, t), cfg.level, cfg.order);
}

Eigen::MatrixXd strict_cumsum2(const Eigen::MatrixXd& A) {
    const Eigen::Index n = A.rows(), p = A.cols();
    Eigen::MatrixXd Q = Eigen::MatrixXd::Zero(n, p);
    if (n < 2 || p < 2) return Q;
    // Q[i,j] = P[i-1,j-1] with P the inclusive 2-D prefix sum; one running
    // column of P is enough. Column-major sweep to match Eigen's storage.
    Eigen::VectorXd rowacc = Eigen::VectorXd::Zero(n);
    for (Eigen::Index j = 1; j < p; ++j) {
        double colacc = 0.0;
        for (Eigen::Index i = 1; i < n; ++i) {
            colacc += A(i - 1, j - 1);
            rowacc(i) += colacc;
            Q(i, j) = rowacc(i);
        }
    }
    return Q;
}

namespace {

// out[i,j] = sum_{j' < j} A[i,j']
Eigen::MatrixXd strict_cumsum_cols(const Eigen::MatrixXd& A) {
    Eigen::MatrixXd out = Eigen::MatrixXd::Zero(A.rows(), A.cols());
    for (Eigen::Index i = 0; i < A.rows(); ++i) {
        double acc = 0.0;
        for (Eigen::Index j = 1; j < A.cols(); ++j) {
            acc += A(i, j - 1);
            out(i, j) = acc;
        }
    }
    return out;
}

// out[i,j] = sum_{i' < i} A[i',j]
Eigen::MatrixXd strict_cumsum_rows(const Eigen::MatrixXd& A) {
    Eigen::MatrixXd out = Eigen::MatrixXd::Zero(A.rows(), A.cols());
    for (Eigen::Index j = 0; j < A.cols(); ++j) {
        double acc = 0.0;
        for (Eigen::Index i = 1; i < A.rows(); ++i) {
            acc += A(i - 1, j);
            out(i, j) = acc;
        }
    }
    return out;
}

// Plain column-major summation; the fused sweep in seq_kernel_dp_levels
// adds in the same order, which keeps dp and dp-high bitwise equal at order 1.
double sum_ordered(const Eigen::MatrixXd& A) {
    double s = 0.0;
    for (Eigen::Index j = 0; j < A.cols(); ++j)
        for (Eigen::Index i = 0; i < A.rows(); ++i) s += A(i, j);
    return s;
}

}  // namespace

namespace {

// A_m[i,j] holds the contributions of index-pair tuples of length 1..m
// ending at (i, j): A_1 = K, A_m = K * (1 + strict_cumsum2(A_{m-1})).
// All levels are swept together one column of K at a time, so only the
// previous column and the running row sums of each level are kept.
// `column(j, out)` writes column j of K.
template <class Column>
std::vector<double> dp_sweep(Eigen::Index n, Eigen::Index p, std::size_t level, Column&& column) {
    if (level < 1) throw Error("level must be >= 1");
    if (n == 0 || p == 0) return std::vector<double>(level, 1.0);
    const auto M = static_cast<Eigen::Index>(level);
    Eigen::VectorXd k(n);
    Eigen::MatrixXd prev = Eigen::MatrixXd::Zero(n, M), cur(n, M);
    Eigen::MatrixXd rowacc = Eigen::MatrixXd::Zero(n, M);
    std::vector<double> sums(level, 0.0);
    for (Eigen::Index j = 0; j < p; ++j) {
        column(j, k);
        cur.col(0) = k;
        for (Eigen::Index m = 1; m < M; ++m) {
            cur(0, m) = k(0) * (0.0 + 1.0);
            double colacc = 0.0;
            for (Eigen::Index i = 1; i < n; ++i) {
                double q = 0.0;
                if (j > 0) {
                    colacc += prev(i - 1, m - 1);
                    rowacc(i, m - 1) += colacc;
                    q = rowacc(i, m - 1);
                }
                cur(i, m) = k(i) * (q + 1.0);
            }
        }
        for (Eigen::Index m = 0; m < M; ++m)
            for (Eigen::Index i = 0; i < n; ++i) sums[static_cast<std::size_t>(m)] += cur(i, m);
        std::swap(prev, cur);
    }
    std::vector<double> out;
    for (double v : sums) out.push_back(1.0 + v);
    return out;
}

}  // namespace

std::vector<double> seq_kernel_dp_levels(const Eigen::MatrixXd& K, std::size_t level) {
    return dp_sweep(K.rows(), K.cols(), level, [&](Eigen::Index j, Eigen::VectorXd& out) { out = K.col(j); });
}

double seq_kernel_dp(const Eigen::MatrixXd& K, std::size_t level) { return seq_kernel_dp_levels(K, level).back(); }

double seq_kernel_dp(const SeqKernelConfig& cfg, const Sequence& s, const Sequence& t) {
    cfg.validate();
    if (cfg.order != 1) throw Error("dp requires order 1; use dp-high");
    if (cfg.base.kind == KernelKind::linear && cfg.use_increments) {
        // Stream the columns instead of storing the L x L' matrix.
        if (s.dim() != t.dim()) throw Error("increment_matrix: dimension mismatch");
        const RowMatrix ds = increments(s), dt = increments(t);
        return dp_sweep(ds.rows(), dt.rows(), cfg.level, [&](Eigen::Index j, Eigen::VectorXd& out) {
                   linear_increment_column(cfg.base.gamma, ds, dt, j, out);
               }).back();
    }
    return seq_kernel_dp(base_matrix(cfg, s, t), cfg.level);
}

double seq_kernel_dp_high(const Eigen::MatrixXd& K, std::size_t level, std::size_t order) {
    if (level < 1) throw Error("level must be >= 1");
    if (order < 1) throw Error("order must be >= 1");
    if (order > level) throw Error("order must not exceed level");
    if (K.size() == 0) return 1.0;

    const std::size_t D = order;
    const Eigen::Index n = K.rows(), p = K.cols();
    // A[d][e] holds tuple pairs of length <= m ending at (i, j) whose final
    // runs repeat i exactly d+1 times and j exactly e+1 times.
    using Block = std::vector<std::vector<Eigen::MatrixXd>>;
    Block A(D, std::vector<Eigen::MatrixXd>(D, Eigen::MatrixXd::Zero(n, p)));
    A[0][0] = K;

    for (std::size_t m = 2; m <= level; ++m) {
        const std::size_t runs = std::min(D, m);
        Eigen::MatrixXd total = Eigen::MatrixXd::Zero(n, p);
        std::vector<Eigen::MatrixXd> row_run(D, Eigen::MatrixXd::Zero(n, p));  // summed over e
        std::vector<Eigen::MatrixXd> col_run(D, Eigen::MatrixXd::Zero(n, p));  // summed over d
        for (std::size_t d = 0; d < D; ++d)
            for (std::size_t e = 0; e < D; ++e) {
                total += A[d][e];
                row_run[d] += A[d][e];
                col_run[e] += A[d][e];
            }

        Block next(D, std::vector<Eigen::MatrixXd>(D, Eigen::MatrixXd::Zero(n, p)));
        next[0][0] = K.cwiseProduct((strict_cumsum2(total).array() + 1.0).matrix());
        for (std::size_t d = 1; d < runs; ++d) {
            const double w = 1.0 / static_cast<double>(d + 1);
            next[d][0] = w * K.cwiseProduct(strict_cumsum_cols(row_run[d - 1]));
            next[0][d] = w * K.cwiseProduct(strict_cumsum_rows(col_run[d - 1]));
            for (std::size_t e = 1; e < runs; ++e) {
                const double we = w / static_cast<double>(e + 1);
                next[d][e] = we * K.cwiseProduct(A[d - 1][e - 1]);
            }
        }
        A = std::move(next);
    }

    double result = 1.0;
    for (std::size_t d = 0; d < D; ++d)
        for (std::size_t e = 0; e < D; ++e) result += sum_ordered(A[d][e]);
    return result;
}

double seq_kernel_dp_high(const SeqKernelConfig& cfg, const Sequence& s, const Sequence& t) {
    cfg.validate();
    return seq_kernel_dp_high(base_matrix(cfg, s, t), cfg.level, cfg.order);
}

double string_kernel(double lambda, std::span<const int> sigma, std::span<const int> tau, std::size_t max_len) {
    if (!(lambda > 0.0)) throw Error("lambda must be > 0");
    const auto n = static_cast<Eigen::Index>(sigma.size());
    const auto p = static_cast<Eigen::Index>(tau.size());
    if (n == 0 || p == 0 || max_len == 0) return 1.0;

    Eigen::MatrixXd match(n, p);
    for (Eigen::Index i = 0; i < n; ++i)
        for (Eigen::Index j = 0; j < p; ++j) match(i, j) = sigma[static_cast<std::size_t>(i)] == tau[static_cast<std::size_t>(j)] ? 1.0 : 0.0;

    // B[i,j]: matching subsequence pairs of the current length ending at
    // (i, j), weighted by lambda^((i - i1) + (j - j1)).
    const double lam2 = lambda * lambda;
    Eigen::MatrixXd B = match;
    double total = 1.0 + lam2 * sum_ordered(B);
    for (std::size_t m = 2; m <= max_len; ++m) {
        // Decayed inclusive prefix sum:
        // P[i,j] = B[i,j] + l P[i-1,j] + l P[i,j-1] - l^2 P[i-1,j-1].
        Eigen::MatrixXd P(n, p);
        for (Eigen::Index i = 0; i < n; ++i)
            for (Eigen::Index j = 0; j < p; ++j) {
                double v = B(i, j);
                if (i > 0) v += lambda * P(i - 1, j);
                if (j > 0) v += lambda * P(i, j - 1);
                if (i > 0 && j > 0) v -= lam2 * P(i - 1, j - 1);
                P(i, j) = v;
            }
        Eigen::MatrixXd next = Eigen::MatrixXd::Zero(n, p);
        for (Eigen::Index i = 1; i < n; ++i)
            for (Eigen::Index j = 1; j < p; ++j)
                if (match(i, j) != 0.0) next(i, j) = lam2 * P(i - 1, j - 1);
        B = std::move(next);
        const double level_sum = sum_ordered(B);
        if (level_sum == 0.0) break;
        total += lam2 * level_sum;
    }
    return total;
}

double string_kernel(double lambda, std::string_view sigma, std::string_view tau, std::size_t max_len) {
    std::vector<int> a(sigma.begin(), sigma.end());
    std::vector<int> b(tau.begin(), tau.end());
    return string_kernel(lambda, a, b, max_len);
}

Sequence cumulative_one_hot(std::span<const int> symbols, std::size_t alphabet) {
    RowMatrix pts = RowMatrix::Zero(static_cast<Eigen::Index>(symbols.size() + 1), static_cast<Eigen::Index>(alphabet));
    for (std::size_t r = 0; r < symbols.size(); ++r) {
        const int a = symbols[r];
        if (a < 0 || static_cast<std::size_t>(a) >= alphabet) throw Error("symbol outside alphabet");
        pts.row(static_cast<Eigen::Index>(r + 1)) = pts.row(static_cast<Eigen::Index>(r));
        pts(static_cast<Eigen::Index>(r + 1), a) += 1.0;
    }
    return Sequence(std::move(pts));
}

}  // namespace seqkern
