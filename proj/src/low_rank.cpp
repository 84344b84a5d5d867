#include "seqkern/low_rank.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <string>

namespace seqkern {

void cumsum_inplace(std::span<double> v) {
    for (std::size_t k = 1; k < v.size(); ++k) v[k] += v[k - 1];
}

std::vector<double> cumsum_vector(std::vector<double> v) {
    cumsum_inplace(v);
    return v;
}

NdArray::NdArray(std::vector<std::size_t> shape, std::vector<double> data)
    : shape_(std::move(shape)), data_(std::move(data)) {
    const std::size_t n = std::accumulate(shape_.begin(), shape_.end(), std::size_t{1}, std::multiplies<>());
    if (n != data_.size()) throw Error("array data does not match its shape");
}

NdArray::NdArray(std::vector<std::size_t> shape) : shape_(std::move(shape)) {
    data_.assign(std::accumulate(shape_.begin(), shape_.end(), std::size_t{1}, std::multiplies<>()), 0.0);
}

std::size_t NdArray::offset(std::span<const std::size_t> index) const {
    if (index.size() != shape_.size()) throw Error("array index has wrong rank");
    std::size_t off = 0;
    for (std::size_t k = 0; k < shape_.size(); ++k) {
        if (index[k] >= shape_[k]) throw Error("array index out of range");
        off = off * shape_[k] + index[k];
    }
    return off;
}

double& NdArray::operator()(std::span<const std::size_t> index) { return data_[offset(index)]; }
double NdArray::operator()(std::span<const std::size_t> index) const { return data_[offset(index)]; }

NdArray cumsum_array(NdArray a, std::span<const std::size_t> axes) {
    const auto& shape = a.shape();
    for (std::size_t axis : axes) {
        if (axis >= shape.size()) throw Error("invalid axis " + std::to_string(axis));
        std::size_t inner = 1;
        for (std::size_t k = axis + 1; k < shape.size(); ++k) inner *= shape[k];
        const std::size_t len = shape[axis];
        const std::size_t outer = len == 0 ? 0 : a.size() / (len * inner);
        auto data = a.data();
        for (std::size_t o = 0; o < outer; ++o)
            for (std::size_t in = 0; in < inner; ++in) {
                const std::size_t base = o * len * inner + in;
                for (std::size_t k = 1; k < len; ++k) data[base + k * inner] += data[base + (k - 1) * inner];
            }
    }
    return a;
}

LowRankPair::LowRankPair(Eigen::MatrixXd u, Eigen::MatrixXd v) : U(std::move(u)), V(std::move(v)) {
    if (U.cols() != V.cols()) throw Error("low-rank factors must have equal column counts");
}

double LowRankPair::sum() const {
    if (rank() == 0) return 0.0;
    return U.colwise().sum().dot(V.colwise().sum());
}

namespace {

// Row i of the result holds the sum of rows i' < i.
Eigen::MatrixXd strict_shift_cumsum_rows(const Eigen::MatrixXd& F) {
    Eigen::MatrixXd out(F.rows(), F.cols());
    for (Eigen::Index c = 0; c < F.cols(); ++c) {
        double acc = 0.0;
        for (Eigen::Index i = 0; i < F.rows(); ++i) {
            out(i, c) = acc;
            acc += F(i, c);
        }
    }
    return out;
}

Eigen::MatrixXd append_ones(const Eigen::MatrixXd& F) {
    Eigen::MatrixXd out(F.rows(), F.cols() + 1);
    out.leftCols(F.cols()) = F;
    out.col(F.cols()).setOnes();
    return out;
}

thread_local Eigen::Index g_last_rank = 0;

// Grow-only scratch buffers. Reusing them keeps repeated evaluations from
// returning memory to the system and faulting it back in on every call.
struct FactorWorkspace {
    std::vector<double> cur, next, shifted;
};

void grow(std::vector<double>& v, Eigen::Index size) {
    if (v.size() < static_cast<std::size_t>(size)) v.resize(static_cast<std::size_t>(size));
}

// Column sums of B_level for the one-sided recursion
// B_1 = U, B_m = U (x)col [strict_shift_cumsum(B_{m-1}), 1].
Eigen::VectorXd recursion_colsums(const Eigen::MatrixXd& U, std::size_t level, FactorWorkspace& ws) {
    using Map = Eigen::Map<Eigen::MatrixXd>;
    const Eigen::Index n = U.rows(), d = U.cols();
    Eigen::Index r = d;
    grow(ws.cur, n * r);
    Map(ws.cur.data(), n, r) = U;
    for (std::size_t m = 2; m <= level; ++m) {
        const Eigen::Index rs = r + 1, rn = d * rs;
        grow(ws.shifted, n * rs);
        grow(ws.next, n * rn);
        const Map B(ws.cur.data(), n, r);
        Map S(ws.shifted.data(), n, rs), N(ws.next.data(), n, rn);
        for (Eigen::Index c = 0; c < r; ++c) {
            double acc = 0.0;
            for (Eigen::Index i = 0; i < n; ++i) {
                S(i, c) = acc;
                acc += B(i, c);
            }
        }
        S.col(r).setOnes();
        for (Eigen::Index a = 0; a < d; ++a)
            for (Eigen::Index b = 0; b < rs; ++b) N.col(a * rs + b) = U.col(a).cwiseProduct(S.col(b));
        std::swap(ws.cur, ws.next);
        r = rn;
    }
    return Map(ws.cur.data(), n, r).colwise().sum().transpose();
}

}  // namespace

LowRankPair lr_shift_cumsum(const LowRankPair& p, Side side) {
    if (side == Side::row) return {strict_shift_cumsum_rows(p.U), p.V};
    return {p.U, strict_shift_cumsum_rows(p.V)};
}

LowRankPair lr_add(const LowRankPair& p, const LowRankPair& q) {
    if (p.rows() != q.rows() || p.cols() != q.cols()) throw Error("lr_add: dimension mismatch");
    Eigen::MatrixXd U(p.rows(), p.rank() + q.rank());
    Eigen::MatrixXd V(p.cols(), p.rank() + q.rank());
    U << p.U, q.U;
    V << p.V, q.V;
    return {std::move(U), std::move(V)};
}

Eigen::MatrixXd column_products(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b) {
    if (a.rows() != b.rows()) throw Error("column_products: row count mismatch");
    Eigen::MatrixXd out(a.rows(), a.cols() * b.cols());
    for (Eigen::Index i = 0; i < a.cols(); ++i)
        for (Eigen::Index j = 0; j < b.cols(); ++j) out.col(i * b.cols() + j) = a.col(i).cwiseProduct(b.col(j));
    return out;
}

LowRankPair lr_mul(const LowRankPair& p, const LowRankPair& q) {
    if (p.rows() != q.rows() || p.cols() != q.cols()) throw Error("lr_mul: dimension mismatch");
    return {column_products(p.U, q.U), column_products(p.V, q.V)};
}

LowRankPair lr_reduce(const LowRankPair& p, double tol, std::size_t rank_cap) {
    if (p.rank() == 0 || p.rows() == 0 || p.cols() == 0)
        return {Eigen::MatrixXd(p.rows(), 0), Eigen::MatrixXd(p.cols(), 0)};

    Eigen::HouseholderQR<Eigen::MatrixXd> qu(p.U), qv(p.V);
    const Eigen::Index ku = std::min(p.U.rows(), p.U.cols());
    const Eigen::Index kv = std::min(p.V.rows(), p.V.cols());
    const Eigen::MatrixXd Qu = qu.householderQ() * Eigen::MatrixXd::Identity(p.U.rows(), ku);
    const Eigen::MatrixXd Qv = qv.householderQ() * Eigen::MatrixXd::Identity(p.V.rows(), kv);
    const Eigen::MatrixXd Ru = qu.matrixQR().topRows(ku).triangularView<Eigen::Upper>();
    const Eigen::MatrixXd Rv = qv.matrixQR().topRows(kv).triangularView<Eigen::Upper>();

    Eigen::JacobiSVD<Eigen::MatrixXd> svd(Ru * Rv.transpose(), Eigen::ComputeThinU | Eigen::ComputeThinV);
    const Eigen::VectorXd& s = svd.singularValues();
    const double total = s.squaredNorm();

    // Smallest k whose discarded tail is within tolerance.
    Eigen::Index keep = s.size();
    while (keep > 0 && s(keep - 1) == 0.0) --keep;
    if (tol >= 0.0) {
        const double budget = tol * tol * total;
        double tail = 0.0;
        while (keep > 0 && tail + s(keep - 1) * s(keep - 1) <= budget) {
            tail += s(keep - 1) * s(keep - 1);
            --keep;
        }
    }
    if (rank_cap > 0) keep = std::min<Eigen::Index>(keep, static_cast<Eigen::Index>(rank_cap));

    Eigen::MatrixXd U = Qu * svd.matrixU().leftCols(keep) * s.head(keep).asDiagonal();
    Eigen::MatrixXd V = Qv * svd.matrixV().leftCols(keep);
    return {std::move(U), std::move(V)};
}

Eigen::MatrixXd linear_factor(const SeqKernelConfig& cfg, const Sequence& s) {
    const double scale = std::sqrt(cfg.base.gamma);
    if (cfg.use_increments) return scale * Eigen::MatrixXd(increments(s));
    return scale * Eigen::MatrixXd(s.points());
}

NystromMap::NystromMap(const KernelSpec& spec, RowMatrix landmarks) : spec_(spec), landmarks_(std::move(landmarks)) {
    const Eigen::Index n = landmarks_.rows();
    if (n < 1) throw Error("Nystrom map needs at least one landmark");
    Eigen::MatrixXd Kzz(n, n);
    for (Eigen::Index i = 0; i < n; ++i)
        for (Eigen::Index j = i; j < n; ++j)
            Kzz(i, j) = Kzz(j, i) = kernel_eval(spec_, landmarks_.row(i), landmarks_.row(j));
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(Kzz);
    const Eigen::VectorXd& vals = eig.eigenvalues();
    const double cutoff = 1e-10 * std::max(vals.maxCoeff(), 0.0);
    std::vector<Eigen::Index> kept;
    for (Eigen::Index k = n - 1; k >= 0; --k)
        if (vals(k) > cutoff) kept.push_back(k);
    projection_.resize(n, static_cast<Eigen::Index>(kept.size()));
    for (std::size_t c = 0; c < kept.size(); ++c)
        projection_.col(static_cast<Eigen::Index>(c)) = eig.eigenvectors().col(kept[c]) / std::sqrt(vals(kept[c]));
}

NystromMap NystromMap::fit(const KernelSpec& spec, std::span<const Sequence> pool, std::size_t count,
                           std::uint64_t seed) {
    std::size_t total = 0;
    for (const auto& s : pool) total += s.length();
    if (total == 0) throw Error("Nystrom map needs a non-empty pool");
    const Eigen::Index d = static_cast<Eigen::Index>(pool.front().dim());
    RowMatrix all(static_cast<Eigen::Index>(total), d);
    Eigen::Index r = 0;
    for (const auto& s : pool) {
        if (static_cast<Eigen::Index>(s.dim()) != d) throw Error("Nystrom pool: dimension mismatch");
        all.middleRows(r, s.points().rows()) = s.points();
        r += s.points().rows();
    }
    if (count == 0 || count >= total) return NystromMap(spec, std::move(all));

    std::vector<std::size_t> order(total);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::mt19937_64 rng(seed);
    std::shuffle(order.begin(), order.end(), rng);
    order.resize(count);
    std::sort(order.begin(), order.end());
    RowMatrix picked(static_cast<Eigen::Index>(count), d);
    for (std::size_t k = 0; k < count; ++k) picked.row(static_cast<Eigen::Index>(k)) = all.row(static_cast<Eigen::Index>(order[k]));
    return NystromMap(spec, std::move(picked));
}

Eigen::MatrixXd NystromMap::features(const Sequence& s) const {
    if (static_cast<Eigen::Index>(s.dim()) != landmarks_.cols()) throw Error("Nystrom features: dimension mismatch");
    Eigen::MatrixXd Kxz(s.points().rows(), landmarks_.rows());
    for (Eigen::Index i = 0; i < Kxz.rows(); ++i)
        for (Eigen::Index j = 0; j < Kxz.cols(); ++j) Kxz(i, j) = kernel_eval(spec_, s.points().row(i), landmarks_.row(j));
    return Kxz * projection_;
}

Eigen::MatrixXd base_factor(const SeqKernelConfig& cfg, const Sequence& s, const NystromMap* nystrom) {
    if (cfg.base.kind == KernelKind::linear) return linear_factor(cfg, s);
    if (nystrom == nullptr) throw Error("non-linear base kernels need a Nystrom map for low-rank evaluation");
    const Eigen::MatrixXd phi = nystrom->features(s);
    if (!cfg.use_increments) return phi;
    const Eigen::Index n = phi.rows() - 1;
    if (n <= 0) return Eigen::MatrixXd(0, phi.cols());
    return phi.bottomRows(n) - phi.topRows(n);
}

double seq_kernel_lowrank(const SeqKernelConfig& cfg, const LowRankPair& base_factors) {
    cfg.validate();
    if (cfg.order != 1) throw Error("low-rank evaluation requires order 1");
    const Eigen::MatrixXd& U = base_factors.U;
    const Eigen::MatrixXd& V = base_factors.V;
    if (U.cols() != V.cols()) throw Error("low-rank factors must have equal column counts");

    if (!cfg.lowrank.reduces()) {
        // The two sides never interact before the final sum.
        thread_local FactorWorkspace ws;
        const Eigen::VectorXd r = recursion_colsums(U, cfg.level, ws);
        const Eigen::VectorXd c = recursion_colsums(V, cfg.level, ws);
        g_last_rank = r.size();
        return 1.0 + r.dot(c);
    }

    LowRankPair A = lr_reduce(base_factors, cfg.lowrank.rank_tol, cfg.lowrank.rank_cap);
    for (std::size_t m = 2; m <= cfg.level; ++m) {
        const Eigen::MatrixXd P = append_ones(strict_shift_cumsum_rows(A.U));
        const Eigen::MatrixXd Q = append_ones(strict_shift_cumsum_rows(A.V));
        A = LowRankPair(column_products(U, P), column_products(V, Q));
        A = lr_reduce(A, cfg.lowrank.rank_tol, cfg.lowrank.rank_cap);
    }
    g_last_rank = A.rank();
    return 1.0 + A.sum();
}

double seq_kernel_lowrank(const SeqKernelConfig& cfg, const Sequence& s, const Sequence& t) {
    cfg.validate();
    if (s.dim() != t.dim()) throw Error("low-rank evaluation: dimension mismatch");
    if (cfg.base.kind == KernelKind::linear) return seq_kernel_lowrank(cfg, {linear_factor(cfg, s), linear_factor(cfg, t)});
    const std::vector<Sequence> pool{s, t};
    const NystromMap map = NystromMap::fit(cfg.base, pool, cfg.lowrank.landmarks, cfg.lowrank.seed);
    return seq_kernel_lowrank(cfg, {base_factor(cfg, s, &map), base_factor(cfg, t, &map)});
}

Eigen::Index last_lowrank_rank() { return g_last_rank; }

Eigen::MatrixXd lowrank_sequence_factor(const Eigen::MatrixXd& U, std::size_t level) {
    Eigen::MatrixXd B = U;
    for (std::size_t m = 2; m <= level; ++m) B = column_products(U, append_ones(strict_shift_cumsum_rows(B)));
    return B;
}

namespace {

// Shared right-basis compression of every factor block: projects onto the
// leading eigenvectors of sum_i B_i^T B_i, which preserves all cross
// products B_i B_j^T up to the discarded energy.
void reduce_jointly(std::vector<Eigen::MatrixXd>& blocks, double tol, std::size_t rank_cap) {
    if (blocks.empty() || blocks.front().cols() == 0) return;
    const Eigen::Index r = blocks.front().cols();
    Eigen::MatrixXd G = Eigen::MatrixXd::Zero(r, r);
    for (const auto& B : blocks) G.noalias() += B.transpose() * B;
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(G);
    const Eigen::VectorXd vals = eig.eigenvalues().reverse().cwiseMax(0.0);
    const Eigen::MatrixXd vecs = eig.eigenvectors().rowwise().reverse();
    const double total = vals.sum();
    Eigen::Index keep = r;
    while (keep > 0 && vals(keep - 1) == 0.0) --keep;
    if (tol >= 0.0) {
        double tail = 0.0;
        while (keep > 0 && tail + vals(keep - 1) <= tol * tol * total) {
            tail += vals(keep - 1);
            --keep;
        }
    }
    if (rank_cap > 0) keep = std::min<Eigen::Index>(keep, static_cast<Eigen::Index>(rank_cap));
    const Eigen::MatrixXd W = vecs.leftCols(keep);
    for (auto& B : blocks) B = B * W;
}

}  // namespace

JointGram gram_lowrank_joint(const SeqKernelConfig& cfg, std::span<const Sequence> dataset, std::size_t landmarks) {
    cfg.validate();
    if (cfg.order != 1) throw Error("joint low-rank evaluation requires order 1");
    if (landmarks < 1) throw Error("landmark count must be >= 1");
    const std::size_t N = dataset.size();
    JointGram out;
    out.gram.resize(static_cast<Eigen::Index>(N), static_cast<Eigen::Index>(N));
    if (N == 0) return out;

    std::optional<NystromMap> map;
    if (cfg.base.kind != KernelKind::linear) map.emplace(NystromMap::fit(cfg.base, dataset, landmarks, cfg.lowrank.seed));

    std::vector<Eigen::MatrixXd> base(N);
    for (std::size_t i = 0; i < N; ++i) base[i] = base_factor(cfg, dataset[i], map ? &*map : nullptr);

    std::vector<Eigen::MatrixXd> B = base;
    if (cfg.lowrank.reduces()) reduce_jointly(B, cfg.lowrank.rank_tol, cfg.lowrank.rank_cap);
    for (std::size_t m = 2; m <= cfg.level; ++m) {
        for (std::size_t i = 0; i < N; ++i) B[i] = column_products(base[i], append_ones(strict_shift_cumsum_rows(B[i])));
        if (cfg.lowrank.reduces()) reduce_jointly(B, cfg.lowrank.rank_tol, cfg.lowrank.rank_cap);
    }

    const Eigen::Index r = B.front().cols();
    Eigen::MatrixXd F(static_cast<Eigen::Index>(N), r);
    for (std::size_t i = 0; i < N; ++i) F.row(static_cast<Eigen::Index>(i)) = B[i].colwise().sum();
    for (Eigen::Index i = 0; i < F.rows(); ++i)
        for (Eigen::Index j = i; j < F.rows(); ++j) out.gram(i, j) = out.gram(j, i) = 1.0 + F.row(i).dot(F.row(j));
    out.factors = std::move(B);
    return out;
}

}  // namespace seqkern
