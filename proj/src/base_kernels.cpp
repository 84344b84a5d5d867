#include "seqkern/base_kernels.hpp"

#include <cmath>
#include <sstream>

namespace seqkern {

std::string_view to_string(KernelKind kind) {
    switch (kind) {
        case KernelKind::linear: return "linear";
        case KernelKind::gaussian: return "gaussian";
        case KernelKind::indicator: return "indicator";
        case KernelKind::custom: return "custom";
    }
    return "unknown";
}

KernelKind parse_kernel_kind(std::string_view name) {
    if (name == "linear") return KernelKind::linear;
    if (name == "gaussian") return KernelKind::gaussian;
    if (name == "indicator") return KernelKind::indicator;
    throw Error("unknown kernel '" + std::string(name) + "'");
}

void KernelSpec::validate() const {
    if (!(gamma > 0.0)) throw Error("kernel gamma must be > 0");
    if (!(theta > 0.0)) throw Error("kernel theta must be > 0");
    if (kind == KernelKind::custom && !custom) throw Error("custom kernel without a function");
}

std::string KernelSpec::describe() const {
    std::ostringstream os;
    os << to_string(kind);
    if (kind == KernelKind::linear) os << "(gamma=" << gamma << ")";
    if (kind == KernelKind::gaussian) os << "(gamma=" << gamma << ",theta=" << theta << ")";
    return os.str();
}

double kernel_eval(const KernelSpec& spec, Eigen::Ref<const Eigen::RowVectorXd> x,
                   Eigen::Ref<const Eigen::RowVectorXd> y) {
    if (x.size() != y.size()) throw Error("kernel_eval: dimension mismatch");
    switch (spec.kind) {
        case KernelKind::linear: return spec.gamma * x.dot(y);
        case KernelKind::gaussian:
            return spec.theta * std::exp(-0.5 * spec.gamma * spec.gamma * (x - y).squaredNorm());
        case KernelKind::indicator: return x == y ? 1.0 : 0.0;
        case KernelKind::custom: return spec.custom(x, y);
    }
    throw Error("unreachable kernel kind");
}

Eigen::MatrixXd kernel_matrix(const KernelSpec& spec, const Sequence& s, const Sequence& t) {
    if (s.dim() != t.dim()) throw Error("kernel_matrix: dimension mismatch");
    const auto L = static_cast<Eigen::Index>(s.length());
    const auto Lp = static_cast<Eigen::Index>(t.length());
    if (spec.kind == KernelKind::linear) return spec.gamma * (s.points() * t.points().transpose());
    Eigen::MatrixXd K(L, Lp);
    for (Eigen::Index i = 0; i < L; ++i)
        for (Eigen::Index j = 0; j < Lp; ++j) K(i, j) = kernel_eval(spec, s.points().row(i), t.points().row(j));
    return K;
}

void linear_increment_column(double gamma, const RowMatrix& ds, const RowMatrix& dt, Eigen::Index j,
                             Eigen::Ref<Eigen::VectorXd> out) {
    const Eigen::Index d = ds.cols();
    for (Eigen::Index i = 0; i < ds.rows(); ++i) {
        double acc = 0.0;
        for (Eigen::Index k = 0; k < d; ++k) acc += ds(i, k) * dt(j, k);
        out(i) = gamma * acc;
    }
}

Eigen::MatrixXd increment_matrix(const KernelSpec& spec, const Sequence& s, const Sequence& t) {
    if (s.dim() != t.dim()) throw Error("increment_matrix: dimension mismatch");
    if (spec.kind == KernelKind::linear) {
        const RowMatrix ds = increments(s), dt = increments(t);
        Eigen::MatrixXd K(ds.rows(), dt.rows());
        for (Eigen::Index j = 0; j < K.cols(); ++j) linear_increment_column(spec.gamma, ds, dt, j, K.col(j));
        return K;
    }
    const Eigen::MatrixXd K = kernel_matrix(spec, s, t);
    const Eigen::Index n = K.rows() - 1;
    const Eigen::Index p = K.cols() - 1;
    if (n <= 0 || p <= 0) return Eigen::MatrixXd(std::max<Eigen::Index>(n, 0), std::max<Eigen::Index>(p, 0));
    // Differencing along s first keeps constant inputs exactly zero.
    return (K.bottomRightCorner(n, p) - K.topRightCorner(n, p)) - (K.bottomLeftCorner(n, p) - K.topLeftCorner(n, p));
}

}  // namespace seqkern
