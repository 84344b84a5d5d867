#ifndef SEQKERN_BASE_KERNELS_HPP
#define SEQKERN_BASE_KERNELS_HPP

#include <functional>
#include <optional>
#include <string>
#include <string_view>

#include "seqkern/seq_core.hpp"

namespace seqkern {

enum class KernelKind { linear, gaussian, indicator, custom };

std::string_view to_string(KernelKind kind);
KernelKind parse_kernel_kind(std::string_view name);

using PointKernel = std::function<double(Eigen::Ref<const Eigen::RowVectorXd>, Eigen::Ref<const Eigen::RowVectorXd>)>;

/// A static kernel on R^d.
///
///   linear:    gamma * <x, y>
///   gaussian:  theta * exp(-gamma^2 |x - y|^2 / 2)
///   indicator: 1 if x == y exactly, else 0 (symbols are integer codes)
///   custom:    user function; symmetry and positive semi-definiteness are
///              the caller's responsibility.
struct KernelSpec {
    KernelKind kind = KernelKind::linear;
    double gamma = 1.0;
    double theta = 1.0;
    PointKernel custom;

    static KernelSpec linear(double gamma = 1.0) { return {KernelKind::linear, gamma, 1.0, {}}; }
    static KernelSpec gaussian(double gamma = 1.0, double theta = 1.0) {
        return {KernelKind::gaussian, gamma, theta, {}};
    }
    static KernelSpec indicator() { return {KernelKind::indicator, 1.0, 1.0, {}}; }
    static KernelSpec from_function(PointKernel f) { return {KernelKind::custom, 1.0, 1.0, std::move(f)}; }

    /// Throws unless gamma > 0, theta > 0 and a custom kernel carries a function.
    void validate() const;
    std::string describe() const;
};

double kernel_eval(const KernelSpec& spec, Eigen::Ref<const Eigen::RowVectorXd> x,
                   Eigen::Ref<const Eigen::RowVectorXd> y);

/// k(s[i], t[j]) for all pairs of points.
Eigen::MatrixXd kernel_matrix(const KernelSpec& spec, const Sequence& s, const Sequence& t);

/// Four-point second difference of k on the two grids:
///   K[i,j] = k(s[i+1],t[j+1]) + k(s[i],t[j]) - k(s[i],t[j+1]) - k(s[i+1],t[j]).
/// Shape (s.L-1) x (t.L-1); a length-1 input yields an empty dimension.
/// The linear kernel takes the direct route gamma * <ds_i, dt_j>.
Eigen::MatrixXd increment_matrix(const KernelSpec& spec, const Sequence& s, const Sequence& t);

/// Column j of the linear increment matrix from the increment rows ds, dt:
/// out[i] = gamma * <ds_i, dt_j>, summed in coordinate order. increment_matrix
/// uses exactly this, so streamed and stored columns agree bitwise.
void linear_increment_column(double gamma, const RowMatrix& ds, const RowMatrix& dt, Eigen::Index j,
                             Eigen::Ref<Eigen::VectorXd> out);

}  // namespace seqkern

#endif  // SEQKERN_BASE_KERNELS_HPP
