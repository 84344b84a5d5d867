#include "seqkern/selftest.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <ostream>
#include <random>
#include <string>

#include "seqkern/gram.hpp"
#include "seqkern/low_rank.hpp"
#include "seqkern/seq_kernel.hpp"
#include "seqkern/tensor_algebra.hpp"

namespace seqkern {

namespace {

Sequence random_sequence(std::mt19937_64& rng, std::size_t length, std::size_t dim) {
    std::normal_distribution<double> normal(0.0, 1.0);
    RowMatrix pts(static_cast<Eigen::Index>(length), static_cast<Eigen::Index>(dim));
    for (Eigen::Index i = 0; i < pts.rows(); ++i)
        for (Eigen::Index k = 0; k < pts.cols(); ++k) pts(i, k) = normal(rng) * 0.5;
    return Sequence(std::move(pts));
}

double rel_err(double a, double b) { return std::abs(a - b) / std::max(1.0, std::abs(b)); }

}  // namespace

bool run_selftest(std::ostream& out, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    auto pick = [&](std::size_t lo, std::size_t hi) { return std::uniform_int_distribution<std::size_t>(lo, hi)(rng); };
    bool all = true;
    auto report = [&](const std::string& name, bool ok, double worst) {
        out << (ok ? "PASS " : "FAIL ") << name << " (worst " << worst << ")\n";
        all = all && ok;
    };

    {
        double worst = 0.0;
        for (int c = 0; c < 50; ++c) {
            const std::size_t d = pick(1, 3), M = pick(1, 4), D = pick(1, std::min<std::size_t>(3, M));
            const Sequence s = random_sequence(rng, pick(1, 6), d), t = random_sequence(rng, pick(1, 6), d);
            SeqKernelConfig cfg;
            cfg.level = M;
            cfg.order = D;
            cfg.base = c % 2 ? KernelSpec::gaussian(0.7, 1.3) : KernelSpec::linear(0.9);
            const double oracle = seq_kernel_naive(cfg, s, t);
            worst = std::max(worst, rel_err(seq_kernel_dp_high(cfg, s, t), oracle));
            if (D == 1) worst = std::max(worst, rel_err(seq_kernel_dp(cfg, s, t), oracle));
        }
        report("dynamic programmes match enumeration", worst <= 1e-10, worst);
    }
    {
        double worst = 0.0;
        for (int c = 0; c < 50; ++c) {
            const std::size_t d = pick(1, 3);
            SeqKernelConfig cfg;
            cfg.level = pick(1, 4);
            cfg.base = KernelSpec::linear(0.5 + 0.1 * static_cast<double>(c % 5));
            const Sequence s = random_sequence(rng, pick(1, 12), d), t = random_sequence(rng, pick(1, 12), d);
            worst = std::max(worst, rel_err(seq_kernel_lowrank(cfg, s, t), seq_kernel_dp(cfg, s, t)));
        }
        report("low-rank evaluation matches dp", worst <= 1e-8, worst);
    }
    {
        double worst = 0.0;
        std::normal_distribution<double> normal;
        auto rnd = [&](Eigen::Index r, Eigen::Index c) {
            Eigen::MatrixXd m(r, c);
            for (Eigen::Index i = 0; i < m.size(); ++i) m.data()[i] = normal(rng);
            return m;
        };
        for (int c = 0; c < 30; ++c) {
            const auto a = static_cast<Eigen::Index>(pick(1, 12)), b = static_cast<Eigen::Index>(pick(1, 12));
            const auto r1 = static_cast<Eigen::Index>(pick(0, 5));
            const LowRankPair P(rnd(a, r1), rnd(b, r1));
            const auto r2 = static_cast<Eigen::Index>(pick(0, 5));
            LowRankPair Q(rnd(a, r2), rnd(b, r2));
            const Eigen::MatrixXd A = P.densify(), B = Q.densify();
            worst = std::max(worst, (lr_add(P, Q).densify() - (A + B)).cwiseAbs().maxCoeff());
            worst = std::max(worst, (lr_mul(P, Q).densify() - A.cwiseProduct(B)).cwiseAbs().maxCoeff());
            worst = std::max(worst, (lr_shift_cumsum(lr_shift_cumsum(P, Side::row), Side::col).densify() -
                                     strict_cumsum2(A)).cwiseAbs().maxCoeff());
        }
        report("factor algebra matches dense algebra", worst <= 1e-12, worst);
    }
    {
        double worst = 0.0;
        for (int c = 0; c < 20; ++c) {
            const std::size_t d = pick(1, 3), M = pick(2, 4), D = pick(1, M);
            const Sequence a = random_sequence(rng, pick(1, 6), d);
            const Sequence b = cumulative_sum(increments(random_sequence(rng, pick(1, 6), d)),
                                              a.point(a.length() - 1));
            const auto lhs = discrete_signature(concat(a, b), M, D);
            const auto rhs = tensor_mul(discrete_signature(a, M, D), discrete_signature(b, M, D));
            worst = std::max(worst, (lhs - rhs).norm());
            if (D >= 2) worst = std::max(worst, shuffle_defect_level2(lhs));
        }
        report("Chen and shuffle identities", worst <= 1e-12, worst);
    }
    {
        double worst = 0.0;
        std::vector<Sequence> data;
        for (int i = 0; i < 12; ++i) data.push_back(random_sequence(rng, pick(2, 8), 2));
        SeqKernelConfig cfg;
        cfg.level = 3;
        cfg.base = KernelSpec::gaussian(1.0, 1.0);
        const auto g = compute_gram(cfg, data, {}, false, 1);
        const auto rep = psd_report(g.values);
        const double norm2 = Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(g.values).eigenvalues().cwiseAbs().maxCoeff();
        worst = std::max(0.0, -rep.min_eigenvalue / norm2);
        report("sequential Gram is positive semi-definite", rep.min_eigenvalue >= -1e-8 * norm2 && rep.symmetry_defect == 0.0,
               worst);
    }
    return all;
}

}  // namespace seqkern
