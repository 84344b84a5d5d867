// Acceptance suite: one PASS/FAIL line per criterion, nonzero exit on any failure.
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <map>
#include <random>
#include <string>
#include <vector>

#include "seqkern/classify.hpp"
#include "seqkern/gram.hpp"
#include "seqkern/low_rank.hpp"
#include "seqkern/seq_kernel.hpp"
#include "seqkern/tensor_algebra.hpp"
#include "test_util.hpp"

using namespace seqkern;
using Clock = std::chrono::steady_clock;

namespace {

int failures = 0;

void report(const char* name, bool ok, const std::string& detail) {
    std::printf("%s  %-34s %s\n", ok ? "PASS" : "FAIL", name, detail.c_str());
    std::fflush(stdout);
    if (!ok) ++failures;
}

std::string fmt(const char* f, auto... args) {
    char buf[256];
    std::snprintf(buf, sizeof buf, f, args...);
    return buf;
}

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

double max_abs(const Eigen::MatrixXd& m) { return m.size() == 0 ? 0.0 : m.cwiseAbs().maxCoeff(); }

SeqKernelConfig make_config(std::size_t level, std::size_t order, KernelSpec base) {
    SeqKernelConfig cfg;
    cfg.level = level;
    cfg.order = order;
    cfg.base = base;
    return cfg;
}

// Per-call runtime: repeat until at least 0.15 s has elapsed, keep the best of three.
double time_call(const std::function<void()>& f) {
    double best = std::numeric_limits<double>::infinity();
    for (int trial = 0; trial < 3; ++trial) {
        int reps = 0;
        const auto t0 = Clock::now();
        double elapsed = 0.0;
        do {
            f();
            ++reps;
            elapsed = seconds_since(t0);
        } while (elapsed < 0.15);
        best = std::min(best, elapsed / reps);
    }
    return best;
}

// Least-squares slope of log(time) against log(L).
double loglog_slope(const std::vector<double>& L, const std::vector<double>& t) {
    double mx = 0, my = 0;
    for (std::size_t i = 0; i < L.size(); ++i) {
        mx += std::log(L[i]);
        my += std::log(t[i]);
    }
    mx /= static_cast<double>(L.size());
    my /= static_cast<double>(L.size());
    double sxy = 0, sxx = 0;
    for (std::size_t i = 0; i < L.size(); ++i) {
        sxy += (std::log(L[i]) - mx) * (std::log(t[i]) - my);
        sxx += (std::log(L[i]) - mx) * (std::log(L[i]) - mx);
    }
    return sxy / sxx;
}

void oracle_equivalence() {
    std::mt19937_64 rng(101);
    double worst = 0.0;
    const auto t0 = Clock::now();
    for (int c = 0; c < 200; ++c) {
        const std::size_t d = testing::pick(rng, 1, 3), M = testing::pick(rng, 1, 4);
        const auto base = c % 2 ? KernelSpec::gaussian(0.9, 1.3) : KernelSpec::linear(0.8);
        const auto cfg = make_config(M, 1, base);
        const auto s = testing::random_sequence(rng, testing::pick(rng, 1, 8), d);
        const auto t = testing::random_sequence(rng, testing::pick(rng, 1, 8), d);
        worst = std::max(worst, testing::rel_err(seq_kernel_dp(cfg, s, t), seq_kernel_naive(cfg, s, t)));
    }
    const double secs = seconds_since(t0);
    report("dp equals enumeration", worst <= 1e-10 && secs < 5.0,
           fmt("200 cases, worst rel err %.2e, %.3f s", worst, secs));
}

void higher_order() {
    std::mt19937_64 rng(102);
    bool exact = true;
    for (int c = 0; c < 100; ++c) {
        const std::size_t d = testing::pick(rng, 1, 3), M = testing::pick(rng, 1, 4);
        const auto base = c % 2 ? KernelSpec::gaussian(0.7, 1.0) : KernelSpec::linear();
        const auto cfg = make_config(M, 1, base);
        const auto s = testing::random_sequence(rng, testing::pick(rng, 1, 10), d);
        const auto t = testing::random_sequence(rng, testing::pick(rng, 1, 10), d);
        exact = exact && seq_kernel_dp_high(cfg, s, t) == seq_kernel_dp(cfg, s, t);
    }
    double worst = 0.0;
    for (int c = 0; c < 100; ++c) {
        const std::size_t d = testing::pick(rng, 1, 3), M = testing::pick(rng, 1, 4);
        const auto cfg = make_config(M, M, KernelSpec::linear());
        const auto s = testing::random_sequence(rng, testing::pick(rng, 1, 10), d);
        const auto t = testing::random_sequence(rng, testing::pick(rng, 1, 10), d);
        const double want = tensor_inner(exact_pcwlinear_signature(s, M), exact_pcwlinear_signature(t, M));
        worst = std::max(worst, testing::rel_err(seq_kernel_dp_high(cfg, s, t), want));
    }
    report("higher-order dp", exact && worst <= 1e-10,
           fmt("order 1 bitwise equal: %s; order=level vs signatures worst rel err %.2e", exact ? "yes" : "no", worst));
}

void closed_form() {
    const auto one = Sequence::scalar({0, 1});
    const double v = seq_kernel_dp_high(make_config(2, 2, KernelSpec::linear()), one, one);
    report("closed-form value 2.25", std::abs(v - 2.25) <= 1e-14, fmt("value %.17g", v));
}

void low_rank_equivalence() {
    std::mt19937_64 rng(104);
    double worst_pair = 0.0;
    for (int c = 0; c < 100; ++c) {
        const std::size_t d = testing::pick(rng, 1, 3), M = testing::pick(rng, 1, 4);
        const auto cfg = make_config(M, 1, KernelSpec::linear(0.5 + 0.25 * (c % 4)));
        const auto s = testing::random_sequence(rng, testing::pick(rng, 1, 15), d);
        const auto t = testing::random_sequence(rng, testing::pick(rng, 1, 15), d);
        worst_pair = std::max(worst_pair, testing::rel_err(seq_kernel_lowrank(cfg, s, t), seq_kernel_dp(cfg, s, t)));
    }

    std::vector<Sequence> data;
    for (int i = 0; i < 10; ++i) data.push_back(testing::random_sequence(rng, testing::pick(rng, 1, 15), 2));
    const auto cfg = make_config(3, 1, KernelSpec::linear());
    const auto joint = gram_lowrank_joint(cfg, data, 1).gram;
    double worst_joint = 0.0;
    for (std::size_t i = 0; i < data.size(); ++i)
        for (std::size_t j = 0; j < data.size(); ++j)
            worst_joint = std::max(worst_joint, testing::rel_err(joint(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)),
                                                                 seq_kernel_dp(cfg, data[i], data[j])));

    double worst_ops = 0.0;
    for (int c = 0; c < 200; ++c) {
        const auto a = static_cast<Eigen::Index>(testing::pick(rng, 1, 12));
        const auto b = static_cast<Eigen::Index>(testing::pick(rng, 1, 12));
        const auto rp = static_cast<Eigen::Index>(testing::pick(rng, 0, 5));
        const auto rq = static_cast<Eigen::Index>(testing::pick(rng, 0, 5));
        const LowRankPair p(testing::random_matrix(rng, a, rp), testing::random_matrix(rng, b, rp));
        const LowRankPair q(testing::random_matrix(rng, a, rq), testing::random_matrix(rng, b, rq));
        const Eigen::MatrixXd A = p.densify(), B = q.densify();
        worst_ops = std::max(worst_ops, max_abs(lr_add(p, q).densify() - (A + B)));
        worst_ops = std::max(worst_ops, max_abs(lr_mul(p, q).densify() - A.cwiseProduct(B)));
        worst_ops = std::max(worst_ops, max_abs(lr_shift_cumsum(lr_shift_cumsum(p, Side::row), Side::col).densify() -
                                                strict_cumsum2(A)));
        worst_ops = std::max(worst_ops, max_abs(lr_reduce(p, 0.0).densify() - A));
    }
    report("low-rank equivalence", worst_pair <= 1e-8 && worst_joint <= 1e-8 && worst_ops <= 1e-12,
           fmt("pairwise %.2e, joint Gram %.2e, factor ops %.2e", worst_pair, worst_joint, worst_ops));
}

void complexity() {
    const auto t0 = Clock::now();
    std::mt19937_64 rng(105);
    const std::vector<double> lengths{256, 512, 1024, 2048};
    std::vector<double> t_dp, t_lr;
    const auto cfg = make_config(3, 1, KernelSpec::linear());
    for (double L : lengths) {
        const auto s = testing::random_sequence(rng, static_cast<std::size_t>(L), 2);
        const auto t = testing::random_sequence(rng, static_cast<std::size_t>(L), 2);
        double sink = 0.0;
        t_dp.push_back(time_call([&] { sink += seq_kernel_dp(cfg, s, t); }));
        t_lr.push_back(time_call([&] { sink += seq_kernel_lowrank(cfg, s, t); }));
        if (!std::isfinite(sink)) std::printf("(non-finite kernel value)\n");
    }
    const double slope_dp = loglog_slope(lengths, t_dp), slope_lr = loglog_slope(lengths, t_lr);
    const double secs = seconds_since(t0);
    report("runtime scaling", slope_dp >= 1.7 && slope_dp <= 2.3 && slope_lr >= 0.7 && slope_lr <= 1.3 && secs < 120.0,
           fmt("dp slope %.2f, low-rank slope %.2f, %.1f s", slope_dp, slope_lr, secs));
}

void convergence() {
    using Curve = std::function<Eigen::RowVectorXd(double)>;
    const Curve a = [](double t) { return Eigen::RowVector2d(t, t * t).eval(); };
    const Curve b = [](double t) { return Eigen::RowVector2d(t, t * t * t).eval(); };
    const std::size_t M = 3;
    const auto cfg = make_config(M, 1, KernelSpec::linear());
    const auto value = [&](std::size_t n) {
        return seq_kernel_dp(cfg, testing::sample_curve(a, n), testing::sample_curve(b, n));
    };
    const double reference = value(4096);
    const auto sig_ref_a = exact_pcwlinear_signature(testing::sample_curve(a, 4096), M);
    const auto sig_ref_b = exact_pcwlinear_signature(testing::sample_curve(b, 4096), M);

    bool ok = true;
    std::string ratios;
    double prev = 0.0;
    double worst_margin = 0.0;
    for (std::size_t n : {64, 128, 256, 512}) {
        const double err = std::abs(value(n) - reference);
        if (prev > 0.0) {
            const double r = prev / err;
            ok = ok && r >= 1.5 && r <= 2.5;
            ratios += fmt("%s%.2f", ratios.empty() ? "" : ", ", r);
        }
        prev = err;
        for (const auto& [curve, ref] : {std::pair{a, &sig_ref_a}, std::pair{b, &sig_ref_b}}) {
            const auto s = testing::sample_curve(curve, n);
            const double sig_err = (discrete_signature(s, M, 1) - *ref).norm();
            const auto inc = increments(s);
            std::vector<double> segs;
            for (Eigen::Index i = 0; i < inc.rows(); ++i) segs.push_back(inc.row(i).norm());
            const double bound = discretization_error_bound(segs);
            ok = ok && sig_err <= bound;
            worst_margin = std::max(worst_margin, sig_err / bound);
        }
    }
    report("first-order convergence", ok,
           fmt("error ratios %s; signature error / bound at most %.3f", ratios.c_str(), worst_margin));
}

void algebraic_identities() {
    std::mt19937_64 rng(107);
    double chen = 0.0, shuffle = 0.0, defect1 = 0.0;
    for (int c = 0; c < 200; ++c) {
        const std::size_t d = testing::pick(rng, 1, 3), M = testing::pick(rng, 2, 4), D = testing::pick(rng, 1, M);
        const auto s1 = testing::random_sequence(rng, testing::pick(rng, 1, 8), d);
        const auto s2 = cumulative_sum(increments(testing::random_sequence(rng, testing::pick(rng, 1, 8), d)),
                                       s1.point(s1.length() - 1));
        const auto joined = discrete_signature(concat(s1, s2), M, D);
        chen = std::max(chen, (joined - tensor_mul(discrete_signature(s1, M, D), discrete_signature(s2, M, D))).norm());
        if (D >= 2) shuffle = std::max(shuffle, shuffle_defect_level2(joined));
    }
    // Order 1 in one dimension: defect = level1^2 - 2 level2 = sum of squared increments.
    for (int c = 0; c < 100; ++c) {
        const std::size_t L = testing::pick(rng, 1, 10);
        std::vector<double> pts{0.0};
        double sq = 0.0;
        for (std::size_t i = 1; i < L; ++i) {
            const double step = static_cast<double>(static_cast<int>(testing::pick(rng, 0, 6)) - 3);
            pts.push_back(pts.back() + step);
            sq += step * step;
        }
        defect1 = std::max(defect1, std::abs(shuffle_defect_level2(discrete_signature(Sequence::scalar(pts), 2, 1)) - sq));
    }
    report("Chen and shuffle identities", chen <= 1e-12 && shuffle <= 1e-12 && defect1 == 0.0,
           fmt("Chen %.2e, order>=2 shuffle defect %.2e, order-1 defect mismatch %.2e", chen, shuffle, defect1));
}

// Weighted subsequence features: u -> sum over index tuples spelling u of lambda^span.
std::map<std::vector<int>, double> subsequence_features(const std::vector<int>& a, double lambda, std::size_t max_len) {
    std::map<std::vector<int>, double> phi;
    for (const auto& t : enumerate_strict_subtuples(a.size(), max_len)) {
        if (t.size() == 0) continue;
        std::vector<int> u;
        for (auto i : t.indices) u.push_back(a[i]);
        phi[u] += std::pow(lambda, static_cast<double>(t.indices.back() - t.indices.front() + 1));
    }
    return phi;
}

void string_kernels() {
    std::vector<std::vector<int>> strings{{}};
    for (std::size_t begin = 0, len = 1; len <= 6; ++len) {
        const std::size_t end = strings.size();
        for (std::size_t k = begin; k < end; ++k)
            for (int sym = 0; sym < 3; ++sym) {
                auto s = strings[k];
                s.push_back(sym);
                strings.push_back(std::move(s));
            }
        begin = end;
    }
    const std::size_t max_len = 6;
    std::size_t mismatches = 0, pairs = 0;
    for (double lambda : {0.5, 1.0}) {
        std::vector<std::map<std::vector<int>, double>> phi;
        for (const auto& s : strings) phi.push_back(subsequence_features(s, lambda, max_len));
        for (std::size_t i = 0; i < strings.size(); ++i)
            for (std::size_t j = 0; j < strings.size(); ++j) {
                double want = 1.0;
                for (const auto& [u, w] : phi[i]) {
                    const auto it = phi[j].find(u);
                    if (it != phi[j].end()) want += w * it->second;
                }
                mismatches += string_kernel(lambda, strings[i], strings[j], max_len) != want;
                ++pairs;
            }
    }

    std::size_t identity_mismatches = 0, identity_pairs = 0;
    std::vector<Sequence> embedded, symbols;
    for (const auto& s : strings) {
        embedded.push_back(cumulative_one_hot(s, 3));
        symbols.push_back(Sequence::scalar(s.empty() ? std::vector<double>{0.0} : std::vector<double>(s.begin(), s.end())));
    }
    auto indicator = make_config(max_len, 1, KernelSpec::indicator());
    indicator.use_increments = false;
    const auto linear = make_config(max_len, 1, KernelSpec::linear());
    for (std::size_t i = 0; i < strings.size(); ++i)
        for (std::size_t j = 0; j < strings.size(); ++j) {
            const double want = string_kernel(1.0, strings[i], strings[j], max_len);
            identity_mismatches += seq_kernel_dp(linear, embedded[i], embedded[j]) != want;
            if (!strings[i].empty() && !strings[j].empty())
                identity_mismatches += seq_kernel_dp(indicator, symbols[i], symbols[j]) != want;
            ++identity_pairs;
        }
    report("string kernel", mismatches == 0 && identity_mismatches == 0,
           fmt("%zu strings; %zu/%zu brute-force mismatches; %zu/%zu embedding mismatches", strings.size(), mismatches,
               pairs, identity_mismatches, identity_pairs));
}

void positive_semidefinite() {
    std::mt19937_64 rng(109);
    double worst = 0.0;
    int grams = 0;
    for (int round = 0; round < 3; ++round) {
        const std::size_t N = testing::pick(rng, 2, 20);
        std::vector<Sequence> data;
        for (std::size_t i = 0; i < N; ++i) data.push_back(testing::random_sequence(rng, testing::pick(rng, 1, 9), 2));
        for (const auto& base : {KernelSpec::linear(), KernelSpec::gaussian(1.0, 1.0)})
            for (auto algo : {Algorithm::naive, Algorithm::dp, Algorithm::dp_high, Algorithm::lowrank, Algorithm::lowrank_joint}) {
                auto cfg = make_config(3, algo == Algorithm::dp_high ? 2 : 1, base);
                cfg.algorithm = algo;
                for (bool normalize : {false, true}) {
                    const auto g = compute_gram(cfg, data, {}, normalize).values;
                    const Eigen::VectorXd ev = Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(g).eigenvalues();
                    worst = std::max(worst, -ev.minCoeff() / ev.cwiseAbs().maxCoeff());
                    ++grams;
                }
            }
    }
    report("Gram matrices are PSD", worst <= 1e-8, fmt("%d Grams, worst -min eig / |K|_2 = %.2e", grams, worst));
}

void order_information() {
    const Dataset task = testing::reversal_task(100, 2024);
    ExperimentConfig cfg;
    cfg.kernel = KernelKind::gaussian;
    cfg.folds = 5;
    cfg.seed = 7;
    cfg.grid.level = {2};
    const double acc2 = run_experiment(cfg, task)["mean"]["accuracy"].get<double>();
    cfg.grid.level = {1};
    const double acc1 = run_experiment(cfg, task)["mean"]["accuracy"].get<double>();
    report("order information", acc2 >= 0.95 && acc1 <= 0.65,
           fmt("200 samples, 5-fold accuracy: level 2 %.3f, level 1 %.3f", acc2, acc1));
}

}  // namespace

int main() {
    const auto t0 = Clock::now();
    oracle_equivalence();
    higher_order();
    closed_form();
    low_rank_equivalence();
    complexity();
    convergence();
    algebraic_identities();
    string_kernels();
    positive_semidefinite();
    order_information();
    std::printf("%d of 10 criteria failed (%.1f s)\n", failures, seconds_since(t0));
    return failures == 0 ? 0 : 1;
}
