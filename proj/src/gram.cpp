#include "seqkern/gram.hpp"

#include <algorithm>
#include <atomic>
#include <bit>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <exception>
#include <fstream>
#include <istream>
#include <mutex>
#include <optional>
#include <ostream>
#include <thread>

#include "seqkern/low_rank.hpp"

namespace seqkern {

nlohmann::json GramMatrix::metadata() const {
    nlohmann::json j;
    j["kernel"] = std::string(to_string(config.base.kind));
    j["gamma"] = config.base.gamma;
    j["theta"] = config.base.theta;
    j["level"] = config.level;
    j["order"] = config.order;
    j["algorithm"] = std::string(to_string(config.algorithm));
    j["use_increments"] = config.use_increments;
    j["normalized"] = normalized;
    j["ids"] = ids;
    return j;
}

double evaluate_pair(const SeqKernelConfig& cfg, const Sequence& s, const Sequence& t) {
    cfg.validate_algorithm();
    switch (cfg.algorithm) {
        case Algorithm::naive: return seq_kernel_naive(cfg, s, t);
        case Algorithm::dp: return seq_kernel_dp(cfg, s, t);
        case Algorithm::dp_high: return seq_kernel_dp_high(cfg, s, t);
        case Algorithm::lowrank:
        case Algorithm::lowrank_joint: return seq_kernel_lowrank(cfg, s, t);
    }
    throw Error("unreachable algorithm");
}

Eigen::MatrixXd normalize_gram(const Eigen::MatrixXd& K) {
    Eigen::MatrixXd out = K;
    const Eigen::Index n = K.rows();
    if (K.cols() != n) throw Error("normalize_gram: matrix must be square");
    for (Eigen::Index i = 0; i < n; ++i)
        if (!(K(i, i) > 0.0)) throw Error("normalize_gram: nonpositive diagonal entry " + std::to_string(i));
    for (Eigen::Index i = 0; i < n; ++i)
        for (Eigen::Index j = 0; j < n; ++j)
            out(i, j) = i == j ? 1.0 : K(i, j) / std::sqrt(K(i, i) * K(j, j));
    return out;
}

GramMatrix compute_gram(const SeqKernelConfig& cfg, std::span<const Sequence> data, std::vector<std::string> ids,
                        bool normalize, unsigned threads) {
    cfg.validate_algorithm();
    const std::size_t N = data.size();
    if (ids.empty())
        for (std::size_t i = 0; i < N; ++i) ids.push_back(std::to_string(i));
    if (ids.size() != N) throw Error("id count does not match sample count");

    GramMatrix g;
    g.config = cfg;
    g.normalized = normalize;
    g.ids = std::move(ids);
    g.values = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(N), static_cast<Eigen::Index>(N));
    if (N == 0) return g;

    if (cfg.algorithm == Algorithm::lowrank_joint) {
        const std::size_t landmarks = cfg.lowrank.landmarks == 0 ? std::numeric_limits<std::size_t>::max()
                                                                 : cfg.lowrank.landmarks;
        g.values = gram_lowrank_joint(cfg, data, landmarks).gram;
    } else {
        // Per-pair low-rank shares one Nystrom map across the dataset.
        std::optional<NystromMap> map;
        if (cfg.algorithm == Algorithm::lowrank && cfg.base.kind != KernelKind::linear)
            map.emplace(NystromMap::fit(cfg.base, data, cfg.lowrank.landmarks, cfg.lowrank.seed));
        std::vector<Eigen::MatrixXd> factors;
        if (cfg.algorithm == Algorithm::lowrank) {
            factors.reserve(N);
            for (const auto& s : data) factors.push_back(base_factor(cfg, s, map ? &*map : nullptr));
        }

        auto entry = [&](std::size_t i, std::size_t j) {
            if (cfg.algorithm == Algorithm::lowrank) return seq_kernel_lowrank(cfg, {factors[i], factors[j]});
            return evaluate_pair(cfg, data[i], data[j]);
        };

        std::atomic<std::size_t> next_row{0};
        std::exception_ptr failure;
        std::mutex failure_mutex;
        auto worker = [&]() {
            for (std::size_t i = next_row++; i < N; i = next_row++) {
                for (std::size_t j = i; j < N; ++j) {
                    try {
                        const double v = entry(i, j);
                        g.values(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = v;
                    } catch (const std::exception& e) {
                        std::lock_guard lock(failure_mutex);
                        if (!failure)
                            failure = std::make_exception_ptr(
                                Error("samples '" + g.ids[i] + "' and '" + g.ids[j] + "': " + e.what()));
                        return;
                    }
                }
            }
        };
        const unsigned hw = std::max(1u, std::thread::hardware_concurrency());
        const unsigned count = std::min<unsigned>(threads == 0 ? hw : threads, static_cast<unsigned>(N));
        if (count <= 1) {
            worker();
        } else {
            std::vector<std::jthread> pool;
            for (unsigned k = 0; k < count; ++k) pool.emplace_back(worker);
        }
        if (failure) std::rethrow_exception(failure);
        for (Eigen::Index i = 0; i < g.values.rows(); ++i)
            for (Eigen::Index j = 0; j < i; ++j) g.values(i, j) = g.values(j, i);
    }

    if (normalize) g.values = normalize_gram(g.values);
    return g;
}

PsdReport psd_report(const Eigen::MatrixXd& K) {
    if (K.rows() != K.cols()) throw Error("psd_report: matrix must be square");
    PsdReport r;
    if (K.size() == 0) return r;
    r.symmetry_defect = (K - K.transpose()).cwiseAbs().maxCoeff();
    const Eigen::MatrixXd S = 0.5 * (K + K.transpose());
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(S, Eigen::EigenvaluesOnly);
    r.min_eigenvalue = eig.eigenvalues().minCoeff();
    return r;
}

namespace {

std::string format_g17(double v) {
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof(buf), v, std::chars_format::general, 17);
    return std::string(buf, res.ptr);
}

template <typename T>
void write_le(std::ostream& out, T value) {
    static_assert(std::is_trivially_copyable_v<T>);
    unsigned char bytes[sizeof(T)];
    std::memcpy(bytes, &value, sizeof(T));
    if constexpr (std::endian::native == std::endian::big) std::reverse(bytes, bytes + sizeof(T));
    out.write(reinterpret_cast<const char*>(bytes), sizeof(T));
}

template <typename T>
T read_le(std::istream& in) {
    unsigned char bytes[sizeof(T)];
    if (!in.read(reinterpret_cast<char*>(bytes), sizeof(T))) throw Error("truncated Gram file");
    if constexpr (std::endian::native == std::endian::big) std::reverse(bytes, bytes + sizeof(T));
    T value;
    std::memcpy(&value, bytes, sizeof(T));
    return value;
}

constexpr char kMagic[5] = {'S', 'E', 'Q', 'K', '1'};

}  // namespace

void write_gram_csv(std::ostream& out, const GramMatrix& g) {
    for (std::size_t i = 0; i < g.ids.size(); ++i) out << (i ? "," : "") << g.ids[i];
    out << '\n';
    for (Eigen::Index i = 0; i < g.values.rows(); ++i) {
        for (Eigen::Index j = 0; j < g.values.cols(); ++j) out << (j ? "," : "") << format_g17(g.values(i, j));
        out << '\n';
    }
}

void write_gram_binary(std::ostream& out, const GramMatrix& g) {
    out.write(kMagic, sizeof(kMagic));
    write_le<std::uint32_t>(out, static_cast<std::uint32_t>(g.values.rows()));
    for (Eigen::Index i = 0; i < g.values.rows(); ++i)
        for (Eigen::Index j = 0; j < g.values.cols(); ++j) write_le<double>(out, g.values(i, j));
    out << g.metadata().dump();
}

GramFile read_gram_binary(std::istream& in) {
    char magic[5];
    if (!in.read(magic, sizeof(magic)) || std::memcmp(magic, kMagic, sizeof(kMagic)) != 0)
        throw Error("not a SEQK1 Gram file");
    const auto n = static_cast<Eigen::Index>(read_le<std::uint32_t>(in));
    GramFile f;
    f.values.resize(n, n);
    for (Eigen::Index i = 0; i < n; ++i)
        for (Eigen::Index j = 0; j < n; ++j) f.values(i, j) = read_le<double>(in);
    std::string rest((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    try {
        f.metadata = rest.empty() ? nlohmann::json::object() : nlohmann::json::parse(rest);
    } catch (const nlohmann::json::exception& e) {
        throw Error(std::string("malformed Gram metadata: ") + e.what());
    }
    return f;
}

void save_gram(const std::filesystem::path& path, const GramMatrix& g, bool binary) {
    std::ofstream out(path, binary ? std::ios::binary : std::ios::out);
    if (!out) throw Error("cannot open '" + path.string() + "' for writing");
    if (binary)
        write_gram_binary(out, g);
    else
        write_gram_csv(out, g);
    if (!out) throw Error("failed writing '" + path.string() + "'");
}

}  // namespace seqkern
