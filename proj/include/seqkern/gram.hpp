#ifndef SEQKERN_GRAM_HPP
#define SEQKERN_GRAM_HPP

#include <filesystem>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "seqkern/seq_kernel.hpp"

namespace seqkern {

/// Symmetric N x N matrix of sequential kernel values plus provenance.
struct GramMatrix {
    Eigen::MatrixXd values;
    SeqKernelConfig config;
    bool normalized = false;
    std::vector<std::string> ids;

    Eigen::Index size() const { return values.rows(); }
    nlohmann::json metadata() const;
};

/// Evaluates one kernel value with the algorithm named in `cfg`.
/// lowrank and lowrank-joint fall back to per-pair factorizations.
double evaluate_pair(const SeqKernelConfig& cfg, const Sequence& s, const Sequence& t);

/// Upper triangle evaluated (rows spread over worker threads), then
/// mirrored. With `normalize`, entries become K_ij / sqrt(K_ii K_jj) and the
/// diagonal is set to exactly 1. Evaluation errors are rethrown naming the
/// offending sample ids.
GramMatrix compute_gram(const SeqKernelConfig& cfg, std::span<const Sequence> data,
                        std::vector<std::string> ids, bool normalize, unsigned threads = 0);

/// K_ij / sqrt(K_ii K_jj), diagonal pinned to 1.
Eigen::MatrixXd normalize_gram(const Eigen::MatrixXd& K);

struct PsdReport {
    double min_eigenvalue = 0.0;
    double symmetry_defect = 0.0;
};

/// Smallest eigenvalue of (K + K^T)/2 and max |K - K^T|.
PsdReport psd_report(const Eigen::MatrixXd& K);

/// Header row of ids, then N rows of `%.17g` floats (locale independent).
void write_gram_csv(std::ostream& out, const GramMatrix& g);

/// Magic "SEQK1", u32 N, N*N little-endian f64 row-major, then the UTF-8
/// JSON metadata block running to end of file.
void write_gram_binary(std::ostream& out, const GramMatrix& g);

struct GramFile {
    Eigen::MatrixXd values;
    nlohmann::json metadata;
};

GramFile read_gram_binary(std::istream& in);

void save_gram(const std::filesystem::path& path, const GramMatrix& g, bool binary);

}  // namespace seqkern

#endif  // SEQKERN_GRAM_HPP
