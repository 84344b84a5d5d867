#ifndef SEQKERN_CLASSIFY_HPP
#define SEQKERN_CLASSIFY_HPP

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "seqkern/dataset.hpp"
#include "seqkern/seq_kernel.hpp"

namespace seqkern {

/// One-vs-rest kernel ridge with an unpenalized intercept per class: fits
/// y_c ~ K alpha_c + b_c with +-1 targets and penalty reg alpha^T K alpha,
/// then predicts argmax_c (cross * alpha_c + b_c), ties going to the lowest
/// class index. Large reg predicts the majority training class.
std::vector<int> kernel_ridge_classify(const Eigen::MatrixXd& train_gram, std::span<const int> train_labels,
                                       int num_classes, const Eigen::MatrixXd& cross_gram, double reg);

struct Metrics {
    double accuracy = 0.0;
    double precision = 0.0;
    double recall = 0.0;
    double f1 = 0.0;
};

/// Accuracy plus precision, recall and F1 averaged with equal class weights.
Metrics classification_metrics(std::span<const int> truth, std::span<const int> predicted, int num_classes);

/// Stratified fold assignment: each class is shuffled with `seed` and dealt
/// round-robin. Returns the fold index of every sample.
std::vector<int> stratified_folds(std::span<const int> labels, int folds, std::uint64_t seed);

struct TuningGrid {
    std::vector<double> gamma{0.01, 0.1, 1.0};
    std::vector<double> theta{0.01, 0.1, 1.0};
    std::vector<std::size_t> level{1, 2, 3};
    std::vector<double> reg{0.1, 1.0, 10.0, 100.0, 1000.0};
};

struct ExperimentConfig {
    KernelKind kernel = KernelKind::gaussian;
    Algorithm algorithm = Algorithm::dp;
    std::size_t order = 1;
    bool use_increments = true;
    bool normalize = true;
    int folds = 5;
    int inner_folds = 3;
    std::uint64_t seed = 0;
    /// Shuffles labels before the run (permutation control).
    bool permute_labels = false;
    TuningGrid grid;
    LowRankOptions lowrank;

    /// Reads the keys of an experiment config file; unknown keys are an error.
    /// Dataset location keys ("input", "format", "output") are left to the caller.
    static ExperimentConfig from_json(const nlohmann::json& j);
};

/// Nested cross-validation: outer stratified folds, inner grid search over
/// {gamma, theta, level, reg} by mean inner accuracy (first grid point wins
/// ties). Reports per-fold and mean accuracy/precision/recall/F1, macro
/// averaged over classes and folds.
nlohmann::json run_experiment(const ExperimentConfig& cfg, const Dataset& data);

}  // namespace seqkern

#endif  // SEQKERN_CLASSIFY_HPP
