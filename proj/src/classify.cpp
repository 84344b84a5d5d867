#include "seqkern/classify.hpp"

#include <algorithm>
#include <map>
#include <numeric>
#include <random>

#include "seqkern/gram.hpp"

namespace seqkern {

std::vector<int> kernel_ridge_classify(const Eigen::MatrixXd& train_gram, std::span<const int> train_labels,
                                       int num_classes, const Eigen::MatrixXd& cross_gram, double reg) {
    const Eigen::Index n = train_gram.rows();
    if (train_gram.cols() != n) throw Error("train Gram must be square");
    if (static_cast<Eigen::Index>(train_labels.size()) != n) throw Error("label count does not match train Gram");
    if (cross_gram.cols() != n) throw Error("cross Gram must have one column per training sample");
    if (!(reg > 0.0)) throw Error("regularization must be > 0");
    if (num_classes < 1) throw Error("need at least one class");

    Eigen::MatrixXd Y = -Eigen::MatrixXd::Ones(n, num_classes);
    for (Eigen::Index i = 0; i < n; ++i) {
        const int c = train_labels[static_cast<std::size_t>(i)];
        if (c < 0 || c >= num_classes) throw Error("label index out of range");
        Y(i, c) = 1.0;
    }
    const Eigen::MatrixXd system = train_gram + reg * Eigen::MatrixXd::Identity(n, n);
    // Unpenalized per-class intercept: as reg grows, alpha -> 0 and the
    // scores fall back to the class balance of the training labels.
    const auto ldlt = system.ldlt();
    const Eigen::MatrixXd a = ldlt.solve(Y);
    const Eigen::VectorXd o = ldlt.solve(Eigen::VectorXd::Ones(n));
    const Eigen::RowVectorXd b = a.colwise().sum() / o.sum();
    const Eigen::MatrixXd alpha = a - o * b;
    const Eigen::MatrixXd scores = (cross_gram * alpha).rowwise() + b;

    std::vector<int> out(static_cast<std::size_t>(scores.rows()));
    for (Eigen::Index i = 0; i < scores.rows(); ++i) {
        int best = 0;
        for (int c = 1; c < num_classes; ++c)
            if (scores(i, c) > scores(i, best)) best = c;
        out[static_cast<std::size_t>(i)] = best;
    }
    return out;
}

Metrics classification_metrics(std::span<const int> truth, std::span<const int> predicted, int num_classes) {
    if (truth.size() != predicted.size()) throw Error("prediction count mismatch");
    Metrics m;
    if (truth.empty()) return m;
    std::size_t correct = 0;
    for (std::size_t i = 0; i < truth.size(); ++i) correct += truth[i] == predicted[i];
    m.accuracy = static_cast<double>(correct) / static_cast<double>(truth.size());

    for (int c = 0; c < num_classes; ++c) {
        double tp = 0, fp = 0, fn = 0;
        for (std::size_t i = 0; i < truth.size(); ++i) {
            tp += truth[i] == c && predicted[i] == c;
            fp += truth[i] != c && predicted[i] == c;
            fn += truth[i] == c && predicted[i] != c;
        }
        const double p = tp + fp > 0 ? tp / (tp + fp) : 0.0;
        const double r = tp + fn > 0 ? tp / (tp + fn) : 0.0;
        m.precision += p;
        m.recall += r;
        m.f1 += p + r > 0 ? 2 * p * r / (p + r) : 0.0;
    }
    m.precision /= num_classes;
    m.recall /= num_classes;
    m.f1 /= num_classes;
    return m;
}

std::vector<int> stratified_folds(std::span<const int> labels, int folds, std::uint64_t seed) {
    if (folds < 1) throw Error("fold count must be >= 1");
    std::map<int, std::vector<std::size_t>> by_class;
    for (std::size_t i = 0; i < labels.size(); ++i) by_class[labels[i]].push_back(i);
    std::mt19937_64 rng(seed);
    std::vector<int> out(labels.size(), 0);
    std::size_t dealt = 0;
    for (auto& [label, members] : by_class) {
        std::shuffle(members.begin(), members.end(), rng);
        for (std::size_t idx : members) out[idx] = static_cast<int>(dealt++ % static_cast<std::size_t>(folds));
    }
    return out;
}

ExperimentConfig ExperimentConfig::from_json(const nlohmann::json& j) {
    ExperimentConfig c;
    static const std::vector<std::string> known{"input", "format",  "output", "kernel",      "algo",   "order",
                                                "use_increments", "normalize", "folds", "inner_folds", "seed",
                                                "permute_labels", "grid", "landmarks", "rank_cap", "rank_tol"};
    for (const auto& [key, value] : j.items())
        if (std::find(known.begin(), known.end(), key) == known.end())
            throw Error("unknown experiment config key '" + key + "'");
    try {
        if (j.contains("kernel")) c.kernel = parse_kernel_kind(j["kernel"].get<std::string>());
        if (j.contains("algo")) c.algorithm = parse_algorithm(j["algo"].get<std::string>());
        if (j.contains("order")) c.order = j["order"].get<std::size_t>();
        if (j.contains("use_increments")) c.use_increments = j["use_increments"].get<bool>();
        if (j.contains("normalize")) c.normalize = j["normalize"].get<bool>();
        if (j.contains("folds")) c.folds = j["folds"].get<int>();
        if (j.contains("inner_folds")) c.inner_folds = j["inner_folds"].get<int>();
        if (j.contains("seed")) c.seed = j["seed"].get<std::uint64_t>();
        if (j.contains("permute_labels")) c.permute_labels = j["permute_labels"].get<bool>();
        if (j.contains("landmarks")) c.lowrank.landmarks = j["landmarks"].get<std::size_t>();
        if (j.contains("rank_cap")) c.lowrank.rank_cap = j["rank_cap"].get<std::size_t>();
        if (j.contains("rank_tol")) c.lowrank.rank_tol = j["rank_tol"].get<double>();
        if (j.contains("grid")) {
            const auto& g = j["grid"];
            if (g.contains("gamma")) c.grid.gamma = g["gamma"].get<std::vector<double>>();
            if (g.contains("theta")) c.grid.theta = g["theta"].get<std::vector<double>>();
            if (g.contains("level")) c.grid.level = g["level"].get<std::vector<std::size_t>>();
            if (g.contains("reg")) c.grid.reg = g["reg"].get<std::vector<double>>();
        }
    } catch (const nlohmann::json::exception& e) {
        throw Error(std::string("invalid experiment config: ") + e.what());
    }
    c.lowrank.seed = c.seed;
    return c;
}

namespace {

struct Candidate {
    double gamma;
    double theta;
    std::size_t level;
    Eigen::MatrixXd gram;
};

Eigen::MatrixXd submatrix(const Eigen::MatrixXd& K, std::span<const std::size_t> rows, std::span<const std::size_t> cols) {
    Eigen::MatrixXd out(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(cols.size()));
    for (std::size_t i = 0; i < rows.size(); ++i)
        for (std::size_t j = 0; j < cols.size(); ++j)
            out(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) =
                K(static_cast<Eigen::Index>(rows[i]), static_cast<Eigen::Index>(cols[j]));
    return out;
}

std::vector<int> gather(std::span<const int> v, std::span<const std::size_t> idx) {
    std::vector<int> out;
    out.reserve(idx.size());
    for (std::size_t i : idx) out.push_back(v[i]);
    return out;
}

double fit_accuracy(const Eigen::MatrixXd& K, std::span<const int> labels, int num_classes,
                    std::span<const std::size_t> train, std::span<const std::size_t> test, double reg) {
    const auto y_train = gather(labels, train);
    const auto pred = kernel_ridge_classify(submatrix(K, train, train), y_train, num_classes,
                                            submatrix(K, test, train), reg);
    std::size_t correct = 0;
    for (std::size_t i = 0; i < test.size(); ++i) correct += pred[i] == labels[test[i]];
    return test.empty() ? 0.0 : static_cast<double>(correct) / static_cast<double>(test.size());
}

nlohmann::json metrics_json(const Metrics& m) {
    return {{"accuracy", m.accuracy}, {"precision", m.precision}, {"recall", m.recall}, {"f1", m.f1}};
}

}  // namespace

nlohmann::json run_experiment(const ExperimentConfig& cfg, const Dataset& data) {
    const std::size_t N = data.size();
    if (cfg.folds < 2) throw Error("experiment needs at least 2 folds");
    if (N < static_cast<std::size_t>(cfg.folds)) throw Error("fewer samples than folds");
    if (cfg.grid.reg.empty() || cfg.grid.level.empty()) throw Error("tuning grid must list levels and reg values");

    std::vector<std::string> names;
    for (const auto& s : data.samples) {
        if (!s.label) throw Error("sample '" + s.id + "' has no label");
        names.push_back(*s.label);
    }
    std::vector<std::string> classes = names;
    std::sort(classes.begin(), classes.end());
    classes.erase(std::unique(classes.begin(), classes.end()), classes.end());
    std::vector<int> labels;
    for (const auto& n : names)
        labels.push_back(static_cast<int>(std::lower_bound(classes.begin(), classes.end(), n) - classes.begin()));
    if (cfg.permute_labels) {
        std::mt19937_64 rng(cfg.seed ^ 0x9e3779b97f4a7c15ULL);
        std::shuffle(labels.begin(), labels.end(), rng);
    }
    const int num_classes = static_cast<int>(classes.size());

    nlohmann::json report;
    report["n_samples"] = N;
    report["classes"] = classes;
    report["folds"] = nlohmann::json::array();
    report["warnings"] = nlohmann::json::array();

    if (num_classes == 1) {
        report["warnings"].push_back("degenerate: single-class dataset, every prediction is trivially correct");
        report["mean"] = metrics_json({1.0, 1.0, 1.0, 1.0});
        return report;
    }

    // Kernel values do not depend on the folds: one Gram per kernel setting.
    const std::vector<double> gammas = cfg.kernel == KernelKind::indicator ? std::vector<double>{1.0} : cfg.grid.gamma;
    const std::vector<double> thetas = cfg.kernel == KernelKind::gaussian ? cfg.grid.theta : std::vector<double>{1.0};
    const auto sequences = data.sequences();
    std::vector<Candidate> candidates;
    for (double gamma : gammas)
        for (double theta : thetas)
            for (std::size_t level : cfg.grid.level) {
                if (level < cfg.order) continue;
                SeqKernelConfig kc;
                kc.level = level;
                kc.order = cfg.order;
                kc.base.kind = cfg.kernel;
                kc.base.gamma = gamma;
                kc.base.theta = theta;
                kc.use_increments = cfg.use_increments;
                kc.algorithm = cfg.algorithm;
                kc.lowrank = cfg.lowrank;
                candidates.push_back({gamma, theta, level, compute_gram(kc, sequences, data.ids(), cfg.normalize).values});
            }
    if (candidates.empty()) throw Error("tuning grid has no level >= order");

    const auto outer = stratified_folds(labels, cfg.folds, cfg.seed);
    Metrics mean;
    for (int f = 0; f < cfg.folds; ++f) {
        std::vector<std::size_t> train, test;
        for (std::size_t i = 0; i < N; ++i) (outer[i] == f ? test : train).push_back(i);

        const auto train_labels = gather(labels, train);
        const int inner_k = std::max(2, std::min<int>(cfg.inner_folds, static_cast<int>(train.size())));
        const auto inner = stratified_folds(train_labels, inner_k, cfg.seed + static_cast<std::uint64_t>(f) + 1);

        std::size_t best_c = 0;
        double best_reg = cfg.grid.reg.front();
        double best_score = -1.0;
        for (std::size_t c = 0; c < candidates.size(); ++c)
            for (double reg : cfg.grid.reg) {
                double score = 0.0;
                for (int g = 0; g < inner_k; ++g) {
                    std::vector<std::size_t> itrain, itest;
                    for (std::size_t k = 0; k < train.size(); ++k) (inner[k] == g ? itest : itrain).push_back(train[k]);
                    score += fit_accuracy(candidates[c].gram, labels, num_classes, itrain, itest, reg);
                }
                score /= inner_k;
                if (score > best_score) {
                    best_score = score;
                    best_c = c;
                    best_reg = reg;
                }
            }

        const auto& K = candidates[best_c].gram;
        const auto pred = kernel_ridge_classify(submatrix(K, train, train), train_labels, num_classes,
                                                submatrix(K, test, train), best_reg);
        const auto truth = gather(labels, test);
        const Metrics m = classification_metrics(truth, pred, num_classes);
        mean.accuracy += m.accuracy / cfg.folds;
        mean.precision += m.precision / cfg.folds;
        mean.recall += m.recall / cfg.folds;
        mean.f1 += m.f1 / cfg.folds;

        nlohmann::json fj = metrics_json(m);
        fj["fold"] = f;
        fj["n_test"] = test.size();
        fj["inner_accuracy"] = best_score;
        fj["selected"] = {{"gamma", candidates[best_c].gamma},
                          {"theta", candidates[best_c].theta},
                          {"level", candidates[best_c].level},
                          {"reg", best_reg}};
        report["folds"].push_back(std::move(fj));
    }
    report["mean"] = metrics_json(mean);
    return report;
}

}  // namespace seqkern
