#include "seqkern/seq_core.hpp"

#include <cmath>
#include <string>

namespace seqkern {

Sequence::Sequence(RowMatrix points, std::optional<std::vector<double>> timestamps)
    : points_(std::move(points)), timestamps_(std::move(timestamps)) {
    validate();
}

Sequence::Sequence(std::initializer_list<std::initializer_list<double>> points) {
    std::vector<std::vector<double>> rows;
    for (const auto& p : points) rows.emplace_back(p);
    *this = from_rows(rows);
}

Sequence Sequence::from_rows(const std::vector<std::vector<double>>& rows) {
    if (rows.empty()) throw Error("sequence must contain at least one point");
    const std::size_t d = rows.front().size();
    RowMatrix pts(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(d));
    for (std::size_t i = 0; i < rows.size(); ++i) {
        if (rows[i].size() != d)
            throw Error("point " + std::to_string(i) + " has dimension " + std::to_string(rows[i].size()) +
                        ", expected " + std::to_string(d));
        for (std::size_t k = 0; k < d; ++k)
            pts(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(k)) = rows[i][k];
    }
    return Sequence(std::move(pts));
}

Sequence Sequence::scalar(const std::vector<double>& values) {
    RowMatrix pts(static_cast<Eigen::Index>(values.size()), 1);
    for (std::size_t i = 0; i < values.size(); ++i) pts(static_cast<Eigen::Index>(i), 0) = values[i];
    return Sequence(std::move(pts));
}

void Sequence::validate() const {
    if (points_.rows() < 1) throw Error("sequence must contain at least one point");
    if (points_.cols() < 1) throw Error("points must have dimension >= 1");
    if (timestamps_) {
        const auto& ts = *timestamps_;
        if (ts.size() != length()) throw Error("timestamp count does not match sequence length");
        for (std::size_t i = 0; i < ts.size(); ++i) {
            if (!(ts[i] >= 0.0 && ts[i] <= 1.0)) throw Error("timestamps must lie in [0,1]");
            if (i > 0 && !(ts[i] > ts[i - 1])) throw Error("timestamps must be strictly increasing");
        }
    }
}

Sequence Sequence::reversed() const {
    RowMatrix rev = points_.colwise().reverse();
    std::optional<std::vector<double>> ts;
    if (timestamps_) {
        std::vector<double> r(timestamps_->size());
        for (std::size_t i = 0; i < r.size(); ++i) r[i] = 1.0 - (*timestamps_)[r.size() - 1 - i];
        ts = std::move(r);
    }
    return Sequence(std::move(rev), std::move(ts));
}

Sequence Sequence::scaled(double c) const { return Sequence(RowMatrix(points_ * c), timestamps_); }

Sequence concat(const Sequence& a, const Sequence& b) {
    if (a.dim() != b.dim()) throw Error("concat: dimension mismatch");
    if (a.point(a.length() - 1) != b.point(0)) throw Error("concat: sequences must share the joining point");
    RowMatrix pts(static_cast<Eigen::Index>(a.length() + b.length() - 1), static_cast<Eigen::Index>(a.dim()));
    pts.topRows(a.points().rows()) = a.points();
    pts.bottomRows(b.points().rows() - 1) = b.points().bottomRows(b.points().rows() - 1);
    return Sequence(std::move(pts));
}

RowMatrix increments(const Sequence& s) {
    const auto n = static_cast<Eigen::Index>(s.length()) - 1;
    const auto& p = s.points();
    if (n <= 0) return RowMatrix(0, p.cols());
    return p.bottomRows(n) - p.topRows(n);
}

Sequence cumulative_sum(const RowMatrix& steps, const Eigen::RowVectorXd& origin) {
    if (steps.rows() > 0 && steps.cols() != origin.size()) throw Error("cumulative_sum: dimension mismatch");
    RowMatrix pts(steps.rows() + 1, origin.size());
    pts.row(0) = origin;
    for (Eigen::Index i = 0; i < steps.rows(); ++i) pts.row(i + 1) = pts.row(i) + steps.row(i);
    return Sequence(std::move(pts));
}

double variation(const Sequence& s) {
    const RowMatrix inc = increments(s);
    double total = 0.0;
    for (Eigen::Index i = 0; i < inc.rows(); ++i) total += inc.row(i).norm();
    return total;
}

double mesh(const Sequence& s) {
    if (s.length() < 2) throw Error("no increments");
    const RowMatrix inc = increments(s);
    double m = 0.0;
    for (Eigen::Index i = 0; i < inc.rows(); ++i) m = std::max(m, inc.row(i).norm());
    return m;
}

bool IndexTuple::is_strict() const {
    for (std::size_t k = 1; k < indices.size(); ++k)
        if (indices[k] <= indices[k - 1]) return false;
    return true;
}

bool IndexTuple::is_monotone() const {
    for (std::size_t k = 1; k < indices.size(); ++k)
        if (indices[k] < indices[k - 1]) return false;
    return true;
}

std::size_t IndexTuple::max_repeat() const {
    std::size_t best = 0, run = 0;
    for (std::size_t k = 0; k < indices.size(); ++k) {
        run = (k > 0 && indices[k] == indices[k - 1]) ? run + 1 : 1;
        best = std::max(best, run);
    }
    return best;
}

double IndexTuple::multiplicity_factorial() const {
    double f = 1.0;
    std::size_t run = 0;
    for (std::size_t k = 0; k < indices.size(); ++k) {
        run = (k > 0 && indices[k] == indices[k - 1]) ? run + 1 : 1;
        f *= static_cast<double>(run);
    }
    return f;
}

namespace {

// Extends `cur` to exactly `target` entries, each >= `from` (or > when the
// previous entry has exhausted its repeat budget).
void monotone_fill(std::size_t L, std::size_t target, std::size_t max_repeat, std::size_t run,
                   IndexTuple& cur, const std::function<void(const IndexTuple&)>& visit) {
    if (cur.indices.size() == target) {
        visit(cur);
        return;
    }
    const bool has_prev = !cur.indices.empty();
    const std::size_t prev = has_prev ? cur.indices.back() : 0;
    for (std::size_t v = prev; v < L; ++v) {
        const bool repeat = has_prev && v == prev;
        if (repeat && run >= max_repeat) continue;
        cur.indices.push_back(v);
        monotone_fill(L, target, max_repeat, repeat ? run + 1 : 1, cur, visit);
        cur.indices.pop_back();
    }
}

}  // namespace

void for_each_monotone_subtuple(std::size_t L, std::size_t max_len, std::size_t max_repeat,
                                const std::function<void(const IndexTuple&)>& visit) {
    if (max_repeat < 1) throw Error("max_repeat must be >= 1");
    IndexTuple cur;
    for (std::size_t len = 0; len <= max_len; ++len) {
        if (len > 0 && L == 0) break;
        if (len > L * max_repeat) break;
        monotone_fill(L, len, max_repeat, 0, cur, visit);
    }
}

void for_each_strict_subtuple(std::size_t L, std::size_t max_len,
                              const std::function<void(const IndexTuple&)>& visit) {
    for_each_monotone_subtuple(L, max_len, 1, visit);
}

std::vector<IndexTuple> enumerate_strict_subtuples(std::size_t L, std::size_t max_len) {
    std::vector<IndexTuple> out;
    for_each_strict_subtuple(L, max_len, [&](const IndexTuple& t) { out.push_back(t); });
    return out;
}

std::vector<IndexTuple> enumerate_monotone_subtuples(std::size_t L, std::size_t max_len, std::size_t max_repeat) {
    std::vector<IndexTuple> out;
    for_each_monotone_subtuple(L, max_len, max_repeat, [&](const IndexTuple& t) { out.push_back(t); });
    return out;
}

}  // namespace seqkern
