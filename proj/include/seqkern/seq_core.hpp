#ifndef SEQKERN_SEQ_CORE_HPP
#define SEQKERN_SEQ_CORE_HPP

#include <cstddef>
#include <functional>
#include <initializer_list>
#include <optional>
#include <stdexcept>
#include <vector>

#include <Eigen/Dense>

namespace seqkern {

using RowMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

/// Error raised for malformed inputs and violated preconditions.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// An ordered list of L >= 1 points in R^d, optionally time-stamped.
///
/// Points are stored one per row. Timestamps, when present, must be
/// strictly increasing and lie in [0, 1].
class Sequence {
public:
    Sequence() = default;
    explicit Sequence(RowMatrix points, std::optional<std::vector<double>> timestamps = std::nullopt);
    Sequence(std::initializer_list<std::initializer_list<double>> points);

    static Sequence from_rows(const std::vector<std::vector<double>>& rows);
    /// One-dimensional sequence from scalar samples.
    static Sequence scalar(const std::vector<double>& values);

    std::size_t length() const { return static_cast<std::size_t>(points_.rows()); }
    std::size_t dim() const { return static_cast<std::size_t>(points_.cols()); }
    const RowMatrix& points() const { return points_; }
    Eigen::Ref<const Eigen::RowVectorXd> point(std::size_t i) const { return points_.row(static_cast<Eigen::Index>(i)); }
    const std::optional<std::vector<double>>& timestamps() const { return timestamps_; }

    Sequence reversed() const;
    /// Scales every point by c.
    Sequence scaled(double c) const;

private:
    void validate() const;

    RowMatrix points_;
    std::optional<std::vector<double>> timestamps_;
};

/// Joins two sequences sharing an endpoint: the last point of `a` must equal
/// the first point of `b`; the shared point appears once.
Sequence concat(const Sequence& a, const Sequence& b);

/// First differences, one per row; empty (0 x d) for length-1 sequences.
RowMatrix increments(const Sequence& s);

/// Inverse of `increments`: the sequence (origin, v1, v1+v2, ...).
Sequence cumulative_sum(const RowMatrix& steps, const Eigen::RowVectorXd& origin);

/// Sum of Euclidean norms of the increments.
double variation(const Sequence& s);

/// Largest Euclidean increment norm. Throws for sequences without increments.
double mesh(const Sequence& s);

/// A tuple of indices into a sequence of length L.
///
/// Documentation uses 1-based positions; storage is 0-based, so the strict
/// tuple (1, 2) over [2] is stored as {0, 1}.
struct IndexTuple {
    std::vector<std::size_t> indices;

    std::size_t size() const { return indices.size(); }
    bool is_strict() const;
    bool is_monotone() const;
    /// Longest run of a repeated value (0 for the empty tuple).
    std::size_t max_repeat() const;
    /// Product of the factorials of the run lengths; 1 for strict tuples.
    double multiplicity_factorial() const;

    friend bool operator==(const IndexTuple&, const IndexTuple&) = default;
};

/// Visits every strictly increasing tuple over {0..L-1} of length 0..max_len,
/// ordered by length then lexicographically. The empty tuple comes first.
void for_each_strict_subtuple(std::size_t L, std::size_t max_len,
                              const std::function<void(const IndexTuple&)>& visit);

/// Visits every non-decreasing tuple over {0..L-1} of length 0..max_len in
/// which no value repeats more than `max_repeat` times.
void for_each_monotone_subtuple(std::size_t L, std::size_t max_len, std::size_t max_repeat,
                                const std::function<void(const IndexTuple&)>& visit);

std::vector<IndexTuple> enumerate_strict_subtuples(std::size_t L, std::size_t max_len);
std::vector<IndexTuple> enumerate_monotone_subtuples(std::size_t L, std::size_t max_len,
                                                     std::size_t max_repeat);

}  // namespace seqkern

#endif  // SEQKERN_SEQ_CORE_HPP
