#pragma once

// Domain types shared by every module.
//
// Indexing convention: observations are x_1..x_n. A candidate changepoint
// t in {1..n-1} means x_1..x_t are pre-change and x_{t+1}..x_n post-change.
// Storage is 0-based, so candidate t splits values[0, t) | values[t, n).

#include <cstddef>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace conch {

using Index = std::size_t;

enum class SeriesKind { raw, logit };

std::string to_string(SeriesKind kind);

/// Thrown when full enumeration of a split-permutation group would exceed
/// the configured cap.
class GroupTooLarge : public std::length_error {
public:
    using std::length_error::length_error;
};

/// Ordered observations, immutable after construction. Entries are either
/// raw scalar observations or precomputed classifier log-odds.
class Series {
public:
    Series() = default;
    explicit Series(std::vector<double> values, SeriesKind kind = SeriesKind::raw);

    std::size_t size() const noexcept { return values_.size(); }
    std::span<const double> values() const noexcept { return values_; }
    SeriesKind kind() const noexcept { return kind_; }

    /// 1-based access.
    double at(Index i) const;

    /// Number of candidate changepoints, n - 1.
    std::size_t candidates() const noexcept { return values_.size() - 1; }

    friend bool operator==(const Series&, const Series&) = default;

private:
    std::vector<double> values_;
    SeriesKind kind_ = SeriesKind::raw;
};

/// Entry i of the result is entry n-i+1 of the input.
Series reverse_series(const Series& s);

/// Throws std::out_of_range unless 1 <= t <= n-1.
void check_candidate(std::size_t n, Index t);

/// One conformal p-value per candidate t = 1..n-1.
class PValueVector {
public:
    PValueVector() = default;
    explicit PValueVector(std::vector<double> values);

    std::size_t size() const noexcept { return values_.size(); }
    /// p-value of candidate t (1-based).
    double at(Index t) const;
    std::span<const double> values() const noexcept { return values_; }

    friend bool operator==(const PValueVector&, const PValueVector&) = default;

private:
    std::vector<double> values_;
};

/// Inclusive run of consecutive candidate indices.
struct IndexRun {
    Index first = 0;
    Index last = 0;
    friend bool operator==(const IndexRun&, const IndexRun&) = default;
};

/// The candidates whose p-value strictly exceeds alpha.
class ConfidenceSet {
public:
    ConfidenceSet() = default;
    ConfidenceSet(std::vector<Index> indices, double alpha);

    static ConfidenceSet from_pvalues(const PValueVector& p, double alpha);

    const std::vector<Index>& indices() const noexcept { return indices_; }
    double alpha() const noexcept { return alpha_; }
    std::size_t size() const noexcept { return indices_.size(); }
    bool empty() const noexcept { return indices_.empty(); }
    bool contains(Index t) const;

    /// Maximal runs of consecutive indices, e.g. {397,398,400} -> [397-398], [400-400].
    std::vector<IndexRun> runs() const;
    /// "397-398, 400"
    std::string runs_text() const;

    static ConfidenceSet from_runs(const std::vector<IndexRun>& runs, double alpha);

    /// Set union; alpha of the left operand is kept.
    ConfidenceSet united(const ConfidenceSet& other) const;

    friend bool operator==(const ConfidenceSet&, const ConfidenceSet&) = default;

private:
    std::vector<Index> indices_;
    double alpha_ = 0.05;
};

void check_alpha(double alpha);

} // namespace conch
