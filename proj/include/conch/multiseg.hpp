#pragma once

// Multiple changepoints: kernel segmentation, midpoint segments, and
// segmentwise CONCH (plain and cross-fitted).

#include <functional>
#include <string>
#include <variant>
#include <vector>

#include "conch/engine.hpp"

namespace conch {

inline constexpr std::size_t kDefaultMinSegmentLength = 4;

/// Estimated changepoints, strictly increasing in 1..n-1.
class Segmentation {
public:
    Segmentation() = default;
    Segmentation(std::vector<Index> changepoints, std::size_t n);

    const std::vector<Index>& changepoints() const noexcept { return changepoints_; }
    std::size_t k_hat() const noexcept { return changepoints_.size(); }
    std::size_t n() const noexcept { return n_; }

private:
    std::vector<Index> changepoints_;
    std::size_t n_ = 0;
};

struct MedianHeuristic {};
struct FixedKernelBandwidth {
    double h;
};
using KernelBandwidth = std::variant<MedianHeuristic, FixedKernelBandwidth>;

/// Median pairwise distance over at most 500 evenly spaced points; 1.0 when
/// that median is 0.
double median_heuristic_bandwidth(std::span<const double> values);

/// Exactly K changepoints minimizing the Gaussian-kernel least-squares cost
/// sum over segments of (len - (1/len) sum_{i,j in seg} k(x_i, x_j)), by
/// dynamic programming. Ties go to the earliest boundary. Throws
/// std::out_of_range unless 1 <= K <= n-1.
Segmentation kcpd_segment(const Series& s, std::size_t k,
                          KernelBandwidth bandwidth = MedianHeuristic{});

/// X_0 = 1, X_l = floor((xi_l + xi_{l+1}) / 2) for l < K, X_K = n. With no
/// changepoints the result is (1, n).
std::vector<Index> midpoint_boundaries(const Segmentation& seg, std::size_t n);

/// Builds the score used on a segment of the given length.
using ScoreFactory = std::function<ScorePtr(std::size_t segment_length)>;

/// One analyzed segment, in global 1-based coordinates.
struct SegmentResult {
    /// Observations the segment covers (first..last, or the listed positions
    /// for cross-fitted segments).
    std::vector<Index> positions;
    ConfidenceSet set;
    bool skipped = false;
};

struct SegmentedLocalization {
    ConfidenceSet set;
    std::vector<SegmentResult> segments;
    std::vector<std::string> warnings;
};

/// CONCH on every midpoint segment [X_{l-1}, X_l]; global candidate t uses the
/// same substream as in a single-segment run. Segments shorter than
/// `min_segment_length` contribute nothing and add a warning.
SegmentedLocalization conch_seg(const Series& s, const Segmentation& seg,
                                const ScoreFactory& score_factory, double alpha,
                                const PvalueMethod& method, std::uint64_t seed,
                                const EngineOptions& options = {},
                                std::size_t min_segment_length = kDefaultMinSegmentLength);

using Segmenter = std::function<Segmentation(const Series&)>;

/// Segments on the odd-position fold and localizes on the even one, then the
/// other way round. A candidate between fold elements j and j+1 is reported as
/// the global position of fold element j.
SegmentedLocalization conch_seg_crossfit(const Series& s, const Segmenter& segmenter,
                                         const ScoreFactory& score_factory, double alpha,
                                         const PvalueMethod& method, std::uint64_t seed,
                                         const EngineOptions& options = {},
                                         std::size_t min_segment_length = kDefaultMinSegmentLength);

} // namespace conch
