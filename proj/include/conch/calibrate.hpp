#pragma once

// Calibration of heuristic localizations into distribution-free sets, and the
// residual-bootstrap heuristic.

#include <cstddef>
#include <span>

#include "conch/engine.hpp"
#include "conch/scores.hpp"

namespace conch {

/// A heuristic localization procedure: a p-value per candidate and a point
/// estimate, both recomputed on whatever series they are given.
struct HeuristicLocalization {
    PvalFunction pval_fn;
    PointFunction point_fn;
    /// Replicate count of the producing procedure; 0 when unknown.
    std::size_t replicates = 0;
    /// Optional score equal in value to pval_ratio_score(pval_fn, point_fn,
    /// floor()) but cheaper to evaluate. conch_cal uses it when present.
    ScorePtr ratio_score;

    /// 1/(B+1), or 1e-12 when B is unknown.
    double floor() const;
};

/// argmax over k in 1..n-1 of the two-segment least-squares improvement
/// C_k^2 n / (k (n-k)), C_k the centered prefix sum; ties go to the smallest k.
Index ls_changepoint(std::span<const double> values);

/// Residual bootstrap around the least-squares mean-shift fit.
///
/// The B resampling index vectors are drawn from `rng` here, once, so the
/// returned functions are pure. For an input y: t0 = ls_changepoint(y), each
/// replicate rebuilds y from the fitted two-segment means plus centered
/// residuals resampled with replacement and re-estimates tau_b, and
/// pval(t) = max(#{b : |tau_b - t0| >= |t - t0|} / B, 1/(B+1)).
/// Inputs must have the length of `s`.
HeuristicLocalization residual_bootstrap(const Series& s, std::size_t replicates, RngStream& rng);

/// Engine run with the p-value ratio score of `h`.
Localization conch_cal(const Series& s, const HeuristicLocalization& h, double alpha,
                       const PvalueMethod& method, std::uint64_t seed,
                       const EngineOptions& options = {});

} // namespace conch
