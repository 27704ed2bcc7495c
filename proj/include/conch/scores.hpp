#pragma once

// Changepoint-plausibility (CPP) scores. Every score follows one sign
// convention: a larger value at t means t is a more plausible changepoint.

#include <functional>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "conch/core.hpp"
#include "conch/density.hpp"

namespace conch {

/// A score S_t evaluated on a sequence. Implementations are immutable and
/// reentrant.
///
/// Evaluation is split in two: `prepare` applies an elementwise map to the
/// series once (e.g. x -> l(x) for likelihood-ratio scores), and `score_at`
/// scores a prepared, possibly permuted, sequence. Because the map is
/// elementwise, permuting prepared values is the same as preparing permuted
/// observations; the engine relies on this to prepare once per series.
class CppScore {
public:
    virtual ~CppScore() = default;

    virtual std::string name() const = 0;

    /// Validates the series kind and maps it elementwise. Default: identity.
    virtual std::vector<double> prepare(const Series& s) const;

    virtual double score_at(std::span<const double> prepared, Index t) const = 0;

    double evaluate(const Series& s, Index t) const;

    /// Sign of score_at(prepared, t) - reference: -1, 0 or +1. Scores whose
    /// value is a count may override this to stop early once the sign is known.
    virtual int compare_at(std::span<const double> prepared, Index t, double reference) const;

    /// True when `reversed()` yields the matching score on the reversed timeline,
    /// i.e. reversed()->evaluate(reverse(s), n - t) == evaluate(s, t).
    virtual bool reversal_compatible() const { return false; }
    virtual std::shared_ptr<const CppScore> reversed() const { return nullptr; }
};

using ScorePtr = std::shared_ptr<const CppScore>;

struct WeightScheme {
    /// linear: 1 - d/n, exponential: exp(-d/n), uniform: 1 (t-symmetric).
    enum class Kind { linear, exponential, uniform };

    Kind kind = Kind::linear;
    /// Distances measured from t + 1 instead of t; the time-reversed scheme.
    bool mirrored = false;

    /// w_{t,i} for 1-based i.
    double weight(Index t, Index i, std::size_t n) const;
    WeightScheme reversed() const { return {kind, !mirrored}; }

    static WeightScheme linear() { return {Kind::linear, false}; }
    static WeightScheme exponential() { return {Kind::exponential, false}; }
    static WeightScheme uniform() { return {Kind::uniform, false}; }
};

std::string to_string(WeightScheme w);

/// |weighted mean of x_1..x_t - weighted mean of x_{t+1}..x_n|.
ScorePtr weighted_mean_score(WeightScheme weights);

/// argmax over s in 1..n-1 of sum_{i<=s} l_i for prepared LLR values; ties go
/// to the smallest index.
Index mle_from_llr_values(std::span<const double> llr_values);
Index mle_changepoint(const Series& s, const LlrFunction& llr);

/// sum_{i<=t} l(x_i) - max_s sum_{i<=s} l(x_i), evaluated as the one-sided
/// sum between t and the profile maximizer. Always <= 0.
ScorePtr oracle_llr_score(LlrFunction llr);

/// Same value as oracle_llr_score; intended for an LLR fitted on data disjoint
/// from the analyzed series.
ScorePtr split_learned_llr_score(LlrFunction llr_hat);

/// sum_{i<=t} l_i - sum_{i<=reference} l_i with the reference index held fixed
/// (frozen-estimator and optimal-score forms).
ScorePtr fixed_reference_llr_score(LlrFunction llr, Index reference);

/// Likelihood-ratio score on a logit series: l_i = -logit_i.
ScorePtr classifier_logit_score();

struct GaussianVariance {
    /// Known common variance; nullopt means the pooled estimate of each split.
    std::optional<double> known;
    static GaussianVariance pooled() { return {}; }
    static GaussianVariance fixed(double variance) { return {variance}; }
};

/// Profile log-likelihood of a two-segment Gaussian mean model at t minus its
/// maximum over all splits. Always <= 0.
ScorePtr gaussian_learned_llr_score(GaussianVariance variance = GaussianVariance::pooled());

using SetFunction = std::function<std::vector<Index>(const Series&)>;
using PvalFunction = std::function<std::vector<double>(const Series&)>;
using PointFunction = std::function<Index(const Series&)>;

/// 1 if t is in set_fn(x), else 0.
ScorePtr set_membership_score(SetFunction set_fn);

/// -min_{l in set_fn(x)} |t - l|. Negated so that larger is more plausible;
/// throws when set_fn returns an empty set.
ScorePtr set_distance_score(SetFunction set_fn);

/// pval(x)[t] / pval(x)[t0(x)], p-values floored at `floor` first.
ScorePtr pval_ratio_score(PvalFunction pval_fn, PointFunction point_fn, double floor = 1e-12);

/// f o S for a caller-supplied f (used for monotone-transform checks).
ScorePtr transformed_score(ScorePtr inner, std::function<double(double)> f, std::string name);

/// Correctly rounded sum; independent of summation order.
double exact_sum(std::span<const double> xs);

/// P_t - max_s P_s for prefix sums P of `llr_values`, accumulated outward from t.
double llr_profile_gap(std::span<const double> llr_values, Index t);

} // namespace conch
