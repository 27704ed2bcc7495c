#pragma once

#include <functional>
#include <memory>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "conch/core.hpp"

namespace conch {

inline constexpr double kVarianceFloor = 1e-12;
inline constexpr double kDensityFloor = 1e-300;
inline constexpr double kLlrClip = 50.0;

struct SilvermanBandwidth {};
struct FixedBandwidth {
    double h;
};
using BandwidthRule = std::variant<SilvermanBandwidth, FixedBandwidth>;

/// A fitted univariate density: Gaussian(mean, variance) or a Gaussian-kernel
/// KDE. Immutable; log_density is safe for concurrent use.
class FittedDensity {
public:
    enum class Family { gaussian, kde };

    static FittedDensity gaussian(double mean, double variance);
    static FittedDensity kde(std::vector<double> samples, double bandwidth);

    Family family() const noexcept { return family_; }
    double mean() const noexcept { return mean_; }
    double variance() const noexcept { return variance_; }
    double bandwidth() const noexcept { return bandwidth_; }
    std::span<const double> samples() const noexcept { return samples_; }

    /// log f(x), with f floored at kDensityFloor.
    double log_density(double x) const;

private:
    Family family_ = Family::gaussian;
    double mean_ = 0.0;
    double variance_ = 1.0;
    double bandwidth_ = 0.0;
    std::vector<double> samples_;
};

/// Sample mean and unbiased variance floored at kVarianceFloor; a single
/// sample gets the floored variance unless `known_variance` is given.
FittedDensity fit_gaussian(std::span<const double> samples);
FittedDensity fit_gaussian(std::span<const double> samples, double known_variance);

/// Gaussian-kernel KDE; Silverman's rule 0.9 min(sd, IQR/1.34) m^(-1/5),
/// floored at 1e-6 (range + 1).
FittedDensity fit_kde(std::span<const double> samples, BandwidthRule rule = SilvermanBandwidth{});

/// Silverman bandwidth with the floor applied.
double silverman_bandwidth(std::span<const double> samples);

enum class LlrProvenance { oracle, gaussian_fit, kde_fit, logit_file };

std::string to_string(LlrProvenance p);

/// x -> log(f0(x) / f1(x)).
class LlrFunction {
public:
    LlrFunction(std::function<double(double)> fn, LlrProvenance provenance);

    double operator()(double x) const { return fn_(x); }
    LlrProvenance provenance() const noexcept { return provenance_; }

    /// Pointwise negation, i.e. the LLR with the roles of f0 and f1 swapped.
    LlrFunction negated() const;

private:
    std::function<double(double)> fn_;
    LlrProvenance provenance_;
};

/// Closed-form LLR between N(mu0, sigma^2) and N(mu1, sigma^2), unclipped.
LlrFunction gaussian_oracle_llr(double mu0, double mu1, double sigma);
/// Closed-form LLR between Laplace(mu0, b) and Laplace(mu1, b), unclipped.
LlrFunction laplace_oracle_llr(double mu0, double mu1, double scale);

/// clip(log f0(x) - log f1(x), -50, 50).
LlrFunction make_llr(const FittedDensity& f0, const FittedDensity& f1);

/// Interleaved sample split: part k of `parts` holds the observations at
/// 1-based positions k+1, k+1+parts, ... (odd/even for parts = 2).
std::vector<std::vector<double>> interleaved_split(std::span<const double> values,
                                                   std::size_t parts);

} // namespace conch
