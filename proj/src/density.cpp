#include "conch/density.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <numeric>
#include <stdexcept>

namespace conch {

namespace {

const double kLogDensityFloor = std::log(kDensityFloor);

double quantile_type7(std::vector<double> sorted, double q) {
    const double pos = q * static_cast<double>(sorted.size() - 1);
    const auto lo = static_cast<std::size_t>(std::floor(pos));
    const std::size_t hi = std::min(lo + 1, sorted.size() - 1);
    return sorted[lo] + (pos - static_cast<double>(lo)) * (sorted[hi] - sorted[lo]);
}

void require_finite(std::span<const double> samples) {
    for (double x : samples)
        if (!std::isfinite(x)) throw std::invalid_argument("non-finite sample");
}

} // namespace

FittedDensity FittedDensity::gaussian(double mean, double variance) {
    FittedDensity d;
    d.family_ = Family::gaussian;
    d.mean_ = mean;
    d.variance_ = std::max(variance, kVarianceFloor);
    return d;
}

FittedDensity FittedDensity::kde(std::vector<double> samples, double bandwidth) {
    if (samples.empty()) throw std::invalid_argument("KDE needs samples");
    if (!(bandwidth > 0.0)) throw std::invalid_argument("KDE bandwidth must be positive");
    FittedDensity d;
    d.family_ = Family::kde;
    d.samples_ = std::move(samples);
    d.bandwidth_ = bandwidth;
    return d;
}

double FittedDensity::log_density(double x) const {
    constexpr double log_sqrt_2pi = 0.91893853320467274178;
    double value;
    if (family_ == Family::gaussian) {
        const double z = x - mean_;
        value = -0.5 * z * z / variance_ - 0.5 * std::log(variance_) - log_sqrt_2pi;
    } else {
        // log-sum-exp over kernels keeps far tails finite before the floor.
        double max_term = -std::numeric_limits<double>::infinity();
        const double inv_h = 1.0 / bandwidth_;
        for (double s : samples_) {
            const double z = (x - s) * inv_h;
            max_term = std::max(max_term, -0.5 * z * z);
        }
        double acc = 0.0;
        for (double s : samples_) {
            const double z = (x - s) * inv_h;
            acc += std::exp(-0.5 * z * z - max_term);
        }
        value = max_term + std::log(acc) - std::log(static_cast<double>(samples_.size())) -
                std::log(bandwidth_) - log_sqrt_2pi;
    }
    return std::max(value, kLogDensityFloor);
}

FittedDensity fit_gaussian(std::span<const double> samples) {
    if (samples.empty()) throw std::invalid_argument("fit_gaussian needs at least one sample");
    require_finite(samples);
    const double m = static_cast<double>(samples.size());
    const double mean = std::accumulate(samples.begin(), samples.end(), 0.0) / m;
    double ss = 0.0;
    for (double x : samples) ss += (x - mean) * (x - mean);
    const double var = samples.size() > 1 ? ss / (m - 1.0) : 0.0;
    return FittedDensity::gaussian(mean, var);
}

FittedDensity fit_gaussian(std::span<const double> samples, double known_variance) {
    if (samples.empty()) throw std::invalid_argument("fit_gaussian needs at least one sample");
    if (!(known_variance > 0.0)) throw std::invalid_argument("known variance must be positive");
    require_finite(samples);
    const double mean =
        std::accumulate(samples.begin(), samples.end(), 0.0) / static_cast<double>(samples.size());
    return FittedDensity::gaussian(mean, known_variance);
}

double silverman_bandwidth(std::span<const double> samples) {
    if (samples.size() < 2) throw std::invalid_argument("bandwidth needs at least 2 samples");
    std::vector<double> sorted(samples.begin(), samples.end());
    std::sort(sorted.begin(), sorted.end());
    const double m = static_cast<double>(sorted.size());
    const double mean = std::accumulate(sorted.begin(), sorted.end(), 0.0) / m;
    double ss = 0.0;
    for (double x : sorted) ss += (x - mean) * (x - mean);
    const double sd = std::sqrt(ss / (m - 1.0));
    const double iqr = quantile_type7(sorted, 0.75) - quantile_type7(sorted, 0.25);
    double spread = std::min(sd, iqr / 1.34);
    if (!(spread > 0.0)) spread = sd;
    const double h = 0.9 * spread * std::pow(m, -0.2);
    const double floor = 1e-6 * (sorted.back() - sorted.front() + 1.0);
    return std::max(h, floor);
}

FittedDensity fit_kde(std::span<const double> samples, BandwidthRule rule) {
    if (samples.size() < 2) throw std::invalid_argument("fit_kde needs at least 2 samples");
    require_finite(samples);
    double h;
    if (const auto* fixed = std::get_if<FixedBandwidth>(&rule)) {
        if (!(fixed->h > 0.0)) throw std::invalid_argument("fixed bandwidth must be positive");
        const auto [lo, hi] = std::minmax_element(samples.begin(), samples.end());
        h = std::max(fixed->h, 1e-6 * (*hi - *lo + 1.0));
    } else {
        h = silverman_bandwidth(samples);
    }
    return FittedDensity::kde(std::vector<double>(samples.begin(), samples.end()), h);
}

std::string to_string(LlrProvenance p) {
    switch (p) {
    case LlrProvenance::oracle: return "oracle";
    case LlrProvenance::gaussian_fit: return "gaussian-fit";
    case LlrProvenance::kde_fit: return "kde-fit";
    case LlrProvenance::logit_file: return "logit-file";
    }
    return "unknown";
}

LlrFunction::LlrFunction(std::function<double(double)> fn, LlrProvenance provenance)
    : fn_(std::move(fn)), provenance_(provenance) {
    if (!fn_) throw std::invalid_argument("empty LLR function");
}

LlrFunction LlrFunction::negated() const {
    return LlrFunction([fn = fn_](double x) { return -fn(x); }, provenance_);
}

LlrFunction gaussian_oracle_llr(double mu0, double mu1, double sigma) {
    if (!(sigma > 0.0)) throw std::invalid_argument("sigma must be positive");
    const double inv2s2 = 1.0 / (2.0 * sigma * sigma);
    return LlrFunction(
        [=](double x) { return ((x - mu1) * (x - mu1) - (x - mu0) * (x - mu0)) * inv2s2; },
        LlrProvenance::oracle);
}

LlrFunction laplace_oracle_llr(double mu0, double mu1, double scale) {
    if (!(scale > 0.0)) throw std::invalid_argument("scale must be positive");
    return LlrFunction([=](double x) { return (std::abs(x - mu1) - std::abs(x - mu0)) / scale; },
                       LlrProvenance::oracle);
}

LlrFunction make_llr(const FittedDensity& f0, const FittedDensity& f1) {
    const auto provenance = (f0.family() == FittedDensity::Family::kde ||
                             f1.family() == FittedDensity::Family::kde)
                                ? LlrProvenance::kde_fit
                                : LlrProvenance::gaussian_fit;
    auto p0 = std::make_shared<const FittedDensity>(f0);
    auto p1 = std::make_shared<const FittedDensity>(f1);
    return LlrFunction(
        [p0, p1](double x) {
            return std::clamp(p0->log_density(x) - p1->log_density(x), -kLlrClip, kLlrClip);
        },
        provenance);
}

std::vector<std::vector<double>> interleaved_split(std::span<const double> values,
                                                   std::size_t parts) {
    if (parts == 0) throw std::invalid_argument("need at least one part");
    std::vector<std::vector<double>> out(parts);
    for (std::size_t i = 0; i < values.size(); ++i) out[i % parts].push_back(values[i]);
    return out;
}

} // namespace conch
