#include "conch/calibrate.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <memory>
#include <stdexcept>
#include <vector>

namespace conch {

double HeuristicLocalization::floor() const {
    return replicates > 0 ? 1.0 / static_cast<double>(replicates + 1) : 1e-12;
}

namespace {

std::vector<double> inverse_split_sizes(std::size_t n) {
    std::vector<double> inv(n, 0.0);
    for (std::size_t k = 1; k < n; ++k)
        inv[k] = 1.0 / (static_cast<double>(k) * static_cast<double>(n - k));
    return inv;
}

Index ls_argmax(std::span<const double> x, double mean, std::span<const double> inv) {
    const std::size_t n = x.size();
    Index best_k = 1;
    double best = -1.0;
    double c = 0.0;
    for (Index k = 1; k <= n - 1; ++k) {
        c += x[k - 1] - mean;
        const double v = c * c * inv[k];
        if (v > best) {
            best = v;
            best_k = k;
        }
    }
    return best_k;
}

double mean_of(std::span<const double> x) {
    double s = 0.0;
    for (double v : x) s += v;
    return s / static_cast<double>(x.size());
}

class BootstrapModel {
public:
    BootstrapModel(std::size_t n, std::size_t replicates, RngStream& rng)
        : n_(n), b_(replicates), inv_(inverse_split_sizes(n)), idx_(n * replicates) {
        for (auto& i : idx_) i = static_cast<std::uint32_t>(rng.below(n));
    }

    std::size_t n() const { return n_; }
    std::size_t replicates() const { return b_; }

    double value_from_count(std::size_t count) const {
        return std::max(static_cast<double>(count) / static_cast<double>(b_),
                        1.0 / static_cast<double>(b_ + 1));
    }

    struct Fit {
        Index t0;
        std::vector<double> fitted;
        std::vector<double> residuals;
    };

    Fit fit(std::span<const double> y) const {
        check_length(y);
        Fit f;
        f.t0 = ls_argmax(y, mean_of(y), inv_);
        const double m1 = mean_of(y.first(f.t0));
        const double m2 = mean_of(y.subspan(f.t0));
        f.fitted.resize(n_);
        f.residuals.resize(n_);
        for (std::size_t i = 0; i < n_; ++i) {
            f.fitted[i] = i < f.t0 ? m1 : m2;
            f.residuals[i] = y[i] - f.fitted[i];
        }
        const double rbar = mean_of(f.residuals);
        for (double& r : f.residuals) r -= rbar;
        return f;
    }

    Index replicate(const Fit& f, std::size_t b, std::vector<double>& z) const {
        z.resize(n_);
        const std::uint32_t* row = idx_.data() + b * n_;
        double sum = 0.0;
        for (std::size_t i = 0; i < n_; ++i) {
            z[i] = f.fitted[i] + f.residuals[row[i]];
            sum += z[i];
        }
        return ls_argmax(z, sum / static_cast<double>(n_), inv_);
    }

    static Index distance(Index a, Index b) { return a > b ? a - b : b - a; }

    std::vector<double> pvalues(std::span<const double> y) const {
        const Fit f = fit(y);
        std::vector<std::size_t> hist(n_, 0);
        std::vector<double> z;
        for (std::size_t b = 0; b < b_; ++b) ++hist[distance(replicate(f, b, z), f.t0)];
        // at_least[d] = #{b : |tau_b - t0| >= d}
        std::vector<std::size_t> at_least(n_ + 1, 0);
        for (std::size_t d = n_; d-- > 0;) at_least[d] = at_least[d + 1] + hist[d];
        std::vector<double> p(n_ - 1);
        for (Index t = 1; t <= n_ - 1; ++t) p[t - 1] = value_from_count(at_least[distance(t, f.t0)]);
        return p;
    }

    void check_length(std::span<const double> y) const {
        if (y.size() != n_)
            throw std::invalid_argument("bootstrap was set up for n=" + std::to_string(n_) +
                                        ", got a series of length " + std::to_string(y.size()));
    }

private:
    std::size_t n_;
    std::size_t b_;
    std::vector<double> inv_;
    std::vector<std::uint32_t> idx_;
};

// pval(t) / pval(t0) for the bootstrap, where pval(t0) = 1. The comparison
// stops as soon as the remaining replicates cannot change its outcome.
class BootstrapRatioScore final : public CppScore {
public:
    explicit BootstrapRatioScore(std::shared_ptr<const BootstrapModel> model)
        : model_(std::move(model)) {}

    std::string name() const override { return "pval-ratio(residual-bootstrap)"; }

    double score_at(std::span<const double> y, Index t) const override {
        check_candidate(y.size(), t);
        const auto f = model_->fit(y);
        const Index d = BootstrapModel::distance(t, f.t0);
        std::vector<double> z;
        std::size_t count = 0;
        for (std::size_t b = 0; b < model_->replicates(); ++b)
            if (BootstrapModel::distance(model_->replicate(f, b, z), f.t0) >= d) ++count;
        return model_->value_from_count(count);
    }

    int compare_at(std::span<const double> y, Index t, double reference) const override {
        check_candidate(y.size(), t);
        const auto f = model_->fit(y);
        const Index d = BootstrapModel::distance(t, f.t0);
        const std::size_t total = model_->replicates();
        std::vector<double> z;
        std::size_t count = 0;
        for (std::size_t b = 0; b < total; ++b) {
            if (BootstrapModel::distance(model_->replicate(f, b, z), f.t0) >= d) ++count;
            const double lo = model_->value_from_count(count);
            const double hi = model_->value_from_count(count + (total - b - 1));
            if (lo > reference) return 1;
            if (hi < reference) return -1;
            if (lo == hi) return lo == reference ? 0 : (lo < reference ? -1 : 1);
        }
        const double v = model_->value_from_count(count);
        return v < reference ? -1 : (v == reference ? 0 : 1);
    }

private:
    std::shared_ptr<const BootstrapModel> model_;
};

} // namespace

Index ls_changepoint(std::span<const double> values) {
    if (values.size() < 2) throw std::invalid_argument("least-squares fit needs n >= 2");
    return ls_argmax(values, mean_of(values), inverse_split_sizes(values.size()));
}

HeuristicLocalization residual_bootstrap(const Series& s, std::size_t replicates, RngStream& rng) {
    if (replicates < 50) throw std::invalid_argument("residual bootstrap needs B >= 50");
    if (s.size() > std::numeric_limits<std::uint32_t>::max())
        throw std::invalid_argument("series too long for the bootstrap index table");
    auto model = std::make_shared<const BootstrapModel>(s.size(), replicates, rng);

    HeuristicLocalization h;
    h.replicates = replicates;
    h.pval_fn = [model](const Series& y) { return model->pvalues(y.values()); };
    h.point_fn = [model](const Series& y) {
        model->check_length(y.values());
        return ls_changepoint(y.values());
    };
    h.ratio_score = std::make_shared<BootstrapRatioScore>(model);
    return h;
}

Localization conch_cal(const Series& s, const HeuristicLocalization& h, double alpha,
                       const PvalueMethod& method, std::uint64_t seed,
                       const EngineOptions& options) {
    check_alpha(alpha);
    ScorePtr score = h.ratio_score;
    if (!score) {
        if (!h.pval_fn || !h.point_fn)
            throw std::invalid_argument("heuristic localization needs pval_fn and point_fn");
        score = pval_ratio_score(h.pval_fn, h.point_fn, h.floor());
    }
    return confidence_set(s, *score, alpha, method, seed, options);
}

} // namespace conch
