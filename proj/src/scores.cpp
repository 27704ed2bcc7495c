#include "conch/scores.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace conch {

std::vector<double> CppScore::prepare(const Series& s) const {
    return {s.values().begin(), s.values().end()};
}

double CppScore::evaluate(const Series& s, Index t) const {
    check_candidate(s.size(), t);
    const auto prepared = prepare(s);
    return score_at(prepared, t);
}

int CppScore::compare_at(std::span<const double> prepared, Index t, double reference) const {
    const double v = score_at(prepared, t);
    return v < reference ? -1 : (v == reference ? 0 : 1);
}

double exact_sum(std::span<const double> xs) {
    // Shewchuk's non-overlapping partials with a round-half-even finish.
    std::vector<double> partials;
    for (double x : xs) {
        std::size_t i = 0;
        for (double y : partials) {
            if (std::abs(x) < std::abs(y)) std::swap(x, y);
            const double hi = x + y;
            const double lo = y - (hi - x);
            if (lo != 0.0) partials[i++] = lo;
            x = hi;
        }
        partials.resize(i);
        partials.push_back(x);
    }
    std::size_t n = partials.size();
    if (n == 0) return 0.0;
    double hi = partials[--n];
    double lo = 0.0;
    while (n > 0) {
        const double x = hi;
        const double y = partials[--n];
        hi = x + y;
        lo = y - (hi - x);
        if (lo != 0.0) break;
    }
    if (n > 0 && ((lo < 0.0 && partials[n - 1] < 0.0) || (lo > 0.0 && partials[n - 1] > 0.0))) {
        const double y = lo * 2.0;
        const double x = hi + y;
        if (y == x - hi) hi = x;
    }
    return hi;
}

double llr_profile_gap(std::span<const double> l, Index t) {
    const std::size_t n = l.size();
    check_candidate(n, t);
    // best = max over s of P_s - P_t, with s = t contributing 0.
    double best = 0.0;
    double acc = 0.0;
    for (Index s = t + 1; s <= n - 1; ++s) {
        acc += l[s - 1];
        best = std::max(best, acc);
    }
    acc = 0.0;
    for (Index s = t - 1; s >= 1; --s) {
        acc += l[s];
        best = std::max(best, -acc);
    }
    return 0.0 - best;
}

Index mle_from_llr_values(std::span<const double> l) {
    if (l.size() < 2) throw std::invalid_argument("MLE needs at least 2 observations");
    Index best_s = 1;
    double prefix = l[0];
    double best = prefix;
    for (Index s = 2; s <= l.size() - 1; ++s) {
        prefix += l[s - 1];
        if (prefix > best) {
            best = prefix;
            best_s = s;
        }
    }
    return best_s;
}

namespace {

std::vector<double> map_llr(const Series& s, const LlrFunction& llr) {
    std::vector<double> out(s.size());
    for (std::size_t i = 0; i < s.size(); ++i) {
        out[i] = llr(s.values()[i]);
        if (!std::isfinite(out[i]))
            throw std::domain_error("LLR is not finite at position " + std::to_string(i + 1));
    }
    return out;
}

void require_kind(const Series& s, SeriesKind kind, const std::string& who) {
    if (s.kind() != kind)
        throw std::invalid_argument(who + " expects a " + to_string(kind) + " series, got " +
                                    to_string(s.kind()));
}

// ---------------------------------------------------------------------------

class WeightedMeanScore final : public CppScore {
public:
    explicit WeightedMeanScore(WeightScheme w) : w_(w) {}

    std::string name() const override { return "weighted-mean(" + to_string(w_) + ")"; }

    std::vector<double> prepare(const Series& s) const override {
        require_kind(s, SeriesKind::raw, "weighted mean score");
        // Centered at the minimum so a constant series scores exactly 0. The
        // minimum is permutation invariant, so preparing once stays valid.
        std::vector<double> x = CppScore::prepare(s);
        const double lo = *std::min_element(x.begin(), x.end());
        for (double& v : x) v -= lo;
        return x;
    }

    double score_at(std::span<const double> x, Index t) const override {
        const std::size_t n = x.size();
        check_candidate(n, t);
        if (w_.kind == WeightScheme::Kind::uniform) {
            const double left = exact_sum(x.first(t)) / static_cast<double>(t);
            const double right = exact_sum(x.subspan(t)) / static_cast<double>(n - t);
            return std::abs(left - right);
        }
        // Both blocks are accumulated outward from the split so the reversed
        // scheme on the reversed series repeats the same arithmetic.
        double num_l = 0.0, den_l = 0.0, num_r = 0.0, den_r = 0.0;
        if (w_.kind == WeightScheme::Kind::linear) {
            const double inv_n = 1.0 / static_cast<double>(n);
            for (Index i = t; i >= 1; --i) {
                const double w = 1.0 - static_cast<double>(t - i + (w_.mirrored ? 1 : 0)) * inv_n;
                num_l += w * x[i - 1];
                den_l += w;
            }
            for (Index i = t + 1; i <= n; ++i) {
                const double w = 1.0 - static_cast<double>(i - t - (w_.mirrored ? 1 : 0)) * inv_n;
                num_r += w * x[i - 1];
                den_r += w;
            }
        } else {
            const double ratio = std::exp(-1.0 / static_cast<double>(n));
            double w = w_.mirrored ? ratio : 1.0;
            for (Index i = t; i >= 1; --i, w *= ratio) {
                num_l += w * x[i - 1];
                den_l += w;
            }
            w = w_.mirrored ? 1.0 : ratio;
            for (Index i = t + 1; i <= n; ++i, w *= ratio) {
                num_r += w * x[i - 1];
                den_r += w;
            }
        }
        return std::abs(num_l / den_l - num_r / den_r);
    }

    bool reversal_compatible() const override { return true; }
    ScorePtr reversed() const override {
        return std::make_shared<WeightedMeanScore>(w_.reversed());
    }

private:
    WeightScheme w_;
};

// ---------------------------------------------------------------------------

class LlrProfileScore final : public CppScore {
public:
    LlrProfileScore(LlrFunction llr, std::string name) : llr_(std::move(llr)), name_(std::move(name)) {}

    std::string name() const override { return name_; }

    std::vector<double> prepare(const Series& s) const override {
        require_kind(s, SeriesKind::raw, name_ + " score");
        return map_llr(s, llr_);
    }

    double score_at(std::span<const double> l, Index t) const override {
        return llr_profile_gap(l, t);
    }

    bool reversal_compatible() const override { return true; }
    ScorePtr reversed() const override {
        return std::make_shared<LlrProfileScore>(llr_.negated(), name_);
    }

private:
    LlrFunction llr_;
    std::string name_;
};

class ClassifierLogitScore final : public CppScore {
public:
    explicit ClassifierLogitScore(bool reversed = false) : reversed_(reversed) {}

    std::string name() const override { return "classifier-logit"; }

    std::vector<double> prepare(const Series& s) const override {
        require_kind(s, SeriesKind::logit, "classifier logit score");
        std::vector<double> out(s.size());
        for (std::size_t i = 0; i < s.size(); ++i)
            out[i] = reversed_ ? s.values()[i] : -s.values()[i];
        return out;
    }

    double score_at(std::span<const double> l, Index t) const override {
        return llr_profile_gap(l, t);
    }

    bool reversal_compatible() const override { return true; }
    ScorePtr reversed() const override {
        return std::make_shared<ClassifierLogitScore>(!reversed_);
    }

private:
    bool reversed_;
};

class FixedReferenceLlrScore final : public CppScore {
public:
    FixedReferenceLlrScore(LlrFunction llr, Index reference)
        : llr_(std::move(llr)), reference_(reference) {
        if (reference_ < 1) throw std::out_of_range("reference index must be >= 1");
    }

    std::string name() const override {
        return "fixed-reference-llr(" + std::to_string(reference_) + ")";
    }

    std::vector<double> prepare(const Series& s) const override {
        check_candidate(s.size(), reference_);
        return map_llr(s, llr_);
    }

    double score_at(std::span<const double> l, Index t) const override {
        check_candidate(l.size(), t);
        // Same accumulation order as llr_profile_gap so the two agree bitwise
        // whenever the profile maximizer is the reference.
        double acc = 0.0;
        if (reference_ > t) {
            for (Index s = t + 1; s <= reference_; ++s) acc += l[s - 1];
            return 0.0 - acc;
        }
        for (Index s = t - 1; s + 1 > reference_; --s) acc += l[s];
        return acc;
    }

private:
    LlrFunction llr_;
    Index reference_;
};

// ---------------------------------------------------------------------------

class GaussianLearnedScore final : public CppScore {
public:
    explicit GaussianLearnedScore(GaussianVariance v) : variance_(v) {
        if (v.known && !(*v.known > 0.0))
            throw std::invalid_argument("known variance must be positive");
    }

    std::string name() const override {
        return variance_.known ? "gaussian-learned(var=" + std::to_string(*variance_.known) + ")"
                               : "gaussian-learned(pooled)";
    }

    std::vector<double> prepare(const Series& s) const override {
        require_kind(s, SeriesKind::raw, "gaussian learned score");
        return CppScore::prepare(s);
    }

    double score_at(std::span<const double> x, Index t) const override {
        const std::size_t n = x.size();
        check_candidate(n, t);
        double mean = 0.0;
        for (double v : x) mean += v;
        mean /= static_cast<double>(n);
        double ss = 0.0;
        for (double v : x) ss += (v - mean) * (v - mean);

        double total = 0.0;
        for (double v : x) total += v - mean;

        double at_t = 0.0;
        double best = -std::numeric_limits<double>::infinity();
        double prefix = 0.0;
        const double nd = static_cast<double>(n);
        for (Index s = 1; s <= n - 1; ++s) {
            prefix += x[s - 1] - mean;
            const double sd = static_cast<double>(s);
            const double rest = total - prefix;
            const double rss =
                std::max(0.0, ss - prefix * prefix / sd - rest * rest / (nd - sd));
            const double ll = log_likelihood(rss, nd);
            if (s == t) at_t = ll;
            best = std::max(best, ll);
        }
        return at_t - best;
    }

    bool reversal_compatible() const override { return true; }
    ScorePtr reversed() const override { return std::make_shared<GaussianLearnedScore>(variance_); }

private:
    double log_likelihood(double rss, double n) const {
        if (variance_.known) return -rss / (2.0 * *variance_.known);
        const double var = std::max(n > 2.0 ? rss / (n - 2.0) : 0.0, kVarianceFloor);
        return -0.5 * n * std::log(var) - rss / (2.0 * var);
    }

    GaussianVariance variance_;
};

// ---------------------------------------------------------------------------

// Scores defined on whole series through caller-supplied functions.
class SeriesFunctionScore : public CppScore {
protected:
    static Series as_series(std::span<const double> x) {
        return Series(std::vector<double>(x.begin(), x.end()), SeriesKind::raw);
    }
};

class SetMembershipScore final : public SeriesFunctionScore {
public:
    explicit SetMembershipScore(SetFunction fn) : fn_(std::move(fn)) {}
    std::string name() const override { return "set-membership"; }
    double score_at(std::span<const double> x, Index t) const override {
        check_candidate(x.size(), t);
        const auto set = fn_(as_series(x));
        return std::find(set.begin(), set.end(), t) != set.end() ? 1.0 : 0.0;
    }

private:
    SetFunction fn_;
};

class SetDistanceScore final : public SeriesFunctionScore {
public:
    explicit SetDistanceScore(SetFunction fn) : fn_(std::move(fn)) {}
    std::string name() const override { return "set-distance"; }
    double score_at(std::span<const double> x, Index t) const override {
        check_candidate(x.size(), t);
        const auto set = fn_(as_series(x));
        if (set.empty()) throw std::domain_error("set-distance score: heuristic set is empty");
        Index best = std::numeric_limits<Index>::max();
        for (Index l : set) best = std::min(best, l > t ? l - t : t - l);
        return -static_cast<double>(best);
    }

private:
    SetFunction fn_;
};

class PvalRatioScore final : public SeriesFunctionScore {
public:
    PvalRatioScore(PvalFunction pval, PointFunction point, double floor)
        : pval_(std::move(pval)), point_(std::move(point)), floor_(floor) {
        if (!(floor_ > 0.0 && floor_ <= 1.0))
            throw std::invalid_argument("p-value floor must lie in (0, 1]");
    }
    std::string name() const override { return "pval-ratio"; }
    double score_at(std::span<const double> x, Index t) const override {
        check_candidate(x.size(), t);
        const Series s = as_series(x);
        const auto p = pval_(s);
        if (p.size() != x.size() - 1)
            throw std::logic_error("p-value function returned " + std::to_string(p.size()) +
                                   " values for " + std::to_string(x.size() - 1) + " candidates");
        const Index t0 = point_(s);
        check_candidate(x.size(), t0);
        return std::max(p[t - 1], floor_) / std::max(p[t0 - 1], floor_);
    }

private:
    PvalFunction pval_;
    PointFunction point_;
    double floor_;
};

class TransformedScore final : public CppScore {
public:
    TransformedScore(ScorePtr inner, std::function<double(double)> f, std::string name)
        : inner_(std::move(inner)), f_(std::move(f)), name_(std::move(name)) {}

    std::string name() const override { return name_ + "(" + inner_->name() + ")"; }
    std::vector<double> prepare(const Series& s) const override { return inner_->prepare(s); }
    double score_at(std::span<const double> x, Index t) const override {
        return f_(inner_->score_at(x, t));
    }
    bool reversal_compatible() const override { return inner_->reversal_compatible(); }
    ScorePtr reversed() const override {
        auto r = inner_->reversed();
        return r ? std::make_shared<TransformedScore>(r, f_, name_) : nullptr;
    }

private:
    ScorePtr inner_;
    std::function<double(double)> f_;
    std::string name_;
};

} // namespace

double WeightScheme::weight(Index t, Index i, std::size_t n) const {
    if (i < 1 || i > n) throw std::out_of_range("weight index outside 1..n");
    Index d = i > t ? i - t : t - i;
    if (mirrored) d = i > t ? i - t - 1 : t - i + 1;
    switch (kind) {
    case Kind::linear: return 1.0 - static_cast<double>(d) / static_cast<double>(n);
    case Kind::exponential: return std::exp(-static_cast<double>(d) / static_cast<double>(n));
    case Kind::uniform: return 1.0;
    }
    return 1.0;
}

std::string to_string(WeightScheme w) {
    std::string s = w.kind == WeightScheme::Kind::linear        ? "linear"
                    : w.kind == WeightScheme::Kind::exponential ? "exponential"
                                                                : "uniform";
    return w.mirrored ? s + ",mirrored" : s;
}

ScorePtr weighted_mean_score(WeightScheme weights) {
    return std::make_shared<WeightedMeanScore>(weights);
}

Index mle_changepoint(const Series& s, const LlrFunction& llr) {
    return mle_from_llr_values(map_llr(s, llr));
}

ScorePtr oracle_llr_score(LlrFunction llr) {
    return std::make_shared<LlrProfileScore>(std::move(llr), "oracle-llr");
}

ScorePtr split_learned_llr_score(LlrFunction llr_hat) {
    return std::make_shared<LlrProfileScore>(std::move(llr_hat),
                                             "split-learned-llr(" + to_string(llr_hat.provenance()) + ")");
}

ScorePtr fixed_reference_llr_score(LlrFunction llr, Index reference) {
    return std::make_shared<FixedReferenceLlrScore>(std::move(llr), reference);
}

ScorePtr classifier_logit_score() { return std::make_shared<ClassifierLogitScore>(); }

ScorePtr gaussian_learned_llr_score(GaussianVariance variance) {
    return std::make_shared<GaussianLearnedScore>(variance);
}

ScorePtr set_membership_score(SetFunction set_fn) {
    return std::make_shared<SetMembershipScore>(std::move(set_fn));
}

ScorePtr set_distance_score(SetFunction set_fn) {
    return std::make_shared<SetDistanceScore>(std::move(set_fn));
}

ScorePtr pval_ratio_score(PvalFunction pval_fn, PointFunction point_fn, double floor) {
    return std::make_shared<PvalRatioScore>(std::move(pval_fn), std::move(point_fn), floor);
}

ScorePtr transformed_score(ScorePtr inner, std::function<double(double)> f, std::string name) {
    return std::make_shared<TransformedScore>(std::move(inner), std::move(f), std::move(name));
}

} // namespace conch
