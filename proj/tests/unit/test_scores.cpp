#include <gtest/gtest.h>

#include <cmath>

#include "conch/perm.hpp"
#include "conch/scores.hpp"

using namespace conch;

namespace {

Series random_series(std::size_t n, std::uint64_t seed, double shift = 1.0) {
    auto rng = substream(seed, 0);
    std::vector<double> v;
    for (std::size_t i = 0; i < n; ++i) v.push_back(rng.normal() + (i >= n / 2 ? shift : 0.0));
    return Series(v);
}

const LlrFunction kHalfLlr = gaussian_oracle_llr(0.0, 1.0, 1.0); // (1 - 2x) / 2

} // namespace

TEST(WeightScheme, Formulas) {
    auto w = WeightScheme::linear();
    EXPECT_DOUBLE_EQ(w.weight(2, 1, 4), 0.75);
    EXPECT_DOUBLE_EQ(w.weight(2, 2, 4), 1.0);
    EXPECT_DOUBLE_EQ(w.weight(2, 4, 4), 0.5);
    EXPECT_DOUBLE_EQ(WeightScheme::exponential().weight(3, 1, 10), std::exp(-0.2));
    EXPECT_EQ(WeightScheme::uniform().weight(3, 9, 10), 1.0);
    for (Index i = 1; i <= 10; ++i) {
        EXPECT_GT(w.weight(1, i, 10), 0.0);
        EXPECT_GT(w.reversed().weight(1, i, 10), 0.0);
    }
}

TEST(WeightedMean, HandExample) {
    auto s = weighted_mean_score(WeightScheme::linear());
    EXPECT_DOUBLE_EQ(s->evaluate(Series({0, 0, 10, 10}), 2), 10.0);
}

TEST(WeightedMean, MatchesDirectFormula) {
    const Series x = random_series(9, 3);
    for (auto scheme : {WeightScheme::linear(), WeightScheme::exponential()}) {
        auto s = weighted_mean_score(scheme);
        for (Index t = 1; t < 9; ++t) {
            double nl = 0, dl = 0, nr = 0, dr = 0;
            for (Index i = 1; i <= 9; ++i) {
                const double w = scheme.weight(t, i, 9);
                (i <= t ? nl : nr) += w * x.at(i);
                (i <= t ? dl : dr) += w;
            }
            EXPECT_NEAR(s->evaluate(x, t), std::abs(nl / dl - nr / dr), 1e-12);
        }
    }
}

TEST(WeightedMean, ConstantSeriesScoresZero) {
    auto s = weighted_mean_score(WeightScheme::exponential());
    Series c({2.5, 2.5, 2.5, 2.5, 2.5});
    for (Index t = 1; t < 5; ++t) EXPECT_EQ(s->evaluate(c, t), 0.0);
}

TEST(WeightedMean, ShiftInvariant) {
    auto s = weighted_mean_score(WeightScheme::linear());
    const Series x = random_series(8, 4);
    std::vector<double> shifted(x.values().begin(), x.values().end());
    for (double& v : shifted) v += 3.25;
    for (Index t = 1; t < 8; ++t) EXPECT_NEAR(s->evaluate(x, t), s->evaluate(Series(shifted), t), 1e-12);
}

TEST(WeightedMean, UniformWeightsArePermutationInvariant) {
    auto s = weighted_mean_score(WeightScheme::uniform());
    const Series x = random_series(7, 5);
    for (Index t = 1; t < 7; ++t) {
        const double v = s->evaluate(x, t);
        for (const auto& p : enumerate_split_permutations(7, t)) ASSERT_EQ(s->evaluate(apply(p, x), t), v);
    }
}

TEST(WeightedMean, RejectsLogits) {
    auto s = weighted_mean_score(WeightScheme::linear());
    EXPECT_THROW(s->evaluate(Series({1, 2, 3}, SeriesKind::logit), 1), std::invalid_argument);
}

TEST(ExactSum, OrderIndependent) {
    std::vector<double> v{1e16, 1.0, -1e16, 3.5, 1e-3, -2.25, 7e15};
    const double ref = exact_sum(v);
    std::sort(v.begin(), v.end());
    do {
        ASSERT_EQ(exact_sum(v), ref);
    } while (std::next_permutation(v.begin(), v.end()));
    EXPECT_EQ(exact_sum(std::vector<double>{0.1, 0.2, 0.3}), 0.6);
}

TEST(Mle, HandExample) {
    EXPECT_EQ(mle_changepoint(Series({-1, -1, 2, 2}), kHalfLlr), 2u);
}

TEST(Mle, ZeroLlrTiesToFirst) {
    LlrFunction zero([](double) { return 0.0; }, LlrProvenance::oracle);
    EXPECT_EQ(mle_changepoint(Series({3, 1, 4, 1, 5}), zero), 1u);
}

TEST(Mle, DecreasingPrefixSums) {
    std::vector<double> l{-1, -1, -1, -1};
    EXPECT_EQ(mle_from_llr_values(l), 1u);
}

TEST(OracleLlr, HandExample) {
    auto s = oracle_llr_score(kHalfLlr);
    const Series x({-1, -1, 2, 2});
    EXPECT_EQ(s->evaluate(x, 2), 0.0);
    EXPECT_DOUBLE_EQ(s->evaluate(x, 1), -1.5);
    EXPECT_DOUBLE_EQ(s->evaluate(x, 3), -1.5);
}

TEST(OracleLlr, NonPositiveZeroOnlyAtArgmax) {
    auto s = oracle_llr_score(kHalfLlr);
    for (std::uint64_t seed = 0; seed < 30; ++seed) {
        const Series x = random_series(12, seed);
        const Index mle = mle_changepoint(x, kHalfLlr);
        for (Index t = 1; t < 12; ++t) {
            const double v = s->evaluate(x, t);
            EXPECT_LE(v, 0.0);
            if (t == mle) EXPECT_EQ(v, 0.0);
            else EXPECT_LT(v, 0.0);
        }
    }
}

TEST(OracleLlr, MatchesPrefixSumDefinition) {
    auto s = oracle_llr_score(kHalfLlr);
    const Series x = random_series(15, 7);
    std::vector<double> prefix{0.0};
    for (double v : x.values()) prefix.push_back(prefix.back() + kHalfLlr(v));
    const double best = *std::max_element(prefix.begin() + 1, prefix.end() - 1);
    for (Index t = 1; t < 15; ++t) EXPECT_NEAR(s->evaluate(x, t), prefix[t] - best, 1e-12);
}

TEST(SplitLearned, EqualsOracleForm) {
    auto llr = make_llr(FittedDensity::gaussian(-0.2, 1.3), FittedDensity::gaussian(0.9, 0.8));
    auto a = oracle_llr_score(llr), b = split_learned_llr_score(llr);
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
        const Series x = random_series(10, seed);
        for (Index t = 1; t < 10; ++t) EXPECT_EQ(a->evaluate(x, t), b->evaluate(x, t));
    }
    EXPECT_NE(b->name().find("gaussian-fit"), std::string::npos);
}

TEST(FixedReference, BoundsProfileScore) {
    auto profile = oracle_llr_score(kHalfLlr);
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
        const Series x = random_series(9, seed);
        const Index mle = mle_changepoint(x, kHalfLlr);
        auto frozen = fixed_reference_llr_score(kHalfLlr, mle);
        for (Index t = 1; t < 9; ++t) {
            EXPECT_EQ(frozen->evaluate(x, t), profile->evaluate(x, t));
            auto rng = substream(seed, t);
            for (int k = 0; k < 20; ++k) {
                const Series y = apply(sample_split_permutation(9, t, rng), x);
                EXPECT_GE(frozen->evaluate(y, t), profile->evaluate(y, t));
            }
        }
    }
}

TEST(Classifier, ZeroLogits) {
    auto s = classifier_logit_score();
    Series x({0, 0, 0, 0}, SeriesKind::logit);
    for (Index t = 1; t < 4; ++t) EXPECT_EQ(s->evaluate(x, t), 0.0);
}

TEST(Classifier, HandExample) {
    auto s = classifier_logit_score();
    Series x({-3, -3, 3, 3}, SeriesKind::logit);
    EXPECT_EQ(s->evaluate(x, 2), 0.0);
    EXPECT_EQ(s->evaluate(x, 1), -3.0);
    EXPECT_EQ(s->evaluate(x, 3), -3.0);
}

TEST(Classifier, RequiresLogitSeries) {
    EXPECT_THROW(classifier_logit_score()->evaluate(Series({1, 2}), 1), std::invalid_argument);
}

TEST(GaussianLearned, SeparatedClusters) {
    std::vector<double> v(10, -5.0);
    v.insert(v.end(), 10, 5.0);
    for (int i = 0; i < 20; ++i) v[i] += 0.01 * (i % 3);
    const Series x(v);
    for (auto mode : {GaussianVariance::pooled(), GaussianVariance::fixed(1.0)}) {
        auto s = gaussian_learned_llr_score(mode);
        EXPECT_EQ(s->evaluate(x, 10), 0.0);
        for (Index t = 1; t < 20; ++t) EXPECT_LE(s->evaluate(x, t), 0.0);
    }
}

TEST(GaussianLearned, ConstantSeriesKnownVariance) {
    auto s = gaussian_learned_llr_score(GaussianVariance::fixed(2.0));
    Series x({1.5, 1.5, 1.5, 1.5, 1.5, 1.5});
    for (Index t = 1; t < 6; ++t) EXPECT_EQ(s->evaluate(x, t), 0.0);
}

TEST(GaussianLearned, ConstantSeriesPooledIsFinite) {
    auto s = gaussian_learned_llr_score();
    Series x({1.5, 1.5, 1.5, 1.5, 1.5, 1.5});
    for (Index t = 1; t < 6; ++t) EXPECT_TRUE(std::isfinite(s->evaluate(x, t)));
}

TEST(GaussianLearned, NonPositive) {
    for (auto mode : {GaussianVariance::pooled(), GaussianVariance::fixed(1.0)}) {
        auto s = gaussian_learned_llr_score(mode);
        for (std::uint64_t seed = 0; seed < 20; ++seed) {
            const Series x = random_series(15, seed);
            for (Index t = 1; t < 15; ++t) EXPECT_LE(s->evaluate(x, t), 0.0);
        }
    }
    EXPECT_THROW(gaussian_learned_llr_score(GaussianVariance::fixed(0.0)), std::invalid_argument);
}

TEST(Reversal, MatchingScoresAgreeBitwise) {
    const std::vector<ScorePtr> scores = {
        weighted_mean_score(WeightScheme::linear()), weighted_mean_score(WeightScheme::exponential()),
        weighted_mean_score(WeightScheme::uniform()), oracle_llr_score(kHalfLlr)};
    for (const auto& s : scores) {
        ASSERT_TRUE(s->reversal_compatible());
        auto r = s->reversed();
        ASSERT_TRUE(r);
        for (std::uint64_t seed = 0; seed < 10; ++seed) {
            const Series x = random_series(11, seed);
            const Series y = reverse_series(x);
            for (Index t = 1; t < 11; ++t) EXPECT_EQ(r->evaluate(y, 11 - t), s->evaluate(x, t)) << s->name();
        }
    }
}

TEST(Reversal, ClassifierAgreesBitwise) {
    auto s = classifier_logit_score();
    auto r = s->reversed();
    const Series x(std::vector<double>{-2.1, 0.3, -1.7, 2.2, 1.9, 0.4}, SeriesKind::logit);
    for (Index t = 1; t < 6; ++t) EXPECT_EQ(r->evaluate(reverse_series(x), 6 - t), s->evaluate(x, t));
}

TEST(Reversal, GaussianLearnedAgrees) {
    auto s = gaussian_learned_llr_score();
    const Series x = random_series(14, 21);
    for (Index t = 1; t < 14; ++t)
        EXPECT_NEAR(s->reversed()->evaluate(reverse_series(x), 14 - t), s->evaluate(x, t), 1e-9);
}

TEST(SetScores, Membership) {
    auto s = set_membership_score([](const Series&) { return std::vector<Index>{2, 3}; });
    const Series x({1, 2, 3, 4, 5});
    EXPECT_EQ(s->evaluate(x, 2), 1.0);
    EXPECT_EQ(s->evaluate(x, 4), 0.0);
    EXPECT_FALSE(s->reversal_compatible());
}

TEST(SetScores, Distance) {
    auto s = set_distance_score([](const Series&) { return std::vector<Index>{5}; });
    const Series x({1, 2, 3, 4, 5, 6, 7});
    EXPECT_EQ(s->evaluate(x, 5), 0.0);
    EXPECT_EQ(s->evaluate(x, 2), -3.0);
    auto empty = set_distance_score([](const Series&) { return std::vector<Index>{}; });
    EXPECT_THROW(empty->evaluate(x, 1), std::domain_error);
}

TEST(PvalRatio, OneAtPointEstimate) {
    auto s = pval_ratio_score(
        [](const Series& x) {
            std::vector<double> p(x.size() - 1);
            for (std::size_t i = 0; i < p.size(); ++i) p[i] = 1.0 / (1.0 + i);
            return p;
        },
        [](const Series&) { return Index{3}; });
    const Series x({1, 2, 3, 4, 5, 6});
    EXPECT_EQ(s->evaluate(x, 3), 1.0);
    EXPECT_DOUBLE_EQ(s->evaluate(x, 1), 3.0);
}

TEST(PvalRatio, ConstantPvalIsOne) {
    auto s = pval_ratio_score([](const Series& x) { return std::vector<double>(x.size() - 1, 0.3); },
                              [](const Series&) { return Index{1}; });
    const Series x({4, 1, 3, 2});
    for (Index t = 1; t < 4; ++t) EXPECT_EQ(s->evaluate(x, t), 1.0);
}

TEST(PvalRatio, FloorsZeros) {
    auto s = pval_ratio_score([](const Series& x) { return std::vector<double>(x.size() - 1, 0.0); },
                              [](const Series&) { return Index{1}; }, 0.01);
    EXPECT_EQ(s->evaluate(Series({1, 2, 3}), 2), 1.0);
    EXPECT_THROW(pval_ratio_score(nullptr, nullptr, 0.0), std::invalid_argument);
}

TEST(Transformed, AppliesFunction) {
    auto inner = oracle_llr_score(kHalfLlr);
    auto t = transformed_score(inner, [](double v) { return std::floor(v); }, "floor");
    const Series x({-1, -1, 2, 2});
    EXPECT_EQ(t->evaluate(x, 1), -2.0);
    EXPECT_EQ(t->name(), "floor(oracle-llr)");
}

TEST(Purity, RepeatedEvaluationIdentical) {
    auto s = gaussian_learned_llr_score();
    const Series x = random_series(30, 1);
    for (Index t = 1; t < 30; ++t) EXPECT_EQ(s->evaluate(x, t), s->evaluate(x, t));
}
