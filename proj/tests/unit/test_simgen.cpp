#include <gtest/gtest.h>

#include <cmath>
#include <sstream>

#include "conch/engine.hpp"
#include "conch/simgen.hpp"
#include "oracles.hpp"

using namespace conch;

TEST(Generate, GaussianHeadline) {
    auto scn = Scenario::gaussian_shift(1000, 400, -1, 1, 1);
    auto rng = substream(1, 0);
    auto g = generate(scn, rng);
    ASSERT_EQ(g.series.size(), 1000u);
    EXPECT_EQ(g.changepoints, (std::vector<Index>{400}));
    double pre = 0, post = 0;
    for (Index i = 1; i <= 400; ++i) pre += g.series.at(i);
    for (Index i = 401; i <= 1000; ++i) post += g.series.at(i);
    EXPECT_NEAR(pre / 400, -1.0, 0.2);
    EXPECT_NEAR(post / 600, 1.0, 0.2);
}

TEST(Generate, Deterministic) {
    auto scn = Scenario::laplace_shift(100, 40, -1, 1, 3);
    auto a = substream(9, 9), b = substream(9, 9);
    EXPECT_EQ(generate(scn, a).series, generate(scn, b).series);
}

TEST(Generate, LaplaceScale) {
    auto scn = Scenario::laplace_shift(20000, 10000, -1, 1, 3);
    auto rng = substream(2, 0);
    auto g = generate(scn, rng);
    double mad = 0;
    for (Index i = 1; i <= 10000; ++i) mad += std::abs(g.series.at(i) + 1.0);
    EXPECT_NEAR(mad / 10000, 3.0, 0.1); // E|X - mu| = b
}

TEST(Generate, TwoUrnFrequencies) {
    auto scn = Scenario::two_urn(800, 350, 0.49, 2500);
    auto rng = substream(3, 0);
    auto g = generate(scn, rng);
    double red_pre = 0, red_post = 0;
    for (Index i = 1; i <= 350; ++i) red_pre += g.series.at(i);
    for (Index i = 351; i <= 800; ++i) red_post += g.series.at(i);
    EXPECT_NEAR(red_pre / 350, 0.01, 3 * std::sqrt(0.01 * 0.99 / 350));
    EXPECT_NEAR(red_post / 450, 0.99, 3 * std::sqrt(0.01 * 0.99 / 450));
    for (double v : g.series.values()) EXPECT_TRUE(v == 0.0 || v == 1.0);
}

TEST(Generate, TwoUrnNeverExceedsRedCount) {
    // Drawing the whole urn returns exactly its red count.
    auto scn = Scenario::two_urn(200, 100, 0.3, 100);
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
        auto rng = substream(seed, 0);
        auto g = generate(scn, rng);
        double pre = 0, post = 0;
        for (Index i = 1; i <= 100; ++i) pre += g.series.at(i);
        for (Index i = 101; i <= 200; ++i) post += g.series.at(i);
        EXPECT_EQ(pre, 20.0);
        EXPECT_EQ(post, 80.0);
    }
}

TEST(Generate, MultiGaussianSetup) {
    auto scn = Scenario::four_change_gaussian();
    auto rng = substream(4, 0);
    auto g = generate(scn, rng);
    EXPECT_EQ(g.changepoints, (std::vector<Index>{150, 500, 820, 1100}));
    const std::vector<std::pair<Index, Index>> segs{{1, 150}, {151, 500}, {501, 820}, {821, 1100}, {1101, 1500}};
    const std::vector<double> means{-1, 0.5, 1.5, -2, -1};
    for (std::size_t k = 0; k < segs.size(); ++k) {
        double s = 0;
        for (Index i = segs[k].first; i <= segs[k].second; ++i) s += g.series.at(i);
        EXPECT_NEAR(s / (segs[k].second - segs[k].first + 1), means[k], 0.3);
    }
}

TEST(Scenario, Validation) {
    EXPECT_THROW(Scenario::gaussian_shift(10, 10, 0, 1, 1).validate(), std::invalid_argument);
    EXPECT_THROW(Scenario::gaussian_shift(10, 5, 0, 1, 0).validate(), std::invalid_argument);
    EXPECT_THROW(Scenario::two_urn(800, 350, 0.5).validate(), std::invalid_argument);
    EXPECT_THROW(Scenario::two_urn(6000, 350, 0.2).validate(), std::invalid_argument);
    EXPECT_THROW(Scenario::multi_gaussian(100, {50, 40}, {0, 1, 2}, 1).validate(), std::invalid_argument);
    EXPECT_THROW(Scenario::multi_gaussian(100, {40, 50}, {0, 1}, 1).validate(), std::invalid_argument);
    EXPECT_NO_THROW(Scenario::four_change_gaussian().validate());
}

TEST(Scenario, ParseAndFormatRoundTrip) {
    std::istringstream in("# headline\nkind = gaussian_shift\nn = 1000\nxi = 400 # truth\nmu0 = -1\nmu1 = 1\nscale = 1\n");
    auto scn = parse_scenario(in);
    EXPECT_EQ(scn.kind, Scenario::Kind::gaussian_shift);
    EXPECT_EQ(scn.n, 1000u);
    EXPECT_EQ(scn.xi, 400u);
    std::istringstream again(format_scenario(scn));
    auto back = parse_scenario(again);
    EXPECT_EQ(back.xi, 400u);
    EXPECT_EQ(back.mu0, -1.0);

    std::istringstream multi(format_scenario(Scenario::four_change_gaussian()));
    auto m = parse_scenario(multi);
    EXPECT_EQ(m.changepoints, (std::vector<Index>{150, 500, 820, 1100}));
    EXPECT_EQ(m.means.size(), 5u);
}

TEST(Scenario, ParseErrorsNameLine) {
    std::istringstream bad("kind = gaussian_shift\nn = abc\n");
    try {
        parse_scenario(bad);
        FAIL();
    } catch (const std::invalid_argument& e) {
        EXPECT_NE(std::string(e.what()).find("line 2"), std::string::npos);
    }
    std::istringstream unknown("kind = nope\n");
    EXPECT_THROW(parse_scenario(unknown), std::invalid_argument);
    std::istringstream missing("n = 10\n");
    EXPECT_THROW(parse_scenario(missing), std::invalid_argument);
}

TEST(OptimalScore, ZeroAtTruth) {
    auto scn = Scenario::gaussian_shift(60, 24, -1, 1, 1);
    auto s = optimal_score_oracle(scn);
    auto rng = substream(5, 0);
    auto g = generate(scn, rng);
    EXPECT_EQ(s->evaluate(g.series, 24), 0.0);
    EXPECT_THROW(optimal_score_oracle(Scenario::two_urn(800, 350, 0.2)), std::invalid_argument);
    EXPECT_THROW(optimal_score_oracle(Scenario::four_change_gaussian()), std::invalid_argument);
}

TEST(OptimalScore, ExpTransformLeavesPvaluesUnchanged) {
    auto scn = Scenario::gaussian_shift(40, 16, -1, 1, 1);
    auto s = optimal_score_oracle(scn);
    auto e = transformed_score(s, [](double v) { return std::exp(v); }, "exp");
    auto rng = substream(6, 0);
    auto g = generate(scn, rng);
    EXPECT_EQ(pvalues(g.series, *s, PvalueMethod::mc(100), 3), pvalues(g.series, *e, PvalueMethod::mc(100), 3));
}

TEST(Exchangeability, ShufflingWithinSegmentsKeepsSummaryDistribution) {
    // Segment-mean difference of generated data vs. the same data shuffled
    // within segments: two-sample KS p-value should not be tiny.
    auto scn = Scenario::gaussian_shift(50, 20, -1, 1, 1);
    std::vector<double> a, b;
    for (int r = 0; r < 400; ++r) {
        auto rng = substream(7, r);
        auto g = generate(scn, rng);
        std::vector<double> v(g.series.values().begin(), g.series.values().end());
        auto stat = [](const std::vector<double>& x) {
            double s = 0;
            for (int i = 0; i < 10; ++i) s += x[i];
            return s / 10.0;
        };
        a.push_back(stat(v));
        auto srng = substream(8, r);
        shuffle_blocks(v, 20, srng);
        b.push_back(stat(v));
    }
    std::sort(a.begin(), a.end());
    std::sort(b.begin(), b.end());
    double d = 0;
    std::size_t i = 0, j = 0;
    while (i < a.size() && j < b.size()) {
        if (a[i] <= b[j]) ++i;
        else ++j;
        d = std::max(d, std::abs(double(i) / a.size() - double(j) / b.size()));
    }
    // Two-sample KS critical value at level 0.001 for m = n = 400.
    EXPECT_LT(d, 1.95 * std::sqrt(2.0 / 400));
}
