#pragma once

// Test-only reference implementations, written independently of the library's
// enumeration and p-value code.

#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

#include <boost/math/distributions/chi_squared.hpp>

#include "conch/core.hpp"
#include "conch/scores.hpp"

namespace oracle {

/// All n! permutations, kept when they preserve {1..t} and {t+1..n}.
inline std::vector<std::vector<std::size_t>> split_group(std::size_t n, std::size_t t) {
    std::vector<std::size_t> p(n);
    std::iota(p.begin(), p.end(), std::size_t{0});
    std::vector<std::vector<std::size_t>> out;
    do {
        bool ok = true;
        for (std::size_t i = 0; i < n && ok; ++i) ok = (i < t) == (p[i] < t);
        if (ok) out.push_back(p);
    } while (std::next_permutation(p.begin(), p.end()));
    return out;
}

/// Full-group p-value with the score evaluated on each permuted series from
/// scratch.
inline double pvalue_full(const conch::Series& s, std::size_t t, const conch::CppScore& score) {
    const double observed = score.evaluate(s, t);
    std::size_t hits = 0, total = 0;
    for (const auto& p : split_group(s.size(), t)) {
        std::vector<double> v(s.size());
        for (std::size_t i = 0; i < v.size(); ++i) v[i] = s.values()[p[i]];
        if (score.evaluate(conch::Series(v, s.kind()), t) <= observed) ++hits;
        ++total;
    }
    return static_cast<double>(hits) / static_cast<double>(total);
}

/// Asymptotic Kolmogorov tail probability with the small-sample correction
/// lambda = (sqrt(m) + 0.12 + 0.11/sqrt(m)) D.
inline double ks_uniform_pvalue(std::vector<double> u) {
    std::sort(u.begin(), u.end());
    const double m = static_cast<double>(u.size());
    double d = 0.0;
    for (std::size_t i = 0; i < u.size(); ++i) {
        d = std::max(d, static_cast<double>(i + 1) / m - u[i]);
        d = std::max(d, u[i] - static_cast<double>(i) / m);
    }
    const double sq = std::sqrt(m);
    const double lambda = (sq + 0.12 + 0.11 / sq) * d;
    double sum = 0.0;
    for (int j = 1; j <= 100; ++j) {
        const double term = 2.0 * ((j % 2) ? 1.0 : -1.0) * std::exp(-2.0 * j * j * lambda * lambda);
        sum += term;
        if (std::abs(term) < 1e-12) break;
    }
    return std::clamp(sum, 0.0, 1.0);
}

/// Pearson goodness-of-fit p-value against equal cell probabilities.
inline double chi_square_uniform_pvalue(const std::vector<std::size_t>& counts) {
    const double total = std::accumulate(counts.begin(), counts.end(), 0.0);
    const double expected = total / static_cast<double>(counts.size());
    double stat = 0.0;
    for (auto c : counts) stat += (c - expected) * (c - expected) / expected;
    boost::math::chi_squared dist(static_cast<double>(counts.size() - 1));
    return boost::math::cdf(boost::math::complement(dist, stat));
}

} // namespace oracle
