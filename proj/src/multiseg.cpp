#include "conch/multiseg.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace conch {

Segmentation::Segmentation(std::vector<Index> changepoints, std::size_t n)
    : changepoints_(std::move(changepoints)), n_(n) {
    if (n < 2) throw std::invalid_argument("segmentation needs n >= 2");
    Index prev = 0;
    for (Index c : changepoints_) {
        if (c <= prev || c > n - 1)
            throw std::invalid_argument("changepoints must be strictly increasing in 1..n-1");
        prev = c;
    }
}

double median_heuristic_bandwidth(std::span<const double> values) {
    if (values.size() < 2) throw std::invalid_argument("median heuristic needs >= 2 values");
    const std::size_t m = std::min<std::size_t>(values.size(), 500);
    std::vector<double> pts(m);
    for (std::size_t i = 0; i < m; ++i) pts[i] = values[i * values.size() / m];
    std::vector<double> d;
    d.reserve(m * (m - 1) / 2);
    for (std::size_t i = 0; i < m; ++i)
        for (std::size_t j = i + 1; j < m; ++j) d.push_back(std::abs(pts[i] - pts[j]));
    const std::size_t mid = d.size() / 2;
    std::nth_element(d.begin(), d.begin() + static_cast<std::ptrdiff_t>(mid), d.end());
    double med = d[mid];
    if (d.size() % 2 == 0) {
        const double lower = *std::max_element(d.begin(), d.begin() + static_cast<std::ptrdiff_t>(mid));
        med = 0.5 * (med + lower);
    }
    return med > 0.0 ? med : 1.0;
}

Segmentation kcpd_segment(const Series& s, std::size_t k, KernelBandwidth bandwidth) {
    const std::size_t n = s.size();
    if (k < 1 || k > n - 1)
        throw std::out_of_range("KCPD needs 1 <= K <= n-1, got K=" + std::to_string(k) +
                                " for n=" + std::to_string(n));
    double h;
    if (const auto* fixed = std::get_if<FixedKernelBandwidth>(&bandwidth)) {
        if (!(fixed->h > 0.0)) throw std::invalid_argument("kernel bandwidth must be positive");
        h = fixed->h;
    } else {
        h = median_heuristic_bandwidth(s.values());
    }
    const auto x = s.values();
    const double inv2h2 = 1.0 / (2.0 * h * h);

    // P[i][j] = sum of k(x_a, x_b) over a < i, b < j; row-major (n+1)^2.
    const std::size_t w = n + 1;
    std::vector<double> P(w * w, 0.0);
    for (std::size_t i = 1; i <= n; ++i) {
        double row = 0.0;
        for (std::size_t j = 1; j <= n; ++j) {
            const double d = x[i - 1] - x[j - 1];
            row += std::exp(-d * d * inv2h2);
            P[i * w + j] = P[(i - 1) * w + j] + row;
        }
    }
    // Segment [a, b) in 0-based half-open form.
    auto cost = [&](std::size_t a, std::size_t b) {
        const double g = P[b * w + b] - 2.0 * P[a * w + b] + P[a * w + a];
        const double len = static_cast<double>(b - a);
        return len - g / len;
    };

    const double inf = std::numeric_limits<double>::infinity();
    const std::size_t segs = k + 1;
    // D[m][b]: best cost of m segments covering [0, b).
    std::vector<std::vector<double>> D(segs + 1, std::vector<double>(n + 1, inf));
    std::vector<std::vector<std::size_t>> arg(segs + 1, std::vector<std::size_t>(n + 1, 0));
    for (std::size_t b = 1; b <= n; ++b) D[1][b] = cost(0, b);
    for (std::size_t m = 2; m <= segs; ++m) {
        for (std::size_t b = m; b <= n; ++b) {
            double best = inf;
            std::size_t best_a = m - 1;
            for (std::size_t a = m - 1; a < b; ++a) {
                const double v = D[m - 1][a] + cost(a, b);
                if (v < best) {
                    best = v;
                    best_a = a;
                }
            }
            D[m][b] = best;
            arg[m][b] = best_a;
        }
    }
    std::vector<Index> cps(k);
    std::size_t b = n;
    for (std::size_t m = segs; m >= 2; --m) {
        b = arg[m][b];
        cps[m - 2] = b;
    }
    return Segmentation(std::move(cps), n);
}

std::vector<Index> midpoint_boundaries(const Segmentation& seg, std::size_t n) {
    if (seg.n() != 0 && seg.n() != n)
        throw std::invalid_argument("segmentation was built for a different length");
    const auto& c = seg.changepoints();
    std::vector<Index> out{1};
    for (std::size_t l = 0; l + 1 < c.size(); ++l) out.push_back((c[l] + c[l + 1]) / 2);
    out.push_back(n);
    return out;
}

namespace {

Series subsequence(const Series& s, const std::vector<Index>& positions) {
    std::vector<double> v;
    v.reserve(positions.size());
    for (Index p : positions) v.push_back(s.at(p));
    return Series(std::move(v), s.kind());
}

// Runs the engine on the observations at `positions` (sorted, global) and
// reports local candidate j as positions[j-1].
SegmentResult localize_positions(const Series& s, std::vector<Index> positions,
                                 const ScoreFactory& factory, double alpha,
                                 const PvalueMethod& method, std::uint64_t seed,
                                 EngineOptions options, std::size_t min_length,
                                 std::vector<std::string>& warnings) {
    SegmentResult r;
    r.positions = std::move(positions);
    r.set = ConfidenceSet({}, alpha);
    if (r.positions.size() < std::max<std::size_t>(min_length, 2)) {
        r.skipped = true;
        const std::string where =
            r.positions.empty()
                ? std::string("(empty)")
                : std::to_string(r.positions.front()) + ".." + std::to_string(r.positions.back());
        warnings.push_back("segment " + where + " has " + std::to_string(r.positions.size()) +
                           " points (< " + std::to_string(min_length) + "); skipped");
        return r;
    }
    const Series sub = subsequence(s, r.positions);
    const auto score = factory(sub.size());
    if (!score) throw std::invalid_argument("score factory returned no score");
    const auto loc = confidence_set(sub, *score, alpha, method, seed, options);
    std::vector<Index> global;
    for (Index j : loc.set.indices()) global.push_back(r.positions[j - 1]);
    r.set = ConfidenceSet(std::move(global), alpha);
    return r;
}

} // namespace

SegmentedLocalization conch_seg(const Series& s, const Segmentation& seg,
                                const ScoreFactory& score_factory, double alpha,
                                const PvalueMethod& method, std::uint64_t seed,
                                const EngineOptions& options, std::size_t min_segment_length) {
    check_alpha(alpha);
    const auto bounds = midpoint_boundaries(seg, s.size());
    SegmentedLocalization out;
    out.set = ConfidenceSet({}, alpha);
    for (std::size_t l = 1; l < bounds.size(); ++l) {
        std::vector<Index> pos;
        for (Index p = bounds[l - 1]; p <= bounds[l]; ++p) pos.push_back(p);
        EngineOptions opt = options;
        opt.stream_offset = options.stream_offset + bounds[l - 1] - 1;
        auto r = localize_positions(s, std::move(pos), score_factory, alpha, method, seed, opt,
                                    min_segment_length, out.warnings);
        out.set = out.set.united(r.set);
        out.segments.push_back(std::move(r));
    }
    return out;
}

SegmentedLocalization conch_seg_crossfit(const Series& s, const Segmenter& segmenter,
                                         const ScoreFactory& score_factory, double alpha,
                                         const PvalueMethod& method, std::uint64_t seed,
                                         const EngineOptions& options,
                                         std::size_t min_segment_length) {
    check_alpha(alpha);
    const std::size_t n = s.size();
    if (n < 4) throw std::invalid_argument("cross-fitting needs n >= 4, got " + std::to_string(n));
    std::vector<Index> folds[2];
    for (Index i = 1; i <= n; ++i) folds[(i - 1) % 2].push_back(i);

    SegmentedLocalization out;
    out.set = ConfidenceSet({}, alpha);
    for (int r = 0; r < 2; ++r) {
        const auto& fit_fold = folds[r];
        const auto& eval_fold = folds[1 - r];
        const Series fit_sub = subsequence(s, fit_fold);
        const Segmentation local = segmenter(fit_sub);
        if (local.n() != 0 && local.n() != fit_sub.size())
            throw std::invalid_argument("segmenter returned a segmentation of the wrong length");
        std::vector<Index> global_cps;
        for (Index j : local.changepoints()) global_cps.push_back(fit_fold.at(j - 1));
        const auto bounds = midpoint_boundaries(Segmentation(global_cps, n), n);

        const std::uint64_t fold_seed = derive_seed(seed, static_cast<std::uint64_t>(r));
        for (std::size_t l = 1; l < bounds.size(); ++l) {
            std::vector<Index> pos;
            std::size_t first_rank = 0;
            for (std::size_t q = 0; q < eval_fold.size(); ++q) {
                if (eval_fold[q] < bounds[l - 1] || eval_fold[q] > bounds[l]) continue;
                if (pos.empty()) first_rank = q;
                pos.push_back(eval_fold[q]);
            }
            EngineOptions opt = options;
            opt.stream_offset = options.stream_offset + first_rank;
            auto res = localize_positions(s, std::move(pos), score_factory, alpha, method,
                                          fold_seed, opt, min_segment_length, out.warnings);
            out.set = out.set.united(res.set);
            out.segments.push_back(std::move(res));
        }
    }
    return out;
}

} // namespace conch
