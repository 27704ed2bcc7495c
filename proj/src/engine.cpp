#include "conch/engine.hpp"

#include <algorithm>
#include <atomic>
#include <exception>
#include <thread>
#include <vector>

namespace conch {

void PvalueMethod::validate() const {
    if (monte_carlo() && permutations < 1)
        throw std::invalid_argument("Monte-Carlo p-values need at least one permutation");
}

std::string PvalueMethod::describe() const {
    switch (kind) {
    case Kind::full: return "full";
    case Kind::mc: return "mc(M=" + std::to_string(permutations) + ")";
    case Kind::randomized_full: return "randomized-full";
    case Kind::randomized_mc: return "randomized-mc(M=" + std::to_string(permutations) + ")";
    }
    return "unknown";
}

namespace {

struct Tally {
    std::uint64_t less = 0;
    std::uint64_t equal = 0;
    std::uint64_t total = 0;
};

Tally tally_full(std::span<const double> prepared, Index t, const CppScore& score,
                 std::uint64_t cap) {
    const double observed = score.score_at(prepared, t);
    std::vector<double> buf(prepared.size());
    Tally tally;
    for (const auto& perm : enumerate_split_permutations(prepared.size(), t, cap)) {
        for (Index i = 1; i <= buf.size(); ++i) buf[i - 1] = prepared[perm(i) - 1];
        const int c = score.compare_at(buf, t, observed);
        if (c < 0) ++tally.less;
        else if (c == 0) ++tally.equal;
        ++tally.total;
    }
    return tally;
}

// Draws M block shuffles. When `mirrored`, the stream belongs to candidate
// n - t of the reversed timeline and the shuffle is applied there.
Tally tally_mc(std::span<const double> prepared, Index t, const CppScore& score, std::size_t m,
               RngStream& rng, bool mirrored) {
    const std::size_t n = prepared.size();
    const double observed = score.score_at(prepared, t);
    std::vector<double> buf(n);
    Tally tally;
    for (std::size_t k = 0; k < m; ++k) {
        if (mirrored) {
            std::reverse_copy(prepared.begin(), prepared.end(), buf.begin());
            shuffle_blocks(buf, n - t, rng);
            std::reverse(buf.begin(), buf.end());
        } else {
            std::copy(prepared.begin(), prepared.end(), buf.begin());
            shuffle_blocks(buf, t, rng);
        }
        const int c = score.compare_at(buf, t, observed);
        if (c < 0) ++tally.less;
        else if (c == 0) ++tally.equal;
        ++tally.total;
    }
    return tally;
}

double pvalue_prepared(std::span<const double> prepared, Index t, const CppScore& score,
                       const PvalueMethod& method, RngStream& rng, bool mirrored) {
    check_candidate(prepared.size(), t);
    method.validate();
    using Kind = PvalueMethod::Kind;
    switch (method.kind) {
    case Kind::full: {
        const Tally r = tally_full(prepared, t, score, method.enumeration_cap);
        return static_cast<double>(r.less + r.equal) / static_cast<double>(r.total);
    }
    case Kind::mc: {
        const Tally r = tally_mc(prepared, t, score, method.permutations, rng, mirrored);
        return static_cast<double>(1 + r.less + r.equal) / static_cast<double>(r.total + 1);
    }
    case Kind::randomized_full: {
        const Tally r = tally_full(prepared, t, score, method.enumeration_cap);
        const double u = rng.uniform_open();
        return (static_cast<double>(r.less) + u * static_cast<double>(r.equal)) /
               static_cast<double>(r.total);
    }
    case Kind::randomized_mc: {
        const Tally r = tally_mc(prepared, t, score, method.permutations, rng, mirrored);
        const double u = rng.uniform_open();
        return (static_cast<double>(r.less) + u * static_cast<double>(1 + r.equal)) /
               static_cast<double>(r.total + 1);
    }
    }
    throw std::logic_error("unknown p-value method");
}

} // namespace

double pvalue_full(const Series& s, Index t, const CppScore& score, std::uint64_t cap) {
    check_candidate(s.size(), t);
    const auto prepared = score.prepare(s);
    const Tally r = tally_full(prepared, t, score, cap);
    return static_cast<double>(r.less + r.equal) / static_cast<double>(r.total);
}

double pvalue_mc(const Series& s, Index t, const CppScore& score, std::size_t m, RngStream& rng) {
    check_candidate(s.size(), t);
    const auto prepared = score.prepare(s);
    return pvalue_prepared(prepared, t, score, PvalueMethod::mc(m), rng, false);
}

double pvalue_randomized(const Series& s, Index t, const CppScore& score,
                         const PvalueMethod& method, RngStream& rng) {
    if (!method.randomized())
        throw std::invalid_argument("pvalue_randomized needs a randomized method, got " +
                                    method.describe());
    check_candidate(s.size(), t);
    const auto prepared = score.prepare(s);
    return pvalue_prepared(prepared, t, score, method, rng, false);
}

double pvalue(const Series& s, Index t, const CppScore& score, const PvalueMethod& method,
              RngStream& rng) {
    check_candidate(s.size(), t);
    const auto prepared = score.prepare(s);
    return pvalue_prepared(prepared, t, score, method, rng, false);
}

PValueVector pvalues(const Series& s, const CppScore& score, const PvalueMethod& method,
                     std::uint64_t seed, const EngineOptions& options) {
    method.validate();
    const std::size_t n = s.size();
    const auto prepared = score.prepare(s);
    std::vector<double> out(n - 1);
    std::vector<std::exception_ptr> errors(n - 1);

    auto run = [&](Index t) {
        try {
            const Index stream_t = options.mirrored_streams ? n - t : t;
            RngStream rng = substream(seed, options.stream_offset + stream_t);
            out[t - 1] =
                pvalue_prepared(prepared, t, score, method, rng, options.mirrored_streams);
        } catch (...) {
            errors[t - 1] = std::current_exception();
        }
    };

    const std::size_t workers = std::clamp<std::size_t>(options.threads, 1, n - 1);
    if (workers == 1) {
        for (Index t = 1; t <= n - 1; ++t) run(t);
    } else {
        std::atomic<Index> next{1};
        std::vector<std::thread> pool;
        pool.reserve(workers);
        for (std::size_t w = 0; w < workers; ++w) {
            pool.emplace_back([&] {
                for (Index t = next++; t <= n - 1; t = next++) run(t);
            });
        }
        for (auto& th : pool) th.join();
    }
    // The first failing candidate wins so errors do not depend on scheduling.
    for (const auto& e : errors)
        if (e) std::rethrow_exception(e);
    return PValueVector(std::move(out));
}

Localization confidence_set(const Series& s, const CppScore& score, double alpha,
                            const PvalueMethod& method, std::uint64_t seed,
                            const EngineOptions& options) {
    check_alpha(alpha);
    auto p = pvalues(s, score, method, seed, options);
    auto set = ConfidenceSet::from_pvalues(p, alpha);
    return {std::move(p), std::move(set)};
}

PValueVector frozen_pvalues(const Series& s, const LlrFunction& llr_hat,
                            const PvalueMethod& method, std::uint64_t seed,
                            const EngineOptions& options) {
    const Index xi_hat = mle_changepoint(s, llr_hat);
    const auto score = fixed_reference_llr_score(llr_hat, xi_hat);
    return pvalues(s, *score, method, seed, options);
}

} // namespace conch
