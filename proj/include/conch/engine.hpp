#pragma once

// Conformal p-values over split permutations and the confidence sets built
// from them.

#include <cstdint>
#include <string>

#include "conch/core.hpp"
#include "conch/density.hpp"
#include "conch/perm.hpp"
#include "conch/rng.hpp"
#include "conch/scores.hpp"

namespace conch {

inline constexpr std::size_t kDefaultPermutations = 300;

struct PvalueMethod {
    enum class Kind { full, mc, randomized_full, randomized_mc };

    Kind kind = Kind::mc;
    /// Monte-Carlo draws M; ignored by the full variants.
    std::size_t permutations = kDefaultPermutations;
    std::uint64_t enumeration_cap = kDefaultEnumerationCap;

    static PvalueMethod full(std::uint64_t cap = kDefaultEnumerationCap) {
        return {Kind::full, 0, cap};
    }
    static PvalueMethod mc(std::size_t m = kDefaultPermutations) { return {Kind::mc, m}; }
    static PvalueMethod randomized_full(std::uint64_t cap = kDefaultEnumerationCap) {
        return {Kind::randomized_full, 0, cap};
    }
    static PvalueMethod randomized_mc(std::size_t m = kDefaultPermutations) {
        return {Kind::randomized_mc, m};
    }

    bool randomized() const noexcept {
        return kind == Kind::randomized_full || kind == Kind::randomized_mc;
    }
    bool monte_carlo() const noexcept { return kind == Kind::mc || kind == Kind::randomized_mc; }

    /// Throws std::invalid_argument for M < 1 on Monte-Carlo variants.
    void validate() const;

    /// e.g. "mc(M=300)", "full", "randomized-full".
    std::string describe() const;
};

struct EngineOptions {
    /// Worker threads for the loop over candidates; results do not depend on it.
    std::size_t threads = 1;
    /// Candidate t draws from substream(seed, stream_offset + t).
    std::uint64_t stream_offset = 0;
    /// Candidate t draws from stream n - t and applies it on the reversed
    /// timeline, so a run on reverse(s) replays the draws of a run on s.
    bool mirrored_streams = false;
};

/// (1/|Pi_t|) sum over Pi_t of 1{S_t(pi s) <= S_t(s)}. Throws GroupTooLarge
/// beyond `cap`.
double pvalue_full(const Series& s, Index t, const CppScore& score,
                   std::uint64_t cap = kDefaultEnumerationCap);

/// (1 + hits over M uniform draws) / (M + 1).
double pvalue_mc(const Series& s, Index t, const CppScore& score, std::size_t m, RngStream& rng);

/// Strict-less fraction plus U times the tie fraction, U ~ Uniform(0,1) from
/// `rng`. For randomized_mc the identity term is counted as a tie: the result
/// is (less + U (1 + ties)) / (M + 1), with U drawn after the M permutations.
double pvalue_randomized(const Series& s, Index t, const CppScore& score,
                         const PvalueMethod& method, RngStream& rng);

/// Dispatches on method.kind.
double pvalue(const Series& s, Index t, const CppScore& score, const PvalueMethod& method,
              RngStream& rng);

struct Localization {
    PValueVector pvalues;
    ConfidenceSet set;
};

/// p_t for every candidate, candidate t using substream(seed, stream_offset + t).
PValueVector pvalues(const Series& s, const CppScore& score, const PvalueMethod& method,
                     std::uint64_t seed, const EngineOptions& options = {});

/// pvalues() plus {t : p_t > alpha}.
Localization confidence_set(const Series& s, const CppScore& score, double alpha,
                            const PvalueMethod& method, std::uint64_t seed,
                            const EngineOptions& options = {});

/// Diagnostic p-values of the split-learned score with the MLE computed once on
/// `s` and held fixed under permutation.
PValueVector frozen_pvalues(const Series& s, const LlrFunction& llr_hat,
                            const PvalueMethod& method, std::uint64_t seed,
                            const EngineOptions& options = {});

} // namespace conch
