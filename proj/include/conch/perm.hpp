#pragma once

// The split-permutation group: permutations of {1..n} that map {1..t} onto
// itself and {t+1..n} onto itself.

#include <cstdint>
#include <span>
#include <vector>

#include "conch/core.hpp"
#include "conch/rng.hpp"

namespace conch {

inline constexpr std::uint64_t kDefaultEnumerationCap = 40320;

class SplitPermutation {
public:
    static SplitPermutation identity(std::size_t n, Index t);

    /// `images[i-1]` is the 1-based image of i. Validated as a block-preserving
    /// bijection.
    SplitPermutation(std::size_t n, Index t, std::vector<Index> images);

    std::size_t n() const noexcept { return images_.size(); }
    Index t() const noexcept { return t_; }

    /// Image of i (both 1-based).
    Index operator()(Index i) const { return images_.at(i - 1); }

    /// Images of 1..t and of t+1..n.
    std::span<const Index> left_map() const noexcept { return {images_.data(), t_}; }
    std::span<const Index> right_map() const noexcept {
        return {images_.data() + t_, images_.size() - t_};
    }

    bool is_identity() const;

    /// (a.compose(b))(i) = a(b(i)).
    SplitPermutation compose(const SplitPermutation& inner) const;
    SplitPermutation inverse() const;

    friend bool operator==(const SplitPermutation&, const SplitPermutation&) = default;

private:
    SplitPermutation(Index t, std::vector<Index> images, bool /*trusted*/);

    friend std::vector<SplitPermutation> enumerate_split_permutations(std::size_t, Index,
                                                                      std::uint64_t);

    Index t_ = 0;
    std::vector<Index> images_;
};

/// |Pi_t| = t! (n-t)!, saturating at UINT64_MAX.
std::uint64_t split_group_size(std::size_t n, Index t);

/// Uniform draw from Pi_t: the left block is shuffled first, then the right
/// block, both with the same stream.
SplitPermutation sample_split_permutation(std::size_t n, Index t, RngStream& rng);

/// Every element of Pi_t once, left block in lexicographic order outermost.
/// Throws GroupTooLarge when |Pi_t| exceeds `cap`.
std::vector<SplitPermutation> enumerate_split_permutations(
    std::size_t n, Index t, std::uint64_t cap = kDefaultEnumerationCap);

/// Output position i holds input entry perm(i).
Series apply(const SplitPermutation& perm, const Series& s);

/// In-place equivalent of apply(sample_split_permutation(n, t, rng), values):
/// consumes the stream identically.
void shuffle_blocks(std::span<double> values, Index t, RngStream& rng);

} // namespace conch
