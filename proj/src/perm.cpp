#include "conch/perm.hpp"

#include <algorithm>
#include <limits>
#include <numeric>
#include <string>

namespace conch {

namespace {

template <typename T>
void fisher_yates(std::span<T> block, RngStream& rng) {
    for (std::size_t i = block.size(); i > 1; --i) {
        const auto j = static_cast<std::size_t>(rng.below(i));
        std::swap(block[i - 1], block[j]);
    }
}

std::uint64_t saturating_factorial(std::size_t k) {
    std::uint64_t f = 1;
    for (std::size_t i = 2; i <= k; ++i) {
        if (f > std::numeric_limits<std::uint64_t>::max() / i)
            return std::numeric_limits<std::uint64_t>::max();
        f *= i;
    }
    return f;
}

} // namespace

SplitPermutation::SplitPermutation(Index t, std::vector<Index> images, bool)
    : t_(t), images_(std::move(images)) {}

SplitPermutation SplitPermutation::identity(std::size_t n, Index t) {
    check_candidate(n, t);
    std::vector<Index> images(n);
    std::iota(images.begin(), images.end(), Index{1});
    return SplitPermutation(t, std::move(images), true);
}

SplitPermutation::SplitPermutation(std::size_t n, Index t, std::vector<Index> images)
    : t_(t), images_(std::move(images)) {
    check_candidate(n, t);
    if (images_.size() != n)
        throw std::invalid_argument("permutation has " + std::to_string(images_.size()) +
                                    " images, expected " + std::to_string(n));
    std::vector<bool> seen(n + 1, false);
    for (Index i = 1; i <= n; ++i) {
        const Index img = images_[i - 1];
        if (img < 1 || img > n || seen[img])
            throw std::invalid_argument("not a bijection of 1..n");
        seen[img] = true;
        if ((i <= t) != (img <= t))
            throw std::invalid_argument("permutation mixes the blocks at t=" + std::to_string(t));
    }
}

bool SplitPermutation::is_identity() const {
    for (Index i = 0; i < images_.size(); ++i) {
        if (images_[i] != i + 1) return false;
    }
    return true;
}

SplitPermutation SplitPermutation::compose(const SplitPermutation& inner) const {
    if (inner.n() != n() || inner.t() != t_)
        throw std::invalid_argument("composing permutations from different groups");
    std::vector<Index> images(n());
    for (Index i = 0; i < n(); ++i) images[i] = images_[inner.images_[i] - 1];
    return SplitPermutation(t_, std::move(images), true);
}

SplitPermutation SplitPermutation::inverse() const {
    std::vector<Index> images(n());
    for (Index i = 0; i < n(); ++i) images[images_[i] - 1] = i + 1;
    return SplitPermutation(t_, std::move(images), true);
}

std::uint64_t split_group_size(std::size_t n, Index t) {
    check_candidate(n, t);
    const std::uint64_t a = saturating_factorial(t);
    const std::uint64_t b = saturating_factorial(n - t);
    if (a > std::numeric_limits<std::uint64_t>::max() / b)
        return std::numeric_limits<std::uint64_t>::max();
    return a * b;
}

SplitPermutation sample_split_permutation(std::size_t n, Index t, RngStream& rng) {
    auto perm = SplitPermutation::identity(n, t);
    std::vector<Index> images(perm.left_map().begin(), perm.left_map().end());
    images.insert(images.end(), perm.right_map().begin(), perm.right_map().end());
    fisher_yates(std::span<Index>(images.data(), t), rng);
    fisher_yates(std::span<Index>(images.data() + t, n - t), rng);
    return SplitPermutation(n, t, std::move(images));
}

std::vector<SplitPermutation> enumerate_split_permutations(std::size_t n, Index t,
                                                           std::uint64_t cap) {
    const std::uint64_t size = split_group_size(n, t);
    if (size > cap)
        throw GroupTooLarge("split-permutation group at n=" + std::to_string(n) +
                            ", t=" + std::to_string(t) + " exceeds the enumeration cap of " +
                            std::to_string(cap) + "; use Monte-Carlo p-values");
    std::vector<Index> left(t), right(n - t);
    std::iota(left.begin(), left.end(), Index{1});
    std::iota(right.begin(), right.end(), t + 1);

    std::vector<SplitPermutation> out;
    out.reserve(size);
    do {
        std::sort(right.begin(), right.end());
        do {
            std::vector<Index> images(left);
            images.insert(images.end(), right.begin(), right.end());
            out.push_back(SplitPermutation(t, std::move(images), true));
        } while (std::next_permutation(right.begin(), right.end()));
    } while (std::next_permutation(left.begin(), left.end()));
    return out;
}

Series apply(const SplitPermutation& perm, const Series& s) {
    if (perm.n() != s.size())
        throw std::out_of_range("permutation of length " + std::to_string(perm.n()) +
                                " applied to series of length " + std::to_string(s.size()));
    std::vector<double> out(s.size());
    for (Index i = 1; i <= s.size(); ++i) out[i - 1] = s.values()[perm(i) - 1];
    return Series(std::move(out), s.kind());
}

void shuffle_blocks(std::span<double> values, Index t, RngStream& rng) {
    check_candidate(values.size(), t);
    fisher_yates(values.first(t), rng);
    fisher_yates(values.subspan(t), rng);
}

} // namespace conch
