#include "conch/core.hpp"

#include <algorithm>
#include <cmath>
#include <iterator>

namespace conch {

std::string to_string(SeriesKind kind) {
    return kind == SeriesKind::logit ? "logit" : "raw";
}

Series::Series(std::vector<double> values, SeriesKind kind)
    : values_(std::move(values)), kind_(kind) {
    if (values_.size() < 2)
        throw std::invalid_argument("series needs at least 2 observations, got " +
                                    std::to_string(values_.size()));
    for (std::size_t i = 0; i < values_.size(); ++i) {
        if (!std::isfinite(values_[i]))
            throw std::invalid_argument("non-finite observation at position " +
                                        std::to_string(i + 1));
    }
}

double Series::at(Index i) const {
    if (i < 1 || i > values_.size())
        throw std::out_of_range("observation index " + std::to_string(i) + " outside 1.." +
                                std::to_string(values_.size()));
    return values_[i - 1];
}

Series reverse_series(const Series& s) {
    std::vector<double> v(s.values().rbegin(), s.values().rend());
    return Series(std::move(v), s.kind());
}

void check_candidate(std::size_t n, Index t) {
    if (n < 2 || t < 1 || t > n - 1)
        throw std::out_of_range("candidate " + std::to_string(t) + " outside 1.." +
                                std::to_string(n < 2 ? 0 : n - 1));
}

void check_alpha(double alpha) {
    if (!(alpha > 0.0 && alpha < 1.0))
        throw std::invalid_argument("alpha must lie in (0, 1)");
}

PValueVector::PValueVector(std::vector<double> values) : values_(std::move(values)) {
    for (double p : values_) {
        if (!(p >= 0.0 && p <= 1.0))
            throw std::invalid_argument("p-value outside [0, 1]");
    }
}

double PValueVector::at(Index t) const {
    if (t < 1 || t > values_.size())
        throw std::out_of_range("candidate " + std::to_string(t) + " has no p-value");
    return values_[t - 1];
}

ConfidenceSet::ConfidenceSet(std::vector<Index> indices, double alpha)
    : indices_(std::move(indices)), alpha_(alpha) {
    std::sort(indices_.begin(), indices_.end());
    indices_.erase(std::unique(indices_.begin(), indices_.end()), indices_.end());
}

ConfidenceSet ConfidenceSet::from_pvalues(const PValueVector& p, double alpha) {
    check_alpha(alpha);
    std::vector<Index> idx;
    for (Index t = 1; t <= p.size(); ++t) {
        if (p.at(t) > alpha) idx.push_back(t);
    }
    return ConfidenceSet(std::move(idx), alpha);
}

bool ConfidenceSet::contains(Index t) const {
    return std::binary_search(indices_.begin(), indices_.end(), t);
}

std::vector<IndexRun> ConfidenceSet::runs() const {
    std::vector<IndexRun> out;
    for (Index t : indices_) {
        if (!out.empty() && out.back().last + 1 == t)
            out.back().last = t;
        else
            out.push_back({t, t});
    }
    return out;
}

std::string ConfidenceSet::runs_text() const {
    std::string text;
    for (const auto& r : runs()) {
        if (!text.empty()) text += ", ";
        text += std::to_string(r.first);
        if (r.last != r.first) text += "-" + std::to_string(r.last);
    }
    return text;
}

ConfidenceSet ConfidenceSet::from_runs(const std::vector<IndexRun>& runs, double alpha) {
    std::vector<Index> idx;
    for (const auto& r : runs) {
        if (r.last < r.first) throw std::invalid_argument("malformed index run");
        for (Index t = r.first; t <= r.last; ++t) idx.push_back(t);
    }
    return ConfidenceSet(std::move(idx), alpha);
}

ConfidenceSet ConfidenceSet::united(const ConfidenceSet& other) const {
    std::vector<Index> merged;
    std::set_union(indices_.begin(), indices_.end(), other.indices_.begin(),
                   other.indices_.end(), std::back_inserter(merged));
    return ConfidenceSet(std::move(merged), alpha_);
}

} // namespace conch
