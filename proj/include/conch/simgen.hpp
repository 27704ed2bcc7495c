#pragma once

// Synthetic scenarios with known changepoints.

#include <iosfwd>
#include <string>
#include <vector>

#include "conch/rng.hpp"
#include "conch/scores.hpp"

namespace conch {

/// Parameters for every supported generator. Fields not used by `kind` are
/// ignored. Scale means the standard deviation for Gaussian kinds and the
/// Laplace scale b for laplace_shift.
struct Scenario {
    enum class Kind { gaussian_shift, laplace_shift, two_urn, multi_gaussian };

    Kind kind = Kind::gaussian_shift;
    std::size_t n = 1000;
    Index xi = 400;
    double mu0 = -1.0;
    double mu1 = 1.0;
    double scale = 1.0;
    /// two_urn: urn 1 is red with fraction 0.5 - delta, urn 2 with 0.5 + delta.
    double delta = 0.2;
    std::size_t urn_size = 2500;
    /// multi_gaussian: strictly increasing changepoints and one mean per segment.
    std::vector<Index> changepoints;
    std::vector<double> means;

    static Scenario gaussian_shift(std::size_t n, Index xi, double mu0, double mu1, double sd);
    static Scenario laplace_shift(std::size_t n, Index xi, double mu0, double mu1, double b);
    static Scenario two_urn(std::size_t n, Index xi, double delta, std::size_t urn_size = 2500);
    static Scenario multi_gaussian(std::size_t n, std::vector<Index> changepoints,
                                   std::vector<double> means, double sd);
    /// n=1500, changepoints 150/500/820/1100, means -1, 0.5, 1.5, -2, -1, sd 1.
    static Scenario four_change_gaussian();

    /// Throws std::invalid_argument naming the offending parameter.
    void validate() const;

    /// True changepoints: {xi} for single-change kinds.
    std::vector<Index> true_changepoints() const;
};

std::string to_string(Scenario::Kind kind);
Scenario::Kind scenario_kind_from_string(const std::string& name);

struct GeneratedSeries {
    Series series;
    std::vector<Index> changepoints;
};

/// gaussian/laplace/multi: independent draws per segment. two_urn: 1 = red,
/// drawn without replacement from urn 1 for i <= xi and from urn 2 after.
GeneratedSeries generate(const Scenario& scn, RngStream& rng);

/// S_t = sum_{i<=t} l(x_i) - sum_{i<=xi} l(x_i) with the true LLR and true xi.
/// Throws std::invalid_argument for two_urn and multi_gaussian.
ScorePtr optimal_score_oracle(const Scenario& scn);

/// The true LLR of a single-change scenario.
LlrFunction scenario_llr(const Scenario& scn);

/// key = value lines; '#' starts a comment. Keys: kind, n, xi, mu0, mu1,
/// scale, delta, urn_size, changepoints, means (comma-separated lists).
Scenario parse_scenario(std::istream& in);
Scenario load_scenario(const std::string& path);
std::string format_scenario(const Scenario& scn);

} // namespace conch
