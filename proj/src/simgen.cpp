#include "conch/simgen.hpp"

#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace conch {

Scenario Scenario::gaussian_shift(std::size_t n, Index xi, double mu0, double mu1, double sd) {
    Scenario s;
    s.kind = Kind::gaussian_shift;
    s.n = n;
    s.xi = xi;
    s.mu0 = mu0;
    s.mu1 = mu1;
    s.scale = sd;
    return s;
}

Scenario Scenario::laplace_shift(std::size_t n, Index xi, double mu0, double mu1, double b) {
    Scenario s = gaussian_shift(n, xi, mu0, mu1, b);
    s.kind = Kind::laplace_shift;
    return s;
}

Scenario Scenario::two_urn(std::size_t n, Index xi, double delta, std::size_t urn_size) {
    Scenario s;
    s.kind = Kind::two_urn;
    s.n = n;
    s.xi = xi;
    s.delta = delta;
    s.urn_size = urn_size;
    return s;
}

Scenario Scenario::multi_gaussian(std::size_t n, std::vector<Index> changepoints,
                                  std::vector<double> means, double sd) {
    Scenario s;
    s.kind = Kind::multi_gaussian;
    s.n = n;
    s.changepoints = std::move(changepoints);
    s.means = std::move(means);
    s.scale = sd;
    return s;
}

Scenario Scenario::four_change_gaussian() {
    return multi_gaussian(1500, {150, 500, 820, 1100}, {-1.0, 0.5, 1.5, -2.0, -1.0}, 1.0);
}

void Scenario::validate() const {
    auto fail = [](const std::string& msg) { throw std::invalid_argument("scenario: " + msg); };
    if (n < 2) fail("n must be >= 2");
    if (kind == Kind::multi_gaussian) {
        if (changepoints.empty()) fail("changepoints must not be empty");
        Index prev = 0;
        for (Index c : changepoints) {
            if (c <= prev || c > n - 1) fail("changepoints must be strictly increasing in 1..n-1");
            prev = c;
        }
        if (means.size() != changepoints.size() + 1)
            fail("means needs one entry per segment (" + std::to_string(changepoints.size() + 1) +
                 ")");
        for (double m : means)
            if (!std::isfinite(m)) fail("means must be finite");
        if (!(scale > 0.0) || !std::isfinite(scale)) fail("scale must be positive");
        return;
    }
    if (xi < 1 || xi > n - 1) fail("xi must lie in 1..n-1");
    if (kind == Kind::two_urn) {
        if (!(delta > 0.0 && delta < 0.5)) fail("delta must lie in (0, 0.5)");
        if (xi > urn_size || n - xi > urn_size) fail("draws exceed the urn size");
        return;
    }
    if (!std::isfinite(mu0) || !std::isfinite(mu1)) fail("means must be finite");
    if (!(scale > 0.0) || !std::isfinite(scale)) fail("scale must be positive");
}

std::vector<Index> Scenario::true_changepoints() const {
    if (kind == Kind::multi_gaussian) return changepoints;
    return {xi};
}

std::string to_string(Scenario::Kind kind) {
    switch (kind) {
    case Scenario::Kind::gaussian_shift: return "gaussian_shift";
    case Scenario::Kind::laplace_shift: return "laplace_shift";
    case Scenario::Kind::two_urn: return "two_urn";
    case Scenario::Kind::multi_gaussian: return "multi_gaussian";
    }
    return "unknown";
}

Scenario::Kind scenario_kind_from_string(const std::string& name) {
    for (auto k : {Scenario::Kind::gaussian_shift, Scenario::Kind::laplace_shift,
                   Scenario::Kind::two_urn, Scenario::Kind::multi_gaussian})
        if (to_string(k) == name) return k;
    throw std::invalid_argument("unknown scenario kind '" + name + "'");
}

namespace {

void draw_urn(std::vector<double>& out, std::size_t draws, std::size_t urn_size, double red_fraction,
              RngStream& rng) {
    const auto red = static_cast<std::size_t>(std::llround(red_fraction * static_cast<double>(urn_size)));
    std::vector<unsigned char> urn(urn_size, 0);
    for (std::size_t i = 0; i < red; ++i) urn[i] = 1;
    for (std::size_t i = 0; i < draws; ++i) {
        const std::size_t j = i + static_cast<std::size_t>(rng.below(urn_size - i));
        std::swap(urn[i], urn[j]);
        out.push_back(urn[i]);
    }
}

} // namespace

GeneratedSeries generate(const Scenario& scn, RngStream& rng) {
    scn.validate();
    std::vector<double> v;
    v.reserve(scn.n);
    switch (scn.kind) {
    case Scenario::Kind::gaussian_shift:
        for (Index i = 1; i <= scn.n; ++i)
            v.push_back((i <= scn.xi ? scn.mu0 : scn.mu1) + scn.scale * rng.normal());
        break;
    case Scenario::Kind::laplace_shift:
        for (Index i = 1; i <= scn.n; ++i)
            v.push_back((i <= scn.xi ? scn.mu0 : scn.mu1) + scn.scale * rng.laplace());
        break;
    case Scenario::Kind::two_urn:
        draw_urn(v, scn.xi, scn.urn_size, 0.5 - scn.delta, rng);
        draw_urn(v, scn.n - scn.xi, scn.urn_size, 0.5 + scn.delta, rng);
        break;
    case Scenario::Kind::multi_gaussian: {
        std::size_t seg = 0;
        for (Index i = 1; i <= scn.n; ++i) {
            while (seg < scn.changepoints.size() && i > scn.changepoints[seg]) ++seg;
            v.push_back(scn.means[seg] + scn.scale * rng.normal());
        }
        break;
    }
    }
    return {Series(std::move(v), SeriesKind::raw), scn.true_changepoints()};
}

LlrFunction scenario_llr(const Scenario& scn) {
    scn.validate();
    switch (scn.kind) {
    case Scenario::Kind::gaussian_shift: return gaussian_oracle_llr(scn.mu0, scn.mu1, scn.scale);
    case Scenario::Kind::laplace_shift: return laplace_oracle_llr(scn.mu0, scn.mu1, scn.scale);
    default:
        throw std::invalid_argument("no closed-form i.i.d. LLR for scenario kind " +
                                    to_string(scn.kind));
    }
}

ScorePtr optimal_score_oracle(const Scenario& scn) {
    return fixed_reference_llr_score(scenario_llr(scn), scn.xi);
}

namespace {

std::string trim(const std::string& s) {
    const auto a = s.find_first_not_of(" \t\r");
    if (a == std::string::npos) return "";
    const auto b = s.find_last_not_of(" \t\r");
    return s.substr(a, b - a + 1);
}

template <typename T>
std::vector<T> parse_list(const std::string& text, const std::string& key) {
    std::vector<T> out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        item = trim(item);
        std::istringstream is(item);
        T v;
        if (!(is >> v) || !(is >> std::ws).eof())
            throw std::invalid_argument("scenario: bad list entry '" + item + "' for " + key);
        out.push_back(v);
    }
    return out;
}

template <typename T>
T parse_value(const std::string& text, const std::string& key) {
    auto v = parse_list<T>(text, key);
    if (v.size() != 1) throw std::invalid_argument("scenario: " + key + " takes one value");
    return v[0];
}

} // namespace

Scenario parse_scenario(std::istream& in) {
    Scenario scn;
    bool have_kind = false;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw std::invalid_argument("scenario line " + std::to_string(lineno) +
                                        ": expected key = value");
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        try {
            if (key == "kind") {
                scn.kind = scenario_kind_from_string(value);
                have_kind = true;
            } else if (key == "n") scn.n = parse_value<std::size_t>(value, key);
            else if (key == "xi") scn.xi = parse_value<Index>(value, key);
            else if (key == "mu0") scn.mu0 = parse_value<double>(value, key);
            else if (key == "mu1") scn.mu1 = parse_value<double>(value, key);
            else if (key == "scale") scn.scale = parse_value<double>(value, key);
            else if (key == "delta") scn.delta = parse_value<double>(value, key);
            else if (key == "urn_size") scn.urn_size = parse_value<std::size_t>(value, key);
            else if (key == "changepoints") scn.changepoints = parse_list<Index>(value, key);
            else if (key == "means") scn.means = parse_list<double>(value, key);
            else throw std::invalid_argument("unknown key '" + key + "'");
        } catch (const std::invalid_argument& e) {
            throw std::invalid_argument("scenario line " + std::to_string(lineno) + ": " + e.what());
        }
    }
    if (!have_kind) throw std::invalid_argument("scenario: missing 'kind'");
    scn.validate();
    return scn;
}

Scenario load_scenario(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open scenario file " + path);
    return parse_scenario(in);
}

std::string format_scenario(const Scenario& scn) {
    std::ostringstream os;
    os.precision(17);
    os << "kind = " << to_string(scn.kind) << "\n";
    os << "n = " << scn.n << "\n";
    auto join = [&](const auto& v) {
        std::ostringstream j;
        j.precision(17);
        for (std::size_t i = 0; i < v.size(); ++i) j << (i ? ", " : "") << v[i];
        return j.str();
    };
    switch (scn.kind) {
    case Scenario::Kind::gaussian_shift:
    case Scenario::Kind::laplace_shift:
        os << "xi = " << scn.xi << "\nmu0 = " << scn.mu0 << "\nmu1 = " << scn.mu1
           << "\nscale = " << scn.scale << "\n";
        break;
    case Scenario::Kind::two_urn:
        os << "xi = " << scn.xi << "\ndelta = " << scn.delta << "\nurn_size = " << scn.urn_size
           << "\n";
        break;
    case Scenario::Kind::multi_gaussian:
        os << "changepoints = " << join(scn.changepoints) << "\nmeans = " << join(scn.means)
           << "\nscale = " << scn.scale << "\n";
        break;
    }
    return os.str();
}

} // namespace conch
