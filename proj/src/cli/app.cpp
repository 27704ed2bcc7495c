#include "cli/app.hpp"

#include <algorithm>
#include <charconv>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "conch/calibrate.hpp"
#include "conch/engine.hpp"
#include "conch/multiseg.hpp"
#include "conch/simgen.hpp"

namespace conch::cli {

using nlohmann::json;

namespace {

std::string trim(const std::string& s) {
    const auto a = s.find_first_not_of(" \t\r");
    if (a == std::string::npos) return "";
    const auto b = s.find_last_not_of(" \t\r");
    return s.substr(a, b - a + 1);
}

std::string format_double(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

} // namespace

Series read_series(std::istream& in, const std::string& source) {
    std::vector<double> values;
    SeriesKind kind = SeriesKind::raw;
    bool seen_content = false;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const std::string text = trim(line);
        if (text.empty()) continue;
        if (text[0] == '#') {
            if (!seen_content && text == "#logit") kind = SeriesKind::logit;
            seen_content = true;
            continue;
        }
        seen_content = true;
        double v = 0.0;
        const char* first = text.data();
        const char* last = text.data() + text.size();
        if (*first == '+') ++first;
        const auto [ptr, ec] = std::from_chars(first, last, v);
        if (ec != std::errc() || ptr != last)
            throw std::invalid_argument(source + ":" + std::to_string(lineno) + ": cannot parse '" +
                                        text + "' as a number");
        if (!std::isfinite(v))
            throw std::invalid_argument(source + ":" + std::to_string(lineno) +
                                        ": value is not finite");
        values.push_back(v);
    }
    if (values.size() < 2)
        throw std::invalid_argument(source + ": need at least 2 values, found " +
                                    std::to_string(values.size()));
    return Series(std::move(values), kind);
}

Series load_series(const std::string& path) {
    if (path == "-") return read_series(std::cin, "<stdin>");
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open input file " + path);
    return read_series(in, path);
}

namespace {

struct Options {
    std::string input;
    std::string scenario;
    std::string score = "weighted-linear";
    std::string method = "mc";
    std::size_t permutations = kDefaultPermutations;
    double alpha = 0.05;
    std::uint64_t seed = 0;
    std::size_t threads = 1;
    std::string output = "-";
    std::string format = "json";
    bool no_timing = false;

    // Score parameters.
    std::string family = "gaussian";
    double mu0 = -1.0;
    double mu1 = 1.0;
    double scale = 1.0;
    std::optional<double> variance;
    std::string train_pre;
    std::string train_post;

    // Command-specific.
    std::size_t bootstrap = 500;
    std::size_t k = 1;
    std::optional<double> bandwidth;
    bool crossfit = false;
    std::size_t min_segment = kDefaultMinSegmentLength;
    std::size_t replicates = 100;
};

const std::vector<std::string> kScoreNames = {
    "weighted-linear", "weighted-exponential", "weighted-uniform", "oracle-llr",
    "gaussian-learned", "split-gaussian", "split-kde", "classifier", "optimal"};

void add_common(CLI::App* cmd, Options& o, bool needs_input) {
    if (needs_input)
        cmd->add_option("--input", o.input, "Series file, one value per line ('-' = stdin)")
            ->required();
    cmd->add_option("--score", o.score, "Score name")
        ->check(CLI::IsMember(kScoreNames))
        ->capture_default_str();
    cmd->add_option("--alpha", o.alpha, "Miscoverage level")->capture_default_str();
    cmd->add_option("--method", o.method, "P-value method")
        ->check(CLI::IsMember({"full", "mc", "randomized", "randomized-mc"}))
        ->capture_default_str();
    cmd->add_option("--permutations,-M", o.permutations, "Monte-Carlo permutations")
        ->capture_default_str();
    cmd->add_option("--seed", o.seed, "Master seed")->capture_default_str();
    cmd->add_option("--threads", o.threads, "Worker threads")->capture_default_str();
    cmd->add_option("--output,-o", o.output, "Output path ('-' = stdout)")->capture_default_str();
    cmd->add_option("--format", o.format, "Report format")
        ->check(CLI::IsMember({"json", "csv"}))
        ->capture_default_str();
    cmd->add_flag("--no-timing", o.no_timing, "Report timing_ms as null");
    cmd->add_option("--family", o.family, "Oracle LLR family")
        ->check(CLI::IsMember({"gaussian", "laplace"}))
        ->capture_default_str();
    cmd->add_option("--mu0", o.mu0, "Oracle pre-change mean")->capture_default_str();
    cmd->add_option("--mu1", o.mu1, "Oracle post-change mean")->capture_default_str();
    cmd->add_option("--scale", o.scale, "Oracle sd (gaussian) or scale (laplace)")
        ->capture_default_str();
    cmd->add_option("--variance", o.variance, "Known variance for gaussian-learned");
    cmd->add_option("--train-pre", o.train_pre, "Pre-change training sample for split scores");
    cmd->add_option("--train-post", o.train_post, "Post-change training sample for split scores");
}

PvalueMethod make_method(const Options& o) {
    PvalueMethod m;
    if (o.method == "full") m = PvalueMethod::full();
    else if (o.method == "mc") m = PvalueMethod::mc(o.permutations);
    else if (o.method == "randomized") m = PvalueMethod::randomized_full();
    else m = PvalueMethod::randomized_mc(o.permutations);
    m.validate();
    return m;
}

ScorePtr make_score(const Options& o, const std::optional<Scenario>& scn) {
    const std::string& s = o.score;
    if (s == "weighted-linear") return weighted_mean_score(WeightScheme::linear());
    if (s == "weighted-exponential") return weighted_mean_score(WeightScheme::exponential());
    if (s == "weighted-uniform") return weighted_mean_score(WeightScheme::uniform());
    if (s == "gaussian-learned")
        return gaussian_learned_llr_score(o.variance ? GaussianVariance::fixed(*o.variance)
                                                     : GaussianVariance::pooled());
    if (s == "classifier") return classifier_logit_score();
    if (s == "oracle-llr") {
        if (scn && scn->kind != Scenario::Kind::two_urn && scn->kind != Scenario::Kind::multi_gaussian)
            return oracle_llr_score(scenario_llr(*scn));
        return oracle_llr_score(o.family == "laplace" ? laplace_oracle_llr(o.mu0, o.mu1, o.scale)
                                                      : gaussian_oracle_llr(o.mu0, o.mu1, o.scale));
    }
    if (s == "optimal") {
        if (!scn) throw std::invalid_argument("the optimal score needs --scenario");
        return optimal_score_oracle(*scn);
    }
    if (s == "split-gaussian" || s == "split-kde") {
        if (o.train_pre.empty() || o.train_post.empty())
            throw std::invalid_argument(s + " needs --train-pre and --train-post");
        const Series pre = load_series(o.train_pre);
        const Series post = load_series(o.train_post);
        if (s == "split-gaussian")
            return split_learned_llr_score(
                make_llr(fit_gaussian(pre.values()), fit_gaussian(post.values())));
        return split_learned_llr_score(make_llr(fit_kde(pre.values()), fit_kde(post.values())));
    }
    throw std::invalid_argument("unknown score '" + s + "'");
}

EngineOptions engine_options(const Options& o) {
    EngineOptions e;
    e.threads = std::max<std::size_t>(o.threads, 1);
    return e;
}

json runs_json(const ConfidenceSet& set) {
    json a = json::array();
    for (const auto& r : set.runs()) a.push_back({r.first, r.last});
    return a;
}

void put_set(json& j, const ConfidenceSet& set) {
    j["set_size"] = set.size();
    j["set_runs"] = runs_json(set);
    j["set_text"] = set.runs_text();
}

json header(const std::string& command, const Options& o, std::size_t n,
            const std::string& method, const std::string& score) {
    json j;
    j["command"] = command;
    j["n"] = n;
    j["alpha"] = o.alpha;
    j["method"] = method;
    j["score"] = score;
    j["seed"] = o.seed;
    return j;
}

class Timer {
public:
    Timer() : start_(std::chrono::steady_clock::now()) {}
    json elapsed(bool disabled) const {
        if (disabled) return nullptr;
        const auto d = std::chrono::steady_clock::now() - start_;
        return std::chrono::duration<double, std::milli>(d).count();
    }

private:
    std::chrono::steady_clock::time_point start_;
};

void emit(const Options& o, const std::string& text, std::ostream& out) {
    if (o.output == "-") {
        out << text;
        return;
    }
    std::ofstream f(o.output);
    if (!f) throw std::runtime_error("cannot write output file " + o.output);
    f << text;
}

std::string csv_report(const PValueVector& p, const ConfidenceSet& set) {
    std::ostringstream os;
    os << "t,pvalue,in_set\n";
    for (Index t = 1; t <= p.size(); ++t)
        os << t << ',' << format_double(p.at(t)) << ',' << (set.contains(t) ? 1 : 0) << '\n';
    return os.str();
}

void emit_report(const Options& o, const json& j, const PValueVector* p, const ConfidenceSet* set,
                 std::ostream& out) {
    if (o.format == "csv") {
        if (!p || !set) throw std::invalid_argument("this command has no CSV form; use --format json");
        emit(o, csv_report(*p, *set), out);
    } else {
        emit(o, j.dump(2) + "\n", out);
    }
}

std::vector<double> pvalue_list(const PValueVector& p) {
    return {p.values().begin(), p.values().end()};
}

void cmd_localize(const Options& o, std::ostream& out) {
    check_alpha(o.alpha);
    const Series s = load_series(o.input);
    const auto method = make_method(o);
    const auto score = make_score(o, std::nullopt);
    Timer timer;
    const auto loc = confidence_set(s, *score, o.alpha, method, o.seed, engine_options(o));
    json j = header("localize", o, s.size(), method.describe(), score->name());
    j["kind"] = to_string(s.kind());
    j["pvalues"] = pvalue_list(loc.pvalues);
    put_set(j, loc.set);
    j["timing_ms"] = timer.elapsed(o.no_timing);
    emit_report(o, j, &loc.pvalues, &loc.set, out);
}

void cmd_calibrate(const Options& o, std::ostream& out) {
    check_alpha(o.alpha);
    const Series s = load_series(o.input);
    const auto method = make_method(o);
    Timer timer;
    RngStream boot_rng = substream(derive_seed(o.seed, 3), 0);
    const auto h = residual_bootstrap(s, o.bootstrap, boot_rng);
    const auto loc = conch_cal(s, h, o.alpha, method, o.seed, engine_options(o));
    const auto boot_p = h.pval_fn(s);
    const PValueVector boot_pv(boot_p);
    const auto boot_set = ConfidenceSet::from_pvalues(boot_pv, o.alpha);

    json j = header("calibrate", o, s.size(), method.describe(), h.ratio_score->name());
    j["pvalues"] = pvalue_list(loc.pvalues);
    put_set(j, loc.set);
    json b;
    b["replicates"] = o.bootstrap;
    b["point_estimate"] = h.point_fn(s);
    b["pvalues"] = boot_p;
    put_set(b, boot_set);
    j["bootstrap"] = b;
    j["timing_ms"] = timer.elapsed(o.no_timing);
    emit_report(o, j, &loc.pvalues, &loc.set, out);
}

Segmenter make_segmenter(const Options& o) {
    KernelBandwidth bw = MedianHeuristic{};
    if (o.bandwidth) bw = FixedKernelBandwidth{*o.bandwidth};
    const std::size_t k = o.k;
    return [k, bw](const Series& x) { return kcpd_segment(x, k, bw); };
}

json segments_json(const SegmentedLocalization& r) {
    json a = json::array();
    for (const auto& seg : r.segments) {
        json e;
        e["first"] = seg.positions.empty() ? 0 : seg.positions.front();
        e["last"] = seg.positions.empty() ? 0 : seg.positions.back();
        e["points"] = seg.positions.size();
        e["skipped"] = seg.skipped;
        put_set(e, seg.set);
        a.push_back(e);
    }
    return a;
}

void cmd_segment(const Options& o, std::ostream& out) {
    check_alpha(o.alpha);
    const Series s = load_series(o.input);
    const auto method = make_method(o);
    const auto score = make_score(o, std::nullopt);
    const ScoreFactory factory = [score](std::size_t) { return score; };
    const auto segmenter = make_segmenter(o);
    Timer timer;
    json j = header("segment", o, s.size(), method.describe(), score->name());
    SegmentedLocalization r;
    if (o.crossfit) {
        r = conch_seg_crossfit(s, segmenter, factory, o.alpha, method, o.seed, engine_options(o),
                               o.min_segment);
    } else {
        const auto seg = segmenter(s);
        j["changepoints"] = seg.changepoints();
        j["boundaries"] = midpoint_boundaries(seg, s.size());
        r = conch_seg(s, seg, factory, o.alpha, method, o.seed, engine_options(o), o.min_segment);
    }
    j["k"] = o.k;
    j["crossfit"] = o.crossfit;
    j["segments"] = segments_json(r);
    put_set(j, r.set);
    j["warnings"] = r.warnings;
    j["timing_ms"] = timer.elapsed(o.no_timing);
    if (o.format == "csv") throw std::invalid_argument("segment reports are JSON only");
    emit(o, j.dump(2) + "\n", out);
}

// Replicate r draws its data from stream r of one derived seed and its
// permutations from another, so replicates are independent of each other.
RngStream data_stream(std::uint64_t seed, std::uint64_t replicate) {
    return substream(derive_seed(seed, 1), replicate);
}
std::uint64_t engine_seed(std::uint64_t seed, std::uint64_t replicate) {
    return derive_seed(derive_seed(seed, 2), replicate);
}

void cmd_simulate(const Options& o, std::ostream& out) {
    const Scenario scn = load_scenario(o.scenario);
    RngStream rng = data_stream(o.seed, 0);
    const auto g = generate(scn, rng);
    std::ostringstream os;
    os << "# " << to_string(scn.kind) << " seed=" << o.seed << " changepoints=";
    for (std::size_t i = 0; i < g.changepoints.size(); ++i)
        os << (i ? "," : "") << g.changepoints[i];
    os << "\n";
    for (double v : g.series.values()) os << format_double(v) << "\n";
    emit(o, os.str(), out);
}

double mean_of(const std::vector<double>& v) {
    double s = 0.0;
    for (double x : v) s += x;
    return v.empty() ? 0.0 : s / static_cast<double>(v.size());
}

double standard_error(const std::vector<double>& v) {
    if (v.size() < 2) return 0.0;
    const double m = mean_of(v);
    double ss = 0.0;
    for (double x : v) ss += (x - m) * (x - m);
    return std::sqrt(ss / static_cast<double>(v.size() - 1) / static_cast<double>(v.size()));
}

double median_of(std::vector<double> v) {
    if (v.empty()) return 0.0;
    std::sort(v.begin(), v.end());
    const std::size_t m = v.size() / 2;
    return v.size() % 2 ? v[m] : 0.5 * (v[m - 1] + v[m]);
}

void cmd_coverage(const Options& o, std::ostream& out) {
    check_alpha(o.alpha);
    if (o.replicates < 1) throw std::invalid_argument("--replicates must be >= 1");
    const Scenario scn = load_scenario(o.scenario);
    const auto method = make_method(o);
    const bool multi = scn.kind == Scenario::Kind::multi_gaussian;
    const auto score = make_score(o, scn);
    Timer timer;
    std::vector<double> covered, widths;
    for (std::size_t r = 0; r < o.replicates; ++r) {
        RngStream rng = data_stream(o.seed, r);
        const auto g = generate(scn, rng);
        ConfidenceSet set;
        if (multi) {
            const auto seg = kcpd_segment(g.series, g.changepoints.size());
            const ScoreFactory factory = [score](std::size_t) { return score; };
            set = conch_seg(g.series, seg, factory, o.alpha, method, engine_seed(o.seed, r),
                            engine_options(o), o.min_segment)
                      .set;
        } else {
            set = confidence_set(g.series, *score, o.alpha, method, engine_seed(o.seed, r),
                                 engine_options(o))
                      .set;
        }
        bool all = true;
        for (Index c : g.changepoints) all = all && set.contains(c);
        covered.push_back(all ? 1.0 : 0.0);
        widths.push_back(static_cast<double>(set.size()));
    }
    json j = header("coverage", o, scn.n, method.describe(), score->name());
    j["scenario"] = to_string(scn.kind);
    j["replicates"] = o.replicates;
    j["coverage"] = mean_of(covered);
    j["coverage_se"] = standard_error(covered);
    j["mean_width"] = mean_of(widths);
    j["width_se"] = standard_error(widths);
    j["median_width"] = median_of(widths);
    j["timing_ms"] = timer.elapsed(o.no_timing);
    if (o.format == "csv") throw std::invalid_argument("coverage reports are JSON only");
    emit(o, j.dump(2) + "\n", out);
}

} // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Distribution-free changepoint localization"};
    app.require_subcommand(1);
    Options o;

    auto* localize = app.add_subcommand("localize", "Confidence set for a single changepoint");
    add_common(localize, o, true);

    auto* calibrate = app.add_subcommand("calibrate", "Calibrate a residual-bootstrap set");
    add_common(calibrate, o, true);
    calibrate->add_option("--bootstrap,-B", o.bootstrap, "Bootstrap replicates")
        ->capture_default_str();

    auto* segment = app.add_subcommand("segment", "Segmentwise sets for several changepoints");
    add_common(segment, o, true);
    segment->add_option("--k,-K", o.k, "Number of changepoints for the kernel segmenter")
        ->required();
    segment->add_option("--bandwidth", o.bandwidth, "Fixed kernel bandwidth (default: median)");
    segment->add_flag("--crossfit", o.crossfit, "Segment on one parity fold, localize on the other");
    segment->add_option("--min-segment", o.min_segment, "Shorter segments are skipped")
        ->capture_default_str();

    auto* simulate = app.add_subcommand("simulate", "Write a synthetic series");
    simulate->add_option("--scenario", o.scenario, "Scenario file")->required();
    simulate->add_option("--seed", o.seed, "Master seed")->capture_default_str();
    simulate->add_option("--output,-o", o.output, "Output path ('-' = stdout)")
        ->capture_default_str();

    auto* coverage = app.add_subcommand("coverage", "Empirical coverage and width over replicates");
    add_common(coverage, o, false);
    coverage->add_option("--scenario", o.scenario, "Scenario file")->required();
    coverage->add_option("--replicates,-R", o.replicates, "Replicates")->capture_default_str();
    coverage->add_option("--min-segment", o.min_segment, "Shorter segments are skipped")
        ->capture_default_str();

    // CLI11 consumes a reversed argument list without the program name.
    std::vector<std::string> rev;
    for (std::size_t i = args.size(); i-- > 1;) rev.push_back(args[i]);
    try {
        app.parse(rev);
    } catch (const CLI::ParseError& e) {
        return app.exit(e, out, err);
    }

    try {
        if (localize->parsed()) cmd_localize(o, out);
        else if (calibrate->parsed()) cmd_calibrate(o, out);
        else if (segment->parsed()) cmd_segment(o, out);
        else if (simulate->parsed()) cmd_simulate(o, out);
        else if (coverage->parsed()) cmd_coverage(o, out);
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}

} // namespace conch::cli
