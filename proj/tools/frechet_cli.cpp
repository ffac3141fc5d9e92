// frechet-skew: command-line front end for the p-mean / skewness library.
//
// Subcommands: pmean, curve, classify, dominance, tailbone, oracle-check.
// Exit codes: 0 success, 1 invalid input, 2 numerical failure,
// 3 inconclusive result with --strict. Errors also emit JSON on stderr.

#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "frechet/distributions.hpp"
#include "frechet/dominance.hpp"
#include "frechet/io.hpp"
#include "frechet/pmean.hpp"
#include "frechet/sampling.hpp"
#include "frechet/skewness.hpp"
#include "frechet/tailbone.hpp"

using json = nlohmann::json;
using namespace frechet;

namespace {

struct CliError : std::runtime_error {
    CliError(int code_, std::string kind_, const std::string& msg)
        : std::runtime_error(msg), code(code_), kind(std::move(kind_)) {}
    int code;
    std::string kind;
};

[[noreturn]] void fail(int code, const std::string& kind, const std::string& msg) {
    throw CliError(code, kind, msg);
}

// ---------- distribution spec ingestion ----------

DistributionSpec spec_from_json(const json& j) {
    if (!j.is_object()) fail(1, "invalid_input", "distribution spec must be a JSON object");
    for (const auto& item : j.items()) {
        const std::string& k = item.key();
        if (k != "family" && k != "params" && k != "grid")
            fail(1, "invalid_input", "distribution spec: unknown field '" + k + "'");
    }
    if (!j.contains("family") || !j["family"].is_string())
        fail(1, "invalid_input", "distribution spec: missing string field 'family'");
    DistributionSpec spec;
    try {
        spec.family = family_from_name(j["family"].get<std::string>());
    } catch (const Error& e) {
        fail(1, "invalid_input", e.what());
    }
    if (spec.family == Family::custom) {
        if (j.contains("params"))
            fail(1, "invalid_input", "custom spec takes 'grid', not 'params'");
        if (!j.contains("grid") || !j["grid"].is_object())
            fail(1, "invalid_input", "custom spec: missing object field 'grid'");
        const json& g = j["grid"];
        for (const auto& item : g.items())
            if (item.key() != "x" && item.key() != "f")
                fail(1, "invalid_input", "grid: unknown field '" + item.key() + "'");
        if (!g.contains("x") || !g.contains("f") || !g["x"].is_array() || !g["f"].is_array())
            fail(1, "invalid_input", "grid must contain arrays 'x' and 'f'");
        CustomGrid grid;
        for (const auto& v : g["x"]) {
            if (!v.is_number()) fail(1, "invalid_input", "grid.x: non-numeric entry");
            grid.x.push_back(v.get<double>());
        }
        for (const auto& v : g["f"]) {
            if (!v.is_number()) fail(1, "invalid_input", "grid.f: non-numeric entry");
            grid.f.push_back(v.get<double>());
        }
        spec.grid = std::move(grid);
    } else {
        if (j.contains("grid"))
            fail(1, "invalid_input", "'grid' is only valid with family custom");
        if (!j.contains("params") || !j["params"].is_object())
            fail(1, "invalid_input", "spec: missing object field 'params'");
        for (const auto& item : j["params"].items()) {
            if (!item.value().is_number())
                fail(1, "invalid_input",
                     "params." + item.key() + ": value must be a number");
            spec.params[item.key()] = item.value().get<double>();
        }
    }
    return spec;
}

Distribution load_distribution(const std::string& path) {
    std::string text;
    if (path == "-") {
        std::stringstream ss;
        ss << std::cin.rdbuf();
        text = ss.str();
    } else {
        std::ifstream in(path);
        if (!in) fail(1, "invalid_input", "cannot open distribution spec: " + path);
        std::stringstream ss;
        ss << in.rdbuf();
        text = ss.str();
    }
    json j;
    try {
        j = json::parse(text);
    } catch (const json::exception& e) {
        fail(1, "invalid_input", std::string("spec is not valid JSON: ") + e.what());
    }
    return Distribution(spec_from_json(j));
}

// ---------- p grids ----------

struct GridSpec {
    bool geometric = true;
    double lo = 0.0, hi = 0.0;
    int n = 16;
    bool from_user = false;
};

GridSpec parse_grid(const std::string& text) {
    GridSpec g;
    g.from_user = true;
    auto c1 = text.find(':');
    auto sep = text.find("..");
    auto c2 = text.rfind(':');
    if (c1 == std::string::npos || sep == std::string::npos || c2 == c1)
        fail(1, "invalid_input", "grid syntax is geometric:a..b:n or linear:a..b:n");
    std::string kind = text.substr(0, c1);
    if (kind == "geometric")
        g.geometric = true;
    else if (kind == "linear")
        g.geometric = false;
    else
        fail(1, "invalid_input", "grid kind must be 'geometric' or 'linear', got '" + kind + "'");
    try {
        g.lo = std::stod(text.substr(c1 + 1, sep - c1 - 1));
        g.hi = std::stod(text.substr(sep + 2, c2 - sep - 2));
        g.n = std::stoi(text.substr(c2 + 1));
    } catch (const std::exception&) {
        fail(1, "invalid_input", "cannot parse grid '" + text + "'");
    }
    if (!(g.lo > 0.0) || !(g.hi > g.lo) || g.n < 2)
        fail(1, "invalid_input", "grid requires 0 < a < b and n >= 2");
    return g;
}

std::vector<double> materialize_grid(const GridSpec& g) {
    std::vector<double> ps(g.n);
    for (int i = 0; i < g.n; ++i) {
        double t = double(i) / (g.n - 1);
        ps[i] = g.geometric ? g.lo * std::pow(g.hi / g.lo, t)
                            : g.lo + (g.hi - g.lo) * t;
    }
    return ps;
}

// default: 16 geometric points spanning the admissible domain, staying
// 1e-3 away from open endpoints
GridSpec default_grid(const Distribution& dist, bool full_domain) {
    GridSpec g;
    double S = moment_domain(dist).sup;
    g.lo = full_domain ? 1e-3 : 1.0;
    if (std::isfinite(S))
        g.hi = S - 1e-3 * std::max(1.0, S - g.lo);
    else
        g.hi = 8.0;
    if (!(g.hi > g.lo)) g.hi = g.lo * 1.5;
    return g;
}

void write_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) fail(1, "invalid_input", "cannot write output file: " + path);
    out << content;
}

json point_json(const PMeanPoint& pt) {
    json j;
    j["p"] = pt.p;
    j["nu_p"] = pt.nu_p;
    j["H_p"] = pt.h_p;
    if (pt.dnu_dp)
        j["dnu_dp"] = *pt.dnu_dp;
    else
        j["dnu_dp"] = nullptr;
    j["method"] = deriv_method_name(pt.method);
    j["residual"] = pt.residual;
    return j;
}

json curve_json(const PMeanCurve& curve) {
    json j;
    j["domain"] = curve.domain_used == CurveDomain::full_domain ? "full" : "standard";
    j["points"] = json::array();
    for (const auto& pt : curve.points) j["points"].push_back(point_json(pt));
    j["dropped_p"] = curve.dropped_p;
    return j;
}

// ---------- subcommand payloads ----------

int run_pmean(const std::string& dist_path, double p, bool full_domain,
              const std::string& output, const std::string& format) {
    auto dist = load_distribution(dist_path);
    auto pt = solve_pmean(dist, p, full_domain);
    fill_derivative(dist, pt, full_domain);
    std::printf("nu_p = %s\n", fmt17(pt.nu_p).c_str());
    if (!output.empty()) {
        if (format == "json") {
            write_file(output, point_json(pt).dump(2) + "\n");
        } else {
            PMeanCurve c;
            c.points = {pt};
            write_file(output, curve_csv(c));
        }
    }
    return 0;
}

int run_curve(const std::string& dist_path, const std::string& grid_text,
              bool full_domain, const std::string& output, const std::string& format) {
    auto dist = load_distribution(dist_path);
    GridSpec g = grid_text.empty() ? default_grid(dist, full_domain) : parse_grid(grid_text);
    auto curve = pmean_curve(dist, materialize_grid(g), full_domain);
    if (format == "json")
        write_file(output, curve_json(curve).dump(2) + "\n");
    else
        write_file(output, curve_csv(curve));
    std::printf("curve: %zu points (%zu dropped) -> %s\n", curve.points.size(),
                curve.dropped_p.size(), output.c_str());
    return 0;
}

json pearson_json(const PearsonCoefficients& pc) {
    json j;
    auto put = [&](const char* k, const std::optional<double>& v) {
        if (v)
            j[k] = *v;
        else
            j[k] = nullptr;
    };
    put("nu0", pc.nu0);
    j["nu1"] = pc.nu1;
    put("nu2", pc.nu2);
    put("sigma", pc.sigma);
    put("mode_skewness", pc.mode_skewness);
    put("median_skewness", pc.median_skewness);
    put("moment_skewness", pc.moment_skewness);
    j["missing"] = pc.missing;
    return j;
}

int run_classify(const std::string& dist_path, const std::string& grid_text,
                 bool full_domain, bool strict, const std::string& output) {
    auto dist = load_distribution(dist_path);
    GridSpec g = grid_text.empty() ? default_grid(dist, full_domain) : parse_grid(grid_text);
    auto rep = skewness_report(dist, materialize_grid(g), full_domain);

    std::string curve_path = output + ".curve.csv";
    write_file(curve_path, curve_csv(rep.classification.curve));

    json j;
    j["pearson"] = pearson_json(rep.pearson);
    j["classification"] = classification_name(rep.classification.label, full_domain);
    if (rep.ell.value)
        j["ell"] = *rep.ell.value;
    else
        j["ell"] = nullptr;
    j["van_zwet"] = rep.van_zwet_holds;
    j["curve_csv_path"] = curve_path;
    write_file(output, j.dump(2) + "\n");

    std::string verdict = classification_name(rep.classification.label, false);
    if (full_domain) verdict += " (full domain)";
    std::printf("%s\n", verdict.c_str());
    if (strict && rep.classification.label == Classification::indeterminate) return 3;
    return 0;
}

const char* crossing_status_name(CrossingStatus s) {
    switch (s) {
        case CrossingStatus::satisfied: return "satisfied";
        case CrossingStatus::no_crossing: return "no_crossing";
        case CrossingStatus::multiple_crossings: return "multiple_crossings";
        case CrossingStatus::side_condition_failed: return "side_condition_failed";
    }
    return "?";
}

int run_dominance(const std::string& dist_path, double p, bool full_domain, bool strict,
                  const std::string& output) {
    auto dist = load_distribution(dist_path);
    auto pt = solve_pmean(dist, p, full_domain);
    auto rep = dominance_report(dist, pt);

    json j;
    j["p"] = rep.p;
    j["verdict"] = dominance_outcome_name(rep.verdict);
    json crit;
    crit["cdf_gap"] = rep.cdf.max_gap;
    crit["single_crossing"] = crossing_status_name(rep.crossing.status);
    crit["decreasing_pdf"] = rep.decreasing;
    crit["log_concave"] = rep.log_concave;
    j["criteria"] = crit;
    if (rep.crossing.c)
        j["c"] = *rep.crossing.c;
    else
        j["c"] = nullptr;
    j["min_cdf_gap"] = rep.cdf.min_gap;
    write_file(output, j.dump(2) + "\n");

    std::printf("%s\n", dominance_outcome_name(rep.verdict));
    if (strict && rep.verdict == DominanceOutcome::inconclusive) return 3;
    return 0;
}

int run_tailbone(const std::string& samples_path, const std::string& dist_path,
                 long n, std::optional<long> seed, const std::string& grid_text,
                 const std::string& output) {
    SampleSet set;
    if (!samples_path.empty()) {
        std::ifstream in(samples_path);
        if (!in) fail(1, "invalid_input", "cannot open samples file: " + samples_path);
        set = read_samples_csv(in);
    } else if (!dist_path.empty()) {
        if (!seed) fail(1, "invalid_input", "--seed is required when sampling from --dist");
        if (n <= 0) fail(1, "invalid_input", "--n must be positive when sampling");
        auto dist = load_distribution(dist_path);
        Sampler smp(static_cast<std::uint64_t>(*seed));
        std::vector<std::vector<double>> pts(static_cast<std::size_t>(n));
        for (auto& pt : pts) pt = {smp.draw(dist)};
        set = make_sample_set(std::move(pts));
    } else {
        fail(1, "invalid_input", "tailbone needs --samples or --dist");
    }

    std::vector<double> ps;
    if (grid_text.empty()) {
        GridSpec g;
        g.lo = 1.0;
        g.hi = 8.0;
        ps = materialize_grid(g);
    } else {
        ps = materialize_grid(parse_grid(grid_text));
    }
    auto traj = tailbone_trajectory(set, ps);
    write_file(output, trajectory_csv(traj, set.d));
    if (traj.zeta) {
        std::string line = "zeta:";
        for (double v : *traj.zeta) line += " " + fmt17(v);
        std::printf("%s\n", line.c_str());
    } else {
        std::printf("zeta: unstable\n");
    }
    return 0;
}

// ---------- oracle self-check ----------

Distribution builtin(Family fam, std::map<std::string, double> params) {
    DistributionSpec spec;
    spec.family = fam;
    spec.params = std::move(params);
    return Distribution(spec);
}

// real root of a^3 - 3a^2 + 6a - 6 = 0: the unit-exponential nu_4
double exp_nu4_root() {
    double lo = 1.0, hi = 2.0;
    for (int i = 0; i < 200; ++i) {
        double mid = 0.5 * (lo + hi);
        double v = ((mid - 3.0) * mid + 6.0) * mid - 6.0;
        (v < 0.0 ? lo : hi) = mid;
    }
    return 0.5 * (lo + hi);
}

int run_oracle_check(const std::string& output) {
    struct Check {
        std::string name;
        double value, expected, tol;
    };
    std::vector<Check> checks;
    auto add = [&](const std::string& name, double value, double expected, double tol) {
        checks.push_back({name, value, expected, tol});
    };

    auto ln1 = builtin(Family::lognormal, {{"mu", 0.0}, {"sigma2", 1.0}});
    for (double p : {0.5, 1.0, 2.0, 3.0, 4.0, 6.0})
        add("lognormal(0,1) nu_" + fmt17(p), solve_pmean(ln1, p).nu_p,
            std::exp((p - 1.0) / 2.0), 1e-8);

    auto expo = builtin(Family::exponential, {{"lambda", 1.0}});
    add("exponential nu_1", solve_pmean(expo, 1.0).nu_p, std::log(2.0), 1e-10);
    add("exponential nu_2", solve_pmean(expo, 2.0).nu_p, 1.0, 1e-10);
    add("exponential nu_4", solve_pmean(expo, 4.0).nu_p, exp_nu4_root(), 1e-9);
    add("exponential H_1", solve_pmean(expo, 1.0).h_p, 0.5, 1e-10);

    auto norm = builtin(Family::normal, {{"mu", 2.5}, {"sigma2", 1.5}});
    for (double p : {1.0, 2.0, 3.0})
        add("normal(2.5,1.5) nu_" + fmt17(p), solve_pmean(norm, p).nu_p, 2.5, 1e-8);

    add("pareto(3) nu_1", solve_pmean(builtin(Family::pareto, {{"alpha", 3.0}}), 1.0).nu_p,
        std::pow(2.0, 1.0 / 3.0), 1e-9);
    add("beta(2,5) nu_2",
        solve_pmean(builtin(Family::beta, {{"alpha", 2.0}, {"beta", 5.0}}), 2.0).nu_p,
        2.0 / 7.0, 1e-10);

    auto pt = solve_pmean(ln1, 2.0);
    add("lognormal(0,1) dnu_dp(2)", dnu_dp_interior(ln1, pt), 0.5 * std::exp(0.5), 1e-7);

    json j;
    j["checks"] = json::array();
    bool all = true;
    for (const auto& c : checks) {
        bool ok = std::fabs(c.value - c.expected) <= c.tol * (1.0 + std::fabs(c.expected));
        all = all && ok;
        std::printf("%s %s\n", ok ? "ok  " : "FAIL", c.name.c_str());
        json cj;
        cj["name"] = c.name;
        cj["value"] = c.value;
        cj["expected"] = c.expected;
        cj["passed"] = ok;
        j["checks"].push_back(cj);
    }
    j["all_passed"] = all;
    if (!output.empty()) write_file(output, j.dump(2) + "\n");
    return all ? 0 : 2;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Frechet p-means, tail dominance, and true skewness"};
    app.require_subcommand(1);

    std::string dist_path, grid_text, output, format = "csv", samples_path;
    double p = 2.0;
    bool full_domain = false, strict = false;
    long n = 0;
    std::optional<long> seed;

    auto add_common = [&](CLI::App* sub, bool needs_dist) {
        if (needs_dist)
            sub->add_option("--dist", dist_path, "distribution spec JSON path, or - for stdin")
                ->required();
        sub->add_flag("--full-domain", full_domain, "extend to p in (0,1) as well");
    };

    auto* c_pmean = app.add_subcommand("pmean", "single Frechet p-mean");
    add_common(c_pmean, true);
    c_pmean->add_option("--p", p, "order p")->required();
    c_pmean->add_option("--output", output, "optional artifact path");
    c_pmean->add_option("--format", format, "csv|json")
        ->check(CLI::IsMember({"csv", "json"}));

    auto* c_curve = app.add_subcommand("curve", "p-mean curve over a grid");
    add_common(c_curve, true);
    c_curve->add_option("--grid", grid_text, "geometric:a..b:n or linear:a..b:n");
    c_curve->add_option("--output", output, "artifact path")->default_val("curve.csv");
    c_curve->add_option("--format", format, "csv|json")
        ->check(CLI::IsMember({"csv", "json"}));

    auto* c_classify = app.add_subcommand("classify", "skewness classification report");
    add_common(c_classify, true);
    c_classify->add_option("--grid", grid_text, "p grid");
    c_classify->add_flag("--strict", strict, "exit 3 when indeterminate");
    c_classify->add_option("--output", output, "report path")->default_val("skewness.json");

    auto* c_dom = app.add_subcommand("dominance", "tail dominance report at one p");
    add_common(c_dom, true);
    c_dom->add_option("--p", p, "order p")->required();
    c_dom->add_flag("--strict", strict, "exit 3 when inconclusive");
    c_dom->add_option("--output", output, "report path")->default_val("dominance.json");

    auto* c_tail = app.add_subcommand("tailbone", "sample trajectory p -> nu_p");
    c_tail->add_option("--samples", samples_path, "CSV, one point per row");
    c_tail->add_option("--dist", dist_path, "1-d spec to sample from (with --n, --seed)");
    c_tail->add_option("--n", n, "number of draws when sampling");
    c_tail->add_option("--seed", seed, "RNG seed (required when sampling)");
    c_tail->add_option("--grid", grid_text, "p grid");
    c_tail->add_option("--output", output, "artifact path")->default_val("tailbone.csv");

    auto* c_oracle = app.add_subcommand("oracle-check", "closed-form self test");
    c_oracle->add_option("--output", output, "report path")->default_val("oracle_check.json");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) return app.exit(e); // --help
        json err;
        err["error"] = {{"kind", "invalid_input"}, {"message", e.what()}};
        std::fprintf(stderr, "%s\n", err.dump().c_str());
        return 1;
    }

    try {
        if (c_pmean->parsed()) return run_pmean(dist_path, p, full_domain, output, format);
        if (c_curve->parsed())
            return run_curve(dist_path, grid_text, full_domain, output, format);
        if (c_classify->parsed())
            return run_classify(dist_path, grid_text, full_domain, strict, output);
        if (c_dom->parsed()) return run_dominance(dist_path, p, full_domain, strict, output);
        if (c_tail->parsed())
            return run_tailbone(samples_path, dist_path, n, seed, grid_text, output);
        if (c_oracle->parsed()) return run_oracle_check(output);
    } catch (const CliError& e) {
        json err;
        err["error"] = {{"kind", e.kind}, {"message", e.what()}};
        std::fprintf(stderr, "%s\n", err.dump().c_str());
        return e.code;
    } catch (const Error& e) {
        int code = e.error_class() == ErrorClass::invalid_input ? 1 : 2;
        json err;
        err["error"] = {{"kind", e.kind()}, {"message", e.what()}};
        std::fprintf(stderr, "%s\n", err.dump().c_str());
        return code;
    } catch (const std::exception& e) {
        json err;
        err["error"] = {{"kind", "internal"}, {"message", e.what()}};
        std::fprintf(stderr, "%s\n", err.dump().c_str());
        return 2;
    }
    return 0;
}
