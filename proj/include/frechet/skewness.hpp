#ifndef FRECHET_SKEWNESS_HPP
#define FRECHET_SKEWNESS_HPP

#include <algorithm>
#include <cmath>
#include <optional>
#include <string>
#include <vector>

#include "frechet/distributions.hpp"
#include "frechet/pmean.hpp"
#include "frechet/quadrature.hpp"

namespace frechet {

namespace detail {

// E[(X - c)^k] by quadrature; caller guarantees the moment exists.
inline double central_moment(const Distribution& dist, double c, int k,
                             const QuadOptions& opt = {}) {
    double lo = dist.support().left, hi = dist.support().right;
    double scale = std::max(1.0, std::fabs(dist.quantile(0.9) - dist.quantile(0.1)));
    return integrate([&](double x) { return std::pow(x - c, k) * dist.pdf(x); }, lo, hi,
                     opt, scale);
}

} // namespace detail

// Classical location summaries: nu_0 (mode), nu_1 (median), nu_2 (mean),
// plus the three Pearson-type coefficients. A coefficient is absent when the
// moment it needs diverges (recorded in `missing`).
struct PearsonCoefficients {
    std::optional<double> nu0;
    double nu1 = 0.0;
    std::optional<double> nu2;
    std::optional<double> sigma;
    std::optional<double> mode_skewness;   // (nu2 - nu0) / sigma
    std::optional<double> median_skewness; // 3 (nu2 - nu1) / sigma
    std::optional<double> moment_skewness; // E[((X - nu2)/sigma)^3]
    std::vector<std::string> missing;
};

inline PearsonCoefficients pearson_coefficients(const Distribution& dist,
                                                const QuadOptions& opt = {}) {
    PearsonCoefficients pc;
    pc.nu0 = mode(dist);
    pc.nu1 = solve_pmean(dist, 1.0, true, opt).nu_p;
    if (dist.moment_exists(1.0))
        pc.nu2 = detail::central_moment(dist, 0.0, 1, opt);
    if (pc.nu2 && dist.moment_exists(2.0))
        pc.sigma = std::sqrt(detail::central_moment(dist, *pc.nu2, 2, opt));
    if (pc.sigma && dist.moment_exists(3.0)) {
        double m3 = detail::central_moment(dist, *pc.nu2, 3, opt);
        pc.moment_skewness = m3 / std::pow(*pc.sigma, 3);
    } else {
        pc.missing.push_back("moment_skewness");
    }
    if (pc.sigma) {
        pc.median_skewness = 3.0 * (*pc.nu2 - pc.nu1) / *pc.sigma;
        if (pc.nu0)
            pc.mode_skewness = (*pc.nu2 - *pc.nu0) / *pc.sigma;
        else
            pc.missing.push_back("mode_skewness");
    } else {
        pc.missing.push_back("median_skewness");
        if (std::find(pc.missing.begin(), pc.missing.end(), "moment_skewness") ==
            pc.missing.end())
            pc.missing.push_back("moment_skewness");
        pc.missing.push_back("mode_skewness");
    }
    return pc;
}

// The cubic identity linking the moment skewness to nu_4:
// gamma = d^3 + 3d with d = (nu_4 - nu_2)/sigma.
struct CubicIdentityCheck {
    double nu2 = 0.0;
    double nu4 = 0.0;
    double sigma = 0.0;
    double gamma_direct = 0.0;
    double gamma_via_nu4 = 0.0;
    double abs_diff = 0.0;
    bool sign_consistent = false; // sign(gamma) == sign(nu4 - nu2)
};

inline CubicIdentityCheck gamma_iff_nu4(const Distribution& dist,
                                        const QuadOptions& opt = {}) {
    if (!dist.moment_exists(3.0))
        throw MomentDiverges("gamma_iff_nu4: third absolute moment diverges");
    CubicIdentityCheck chk;
    chk.nu2 = detail::central_moment(dist, 0.0, 1, opt);
    chk.sigma = std::sqrt(detail::central_moment(dist, chk.nu2, 2, opt));
    chk.gamma_direct =
        detail::central_moment(dist, chk.nu2, 3, opt) / std::pow(chk.sigma, 3);
    chk.nu4 = solve_pmean(dist, 4.0, true, opt).nu_p;
    double d = (chk.nu4 - chk.nu2) / chk.sigma;
    chk.gamma_via_nu4 = d * d * d + 3.0 * d;
    chk.abs_diff = std::fabs(chk.gamma_direct - chk.gamma_via_nu4);
    double s = chk.nu4 - chk.nu2;
    auto sgn = [](double v, double tol) { return v > tol ? 1 : (v < -tol ? -1 : 0); };
    chk.sign_consistent = sgn(chk.gamma_direct, 1e-9) == sgn(s, 1e-9 * chk.sigma);
    return chk;
}

enum class Classification {
    truly_positive,
    truly_negative,
    truly_mode_positive,
    truly_mode_negative,
    symmetric,
    indeterminate
};

inline std::string classification_name(Classification c, bool full_domain) {
    const char* base = "?";
    switch (c) {
        case Classification::truly_positive: base = "truly_positive"; break;
        case Classification::truly_negative: base = "truly_negative"; break;
        case Classification::truly_mode_positive: base = "truly_mode_positive"; break;
        case Classification::truly_mode_negative: base = "truly_mode_negative"; break;
        case Classification::symmetric: base = "symmetric"; break;
        case Classification::indeterminate: base = "indeterminate"; break;
    }
    std::string s = base;
    if (full_domain && c != Classification::indeterminate) s += "_full_domain";
    return s;
}

struct ClassificationResult {
    Classification label = Classification::indeterminate;
    bool full_domain = false;
    std::optional<double> offending_p; // first grid point breaking monotonicity
    PMeanCurve curve;
};

// Truly positive/negative skewness: nu_p strictly increasing/decreasing in p,
// certified by the sign of dnu/dp over the whole grid. The mode variants
// additionally require nu_0 on the matching side of the curve; a support
// boundary mode (gamma alpha <= 1, pareto) participates through the reduced
// requirement nu_p > nu_0.
inline ClassificationResult classify(const Distribution& dist,
                                     const std::vector<double>& p_grid,
                                     bool full_domain = false,
                                     const QuadOptions& opt = {}) {
    const double tol = 1e-9;
    ClassificationResult res;
    res.full_domain = full_domain;
    res.curve = pmean_curve(dist, p_grid, full_domain, opt);

    bool all_pos = true, all_neg = true, all_zero = true;
    for (const auto& pt : res.curve.points) {
        if (!pt.dnu_dp) {
            res.label = Classification::indeterminate;
            res.offending_p = pt.p;
            return res;
        }
        double d = *pt.dnu_dp;
        if (!(d > tol)) all_pos = false;
        if (!(d < -tol)) all_neg = false;
        if (!(std::fabs(d) <= tol)) all_zero = false;
        if (!all_pos && !all_neg && !all_zero && !res.offending_p) res.offending_p = pt.p;
    }
    if (all_zero) {
        res.label = Classification::symmetric;
        res.offending_p.reset();
        return res;
    }
    if (!all_pos && !all_neg) {
        res.label = Classification::indeterminate;
        return res;
    }
    res.offending_p.reset();
    auto nu0 = mode(dist);
    const auto& front = res.curve.points.front();
    if (all_pos)
        res.label = nu0 && *nu0 < front.nu_p ? Classification::truly_mode_positive
                                             : Classification::truly_positive;
    else
        res.label = nu0 && *nu0 > front.nu_p ? Classification::truly_mode_negative
                                             : Classification::truly_negative;
    return res;
}

struct EllEstimate {
    std::optional<double> value;
    bool diverged = false;      // Cauchy criterion failed on the trailing pair
    bool bounded_support = false;
    std::vector<double> p_used;
    std::vector<double> h_values; // h(p) = (dnu/dp) / (nu_p - nu_1)
};

// Asymptotic relative growth rate ell = lim h(p) as p approaches the top of
// the moment domain. Evaluated on a doubling sequence toward S = inf, or a
// geometric approach to a finite S; the trailing pair must agree to 1e-3
// relative or the limit is reported as divergent.
inline EllEstimate magnitude_ell(const Distribution& dist, const QuadOptions& opt = {}) {
    EllEstimate est;
    if (std::isfinite(dist.support().left) && std::isfinite(dist.support().right)) {
        est.bounded_support = true;
        return est;
    }
    double S = moment_domain(dist).sup;
    std::vector<double> ps;
    if (std::isfinite(S)) {
        for (int k = 2; k <= 7; ++k) {
            double p = S - (S - 1.0) * std::pow(2.0, -k);
            if (p > 1.0 + 1e-6) ps.push_back(p);
        }
    } else {
        for (double p : {4.0, 8.0, 16.0, 32.0, 64.0, 128.0}) ps.push_back(p);
    }

    double nu1 = solve_pmean(dist, 1.0, true, opt).nu_p;
    for (double p : ps) {
        PMeanPoint pt;
        try {
            pt = solve_pmean(dist, p, true, opt);
            fill_derivative(dist, pt, true, opt);
        } catch (const Error&) {
            break; // keep what we have; the sequence ran out of headroom
        }
        if (!pt.dnu_dp) break;
        double denom = pt.nu_p - nu1;
        if (std::fabs(denom) < 1e-12 * std::max(1.0, std::fabs(nu1))) {
            // flat curve: nu_p never leaves nu_1, the rate is zero
            est.p_used.push_back(p);
            est.h_values.push_back(0.0);
            continue;
        }
        est.p_used.push_back(p);
        est.h_values.push_back(*pt.dnu_dp / denom);
    }
    if (est.h_values.size() < 3) {
        est.diverged = true;
        return est;
    }
    size_t n = est.h_values.size();
    double last = est.h_values[n - 1], prev = est.h_values[n - 2];
    double ref = std::max(std::fabs(last), 1e-12);
    if (std::fabs(last - prev) / ref > 1e-3) {
        est.diverged = true;
        return est;
    }
    est.value = last;
    return est;
}

// Van Zwet's sufficient condition for mode <= median <= mean: the quantile
// sums F(nu_1 - x) + F(nu_1 + x) stay at or below 1 for all x > 0, i.e. the
// right scaled tail at the median stochastically dominates the left one.
inline bool van_zwet(const Distribution& dist, int grid_size = 2048,
                     const QuadOptions& opt = {}) {
    double nu1 = solve_pmean(dist, 1.0, true, opt).nu_p;
    double lo = dist.support().left, hi = dist.support().right;
    double reach_l = std::isfinite(lo) ? nu1 - lo : nu1 - dist.quantile(1e-12);
    double reach_r = std::isfinite(hi) ? hi - nu1 : dist.quantile(1.0 - 1e-12) - nu1;
    double xmax = std::max(reach_l, reach_r);
    for (int i = 1; i <= grid_size; ++i) {
        double x = xmax * double(i) / grid_size;
        if (dist.cdf(nu1 - x) + dist.cdf(nu1 + x) > 1.0 + 1e-9) return false;
    }
    // geometric refinement near 0 where the inequality is tightest
    for (int k = 1; k <= 40; ++k) {
        double x = xmax * std::pow(0.7, k);
        if (dist.cdf(nu1 - x) + dist.cdf(nu1 + x) > 1.0 + 1e-9) return false;
    }
    return true;
}

struct SkewnessReport {
    PearsonCoefficients pearson;
    ClassificationResult classification;
    EllEstimate ell;
    bool van_zwet_holds = false;
};

inline SkewnessReport skewness_report(const Distribution& dist,
                                      const std::vector<double>& p_grid,
                                      bool full_domain = false,
                                      const QuadOptions& opt = {}) {
    SkewnessReport rep;
    rep.pearson = pearson_coefficients(dist, opt);
    rep.classification = classify(dist, p_grid, full_domain, opt);
    rep.ell = magnitude_ell(dist, opt);
    rep.van_zwet_holds = van_zwet(dist, 2048, opt);
    return rep;
}

} // namespace frechet

#endif
