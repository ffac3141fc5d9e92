#ifndef FRECHET_PMEAN_HPP
#define FRECHET_PMEAN_HPP

#include <algorithm>
#include <cmath>
#include <optional>
#include <string>
#include <vector>

#include "frechet/distributions.hpp"
#include "frechet/quadrature.hpp"
#include "frechet/util.hpp"

namespace frechet {

enum class DerivMethod { interior_formula, general_formula, finite_difference, none };

inline const char* deriv_method_name(DerivMethod m) {
    switch (m) {
        case DerivMethod::interior_formula: return "interior_formula";
        case DerivMethod::general_formula: return "general_formula";
        case DerivMethod::finite_difference: return "finite_difference";
        case DerivMethod::none: return "none";
    }
    return "?";
}

struct PMeanPoint {
    double p = 0.0;
    double nu_p = 0.0;
    double h_p = 0.0;     // may overflow to inf for extreme p; see log_h_p
    double log_h_p = 0.0;
    std::optional<double> dnu_dp;
    double residual = 0.0; // |G(nu_p)| in units of H_p
    DerivMethod method = DerivMethod::none;
};

enum class CurveDomain { standard, full_domain };

struct PMeanCurve {
    std::vector<PMeanPoint> points;
    CurveDomain domain_used = CurveDomain::standard;
    std::vector<double> dropped_p; // grid values outside the admissible domain
};

namespace detail {

enum class Side { left, right };

inline double side_length(const Distribution& dist, double a, Side s) {
    return s == Side::left ? a - dist.support().left : dist.support().right - a;
}

// Generic tail integral I = \int_0^{ymax} y^{s-1} [log y] K(x(y)) dy with
// x = a - y (left) or a + y (right), evaluated in the log domain.
//
// The y -> 0 end is handled in v = log y, where the y^{s-1} endpoint
// singularity becomes exponential decay. When ymax is finite the outer half
// [ymax/2, ymax) is integrated in u = log(x - L) (resp. log(R - x)), so that
// a pdf singularity at the support endpoint is regularized as well and x
// keeps full precision near the endpoint.
//
// K is described by log|K| and its sign; ycuts lists interior sign changes.
struct TailKernel {
    std::function<double(double)> log_abs; // log|K(x)|, -inf where K = 0
    std::function<int(double)> sign;       // sign of K(x)
    std::vector<double> ycuts;             // y values where sign(K) flips
};

inline LogValue tail_integral(const Distribution& dist, double a, Side side, double s,
                              const TailKernel& kern, bool log_weight,
                              const QuadOptions& opt = {}) {
    const double ymax = side_length(dist, a, side);
    if (!(ymax > 0.0)) return LogValue{};
    const double endpoint =
        side == Side::left ? dist.support().left : dist.support().right;
    auto x_of_y = [&](double y) { return side == Side::left ? a - y : a + y; };

    const bool finite_end = std::isfinite(ymax);
    const double ymid = finite_end ? 0.5 * ymax : kInf;

    LogValue total;

    // ---- inner piece: y in (0, ymid), coordinates v = log y
    {
        auto g = [&](double v) {
            double y = std::exp(v);
            return s * v + kern.log_abs(x_of_y(y));
        };
        std::vector<double> edges{-kInf};
        for (double yc : kern.ycuts)
            if (yc > 0.0 && yc < ymid) edges.push_back(std::log(yc));
        edges.push_back(finite_end ? std::log(ymid) : kInf);
        std::sort(edges.begin(), edges.end());
        for (size_t i = 0; i + 1 < edges.size(); ++i) {
            LogValue piece = log_domain_integral(g, edges[i], edges[i + 1], log_weight, opt);
            if (piece.is_zero()) continue;
            double vm = std::isfinite(edges[i]) && std::isfinite(edges[i + 1])
                            ? 0.5 * (edges[i] + edges[i + 1])
                        : std::isfinite(edges[i + 1]) ? edges[i + 1] - 1.0
                                                      : edges[i] + 1.0;
            piece.sign *= kern.sign(x_of_y(std::exp(vm)));
            total = log_add(total, piece);
        }
    }
    if (!finite_end) return total;

    // ---- outer piece: y in [ymid, ymax), coordinates u = log|x - endpoint|
    // y = ymax - e^u, jacobian dy = e^u du
    {
        auto x_of_u = [&](double u) {
            double d = std::exp(u);
            return side == Side::left ? endpoint + d : endpoint - d;
        };
        auto y_of_u = [&](double u) { return ymax - std::exp(u); };
        auto g = [&](double u) {
            double y = y_of_u(u);
            if (!(y > 0.0)) return -kInf;
            double base = (s - 1.0) * std::log(y) + kern.log_abs(x_of_u(u)) + u;
            if (log_weight) {
                double ly = std::log(y);
                if (ly == 0.0) return -kInf;
                base += std::log(std::fabs(ly));
            }
            return base;
        };
        std::vector<double> edges{-kInf};
        for (double yc : kern.ycuts)
            if (yc > ymid && yc < ymax) edges.push_back(std::log(ymax - yc));
        if (log_weight && ymid < 1.0 && 1.0 < ymax)
            edges.push_back(std::log(ymax - 1.0)); // sign change of log y
        edges.push_back(std::log(ymid));
        std::sort(edges.begin(), edges.end());
        for (size_t i = 0; i + 1 < edges.size(); ++i) {
            LogValue piece = log_domain_integral(g, edges[i], edges[i + 1], false, opt);
            if (piece.is_zero()) continue;
            double um = std::isfinite(edges[i]) ? 0.5 * (edges[i] + edges[i + 1])
                                                : edges[i + 1] - 1.0;
            double ym = y_of_u(um);
            int sgn = kern.sign(x_of_u(um));
            if (log_weight && std::log(ym) < 0.0) sgn = -sgn;
            piece.sign *= sgn;
            total = log_add(total, piece);
        }
    }
    return total;
}

inline TailKernel pdf_kernel(const Distribution& dist) {
    TailKernel k;
    k.log_abs = [&dist](double x) { return dist.log_pdf(x); };
    k.sign = [](double) { return 1; };
    return k;
}

// I = \int_0^{ymax} y^{s-1} [log y] f(a -/+ y) dy, in the log domain.
inline LogValue tail_power_integral(const Distribution& dist, double a, Side side,
                                    double s, bool log_weight = false,
                                    const QuadOptions& opt = {}) {
    return tail_integral(dist, a, side, s, pdf_kernel(dist), log_weight, opt);
}

// \int_0^{ymax} y^{p-1} f'(a -/+ y) dy. f' changes sign at the mode, so the
// kernel carries the corresponding cut.
inline LogValue tail_fprime_integral(const Distribution& dist, double a, Side side,
                                     double p, const QuadOptions& opt = {}) {
    TailKernel k;
    k.log_abs = [&dist](double x) {
        double lp = dist.log_pdf(x);
        if (lp == -kInf) return -kInf;
        double slope = dist.log_pdf_slope(x);
        if (slope == 0.0) return -kInf;
        return lp + std::log(std::fabs(slope));
    };
    k.sign = [&dist](double x) {
        if (dist.log_pdf(x) == -kInf) return 1;
        return dist.log_pdf_slope(x) >= 0.0 ? 1 : -1;
    };
    if (auto m = mode(dist)) {
        double ym = side == Side::left ? a - *m : *m - a;
        if (ym > 0.0) k.ycuts.push_back(ym);
    }
    return tail_integral(dist, a, side, p, k, false, opt);
}

struct BalanceState {
    LogValue left, right;
    LogValue h() const {
        LogValue sum = log_add(left, right);
        return log_scale(sum, std::log(0.5));
    }
    // (right - left) / H_p
    double relative_residual() const {
        LogValue diff = log_sub(right, left);
        if (diff.is_zero()) return 0.0;
        LogValue hh = h();
        if (hh.is_zero()) return 0.0;
        return log_div(diff, hh).value();
    }
};

inline BalanceState balance_state(const Distribution& dist, double p, double a,
                                  const QuadOptions& opt = {}) {
    BalanceState st;
    st.left = tail_power_integral(dist, a, Side::left, p, false, opt);
    st.right = tail_power_integral(dist, a, Side::right, p, false, opt);
    return st;
}

// Numeric boundary limit of y^{p-1} f(a -/+ y) as y approaches the side
// length (Eq-19-style boundary terms). Returns a log-domain value; throws
// when the limit grows without converging.
inline LogValue boundary_limit(const Distribution& dist, double a, Side side, double p,
                               double ymax) {
    std::vector<double> ts;
    if (std::isfinite(ymax)) {
        for (int k = 5; k <= 11; ++k) {
            double y = ymax * (1.0 - std::pow(10.0, -k));
            double x = side == Side::left ? a - y : a + y;
            ts.push_back((p - 1.0) * std::log(y) + dist.log_pdf(x));
        }
    } else {
        double scale = std::max(1.0, std::fabs(a));
        for (int k = 3; k <= 9; ++k) {
            double y = scale * std::pow(10.0, k);
            double x = side == Side::left ? a - y : a + y;
            ts.push_back((p - 1.0) * std::log(y) + dist.log_pdf(x));
        }
    }
    double last = ts.back(), prev = ts[ts.size() - 2];
    if (last < -50.0 && last <= prev) return LogValue{}; // vanishing limit
    if (std::fabs(last - prev) < 1e-6 * std::max(1.0, std::fabs(last))) {
        LogValue v;
        v.sign = 1;
        v.log_abs = last;
        return v;
    }
    if (last > prev)
        throw DivergentIntegral("boundary term of the general derivative formula diverges");
    // still decreasing but slowly: take the last estimate
    LogValue v;
    v.sign = 1;
    v.log_abs = last;
    return v;
}

} // namespace detail

// G(a) = int_0^{R-a} y^{p-1} f(a+y) dy - int_0^{a-L} y^{p-1} f(a-y) dy.
inline double balance_residual(const Distribution& dist, double p, double a,
                               const QuadOptions& opt = {}) {
    if (!(p > 0.0)) throw InvalidParams("balance_residual: p must be > 0");
    const auto& s = dist.support();
    if (!(a > s.left && a < s.right))
        throw InvalidParams("balance_residual: a outside the support");
    if (p >= 1.0 && !dist.moment_exists(p - 1.0))
        throw DivergentIntegral("balance_residual: E|X|^{p-1} diverges");
    auto st = detail::balance_state(dist, p, a, opt);
    return log_sub(st.right, st.left).value();
}

inline bool p_admissible(const Distribution& dist, double p, bool full_domain) {
    if (!(p > 0.0)) return false;
    if (p < 1.0) return full_domain;
    return moment_domain(dist).contains(p);
}

// Root of the balance equation via bracketing + Brent.
inline PMeanPoint solve_pmean(const Distribution& dist, double p,
                              bool full_domain = true, const QuadOptions& opt = {}) {
    if (!(p > 0.0)) throw InvalidParams("solve_pmean: p must be > 0");
    if (!p_admissible(dist, p, full_domain))
        throw DivergentIntegral("solve_pmean: p=" + std::to_string(p) +
                                " outside the admissible domain");

    const auto& sup = dist.support();
    auto rel = [&](double a) { return detail::balance_state(dist, p, a, opt).relative_residual(); };

    double lo = dist.quantile(1e-6);
    double hi = dist.quantile(1.0 - 1e-6);
    if (!(lo < hi)) { lo = dist.quantile(0.25); hi = dist.quantile(0.75); }
    double flo = rel(lo), fhi = rel(hi);

    // G decreases in a: expect flo > 0 > fhi. Expand geometrically on failure.
    for (int k = 0; k < 200 && flo * fhi > 0.0; ++k) {
        bool expanded = false;
        if (flo <= 0.0) { // root below lo
            double nlo = std::isfinite(sup.left) ? sup.left + 0.25 * (lo - sup.left)
                                                 : (lo > 0 ? lo * 0.5 - 1.0 : lo * 2.0 - 1.0);
            if (nlo < lo && nlo > sup.left) { lo = nlo; flo = rel(lo); expanded = true; }
        }
        if (fhi >= 0.0) { // root above hi
            double nhi = std::isfinite(sup.right) ? sup.right - 0.25 * (sup.right - hi)
                                                  : (hi > 0 ? hi * 2.0 + 1.0 : hi * 0.5 + 1.0);
            if (nhi > hi && nhi < sup.right) { hi = nhi; fhi = rel(hi); expanded = true; }
        }
        if (!expanded) break;
    }
    if (flo * fhi > 0.0)
        throw NoBracket("solve_pmean: balance residual does not change sign on the support");

    // Brent's method on the relative residual
    double a = lo, b = hi, fa = flo, fb = fhi;
    if (std::fabs(fa) < std::fabs(fb)) { std::swap(a, b); std::swap(fa, fb); }
    double c = a, fc = fa, d = b - a;
    bool mflag = true;
    const double rtol = 1e-10;
    const double xeps = 1e-15;
    for (int it = 0; it < 200 && std::fabs(fb) > rtol; ++it) {
        double s;
        if (fa != fc && fb != fc) {
            s = a * fb * fc / ((fa - fb) * (fa - fc)) +
                b * fa * fc / ((fb - fa) * (fb - fc)) +
                c * fa * fb / ((fc - fa) * (fc - fb));
        } else {
            s = b - fb * (b - a) / (fb - fa);
        }
        double lo34 = 0.25 * (3.0 * a + b);
        bool cond = !((s > std::min(lo34, b) && s < std::max(lo34, b))) ||
                    (mflag && std::fabs(s - b) >= 0.5 * std::fabs(b - c)) ||
                    (!mflag && std::fabs(s - b) >= 0.5 * std::fabs(c - d)) ||
                    (mflag && std::fabs(b - c) < xeps * (std::fabs(b) + 1.0)) ||
                    (!mflag && std::fabs(c - d) < xeps * (std::fabs(b) + 1.0));
        if (cond) { s = 0.5 * (a + b); mflag = true; } else { mflag = false; }
        double fs = rel(s);
        d = c;
        c = b; fc = fb;
        if (fa * fs < 0.0) { b = s; fb = fs; } else { a = s; fa = fs; }
        if (std::fabs(fa) < std::fabs(fb)) { std::swap(a, b); std::swap(fa, fb); }
        if (std::fabs(b - a) < xeps * (std::fabs(b) + 1.0)) break;
    }
    double root = b;
    auto st = detail::balance_state(dist, p, root, opt);
    double resid = std::fabs(st.relative_residual());
    if (resid > 1e-8)
        throw QuadratureFailure("solve_pmean: residual " + std::to_string(resid) +
                                " above tolerance at p=" + std::to_string(p));
    PMeanPoint pt;
    pt.p = p;
    pt.nu_p = root;
    LogValue h = st.h();
    pt.log_h_p = h.log_abs;
    pt.h_p = h.value();
    pt.residual = resid;
    return pt;
}

// Eq-10-style interior derivative: valid for p in the interior of D, p != 1.
inline double dnu_dp_interior(const Distribution& dist, const PMeanPoint& pt,
                              const QuadOptions& opt = {}) {
    double p = pt.p;
    if (std::fabs(p - 1.0) < 1e-3)
        throw NearSingularP("dnu_dp_interior: p too close to 1");
    if (p < 1.0)
        throw DivergentIntegral("dnu_dp_interior: denominator integral diverges for p < 1");
    if (p >= 1.0 && !dist.moment_exists(p - 1.0))
        throw DivergentIntegral("dnu_dp_interior: p outside D");
    using detail::Side;
    double a = pt.nu_p;
    LogValue num = log_sub(detail::tail_power_integral(dist, a, Side::right, p, true, opt),
                           detail::tail_power_integral(dist, a, Side::left, p, true, opt));
    LogValue den = log_add(detail::tail_power_integral(dist, a, Side::left, p - 1.0, false, opt),
                           detail::tail_power_integral(dist, a, Side::right, p - 1.0, false, opt));
    den = log_scale(den, std::log(std::fabs(p - 1.0)), p > 1.0 ? 1 : -1);
    if (den.is_zero())
        throw DivergentIntegral("dnu_dp_interior: zero denominator");
    return log_div(num, den).value();
}

// General derivative: Eq-19-style ratio with numeric boundary limits; at
// p == 1 exactly, the simplified two-integral form over 1/(2 f(nu_1)).
inline double dnu_dp_general(const Distribution& dist, const PMeanPoint& pt,
                             const QuadOptions& opt = {}) {
    using detail::Side;
    double p = pt.p, a = pt.nu_p;
    if (!dist.differentiable())
        throw NonDifferentiablePdf("dnu_dp_general: pdf not differentiable");

    if (p == 1.0) {
        LogValue num = log_sub(detail::tail_power_integral(dist, a, Side::right, 1.0, true, opt),
                               detail::tail_power_integral(dist, a, Side::left, 1.0, true, opt));
        double fa = dist.pdf(a);
        if (!(fa > 0.0)) throw DivergentIntegral("dnu_dp_general: f(nu_1) = 0");
        return num.value() / (2.0 * fa);
    }

    LogValue num = log_sub(detail::tail_power_integral(dist, a, Side::right, p, true, opt),
                           detail::tail_power_integral(dist, a, Side::left, p, true, opt));

    double ylen_l = detail::side_length(dist, a, Side::left);
    double ylen_r = detail::side_length(dist, a, Side::right);
    LogValue den = detail::boundary_limit(dist, a, Side::left, p, ylen_l);
    den = log_add(den, detail::boundary_limit(dist, a, Side::right, p, ylen_r));
    den = log_add(den, detail::tail_fprime_integral(dist, a, Side::left, p, opt));
    den = log_sub(den, detail::tail_fprime_integral(dist, a, Side::right, p, opt));
    if (den.is_zero())
        throw DivergentIntegral("dnu_dp_general: zero denominator");
    return log_div(num, den).value();
}

// Central finite difference of solve_pmean; falls back to a one-sided
// difference at domain edges.
inline double dnu_dp_finite_difference(const Distribution& dist, double p,
                                       bool full_domain = true, double step = 1e-4,
                                       const QuadOptions& opt = {}) {
    double h = step * std::max(1.0, std::fabs(p));
    bool up_ok = p_admissible(dist, p + h, full_domain);
    bool dn_ok = p_admissible(dist, p - h, full_domain);
    if (up_ok && dn_ok) {
        double nu_hi = solve_pmean(dist, p + h, full_domain, opt).nu_p;
        double nu_lo = solve_pmean(dist, p - h, full_domain, opt).nu_p;
        return (nu_hi - nu_lo) / (2.0 * h);
    }
    double nu0 = solve_pmean(dist, p, full_domain, opt).nu_p;
    if (up_ok) return (solve_pmean(dist, p + h, full_domain, opt).nu_p - nu0) / h;
    if (dn_ok) return (nu0 - solve_pmean(dist, p - h, full_domain, opt).nu_p) / h;
    throw DivergentIntegral("dnu_dp_finite_difference: no admissible step at p");
}

// Fill dnu_dp on a solved point by the most specific applicable formula.
inline void fill_derivative(const Distribution& dist, PMeanPoint& pt, bool full_domain,
                            const QuadOptions& opt = {}) {
    double p = pt.p;
    if (p == 1.0 || std::fabs(p - 1.0) < 1e-3) {
        try {
            pt.dnu_dp = dnu_dp_general(dist, pt, opt);
            pt.method = DerivMethod::general_formula;
            return;
        } catch (const Error&) {}
    } else if (p > 1.0 && dist.moment_exists(p - 1.0)) {
        try {
            pt.dnu_dp = dnu_dp_interior(dist, pt, opt);
            pt.method = DerivMethod::interior_formula;
            return;
        } catch (const Error&) {}
    }
    if (!pt.dnu_dp) {
        try {
            pt.dnu_dp = dnu_dp_general(dist, pt, opt);
            pt.method = DerivMethod::general_formula;
            return;
        } catch (const Error&) {}
    }
    try {
        pt.dnu_dp = dnu_dp_finite_difference(dist, p, full_domain, 1e-4, opt);
        pt.method = DerivMethod::finite_difference;
    } catch (const Error&) {
        pt.method = DerivMethod::none;
    }
}

inline PMeanCurve pmean_curve(const Distribution& dist, const std::vector<double>& p_grid,
                              bool full_domain, const QuadOptions& opt = {}) {
    for (size_t i = 1; i < p_grid.size(); ++i)
        if (!(p_grid[i] > p_grid[i - 1]))
            throw InvalidParams("pmean_curve: grid must be strictly increasing");

    PMeanCurve curve;
    curve.domain_used = full_domain ? CurveDomain::full_domain : CurveDomain::standard;
    std::vector<double> admissible;
    for (double p : p_grid) {
        if (p_admissible(dist, p, full_domain))
            admissible.push_back(p);
        else
            curve.dropped_p.push_back(p);
    }
    if (admissible.empty())
        throw EmptyDomainIntersection("pmean_curve: no grid point in the admissible domain");

    std::vector<PMeanPoint> pts(admissible.size());
    std::vector<std::exception_ptr> errors(admissible.size());
    parallel_for(admissible.size(), [&](size_t i) {
        try {
            pts[i] = solve_pmean(dist, admissible[i], full_domain, opt);
            fill_derivative(dist, pts[i], full_domain, opt);
        } catch (...) {
            errors[i] = std::current_exception();
        }
    });
    for (auto& e : errors)
        if (e) std::rethrow_exception(e);
    curve.points = std::move(pts);
    return curve;
}

} // namespace frechet

#endif
