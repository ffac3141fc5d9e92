#ifndef FRECHET_QUADRATURE_HPP
#define FRECHET_QUADRATURE_HPP

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <queue>
#include <vector>

#include "frechet/errors.hpp"

namespace frechet {

struct QuadOptions {
    double abs_tol = 1e-12;
    double rel_tol = 1e-10;
    int max_intervals = 8000;
};

namespace detail {

// Gauss-Kronrod 15(7) nodes and weights on [-1, 1].
inline constexpr double gk_nodes[15] = {
    -0.991455371120813, -0.949107912342759, -0.864864423359769,
    -0.741531185599394, -0.586087235467691, -0.405845151377397,
    -0.207784955007898, 0.0,
    0.207784955007898,  0.405845151377397,  0.586087235467691,
    0.741531185599394,  0.864864423359769,  0.949107912342759,
    0.991455371120813};

inline constexpr double gk_kw[15] = {
    0.022935322010529, 0.063092092629979, 0.104790010322250,
    0.140653259715525, 0.169004726639267, 0.190350578064785,
    0.204432940075298, 0.209482141084728,
    0.204432940075298, 0.190350578064785, 0.169004726639267,
    0.140653259715525, 0.104790010322250, 0.063092092629979,
    0.022935322010529};

// Gauss-7 weights at kronrod node indices 1,3,5,7,9,11,13.
inline constexpr double gk_gw[7] = {
    0.129484966168870, 0.279705391489277, 0.381830050505119,
    0.417959183673469, 0.381830050505119, 0.279705391489277,
    0.129484966168870};

template <class F>
inline void gk15(const F& f, double a, double b, double& value, double& error) {
    const double c = 0.5 * (a + b);
    const double h = 0.5 * (b - a);
    double resk = 0.0, resg = 0.0;
    for (int i = 0; i < 15; ++i) {
        double x = c + h * gk_nodes[i];
        double fx = f(x);
        if (!std::isfinite(fx)) fx = 0.0; // endpoint singularities: drop the point
        resk += gk_kw[i] * fx;
        if (i % 2 == 1) resg += gk_gw[i / 2] * fx;
    }
    value = resk * h;
    error = std::fabs((resk - resg) * h);
}

struct Segment {
    double a, b, value, error;
    bool operator<(const Segment& o) const { return error < o.error; }
};

} // namespace detail

// Adaptive Gauss-Kronrod integration over a finite interval. Optional
// interior breakpoints seed the refinement so narrow features are not
// missed by the first panel.
template <class F>
inline double integrate_finite(const F& f, double a, double b,
                               const QuadOptions& opt = {},
                               const std::vector<double>& breaks = {}) {
    if (a == b) return 0.0;
    double sign = 1.0;
    if (a > b) { std::swap(a, b); sign = -1.0; }

    std::vector<double> edges{a};
    for (double x : breaks)
        if (x > a && x < b) edges.push_back(x);
    edges.push_back(b);
    std::sort(edges.begin(), edges.end());
    edges.erase(std::unique(edges.begin(), edges.end()), edges.end());

    std::priority_queue<detail::Segment> heap;
    double total = 0.0, toterr = 0.0;
    for (size_t i = 0; i + 1 < edges.size(); ++i) {
        detail::Segment s{edges[i], edges[i + 1], 0.0, 0.0};
        detail::gk15(f, s.a, s.b, s.value, s.error);
        total += s.value;
        toterr += s.error;
        heap.push(s);
    }
    int n = static_cast<int>(edges.size()) - 1;
    while (toterr > std::max(opt.abs_tol, opt.rel_tol * std::fabs(total))) {
        if (n >= opt.max_intervals)
            throw QuadratureFailure("integrate_finite: tolerance not met after max refinement");
        detail::Segment top = heap.top();
        heap.pop();
        double mid = 0.5 * (top.a + top.b);
        if (mid <= top.a || mid >= top.b) {
            // interval at machine width; accept its estimate
            continue;
        }
        detail::Segment l{top.a, mid, 0.0, 0.0}, r{mid, top.b, 0.0, 0.0};
        detail::gk15(f, l.a, l.b, l.value, l.error);
        detail::gk15(f, r.a, r.b, r.value, r.error);
        total += l.value + r.value - top.value;
        toterr += l.error + r.error - top.error;
        heap.push(l);
        heap.push(r);
        ++n;
        if (heap.empty()) break;
    }
    return sign * total;
}

// Integration with possibly infinite endpoints; infinite tails are mapped
// to (0,1) via y = scale*t/(1-t).
template <class F>
inline double integrate(const F& f, double a, double b, const QuadOptions& opt = {},
                        double scale = 1.0) {
    const double inf = std::numeric_limits<double>::infinity();
    if (scale <= 0.0 || !std::isfinite(scale)) scale = 1.0;
    if (a == -inf && b == inf) {
        return integrate(f, a, 0.0, opt, scale) + integrate(f, 0.0, b, opt, scale);
    }
    static const std::vector<double> tbreaks{0.05, 0.1, 0.2, 0.3, 0.4, 0.5,
                                             0.6,  0.7, 0.8, 0.9, 0.95, 0.99};
    if (b == inf) {
        auto g = [&](double t) {
            double u = t / (1.0 - t);
            double y = a + scale * u;
            double jac = scale / ((1.0 - t) * (1.0 - t));
            return f(y) * jac;
        };
        return integrate_finite(g, 0.0, 1.0, opt, tbreaks);
    }
    if (a == -inf) {
        auto g = [&](double t) {
            double u = t / (1.0 - t);
            double y = b - scale * u;
            double jac = scale / ((1.0 - t) * (1.0 - t));
            return f(y) * jac;
        };
        return integrate_finite(g, 0.0, 1.0, opt, tbreaks);
    }
    return integrate_finite(f, a, b, opt);
}

// ---------------------------------------------------------------------------
// Log-domain integration: values carried as sign * exp(log_abs) so that
// integrals of y^{p-1} f(...) survive arbitrarily large p.
// ---------------------------------------------------------------------------

struct LogValue {
    double log_abs = -std::numeric_limits<double>::infinity();
    int sign = 0;

    double value() const {
        if (sign == 0) return 0.0;
        return sign * std::exp(log_abs);
    }
    bool is_zero() const { return sign == 0; }
};

inline LogValue log_value_from(double x) {
    LogValue v;
    if (x == 0.0) return v;
    v.sign = x > 0.0 ? 1 : -1;
    v.log_abs = std::log(std::fabs(x));
    return v;
}

inline LogValue log_add(const LogValue& a, const LogValue& b) {
    if (a.sign == 0) return b;
    if (b.sign == 0) return a;
    const LogValue& hi = a.log_abs >= b.log_abs ? a : b;
    const LogValue& lo = a.log_abs >= b.log_abs ? b : a;
    double r = std::exp(lo.log_abs - hi.log_abs);
    double m = hi.sign == lo.sign ? 1.0 + r : 1.0 - r;
    LogValue out;
    if (m == 0.0) return out;
    out.sign = m > 0.0 ? hi.sign : -hi.sign;
    out.log_abs = hi.log_abs + std::log(std::fabs(m));
    return out;
}

inline LogValue log_sub(const LogValue& a, const LogValue& b) {
    LogValue nb = b;
    nb.sign = -nb.sign;
    return log_add(a, nb);
}

inline LogValue log_scale(const LogValue& a, double log_factor, int sign_factor = 1) {
    LogValue out = a;
    out.log_abs += log_factor;
    out.sign *= sign_factor;
    return out;
}

inline LogValue log_div(const LogValue& a, const LogValue& b) {
    LogValue out;
    if (a.sign == 0) return out;
    out.sign = a.sign * b.sign;
    out.log_abs = a.log_abs - b.log_abs;
    return out;
}

namespace detail {

// Probe points for locating the peak of exp(g) on (vlo, vhi).
inline std::vector<double> probe_points(double vlo, double vhi) {
    const double inf = std::numeric_limits<double>::infinity();
    std::vector<double> pts;
    double lo = vlo, hi = vhi;
    if (lo == -inf) lo = -64.0;
    if (hi == inf) hi = 64.0;
    if (lo >= hi) { lo = hi - 1.0; }
    for (int i = 0; i <= 384; ++i)
        pts.push_back(lo + (hi - lo) * i / 384.0);
    // geometric approach to finite endpoints (boundary spikes)
    double w = hi - lo;
    for (int k = 1; k <= 40; ++k) {
        double d = w * std::pow(0.5, k);
        if (vhi != inf) pts.push_back(vhi - d);
        if (vlo != -inf) pts.push_back(vlo + d);
    }
    // expanding probes into infinite tails
    for (int j = 0; j <= 44; ++j) {
        double d = std::pow(2.0, j);
        if (vhi == inf) pts.push_back(hi + d);
        if (vlo == -inf) pts.push_back(lo - d);
    }
    std::sort(pts.begin(), pts.end());
    pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
    return pts;
}

} // namespace detail

// Integral of w(v)*exp(g(v)) dv over (vlo, vhi), where w is 1 or v.
// g must be -inf wherever the integrand vanishes. Returns a signed
// log-domain value. Throws DivergentIntegral when the integrand does not
// decay within the probe horizon.
template <class G>
inline LogValue log_domain_integral(const G& g, double vlo, double vhi,
                                    bool weight_v = false,
                                    const QuadOptions& opt = {}) {
    const double inf = std::numeric_limits<double>::infinity();
    LogValue zero;
    if (vlo >= vhi) return zero;

    auto pts = detail::probe_points(vlo, vhi);
    double M = -inf, vpeak = 0.0;
    std::vector<std::pair<double, double>> samples;
    samples.reserve(pts.size());
    for (double v : pts) {
        if (v <= vlo || v >= vhi) continue;
        double gv = g(v);
        if (std::isnan(gv)) continue;
        samples.emplace_back(v, gv);
        if (gv > M) { M = gv; vpeak = v; }
    }
    if (samples.empty() || M == -inf) return zero;

    const double drop = 120.0;
    // truncation bounds where the integrand has decayed below e^{-drop}
    double lo = vlo, hi = vhi;
    for (size_t i = 0; i + 1 < samples.size(); ++i) {
        if (samples[i].first >= vpeak) break;
        if (samples[i].second < M - drop && samples[i + 1].second < M - drop)
            lo = samples[i].first;
        else
            break;
    }
    for (size_t i = samples.size(); i-- > 1;) {
        if (samples[i].first <= vpeak) break;
        if (samples[i].second < M - drop && samples[i - 1].second < M - drop)
            hi = samples[i].first;
        else
            break;
    }
    if (vhi == inf && samples.back().second > M - drop) {
        // integrand has not decayed by the largest probe: check slope
        double v1 = samples[samples.size() - 2].first, g1 = samples[samples.size() - 2].second;
        double v2 = samples.back().first, g2 = samples.back().second;
        if (g2 >= g1 - 1e-12 * std::max(1.0, std::fabs(g1)))
            throw DivergentIntegral("log_domain_integral: integrand does not decay at +inf");
        // extrapolate the exponential tail cutoff
        double slope = (g2 - g1) / (v2 - v1);
        hi = v2 + (M - drop - g2) / slope;
    }
    if (vlo == -inf && samples.front().second > M - drop) {
        double v1 = samples[0].first, g1 = samples[0].second;
        double v2 = samples[1].first, g2 = samples[1].second;
        if (g1 >= g2 - 1e-12 * std::max(1.0, std::fabs(g2)))
            throw DivergentIntegral("log_domain_integral: integrand does not decay at -inf");
        double slope = (g1 - g2) / (v1 - v2); // slope looking leftwards
        lo = v1 - (M - drop - g1) / slope;
    }
    if (lo == -inf) lo = samples.front().first;
    if (hi == inf) hi = samples.back().first;
    if (!(lo < hi)) return zero;

    // seed the adaptive pass with breakpoints covering the bulk of the mass
    std::vector<double> breaks;
    {
        std::vector<double> hot;
        for (auto& s : samples)
            if (s.second >= M - drop && s.first > lo && s.first < hi)
                hot.push_back(s.first);
        size_t stride = std::max<size_t>(1, hot.size() / 48);
        for (size_t i = 0; i < hot.size(); i += stride) breaks.push_back(hot[i]);
    }

    auto ig = [&](double v) {
        double gv = g(v);
        if (!std::isfinite(gv)) return 0.0;
        double e = std::exp(gv - M);
        return weight_v ? std::fabs(v) * e : e;
    };

    LogValue out;
    if (!weight_v || lo >= 0.0 || hi <= 0.0) {
        double I = integrate_finite(ig, lo, hi, opt, breaks);
        if (I <= 0.0) return zero;
        out.sign = (weight_v && hi <= 0.0) ? -1 : 1;
        out.log_abs = M + std::log(I);
        return out;
    }
    // weight v changes sign across 0: combine signed pieces
    double In = integrate_finite(ig, lo, 0.0, opt, breaks);
    double Ip = integrate_finite(ig, 0.0, hi, opt, breaks);
    LogValue a, b;
    if (In > 0.0) { a.sign = -1; a.log_abs = M + std::log(In); }
    if (Ip > 0.0) { b.sign = 1; b.log_abs = M + std::log(Ip); }
    return log_add(a, b);
}

} // namespace frechet

#endif
