#ifndef FRECHET_DOMINANCE_HPP
#define FRECHET_DOMINANCE_HPP

#include <algorithm>
#include <cmath>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "frechet/distributions.hpp"
#include "frechet/pmean.hpp"

namespace frechet {

// Scaled tail densities at nu_p: left y^{p-1} f(nu_p - y)/H_p on (0, nu_p-L),
// right y^{p-1} f(nu_p + y)/H_p on (0, R - nu_p).
class TailPair {
public:
    TailPair(Distribution dist, PMeanPoint pt, const QuadOptions& opt = {})
        : dist_(std::move(dist)), pt_(pt), opt_(opt) {
        using detail::Side;
        LogValue left = detail::tail_power_integral(dist_, pt_.nu_p, Side::left, pt_.p,
                                                    false, opt_);
        LogValue right = detail::tail_power_integral(dist_, pt_.nu_p, Side::right, pt_.p,
                                                     false, opt_);
        LogValue diff = log_sub(right, left);
        LogValue sum = log_add(right, left);
        if (!diff.is_zero() && !sum.is_zero() &&
            std::exp(diff.log_abs - sum.log_abs) > 0.5e-6)
            throw NormalizationMismatch(
                "tail pair: the two sides of the balance equation disagree");
        log_h_ = log_scale(sum, std::log(0.5)).log_abs;
        log_total_l_ = left.log_abs;
        log_total_r_ = right.log_abs;
    }

    double p() const { return pt_.p; }
    double nu_p() const { return pt_.nu_p; }
    double h_p() const { return std::exp(log_h_); }
    double log_h_p() const { return log_h_; }
    const Distribution& dist() const { return dist_; }
    double left_extent() const { return pt_.nu_p - dist_.support().left; }
    double right_extent() const { return dist_.support().right - pt_.nu_p; }

    double left_density(double y) const { return density(y, detail::Side::left); }
    double right_density(double y) const { return density(y, detail::Side::right); }

    double left_cdf(double y) const { return tail_cdf(y, detail::Side::left); }
    double right_cdf(double y) const { return tail_cdf(y, detail::Side::right); }

    // cumulative distribution of the scaled tail density on an increasing y
    // grid, one adaptive panel per cell. Normalized by the same panel scheme
    // over the full extent so the curve reaches exactly 1, independent of the
    // solver's residual in H_p.
    std::vector<double> cumulative(const std::vector<double>& ys, detail::Side side) const {
        double extent = side == detail::Side::left ? left_extent() : right_extent();
        std::vector<LogValue> acc(ys.size());
        LogValue run;
        double prev = 0.0;
        for (size_t i = 0; i < ys.size(); ++i) {
            double hi = std::min(ys[i], extent);
            if (hi > prev) {
                run = log_add(run, partial_mass(prev, hi, side));
                prev = hi;
            }
            acc[i] = run;
        }
        LogValue total = run;
        if (std::isfinite(extent)) {
            if (extent > prev) total = log_add(total, partial_mass(prev, extent, side));
        } else {
            double lo = std::max(prev, 1e-300);
            for (int k = 0; k < 2000 && lo < 1e300; ++k) {
                double hi = std::max(lo * 2.0, 1.0);
                LogValue inc = partial_mass(lo, hi, side);
                total = log_add(total, inc);
                if (!total.is_zero() && (inc.is_zero() || inc.log_abs < total.log_abs - 40.0))
                    break;
                lo = hi;
            }
        }
        std::vector<double> out(ys.size(), 0.0);
        for (size_t i = 0; i < ys.size(); ++i)
            if (!acc[i].is_zero() && !total.is_zero())
                out[i] = std::min(1.0, std::exp(acc[i].log_abs - total.log_abs));
        return out;
    }

private:
    double density(double y, detail::Side side) const {
        double extent = side == detail::Side::left ? left_extent() : right_extent();
        if (!(y > 0.0) || y >= extent) return 0.0;
        double x = side == detail::Side::left ? pt_.nu_p - y : pt_.nu_p + y;
        double lg = (pt_.p - 1.0) * std::log(y) + dist_.log_pdf(x) - log_h_;
        return std::exp(lg);
    }

    LogValue partial_mass(double ylo, double yhi, detail::Side side) const {
        auto g = [&](double v) {
            double y = std::exp(v);
            double x = side == detail::Side::left ? pt_.nu_p - y : pt_.nu_p + y;
            return pt_.p * v + dist_.log_pdf(x);
        };
        double vlo = ylo > 0.0 ? std::log(ylo) : -kInf;
        return log_domain_integral(g, vlo, std::log(yhi), false, opt_);
    }

    double tail_cdf(double y, detail::Side side) const {
        double extent = side == detail::Side::left ? left_extent() : right_extent();
        if (!(y > 0.0)) return 0.0;
        if (y >= extent) return 1.0;
        LogValue m = partial_mass(0.0, y, side);
        if (m.is_zero()) return 0.0;
        double log_total = side == detail::Side::left ? log_total_l_ : log_total_r_;
        return std::min(1.0, std::exp(m.log_abs - log_total));
    }

    Distribution dist_;
    PMeanPoint pt_;
    QuadOptions opt_;
    double log_h_ = 0.0;
    double log_total_l_ = 0.0;
    double log_total_r_ = 0.0;
};

inline TailPair build_tail_pair(const Distribution& dist, const PMeanPoint& pt,
                                const QuadOptions& opt = {}) {
    return TailPair(dist, pt, opt);
}

enum class DominanceOutcome {
    right_dominates_strictly,
    left_dominates_strictly,
    equal,
    crossing_detected,
    inconclusive
};

inline const char* dominance_outcome_name(DominanceOutcome o) {
    switch (o) {
        case DominanceOutcome::right_dominates_strictly: return "right_dominates_strictly";
        case DominanceOutcome::left_dominates_strictly: return "left_dominates_strictly";
        case DominanceOutcome::equal: return "equal";
        case DominanceOutcome::crossing_detected: return "crossing_detected";
        case DominanceOutcome::inconclusive: return "inconclusive";
    }
    return "?";
}

namespace detail {

// 2048-ish point grid over (0, extent), geometric near 0 and near the finite
// upper end where the y^{p-1} weight and pdf endpoints misbehave.
inline std::vector<double> dominance_grid(double extent, double scale, int n) {
    std::vector<double> ys;
    ys.reserve(n + 64);
    double cap = std::isfinite(extent) ? extent : scale;
    int half = n / 2;
    for (int i = 1; i <= half; ++i) // geometric from cap*1e-9 up to cap
        ys.push_back(cap * std::pow(10.0, -9.0 * (1.0 - double(i) / half)));
    for (int i = 1; i < n - half; ++i)
        ys.push_back(cap * double(i) / (n - half));
    if (std::isfinite(extent)) {
        for (int k = 2; k <= 9; ++k) // approach the finite end geometrically
            ys.push_back(extent * (1.0 - std::pow(10.0, -k)));
    } else {
        for (int k = 1; k <= 6; ++k) ys.push_back(scale * std::pow(2.0, k));
    }
    std::sort(ys.begin(), ys.end());
    ys.erase(std::unique(ys.begin(), ys.end()), ys.end());
    while (!ys.empty() && std::isfinite(extent) && ys.back() >= extent) ys.pop_back();
    return ys;
}

} // namespace detail

struct CdfDominanceResult {
    DominanceOutcome outcome = DominanceOutcome::inconclusive;
    double min_gap = 0.0; // min over grid of left_cdf - right_cdf
    double max_gap = 0.0;
};

// First-order dominance of the right tail density over the left via the
// pointwise CDF ordering. Right dominates iff left_cdf >= right_cdf
// everywhere (within -1e-9) with a strict gap > 1e-6 somewhere.
inline CdfDominanceResult cdf_dominance(const TailPair& tp, int grid_size = 2048) {
    if (grid_size < 64) throw InvalidParams("cdf_dominance: grid_size must be >= 64");
    double ext_l = tp.left_extent();
    double ext_r = tp.right_extent();
    // scan the union of both supports; when the right tail is infinite,
    // truncate where its remaining mass is below 1e-12
    double cap_r = ext_r;
    if (!std::isfinite(cap_r)) {
        double hi = std::max(1.0, ext_l);
        while (1.0 - tp.right_cdf(hi) > 1e-12 && hi < 1e300) hi *= 2.0;
        cap_r = hi;
    }
    double span = std::max(ext_l, cap_r);
    auto ys = detail::dominance_grid(std::isfinite(ext_l) ? std::max(ext_l, cap_r) : span,
                                     span, grid_size);
    if (std::isfinite(ext_l)) { // resolve the left cdf's final approach to 1
        for (int k = 2; k <= 9; ++k) ys.push_back(ext_l * (1.0 - std::pow(10.0, -k)));
        ys.push_back(ext_l);
        std::sort(ys.begin(), ys.end());
        ys.erase(std::unique(ys.begin(), ys.end()), ys.end());
    }
    auto cl = tp.cumulative(ys, detail::Side::left);
    auto cr = tp.cumulative(ys, detail::Side::right);
    CdfDominanceResult res;
    res.min_gap = kInf;
    res.max_gap = -kInf;
    for (size_t i = 0; i < ys.size(); ++i) {
        double gap = cl[i] - cr[i];
        res.min_gap = std::min(res.min_gap, gap);
        res.max_gap = std::max(res.max_gap, gap);
    }
    const double tol = 1e-9, strict = 1e-6;
    if (res.min_gap >= -tol && res.max_gap > strict)
        res.outcome = DominanceOutcome::right_dominates_strictly;
    else if (res.max_gap <= tol && res.min_gap < -strict)
        res.outcome = DominanceOutcome::left_dominates_strictly;
    else if (res.min_gap >= -tol && res.max_gap <= tol)
        res.outcome = DominanceOutcome::equal;
    else if (res.min_gap < -strict && res.max_gap > strict)
        res.outcome = DominanceOutcome::crossing_detected;
    else
        res.outcome = DominanceOutcome::inconclusive;
    return res;
}

enum class CrossingStatus {
    satisfied,           // single crossing with the lemma's side condition
    no_crossing,
    multiple_crossings,
    side_condition_failed
};

struct SingleCrossingResult {
    CrossingStatus status = CrossingStatus::no_crossing;
    std::optional<double> c;
};

// Scan r(x) = f(nu_p - x) - f(nu_p + x): satisfied when r > 0 on (0, c) and
// r < 0 beyond, with nu_p - L <= R - nu_p.
inline SingleCrossingResult single_crossing(const Distribution& dist, const PMeanPoint& pt,
                                            int grid_size = 2048) {
    double nu = pt.nu_p;
    double ext_l = nu - dist.support().left;
    double ext_r = dist.support().right - nu;
    double span = std::min(ext_l, ext_r);
    if (!std::isfinite(span)) span = std::max(ext_l, 1.0) * 8.0;

    auto r = [&](double x) { return dist.pdf(nu - x) - dist.pdf(nu + x); };

    SingleCrossingResult res;
    std::vector<int> signs;
    std::vector<double> xs;
    double fscale = dist.pdf(nu);
    const double noise = 1e-13 * std::max(fscale, 1e-300);
    bool all_zero = true;
    for (int i = 1; i < grid_size; ++i) {
        double x = span * double(i) / grid_size;
        double v = r(x);
        if (std::fabs(v) > noise) all_zero = false;
        xs.push_back(x);
        signs.push_back(v > noise ? 1 : (v < -noise ? -1 : 0));
    }
    if (all_zero) {
        res.status = CrossingStatus::no_crossing;
        return res;
    }
    // locate sign transitions ignoring zero plateaus
    int last = 0, changes = 0;
    double cross_lo = 0.0, cross_hi = 0.0;
    int first_sign = 0;
    double prev_x = 0.0;
    for (size_t i = 0; i < signs.size(); ++i) {
        int sg = signs[i];
        if (sg == 0) { continue; }
        if (first_sign == 0) first_sign = sg;
        if (last != 0 && sg != last) {
            ++changes;
            cross_lo = prev_x;
            cross_hi = xs[i];
        }
        last = sg;
        prev_x = xs[i];
    }
    if (changes == 0) {
        res.status = CrossingStatus::no_crossing;
        return res;
    }
    if (changes > 1 || first_sign != 1 || last != -1) {
        res.status = CrossingStatus::multiple_crossings;
        return res;
    }
    // bisect the unique crossing
    double lo = cross_lo, hi = cross_hi;
    for (int i = 0; i < 100; ++i) {
        double mid = 0.5 * (lo + hi);
        (r(mid) > 0.0 ? lo : hi) = mid;
    }
    res.c = 0.5 * (lo + hi);
    if (!(ext_l <= ext_r)) {
        res.status = CrossingStatus::side_condition_failed;
        return res;
    }
    res.status = CrossingStatus::satisfied;
    return res;
}

// Prop-2.4 criterion: pdf nonincreasing over the support with at least one
// strict decrease certifies dominance for every p in D.
inline bool decreasing_pdf(const Distribution& dist, int grid_size = 1024) {
    double lo = dist.support().left, hi = dist.support().right;
    if (lo == -kInf) lo = dist.quantile(1e-9);
    if (hi == kInf) hi = dist.quantile(1.0 - 1e-9);
    double prev = dist.pdf(lo + (hi - lo) * 0.5 / grid_size);
    bool strict = false;
    for (int i = 1; i < grid_size; ++i) {
        double x = lo + (hi - lo) * (i + 0.5) / grid_size;
        double cur = dist.pdf(x);
        if (cur > prev * (1.0 + 1e-12) + 1e-300) return false;
        if (cur < prev * (1.0 - 1e-12)) strict = true;
        prev = cur;
    }
    return strict;
}

// log f concave <=> log-pdf slope nonincreasing on an interior grid.
inline bool log_concavity(const Distribution& dist, int grid_size = 1024) {
    if (!dist.differentiable())
        throw NonDifferentiablePdf("log_concavity: pdf not differentiable");
    double lo = dist.support().left, hi = dist.support().right;
    if (lo == -kInf) lo = dist.quantile(1e-9);
    if (hi == kInf) hi = dist.quantile(1.0 - 1e-9);
    double prev = dist.log_pdf_slope(lo + (hi - lo) * 0.5 / grid_size);
    for (int i = 1; i < grid_size; ++i) {
        double x = lo + (hi - lo) * (i + 0.5) / grid_size;
        double cur = dist.log_pdf_slope(x);
        if (cur > prev + 1e-10 * (1.0 + std::fabs(prev))) return false;
        prev = cur;
    }
    return true;
}

// The ordered-expectations consequence of dominance: the gap
// int y^{p-1} log y f(nu_p+y) dy - int y^{p-1} log y f(nu_p-y) dy,
// normalized by H_p. Positive under right-tail dominance.
inline double expectation_log_gap(const Distribution& dist, const PMeanPoint& pt,
                                  const QuadOptions& opt = {}) {
    using detail::Side;
    LogValue gap =
        log_sub(detail::tail_power_integral(dist, pt.nu_p, Side::right, pt.p, true, opt),
                detail::tail_power_integral(dist, pt.nu_p, Side::left, pt.p, true, opt));
    if (gap.is_zero()) return 0.0;
    return gap.sign * std::exp(gap.log_abs - pt.log_h_p);
}

struct DominanceReport {
    double p = 0.0;
    DominanceOutcome verdict = DominanceOutcome::inconclusive;
    CdfDominanceResult cdf;
    SingleCrossingResult crossing;
    bool decreasing = false;
    bool log_concave = false;
    double expectation_gap = 0.0;
};

inline DominanceReport dominance_report(const Distribution& dist, const PMeanPoint& pt,
                                        int grid_size = 2048, const QuadOptions& opt = {}) {
    DominanceReport rep;
    rep.p = pt.p;
    TailPair tp = build_tail_pair(dist, pt, opt);
    rep.cdf = cdf_dominance(tp, grid_size);
    rep.verdict = rep.cdf.outcome;
    rep.crossing = single_crossing(dist, pt, grid_size);
    rep.decreasing = decreasing_pdf(dist);
    try {
        rep.log_concave = log_concavity(dist);
    } catch (const NonDifferentiablePdf&) {
        rep.log_concave = false;
    }
    rep.expectation_gap = expectation_log_gap(dist, pt, opt);
    return rep;
}

} // namespace frechet

#endif
