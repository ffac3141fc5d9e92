#ifndef FRECHET_DISTRIBUTIONS_HPP
#define FRECHET_DISTRIBUTIONS_HPP

#include <cmath>
#include <limits>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "frechet/errors.hpp"
#include "frechet/interp.hpp"
#include "frechet/quadrature.hpp"
#include "frechet/special.hpp"

namespace frechet {

inline constexpr double kInf = std::numeric_limits<double>::infinity();

enum class Family { exponential, gamma, beta, lognormal, pareto, normal, custom };

inline const char* family_name(Family f) {
    switch (f) {
        case Family::exponential: return "exponential";
        case Family::gamma: return "gamma";
        case Family::beta: return "beta";
        case Family::lognormal: return "lognormal";
        case Family::pareto: return "pareto";
        case Family::normal: return "normal";
        case Family::custom: return "custom";
    }
    return "?";
}

inline Family family_from_name(const std::string& s) {
    if (s == "exponential") return Family::exponential;
    if (s == "gamma") return Family::gamma;
    if (s == "beta") return Family::beta;
    if (s == "lognormal") return Family::lognormal;
    if (s == "pareto") return Family::pareto;
    if (s == "normal") return Family::normal;
    if (s == "custom") return Family::custom;
    throw InvalidParams("unknown family: " + s);
}

// Open support interval; endpoints may be infinite.
struct Support {
    double left = -kInf;
    double right = kInf;
};

struct CustomGrid {
    std::vector<double> x;
    std::vector<double> f;
};

struct DistributionSpec {
    Family family = Family::exponential;
    std::map<std::string, double> params;
    std::optional<CustomGrid> grid;
};

// Immutable continuous univariate distribution. All evaluators are pure
// and safe to call concurrently.
class Distribution {
public:
    explicit Distribution(DistributionSpec spec) : spec_(std::move(spec)) {
        switch (spec_.family) {
            case Family::exponential:
                lambda_ = param("lambda");
                if (!(lambda_ > 0.0)) throw InvalidParams("exponential: lambda must be > 0");
                support_ = {0.0, kInf};
                break;
            case Family::gamma:
                alpha_ = param("alpha");
                lambda_ = param("lambda");
                if (!(alpha_ > 0.0) || !(lambda_ > 0.0))
                    throw InvalidParams("gamma: alpha and lambda must be > 0");
                support_ = {0.0, kInf};
                break;
            case Family::beta:
                alpha_ = param("alpha");
                beta_ = param("beta");
                if (!(alpha_ > 0.0) || !(beta_ > 0.0))
                    throw InvalidParams("beta: alpha and beta must be > 0");
                support_ = {0.0, 1.0};
                break;
            case Family::lognormal:
                mu_ = param("mu");
                sigma2_ = param("sigma2");
                if (!(sigma2_ > 0.0)) throw InvalidParams("lognormal: sigma2 must be > 0");
                support_ = {0.0, kInf};
                break;
            case Family::pareto:
                alpha_ = param("alpha");
                if (!(alpha_ > 0.0)) throw InvalidParams("pareto: alpha must be > 0");
                support_ = {1.0, kInf};
                break;
            case Family::normal:
                mu_ = param("mu");
                sigma2_ = param("sigma2");
                if (!(sigma2_ > 0.0)) throw InvalidParams("normal: sigma2 must be > 0");
                support_ = {-kInf, kInf};
                break;
            case Family::custom: {
                if (!spec_.grid) throw InvalidParams("custom: grid required");
                const auto& g = *spec_.grid;
                for (double v : g.f)
                    if (v < 0.0 || !std::isfinite(v))
                        throw InvalidParams("custom: pdf values must be finite and nonnegative");
                interp_ = PchipInterpolant(g.x, g.f);
                double total = interp_.total_integral();
                if (std::fabs(total - 1.0) > 1e-3)
                    throw UnnormalizedCustomPdf(
                        "custom: tabulated pdf integrates to " + std::to_string(total));
                if (total != 1.0) interp_.scale_values(1.0 / total);
                support_ = {interp_.x_min(), interp_.x_max()};
                break;
            }
        }
    }

    const DistributionSpec& spec() const { return spec_; }
    Family family() const { return spec_.family; }
    const Support& support() const { return support_; }
    double param(const std::string& name) const {
        auto it = spec_.params.find(name);
        if (it == spec_.params.end())
            throw InvalidParams(std::string(family_name(spec_.family)) +
                                ": missing parameter '" + name + "'");
        return it->second;
    }

    double pdf(double x) const {
        if (x <= support_.left || x >= support_.right) return 0.0;
        switch (spec_.family) {
            case Family::exponential:
                return lambda_ * std::exp(-lambda_ * x);
            case Family::gamma:
                return std::exp(log_pdf(x));
            case Family::beta:
                return std::exp(log_pdf(x));
            case Family::lognormal:
                return std::exp(log_pdf(x));
            case Family::pareto:
                return alpha_ * std::pow(x, -alpha_ - 1.0);
            case Family::normal:
                return std::exp(-0.5 * (x - mu_) * (x - mu_) / sigma2_) /
                       std::sqrt(2.0 * M_PI * sigma2_);
            case Family::custom:
                return std::max(0.0, interp_(x));
        }
        return 0.0;
    }

    // log f(x); -inf outside the support.
    double log_pdf(double x) const {
        if (x <= support_.left || x >= support_.right) return -kInf;
        switch (spec_.family) {
            case Family::exponential:
                return std::log(lambda_) - lambda_ * x;
            case Family::gamma:
                return alpha_ * std::log(lambda_) + (alpha_ - 1.0) * std::log(x) -
                       lambda_ * x - std::lgamma(alpha_);
            case Family::beta:
                return (alpha_ - 1.0) * std::log(x) + (beta_ - 1.0) * std::log1p(-x) -
                       (std::lgamma(alpha_) + std::lgamma(beta_) - std::lgamma(alpha_ + beta_));
            case Family::lognormal: {
                double z = std::log(x) - mu_;
                return -std::log(x) - 0.5 * std::log(2.0 * M_PI * sigma2_) -
                       0.5 * z * z / sigma2_;
            }
            case Family::pareto:
                return std::log(alpha_) - (alpha_ + 1.0) * std::log(x);
            case Family::normal:
                return -0.5 * (x - mu_) * (x - mu_) / sigma2_ -
                       0.5 * std::log(2.0 * M_PI * sigma2_);
            case Family::custom: {
                double v = interp_(x);
                return v > 0.0 ? std::log(v) : -kInf;
            }
        }
        return -kInf;
    }

    double cdf(double x) const {
        if (x <= support_.left) return 0.0;
        if (x >= support_.right) return 1.0;
        switch (spec_.family) {
            case Family::exponential:
                return -std::expm1(-lambda_ * x);
            case Family::gamma:
                return gamma_p(alpha_, lambda_ * x);
            case Family::beta:
                return beta_inc(alpha_, beta_, x);
            case Family::lognormal:
                return normal_cdf((std::log(x) - mu_) / std::sqrt(sigma2_));
            case Family::pareto:
                return 1.0 - std::pow(x, -alpha_);
            case Family::normal:
                return normal_cdf((x - mu_) / std::sqrt(sigma2_));
            case Family::custom:
                return interp_.integral_to(x);
        }
        return 0.0;
    }

    // d/dx log f(x) at interior points.
    double log_pdf_slope(double x) const {
        switch (spec_.family) {
            case Family::exponential:
                return -lambda_;
            case Family::gamma:
                return (alpha_ - 1.0) / x - lambda_;
            case Family::beta:
                return (alpha_ - 1.0) / x - (beta_ - 1.0) / (1.0 - x);
            case Family::lognormal:
                return (-1.0 - (std::log(x) - mu_) / sigma2_) / x;
            case Family::pareto:
                return -(alpha_ + 1.0) / x;
            case Family::normal:
                return -(x - mu_) / sigma2_;
            case Family::custom: {
                double v = interp_(x);
                if (v <= 0.0) throw NonDifferentiablePdf("custom: log-slope where pdf is 0");
                return interp_.derivative(x) / v;
            }
        }
        return 0.0;
    }

    // f'(x) at interior points; 0 outside.
    double pdf_derivative(double x) const {
        if (x <= support_.left || x >= support_.right) return 0.0;
        if (spec_.family == Family::custom) return interp_.derivative(x);
        return log_pdf_slope(x) * pdf(x);
    }

    bool differentiable() const { return true; } // pchip is C^1, families smooth

    // Whether E|X|^q < infinity.
    bool moment_exists(double q) const {
        if (q < 0.0) throw InvalidParams("moment_exists: q must be >= 0");
        switch (spec_.family) {
            case Family::pareto:
                return q < alpha_;
            case Family::custom:
                return q < custom_tail_moment_sup();
            default:
                return true;
        }
    }

    // Largest q* such that E|X|^q < inf for q < q*; +inf when all moments exist.
    double moment_sup() const {
        switch (spec_.family) {
            case Family::pareto:
                return alpha_;
            case Family::custom:
                return custom_tail_moment_sup();
            default:
                return kInf;
        }
    }

    double quantile(double q) const {
        if (!(q >= 0.0 && q <= 1.0)) throw InvalidParams("quantile: q outside [0,1]");
        if (q == 0.0) return support_.left;
        if (q == 1.0) return support_.right;
        switch (spec_.family) {
            case Family::exponential:
                return -std::log1p(-q) / lambda_;
            case Family::pareto:
                return std::pow(1.0 - q, -1.0 / alpha_);
            case Family::lognormal:
                return std::exp(mu_ + std::sqrt(sigma2_) * normal_quantile(q));
            case Family::normal:
                return mu_ + std::sqrt(sigma2_) * normal_quantile(q);
            default:
                return quantile_by_bisection(q);
        }
    }

    const PchipInterpolant& interpolant() const { return interp_; }

private:
    double quantile_by_bisection(double q) const {
        double lo = support_.left, hi = support_.right;
        if (lo == -kInf) {
            lo = -1.0;
            while (cdf(lo) > q) lo *= 2.0;
        }
        if (hi == kInf) {
            hi = std::max(1.0, lo + 1.0);
            while (cdf(hi) < q) hi *= 2.0;
        }
        for (int i = 0; i < 200; ++i) {
            double mid = 0.5 * (lo + hi);
            if (mid <= lo || mid >= hi) break;
            (cdf(mid) < q ? lo : hi) = mid;
            if (hi - lo < 1e-13 * (1.0 + std::fabs(lo) + std::fabs(hi))) break;
        }
        return 0.5 * (lo + hi);
    }

    // Tail exponent probe over the last decade of the grid: fit
    // log f ~ s log x; f ~ x^{-(q*+1)} gives q* = -s - 1.
    double custom_tail_moment_sup() const {
        const auto& xs = interp_.knots_x();
        const auto& ys = interp_.knots_y();
        double xr = xs.back();
        if (xr <= 0.0) return kInf; // bounded nonpositive support
        double x_lo = xr / 10.0;
        double sx = 0, sy = 0, sxx = 0, sxy = 0;
        int n = 0;
        for (size_t i = 0; i < xs.size(); ++i) {
            if (xs[i] >= x_lo && ys[i] > 0.0) {
                double lx = std::log(xs[i]), ly = std::log(ys[i]);
                sx += lx; sy += ly; sxx += lx * lx; sxy += lx * ly;
                ++n;
            }
        }
        if (n < 3) return kInf;
        double denom = n * sxx - sx * sx;
        if (denom <= 0.0) return kInf;
        double slope = (n * sxy - sx * sy) / denom;
        double qstar = -slope - 1.0;
        if (qstar > 100.0) return kInf;
        return std::max(qstar, 0.0);
    }

    DistributionSpec spec_;
    Support support_;
    double alpha_ = 0, beta_ = 0, lambda_ = 0, mu_ = 0, sigma2_ = 0;
    PchipInterpolant interp_;
};

inline Distribution make_distribution(DistributionSpec spec) {
    return Distribution(std::move(spec));
}

// Closed-form nu_p where the family admits one.
inline std::optional<double> closed_form_pmean(const Distribution& dist, double p) {
    if (!(p > 0.0)) throw InvalidParams("closed_form_pmean: p must be > 0");
    switch (dist.family()) {
        case Family::lognormal:
            return std::exp(dist.param("mu") + 0.5 * (p - 1.0) * dist.param("sigma2"));
        case Family::normal:
            return dist.param("mu"); // symmetry
        default:
            return std::nullopt;
    }
}

namespace detail {

// 1024-point unimodality scan; evaluation window for unbounded supports is
// clipped to the central quantile range.
inline bool unimodal_on_grid(const Distribution& dist, double* argmax_out = nullptr) {
    const int n = 1024;
    double lo = dist.support().left, hi = dist.support().right;
    if (lo == -kInf) lo = dist.quantile(1e-9);
    if (hi == kInf) hi = dist.quantile(1.0 - 1e-9);
    double best = -1.0, bestx = lo;
    std::vector<double> vals(n);
    std::vector<double> xs(n);
    for (int i = 0; i < n; ++i) {
        double x = lo + (hi - lo) * (i + 0.5) / n;
        xs[i] = x;
        vals[i] = dist.pdf(x);
        if (vals[i] > best) { best = vals[i]; bestx = x; }
    }
    int maxima = 0;
    const double tol = 1e-12 * best;
    for (int i = 0; i < n; ++i) {
        double l = i > 0 ? vals[i - 1] : -kInf;
        double r = i + 1 < n ? vals[i + 1] : -kInf;
        if (vals[i] > l + tol && vals[i] > r + tol) ++maxima;
    }
    if (argmax_out) *argmax_out = bestx;
    return maxima <= 1;
}

} // namespace detail

// Mode nu_0; none when the density is detected non-unimodal.
inline std::optional<double> mode(const Distribution& dist) {
    switch (dist.family()) {
        case Family::exponential:
            return 0.0;
        case Family::gamma: {
            double a = dist.param("alpha"), l = dist.param("lambda");
            return a > 1.0 ? (a - 1.0) / l : 0.0;
        }
        case Family::beta: {
            double a = dist.param("alpha"), b = dist.param("beta");
            if (a > 1.0 && b > 1.0) return (a - 1.0) / (a + b - 2.0);
            if (a <= 1.0 && b > 1.0) return 0.0;
            if (a > 1.0 && b <= 1.0) return 1.0;
            return std::nullopt; // bathtub shapes are not unimodal
        }
        case Family::lognormal:
            return std::exp(dist.param("mu") - dist.param("sigma2"));
        case Family::pareto:
            return 1.0;
        case Family::normal:
            return dist.param("mu");
        case Family::custom: {
            double argmax = 0.0;
            if (!detail::unimodal_on_grid(dist, &argmax)) return std::nullopt;
            return argmax;
        }
    }
    return std::nullopt;
}

// Domain D = {p >= 1 : E|X|^{p-1} < inf} as [1, sup).
struct PDomain {
    double sup = kInf; // exclusive upper end; [1, sup)
    bool contains(double p) const { return p >= 1.0 && p < sup; }
};

inline PDomain moment_domain(const Distribution& dist) {
    PDomain d;
    double q = dist.moment_sup();
    d.sup = q == kInf ? kInf : q + 1.0;
    return d;
}

} // namespace frechet

#endif
