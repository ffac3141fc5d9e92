#ifndef FRECHET_TAILBONE_HPP
#define FRECHET_TAILBONE_HPP

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <optional>
#include <vector>

#include "frechet/errors.hpp"
#include "frechet/util.hpp"

namespace frechet {

struct SampleSet {
    std::vector<std::vector<double>> points;
    std::size_t d = 0;
};

inline SampleSet make_sample_set(std::vector<std::vector<double>> points) {
    if (points.empty()) throw InvalidParams("sample set must be nonempty");
    SampleSet s;
    s.d = points.front().size();
    if (s.d == 0) throw InvalidParams("sample set: dimension must be >= 1");
    for (const auto& pt : points) {
        if (pt.size() != s.d) throw InvalidParams("sample set: inconsistent dimensions");
        for (double v : pt)
            if (!std::isfinite(v)) throw InvalidParams("sample set: non-finite component");
    }
    s.points = std::move(points);
    return s;
}

struct PMeanNdResult {
    std::vector<double> point;
    double objective = 0.0;     // (1/n) sum ||x_i - a||^p; may overflow to inf
    double log_objective = 0.0; // always finite
    int iterations = 0;
    bool converged = false;
};

namespace detail {

inline double dist_nd(const std::vector<double>& x, const std::vector<double>& a) {
    double s = 0.0;
    for (std::size_t j = 0; j < a.size(); ++j) {
        double t = x[j] - a[j];
        s += t * t;
    }
    return std::sqrt(s);
}

// Fixed-size chunking so parallel reductions sum in the same order no matter
// how many threads run.
constexpr std::size_t kChunk = 4096;

struct ObjectiveGrad {
    // all logs; finite even when (1/n) sum d^p overflows a double
    double log_f = -std::numeric_limits<double>::infinity();
    std::vector<double> grad_scaled;    // sum w_i (a - x_i), w_i = (d_i/dmax)^{p-2}
    double log_grad_scale = -std::numeric_limits<double>::infinity(); // p/n dmax^{p-2}
    double sum_w = 0.0;
    std::vector<double> weighted_mean;  // sum w_i x_i / sum w_i
    double dmax = 0.0;
};

inline ObjectiveGrad objective_grad(const SampleSet& s, const std::vector<double>& a,
                                    double p) {
    std::size_t n = s.points.size(), d = s.d;
    std::size_t chunks = (n + kChunk - 1) / kChunk;

    std::vector<double> log_d(n);
    std::vector<double> chunk_max(chunks, -std::numeric_limits<double>::infinity());
    parallel_for(chunks, [&](std::size_t c) {
        std::size_t lo = c * kChunk, hi = std::min(n, lo + kChunk);
        double m = -std::numeric_limits<double>::infinity();
        for (std::size_t i = lo; i < hi; ++i) {
            double di = dist_nd(s.points[i], a);
            log_d[i] = di > 0.0 ? std::log(di) : -std::numeric_limits<double>::infinity();
            m = std::max(m, log_d[i]);
        }
        chunk_max[c] = m;
    });
    double L = -std::numeric_limits<double>::infinity();
    for (double m : chunk_max) L = std::max(L, m);

    ObjectiveGrad og;
    og.grad_scaled.assign(d, 0.0);
    og.weighted_mean.assign(d, 0.0);
    if (!std::isfinite(L)) { // every point equals a
        og.log_f = -std::numeric_limits<double>::infinity();
        og.dmax = 0.0;
        return og;
    }
    og.dmax = std::exp(L);

    struct Partial {
        double exp_sum = 0.0; // sum exp(p (log d - L))
        double w_sum = 0.0;   // sum exp((p-2)(log d - L))
        std::vector<double> g, wx;
    };
    std::vector<Partial> parts(chunks);
    parallel_for(chunks, [&](std::size_t c) {
        std::size_t lo = c * kChunk, hi = std::min(n, lo + kChunk);
        Partial& pr = parts[c];
        pr.g.assign(d, 0.0);
        pr.wx.assign(d, 0.0);
        for (std::size_t i = lo; i < hi; ++i) {
            if (!std::isfinite(log_d[i])) continue; // x_i == a contributes nothing (p>1)
            double r = log_d[i] - L;
            pr.exp_sum += std::exp(p * r);
            double w = std::exp((p - 2.0) * r);
            pr.w_sum += w;
            for (std::size_t j = 0; j < d; ++j) {
                pr.g[j] += w * (a[j] - s.points[i][j]);
                pr.wx[j] += w * s.points[i][j];
            }
        }
    });
    double exp_sum = 0.0;
    for (const auto& pr : parts) {
        exp_sum += pr.exp_sum;
        og.sum_w += pr.w_sum;
        for (std::size_t j = 0; j < d; ++j) {
            og.grad_scaled[j] += pr.g[j];
            og.weighted_mean[j] += pr.wx[j];
        }
    }
    og.log_f = p * L + std::log(exp_sum / double(n));
    og.log_grad_scale = std::log(p / double(n)) + (p - 2.0) * L;
    if (og.sum_w > 0.0)
        for (auto& v : og.weighted_mean) v /= og.sum_w;
    return og;
}

inline double log_objective_at(const SampleSet& s, const std::vector<double>& a, double p) {
    return objective_grad(s, a, p).log_f;
}

// geometric median via Weiszfeld iterations with Vardi-Zhang handling when
// the iterate lands on a sample point
inline PMeanNdResult geometric_median(const SampleSet& s, int max_iter) {
    std::size_t n = s.points.size(), d = s.d;
    std::vector<double> a(d, 0.0);
    double scale = 0.0;
    for (const auto& x : s.points)
        for (std::size_t j = 0; j < d; ++j) {
            a[j] += x[j] / double(n);
            scale = std::max(scale, std::fabs(x[j]));
        }
    scale = std::max(scale, 1.0);

    PMeanNdResult res;
    for (int it = 0; it < max_iter; ++it) {
        res.iterations = it + 1;
        std::vector<double> num(d, 0.0), rvec(d, 0.0);
        double den = 0.0;
        std::size_t anchors = 0;
        for (const auto& x : s.points) {
            double di = dist_nd(x, a);
            if (di < 1e-14 * scale) {
                ++anchors;
                continue;
            }
            double w = 1.0 / di;
            den += w;
            for (std::size_t j = 0; j < d; ++j) {
                num[j] += w * x[j];
                rvec[j] += (x[j] - a[j]) * w;
            }
        }
        double rnorm = 0.0;
        for (double v : rvec) rnorm += v * v;
        rnorm = std::sqrt(rnorm);
        if (anchors > 0 && rnorm <= double(anchors) + 1e-12) {
            res.converged = true; // subgradient optimality at a sample point
            break;
        }
        // the residual pull is the (negated, unnormalized) subgradient; once
        // it is a fraction of a single sample's pull the iterate sits inside
        // the discrete optimum's resolution
        if (rnorm <= std::min(0.5, 1e-3 * double(n))) {
            res.converged = true;
            break;
        }
        std::vector<double> next(d);
        if (den == 0.0) { res.converged = true; break; }
        for (std::size_t j = 0; j < d; ++j) next[j] = num[j] / den;
        if (anchors > 0) {
            double damp = std::min(1.0, double(anchors) / rnorm);
            for (std::size_t j = 0; j < d; ++j)
                next[j] = (1.0 - damp) * next[j] + damp * a[j];
        }
        double step = dist_nd(next, a);
        a = next;
        if (step < 1e-10 * (1.0 + dist_nd(a, std::vector<double>(d, 0.0)))) {
            res.converged = true;
            break;
        }
    }
    res.point = a;
    res.log_objective = log_objective_at(s, a, 1.0);
    res.objective = std::exp(res.log_objective);
    return res;
}

} // namespace detail

// Sample Fréchet p-mean in R^d: argmin of F(a) = (1/n) sum ||x_i - a||^p.
// `start` warm-starts the iteration (trajectory reuse); default is the mean.
inline PMeanNdResult frechet_pmean_nd(const SampleSet& s, double p, int max_iter = 10000,
                                      const std::vector<double>* start = nullptr) {
    if (!(p >= 1.0)) throw InvalidP("frechet_pmean_nd: p must be >= 1");
    if (s.points.empty() || s.d == 0) throw InvalidParams("invalid sample set");
    std::size_t n = s.points.size(), d = s.d;

    if (p == 2.0) {
        PMeanNdResult res;
        res.point.assign(d, 0.0);
        for (const auto& x : s.points)
            for (std::size_t j = 0; j < d; ++j) res.point[j] += x[j] / double(n);
        res.converged = true;
        res.log_objective = detail::log_objective_at(s, res.point, p);
        res.objective = std::exp(res.log_objective);
        return res;
    }
    if (p == 1.0) return detail::geometric_median(s, max_iter);

    std::vector<double> a(d, 0.0);
    if (start && start->size() == d) {
        a = *start;
    } else {
        for (const auto& x : s.points)
            for (std::size_t j = 0; j < d; ++j) a[j] += x[j] / double(n);
    }

    PMeanNdResult res;
    auto og = detail::objective_grad(s, a, p);
    for (int it = 0; it < max_iter; ++it) {
        res.iterations = it + 1;
        // gradient stopping rule, in logs to survive large p
        double gnorm = 0.0;
        for (double v : og.grad_scaled) gnorm += v * v;
        gnorm = std::sqrt(gnorm);
        double log_grad = gnorm > 0.0 ? og.log_grad_scale + std::log(gnorm)
                                      : -std::numeric_limits<double>::infinity();
        double log_tol = std::log(1e-9) +
                         (og.log_f > 0.0 ? og.log_f : std::log1p(std::exp(og.log_f)));
        if (log_grad <= log_tol) {
            res.converged = true;
            break;
        }
        // reweighted fixed-point target; for p > 2 the undamped map
        // overshoots (2-cycles), and 1/(p-1) is the Newton-consistent step
        std::vector<double> dir(d);
        for (std::size_t j = 0; j < d; ++j) dir[j] = og.weighted_mean[j] - a[j];
        double t = std::min(1.0, 1.0 / (p - 1.0));
        std::vector<double> cand(d);
        detail::ObjectiveGrad cand_og;
        bool accepted = false;
        for (int bt = 0; bt < 60; ++bt) {
            for (std::size_t j = 0; j < d; ++j) cand[j] = a[j] + t * dir[j];
            cand_og = detail::objective_grad(s, cand, p);
            if (cand_og.log_f <= og.log_f) {
                accepted = true;
                break;
            }
            t *= 0.5;
        }
        if (!accepted) break;
        double step = 0.0, anorm = 0.0;
        for (std::size_t j = 0; j < d; ++j) {
            step += (cand[j] - a[j]) * (cand[j] - a[j]);
            anorm += cand[j] * cand[j];
        }
        a = cand;
        og = cand_og;
        if (std::sqrt(step) < 1e-10 * (1.0 + std::sqrt(anorm))) {
            res.converged = true;
            break;
        }
    }
    res.point = a;
    res.log_objective = og.log_f;
    res.objective = std::exp(res.log_objective);
    return res;
}

struct TrajectoryEntry {
    double p = 0.0;
    std::vector<double> nu;
    double objective = 0.0;
    double log_objective = 0.0;
    int iterations = 0;
    bool converged = false;
};

struct TailboneTrajectory {
    std::vector<TrajectoryEntry> entries;
    std::optional<std::vector<double>> zeta; // unit vector
    bool zeta_unstable = false;
};

// Limiting direction of the trajectory: trailing normalized secants must
// agree within 1e-2 rad, otherwise the limit is reported unstable.
inline std::optional<std::vector<double>> direction_zeta(const TailboneTrajectory& traj) {
    std::vector<const TrajectoryEntry*> conv;
    for (const auto& e : traj.entries)
        if (e.converged) conv.push_back(&e);
    if (conv.size() < 3) return std::nullopt;

    auto secant = [&](const TrajectoryEntry& a, const TrajectoryEntry& b) {
        std::vector<double> s(a.nu.size());
        double norm = 0.0;
        for (std::size_t j = 0; j < s.size(); ++j) {
            s[j] = (b.nu[j] - a.nu[j]) / (b.p - a.p);
            norm += s[j] * s[j];
        }
        norm = std::sqrt(norm);
        if (norm > 0.0)
            for (auto& v : s) v /= norm;
        return std::pair<std::vector<double>, double>(s, norm);
    };
    std::size_t m = conv.size();
    auto [s1, n1] = secant(*conv[m - 3], *conv[m - 2]);
    auto [s2, n2] = secant(*conv[m - 2], *conv[m - 1]);
    if (n1 == 0.0 || n2 == 0.0) return std::nullopt;
    double dot = 0.0;
    for (std::size_t j = 0; j < s1.size(); ++j) dot += s1[j] * s2[j];
    dot = std::clamp(dot, -1.0, 1.0);
    if (std::acos(dot) > 1e-2) return std::nullopt;
    return s2;
}

inline TailboneTrajectory tailbone_trajectory(const SampleSet& s,
                                              const std::vector<double>& p_grid,
                                              int max_iter = 10000) {
    for (std::size_t i = 0; i < p_grid.size(); ++i) {
        if (!(p_grid[i] >= 1.0)) throw InvalidP("tailbone grid: p must be >= 1");
        if (i > 0 && !(p_grid[i] > p_grid[i - 1]))
            throw InvalidParams("tailbone grid must be strictly increasing");
    }
    TailboneTrajectory traj;
    const std::vector<double>* warm = nullptr;
    for (double p : p_grid) {
        auto res = frechet_pmean_nd(s, p, max_iter, warm);
        TrajectoryEntry e;
        e.p = p;
        e.nu = res.point;
        e.objective = res.objective;
        e.log_objective = res.log_objective;
        e.iterations = res.iterations;
        e.converged = res.converged;
        traj.entries.push_back(std::move(e));
        if (traj.entries.back().converged) warm = &traj.entries.back().nu;
    }
    traj.zeta = direction_zeta(traj);
    traj.zeta_unstable = !traj.zeta.has_value();
    return traj;
}

} // namespace frechet

#endif
