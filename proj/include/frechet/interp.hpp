#ifndef FRECHET_INTERP_HPP
#define FRECHET_INTERP_HPP

#include <algorithm>
#include <cmath>
#include <vector>

#include "frechet/errors.hpp"

namespace frechet {

// Monotone cubic Hermite interpolant (Fritsch-Carlson slopes). Piecewise
// cubics allow exact evaluation of values, derivatives and antiderivatives.
class PchipInterpolant {
public:
    PchipInterpolant() = default;

    PchipInterpolant(std::vector<double> x, std::vector<double> y)
        : x_(std::move(x)), y_(std::move(y)) {
        const size_t n = x_.size();
        if (n < 2 || y_.size() != n)
            throw InvalidParams("pchip: need at least two (x, y) pairs of equal length");
        for (size_t i = 1; i < n; ++i)
            if (!(x_[i] > x_[i - 1]))
                throw InvalidParams("pchip: x grid must be strictly increasing");

        std::vector<double> d(n - 1);
        for (size_t i = 0; i + 1 < n; ++i)
            d[i] = (y_[i + 1] - y_[i]) / (x_[i + 1] - x_[i]);

        m_.assign(n, 0.0);
        m_[0] = d[0];
        m_[n - 1] = d[n - 2];
        for (size_t i = 1; i + 1 < n; ++i) {
            if (d[i - 1] * d[i] <= 0.0) {
                m_[i] = 0.0;
            } else {
                double h0 = x_[i] - x_[i - 1], h1 = x_[i + 1] - x_[i];
                double w1 = 2.0 * h1 + h0, w2 = h1 + 2.0 * h0;
                m_[i] = (w1 + w2) / (w1 / d[i - 1] + w2 / d[i]);
            }
        }
        // clamp endpoint slopes (Fritsch-Carlson boundary treatment)
        for (size_t e : {size_t{0}, n - 1}) {
            size_t seg = e == 0 ? 0 : n - 2;
            if (d[seg] == 0.0)
                m_[e] = 0.0;
            else if (m_[e] / d[seg] < 0.0)
                m_[e] = 0.0;
            else if (std::fabs(m_[e]) > 3.0 * std::fabs(d[seg]))
                m_[e] = 3.0 * d[seg];
        }

        // cumulative integrals at the knots
        cum_.assign(n, 0.0);
        for (size_t i = 0; i + 1 < n; ++i)
            cum_[i + 1] = cum_[i] + segment_integral(i, x_[i + 1]);
    }

    double x_min() const { return x_.front(); }
    double x_max() const { return x_.back(); }

    double operator()(double x) const {
        if (x <= x_.front()) return x == x_.front() ? y_.front() : 0.0;
        if (x >= x_.back()) return x == x_.back() ? y_.back() : 0.0;
        size_t i = segment(x);
        double h = x_[i + 1] - x_[i], t = (x - x_[i]) / h;
        double h00 = (1 + 2 * t) * (1 - t) * (1 - t);
        double h10 = t * (1 - t) * (1 - t);
        double h01 = t * t * (3 - 2 * t);
        double h11 = t * t * (t - 1);
        return h00 * y_[i] + h10 * h * m_[i] + h01 * y_[i + 1] + h11 * h * m_[i + 1];
    }

    double derivative(double x) const {
        if (x < x_.front() || x > x_.back()) return 0.0;
        size_t i = segment(x);
        double h = x_[i + 1] - x_[i], t = (x - x_[i]) / h;
        double d00 = 6 * t * (t - 1) / h;
        double d10 = (3 * t - 1) * (t - 1);
        double d01 = -d00;
        double d11 = t * (3 * t - 2);
        return d00 * y_[i] + d10 * m_[i] + d01 * y_[i + 1] + d11 * m_[i + 1];
    }

    // integral from x_min to x (clamped to the grid)
    double integral_to(double x) const {
        if (x <= x_.front()) return 0.0;
        if (x >= x_.back()) return cum_.back();
        size_t i = segment(x);
        return cum_[i] + segment_integral(i, x);
    }

    double total_integral() const { return cum_.back(); }

    void scale_values(double c) {
        for (double& v : y_) v *= c;
        for (double& v : m_) v *= c;
        for (double& v : cum_) v *= c;
    }

    const std::vector<double>& knots_x() const { return x_; }
    const std::vector<double>& knots_y() const { return y_; }

private:
    size_t segment(double x) const {
        auto it = std::upper_bound(x_.begin(), x_.end(), x);
        size_t i = static_cast<size_t>(it - x_.begin());
        if (i == 0) return 0;
        if (i >= x_.size()) return x_.size() - 2;
        return i - 1;
    }

    // integral of the cubic on segment i from x_[i] to xq (xq within segment)
    double segment_integral(size_t i, double xq) const {
        double h = x_[i + 1] - x_[i], t = (xq - x_[i]) / h;
        double t2 = t * t, t3 = t2 * t, t4 = t3 * t;
        double H00 = t - t3 + 0.5 * t4;            // integral of h00
        double H10 = 0.5 * t2 - (2.0 / 3.0) * t3 + 0.25 * t4;
        double H01 = t3 - 0.5 * t4;
        double H11 = 0.25 * t4 - t3 / 3.0;
        return h * (H00 * y_[i] + H10 * h * m_[i] + H01 * y_[i + 1] + H11 * h * m_[i + 1]);
    }

    std::vector<double> x_, y_, m_;
    std::vector<double> cum_;
};

} // namespace frechet

#endif
