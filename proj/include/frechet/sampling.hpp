#ifndef FRECHET_SAMPLING_HPP
#define FRECHET_SAMPLING_HPP

#include <cstdint>
#include <random>
#include <vector>

#include "frechet/distributions.hpp"

namespace frechet {

// Deterministic inverse-CDF sampler. Every family goes through
// Distribution::quantile on a single mt19937_64 stream, so a (spec, seed, n)
// triple always yields the same draws regardless of platform or thread count.
class Sampler {
public:
    explicit Sampler(std::uint64_t seed) : eng_(seed) {}

    double uniform() {
        // 53-bit mantissa in (0, 1); never returns an exact endpoint
        double u = double(eng_() >> 11) * 0x1.0p-53;
        return u > 0.0 ? u : 0x1.0p-53;
    }

    double draw(const Distribution& dist) { return dist.quantile(uniform()); }

    std::vector<double> draw_many(const Distribution& dist, std::size_t n) {
        std::vector<double> out(n);
        for (auto& v : out) v = draw(dist);
        return out;
    }

    std::mt19937_64& engine() { return eng_; }

private:
    std::mt19937_64 eng_;
};

} // namespace frechet

#endif
