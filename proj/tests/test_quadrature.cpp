#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "frechet/quadrature.hpp"
#include "frechet/special.hpp"

using namespace frechet;

TEST_CASE("finite interval polynomials are exact") {
    auto f = [](double x) { return 3.0 * x * x; };
    CHECK(integrate_finite(f, 0.0, 2.0) == Catch::Approx(8.0).epsilon(1e-13));
    auto g = [](double x) { return std::sin(x); };
    CHECK(integrate_finite(g, 0.0, M_PI) == Catch::Approx(2.0).epsilon(1e-12));
}

TEST_CASE("endpoint power singularity") {
    // int_0^1 x^{-1/2} dx = 2
    auto f = [](double x) { return 1.0 / std::sqrt(x); };
    QuadOptions opt;
    opt.rel_tol = 1e-10;
    CHECK(integrate_finite(f, 0.0, 1.0, opt) == Catch::Approx(2.0).epsilon(1e-8));
}

TEST_CASE("log singularity") {
    // int_0^1 log x dx = -1
    auto f = [](double x) { return std::log(x); };
    CHECK(integrate_finite(f, 0.0, 1.0) == Catch::Approx(-1.0).epsilon(1e-9));
}

TEST_CASE("semi-infinite gaussian tail") {
    auto f = [](double x) { return std::exp(-0.5 * x * x) / std::sqrt(2.0 * M_PI); };
    CHECK(integrate(f, 0.0, std::numeric_limits<double>::infinity()) == Catch::Approx(0.5).epsilon(1e-10));
}

TEST_CASE("doubly infinite gaussian") {
    auto f = [](double x) { return std::exp(-0.5 * x * x) / std::sqrt(2.0 * M_PI); };
    CHECK(integrate(f, -std::numeric_limits<double>::infinity(), std::numeric_limits<double>::infinity()) == Catch::Approx(1.0).epsilon(1e-10));
}

TEST_CASE("log-domain integral matches gamma function") {
    // int_0^inf y^{p-1} e^{-y} dy = Gamma(p), integrand exp(p v - e^v) in v
    for (double p : {0.3, 1.0, 2.5, 8.0, 40.0}) {
        auto g = [p](double v) { return p * v - std::exp(v); };
        LogValue lv = log_domain_integral(g, -std::numeric_limits<double>::infinity(),
                                          std::numeric_limits<double>::infinity());
        REQUIRE(lv.sign == 1);
        CHECK(lv.log_abs == Catch::Approx(std::lgamma(p)).margin(1e-8));
    }
}

TEST_CASE("log-domain integral survives huge magnitudes") {
    // Gamma(300) overflows double but its log is representable
    double p = 300.0;
    auto g = [p](double v) { return p * v - std::exp(v); };
    LogValue lv = log_domain_integral(g, -std::numeric_limits<double>::infinity(),
                                      std::numeric_limits<double>::infinity());
    CHECK(lv.log_abs == Catch::Approx(std::lgamma(300.0)).epsilon(1e-10));
}

TEST_CASE("log-weighted log-domain integral") {
    // int_0^inf log(y) e^{-y} dy = -euler_gamma
    auto g = [](double v) { return v - std::exp(v); };
    LogValue lv = log_domain_integral(g, -std::numeric_limits<double>::infinity(),
                                      std::numeric_limits<double>::infinity(), true);
    const double euler = 0.57721566490153286;
    CHECK(lv.value() == Catch::Approx(-euler).epsilon(1e-9));
}

TEST_CASE("log-domain divergence is detected") {
    auto g = [](double v) { return 0.5 * v; }; // integrand e^{v/2}, diverges
    CHECK_THROWS_AS(log_domain_integral(g, -std::numeric_limits<double>::infinity(),
                                        std::numeric_limits<double>::infinity()),
                    DivergentIntegral);
}

TEST_CASE("special functions sanity") {
    CHECK(normal_cdf(0.0) == Catch::Approx(0.5));
    CHECK(normal_quantile(normal_cdf(1.2345)) == Catch::Approx(1.2345).epsilon(1e-12));
    // gamma_p(1, x) = 1 - e^{-x}
    CHECK(gamma_p(1.0, 0.7) == Catch::Approx(1.0 - std::exp(-0.7)).epsilon(1e-12));
    // I_x(1,1) = x
    CHECK(beta_inc(1.0, 1.0, 0.3) == Catch::Approx(0.3).epsilon(1e-12));
    // symmetric beta: I_{1/2}(a,a) = 1/2
    CHECK(beta_inc(3.5, 3.5, 0.5) == Catch::Approx(0.5).epsilon(1e-12));
}
