#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "frechet/skewness.hpp"

using namespace frechet;

namespace {

Distribution make(const char* family, std::map<std::string, double> params) {
    DistributionSpec spec;
    spec.family = family_from_name(family);
    spec.params = std::move(params);
    return Distribution(spec);
}

Distribution mirrored_gamma21() {
    CustomGrid g;
    int n = 4000;
    for (int i = 0; i <= n; ++i) {
        double x = -40.0 + 40.0 * double(i) / n;
        g.x.push_back(x);
        g.f.push_back(-x * std::exp(x));
    }
    DistributionSpec spec;
    spec.family = Family::custom;
    spec.grid = g;
    return Distribution(spec);
}

std::vector<double> linspace(double a, double b, int n) {
    std::vector<double> v;
    for (int i = 0; i < n; ++i) v.push_back(a + (b - a) * i / (n - 1));
    return v;
}

} // namespace

TEST_CASE("pearson coefficients of the unit exponential") {
    auto pc = pearson_coefficients(make("exponential", {{"lambda", 1.0}}));
    REQUIRE(pc.nu0.has_value());
    CHECK(*pc.nu0 == 0.0);
    CHECK(pc.nu1 == Catch::Approx(std::log(2.0)).epsilon(1e-9));
    REQUIRE(pc.nu2.has_value());
    CHECK(*pc.nu2 == Catch::Approx(1.0).epsilon(1e-8));
    REQUIRE(pc.sigma.has_value());
    CHECK(*pc.sigma == Catch::Approx(1.0).epsilon(1e-8));
    CHECK(*pc.mode_skewness == Catch::Approx(1.0).epsilon(1e-8));
    CHECK(*pc.median_skewness == Catch::Approx(3.0 * (1.0 - std::log(2.0))).epsilon(1e-8));
    CHECK(*pc.moment_skewness == Catch::Approx(2.0).epsilon(1e-7));
    CHECK(pc.missing.empty());
}

TEST_CASE("pearson coefficients: lognormal gamma formula") {
    auto pc = pearson_coefficients(make("lognormal", {{"mu", 0.0}, {"sigma2", 1.0}}));
    double e = std::exp(1.0);
    REQUIRE(pc.moment_skewness.has_value());
    CHECK(*pc.moment_skewness == Catch::Approx((e + 2.0) * std::sqrt(e - 1.0)).epsilon(1e-6));
    CHECK(*pc.sigma == Catch::Approx(std::sqrt((e - 1.0) * e)).epsilon(1e-8));
    CHECK(*pc.nu2 == Catch::Approx(std::sqrt(e)).epsilon(1e-8));
}

TEST_CASE("pearson coefficients drop what the tails cannot pay for") {
    auto p3 = pearson_coefficients(make("pareto", {{"alpha", 3.0}}));
    REQUIRE(p3.nu2.has_value());
    CHECK(*p3.nu2 == Catch::Approx(1.5).epsilon(1e-7));
    REQUIRE(p3.sigma.has_value());
    CHECK(*p3.sigma == Catch::Approx(std::sqrt(0.75)).epsilon(1e-6));
    CHECK_FALSE(p3.moment_skewness.has_value());
    CHECK(p3.missing == std::vector<std::string>{"moment_skewness"});

    auto p15 = pearson_coefficients(make("pareto", {{"alpha", 1.5}}));
    REQUIRE(p15.nu2.has_value());
    CHECK(*p15.nu2 == Catch::Approx(3.0).epsilon(1e-6));
    CHECK_FALSE(p15.sigma.has_value());
    CHECK_FALSE(p15.median_skewness.has_value());

    auto p05 = pearson_coefficients(make("pareto", {{"alpha", 0.5}}));
    CHECK_FALSE(p05.nu2.has_value());
    CHECK_FALSE(p05.mode_skewness.has_value());
    CHECK_FALSE(p05.median_skewness.has_value());
    CHECK_FALSE(p05.moment_skewness.has_value());
    // the median itself is still well-defined: F(x) = 1 - x^{-1/2} = 1/2
    CHECK(p05.nu1 == Catch::Approx(4.0).epsilon(1e-9));
}

TEST_CASE("cubic identity linking gamma and nu_4") {
    SECTION("exponential") {
        auto chk = gamma_iff_nu4(make("exponential", {{"lambda", 1.0}}));
        CHECK(chk.gamma_direct == Catch::Approx(2.0).epsilon(1e-7));
        CHECK(chk.abs_diff <= 1e-6 * (1.0 + std::fabs(chk.gamma_direct)));
        CHECK(chk.sign_consistent);
        CHECK(chk.nu4 > chk.nu2);
    }
    SECTION("lognormal(1/2, 1/2)") {
        auto chk = gamma_iff_nu4(make("lognormal", {{"mu", 0.5}, {"sigma2", 0.5}}));
        CHECK(chk.nu4 == Catch::Approx(std::exp(1.25)).epsilon(1e-8));
        CHECK(chk.nu2 == Catch::Approx(std::exp(0.75)).epsilon(1e-8));
        CHECK(chk.abs_diff <= 1e-6 * (1.0 + std::fabs(chk.gamma_direct)));
        CHECK(chk.sign_consistent);
    }
    SECTION("normal: everything degenerates to zero") {
        auto chk = gamma_iff_nu4(make("normal", {{"mu", 0.0}, {"sigma2", 1.0}}));
        CHECK(std::fabs(chk.gamma_direct) < 1e-7);
        CHECK(std::fabs(chk.nu4 - chk.nu2) < 1e-7);
        CHECK(chk.sign_consistent);
    }
    SECTION("gamma(2,1) and beta(2,5) satisfy the identity") {
        for (auto d : {make("gamma", {{"alpha", 2.0}, {"lambda", 1.0}}),
                       make("beta", {{"alpha", 2.0}, {"beta", 5.0}})}) {
            auto chk = gamma_iff_nu4(d);
            CHECK(chk.abs_diff <= 1e-6 * (1.0 + std::fabs(chk.gamma_direct)));
            CHECK(chk.sign_consistent);
        }
    }
    SECTION("mirrored gamma: negative on both sides") {
        auto chk = gamma_iff_nu4(mirrored_gamma21());
        CHECK(chk.gamma_direct < 0.0);
        CHECK(chk.nu4 < chk.nu2);
        CHECK(chk.sign_consistent);
        CHECK(chk.abs_diff <= 1e-4 * (1.0 + std::fabs(chk.gamma_direct)));
    }
    SECTION("heavy tail refuses") {
        CHECK_THROWS_AS(gamma_iff_nu4(make("pareto", {{"alpha", 3.0}})), MomentDiverges);
    }
}

TEST_CASE("classification over the standard domain") {
    SECTION("gamma(2,1) is truly mode positive") {
        auto res = classify(make("gamma", {{"alpha", 2.0}, {"lambda", 1.0}}),
                            linspace(1.0, 8.0, 8));
        CHECK(res.label == Classification::truly_mode_positive);
        CHECK_FALSE(res.offending_p.has_value());
        CHECK(classification_name(res.label, res.full_domain) == "truly_mode_positive");
        // ordering consequence: nu_0 < nu_1 < nu_2 < nu_4
        CHECK(1.0 < res.curve.points.front().nu_p);
        for (size_t i = 1; i < res.curve.points.size(); ++i)
            CHECK(res.curve.points[i].nu_p > res.curve.points[i - 1].nu_p);
    }
    SECTION("pareto(0.5) on its sliver of a domain") {
        auto res = classify(make("pareto", {{"alpha", 0.5}}), linspace(1.0, 1.45, 8));
        CHECK(res.label == Classification::truly_mode_positive);
    }
    SECTION("beta(2,5)") {
        auto res = classify(make("beta", {{"alpha", 2.0}, {"beta", 5.0}}),
                            linspace(1.0, 8.0, 8));
        CHECK(res.label == Classification::truly_mode_positive);
    }
    SECTION("normal is symmetric") {
        auto res = classify(make("normal", {{"mu", 3.0}, {"sigma2", 2.0}}),
                            linspace(1.0, 8.0, 8));
        CHECK(res.label == Classification::symmetric);
        CHECK(classification_name(res.label, false) == "symmetric");
    }
    SECTION("mirrored gamma is truly mode negative") {
        auto res = classify(mirrored_gamma21(), linspace(1.0, 6.0, 8));
        CHECK(res.label == Classification::truly_mode_negative);
    }
    SECTION("domain pruning") {
        auto res = classify(make("pareto", {{"alpha", 3.0}}), linspace(1.0, 8.0, 8));
        CHECK(res.curve.dropped_p.size() > 0); // p >= 4 needs E|X|^3
        CHECK(res.label == Classification::truly_mode_positive);
    }
}

TEST_CASE("classification over the full domain") {
    auto res = classify(make("lognormal", {{"mu", 0.0}, {"sigma2", 1.0}}),
                        linspace(0.25, 6.0, 12), true);
    CHECK(res.label == Classification::truly_mode_positive);
    CHECK(res.full_domain);
    CHECK(classification_name(res.label, true) == "truly_mode_positive_full_domain");
    CHECK(res.curve.domain_used == CurveDomain::full_domain);
}

TEST_CASE("magnitude ell: lognormal limit is sigma^2/2") {
    auto e1 = magnitude_ell(make("lognormal", {{"mu", 0.0}, {"sigma2", 1.0}}));
    REQUIRE(e1.value.has_value());
    CHECK(*e1.value == Catch::Approx(0.5).margin(1e-3));
    CHECK_FALSE(e1.diverged);

    auto e2 = magnitude_ell(make("lognormal", {{"mu", 2.0}, {"sigma2", 0.25}}));
    REQUIRE(e2.value.has_value());
    CHECK(*e2.value == Catch::Approx(0.125).margin(1e-3));

    // mu shifts nothing: h(p) is scale invariant and e^mu is a pure scale
    auto e3 = magnitude_ell(make("lognormal", {{"mu", 0.0}, {"sigma2", 0.25}}));
    REQUIRE(e3.value.has_value());
    REQUIRE(e2.h_values.size() == e3.h_values.size());
    for (size_t i = 0; i < e2.h_values.size(); ++i)
        CHECK(e2.h_values[i] == Catch::Approx(e3.h_values[i]).margin(1e-6));
}

TEST_CASE("magnitude ell: exponential h sequence keeps halving") {
    auto est = magnitude_ell(make("exponential", {{"lambda", 1.0}}));
    CHECK(est.diverged);
    CHECK_FALSE(est.value.has_value());
    // regression pin of the computed sequence
    REQUIRE(est.h_values.size() >= 4);
    std::vector<double> expected{0.326123274622, 0.139460839627, 0.0652584091211,
                                 0.031729798071};
    for (size_t i = 0; i < expected.size(); ++i)
        CHECK(est.h_values[i] == Catch::Approx(expected[i]).epsilon(1e-6));
}

TEST_CASE("magnitude ell: bounded support is out of scope") {
    auto est = magnitude_ell(make("beta", {{"alpha", 2.0}, {"beta", 5.0}}));
    CHECK(est.bounded_support);
    CHECK_FALSE(est.value.has_value());
}

TEST_CASE("van Zwet condition") {
    CHECK(van_zwet(make("exponential", {{"lambda", 1.0}})));
    CHECK(van_zwet(make("gamma", {{"alpha", 2.0}, {"lambda", 1.0}})));
    CHECK(van_zwet(make("gamma", {{"alpha", 0.5}, {"lambda", 1.0}})));
    CHECK(van_zwet(make("lognormal", {{"mu", 0.0}, {"sigma2", 1.0}})));
    CHECK(van_zwet(make("pareto", {{"alpha", 3.0}})));
    CHECK(van_zwet(make("beta", {{"alpha", 2.0}, {"beta", 5.0}})));
    CHECK(van_zwet(make("normal", {{"mu", 0.0}, {"sigma2", 1.0}}))); // equality
    CHECK_FALSE(van_zwet(mirrored_gamma21()));
}

TEST_CASE("skewness report ties the pieces together") {
    auto rep = skewness_report(make("gamma", {{"alpha", 2.0}, {"lambda", 1.0}}),
                               linspace(1.0, 8.0, 8));
    CHECK(rep.classification.label == Classification::truly_mode_positive);
    CHECK(rep.van_zwet_holds);
    REQUIRE(rep.pearson.moment_skewness.has_value());
    CHECK(*rep.pearson.moment_skewness == Catch::Approx(std::sqrt(2.0)).epsilon(1e-6));
    CHECK(rep.ell.diverged); // gamma h sequence decays like the exponential's
}
