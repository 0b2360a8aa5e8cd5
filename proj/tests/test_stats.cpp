#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "dcskeptic/stats.hpp"
#include "dcskeptic/types.hpp"

using namespace dcs;

TEST_CASE("normal pdf/cdf/quantile pinned values") {
    CHECK(norm_pdf(0.0) == doctest::Approx(0.3989422804014327).epsilon(1e-12));
    CHECK(norm_cdf(0.0) == doctest::Approx(0.5).epsilon(1e-14));
    CHECK(norm_cdf(1.959963984540054) == doctest::Approx(0.975).epsilon(1e-10));
    CHECK(norm_quantile(0.975) == doctest::Approx(1.959963984540054).epsilon(1e-9));
    CHECK(norm_quantile(0.5) == doctest::Approx(0.0).scale(1.0).epsilon(1e-12));
    CHECK(norm_quantile(0.05) == doctest::Approx(-1.6448536269514722).epsilon(1e-9));
}

TEST_CASE("quantile/cdf round trip and symmetry") {
    for (double u : {0.001, 0.05, 0.21, 0.5, 0.83, 0.999}) {
        double z = norm_quantile(u);
        CHECK(norm_cdf(z) == doctest::Approx(u).epsilon(1e-10));
        CHECK(norm_quantile(1.0 - u) == doctest::Approx(-z).scale(1.0).epsilon(1e-9));
    }
    CHECK_THROWS_AS(norm_quantile(0.0), InputError);
    CHECK_THROWS_AS(norm_quantile(1.0), InputError);
    CHECK_THROWS_AS(norm_quantile(-0.2), InputError);
}

TEST_CASE("chi-square survival pinned critical values") {
    CHECK(chi2_sf(3.841458820694124, 1.0) == doctest::Approx(0.05).epsilon(1e-8));
    CHECK(chi2_sf(5.991464547107979, 2.0) == doctest::Approx(0.05).epsilon(1e-8));
    CHECK(chi2_sf(0.0, 1.0) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(chi2_sf(1e4, 3.0) < 1e-12);
}

TEST_CASE("t and F cdf sanity") {
    CHECK(t_cdf(0.0, 5.0) == doctest::Approx(0.5).epsilon(1e-12));
    // t with large df approaches the normal.
    CHECK(t_cdf(1.96, 1e6) == doctest::Approx(norm_cdf(1.96)).epsilon(1e-5));
    // F(1; d, d) = 0.5 by symmetry of the variance ratio.
    CHECK(f_cdf(1.0, 10.0, 10.0) == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(f_cdf(0.0, 3.0, 7.0) == doctest::Approx(0.0).scale(1.0).epsilon(1e-14));
}

TEST_CASE("kolmogorov tail: bounds, monotone, pinned point") {
    CHECK(kolmogorov_sf(0.0) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(kolmogorov_sf(10.0) == doctest::Approx(0.0).scale(1.0).epsilon(1e-12));
    // K(1.3581) ~ 0.05: the classic 5% point of the Kolmogorov distribution.
    CHECK(kolmogorov_sf(1.3581) == doctest::Approx(0.05).epsilon(5e-3));
    double prev = 2.0;
    for (double x = 0.05; x < 3.0; x += 0.05) {
        double q = kolmogorov_sf(x);
        CHECK(q >= 0.0);
        CHECK(q <= 1.0);
        CHECK(q <= prev + 1e-15);
        prev = q;
    }
}
