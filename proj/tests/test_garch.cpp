#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <vector>

#include "dcskeptic/garch.hpp"
#include "dcskeptic/rng.hpp"
#include "dcskeptic/types.hpp"

using namespace dcs;

namespace {

// Simulate a GJR-GARCH(1,1) path with standard normal innovations, written
// out longhand so the test does not lean on the filter under test.
Vector simulate_garch(const GarchParams& p, int t, std::uint64_t seed) {
    Rng rng(seed);
    Vector x(t);
    double s2 = p.omega / (1.0 - p.alpha1 - p.beta1 - 0.5 * p.gamma1);
    for (int i = 0; i < t; ++i) {
        if (i > 0) {
            double prev = x[i - 1];
            s2 = p.omega + (p.alpha1 + (prev < 0.0 ? p.gamma1 : 0.0)) * prev * prev +
                 p.beta1 * s2;
        }
        x[i] = std::sqrt(s2) * rng.normal();
    }
    return x;
}

}  // namespace

TEST_CASE("volatility filter: constant-parameter pinned paths") {
    Vector x = Vector::Zero(5);

    GarchParams flat{1.0, 0.0, 0.0, 0.0, 1.0};
    Vector s2 = filter_volatility(x, flat);
    REQUIRE(s2.size() == 5);
    for (int i = 0; i < 5; ++i) CHECK(s2[i] == doctest::Approx(1.0).epsilon(1e-15));

    // omega = 0.1, beta = 0.5, sigma2_1 = 0.2: fixed point of the recursion.
    GarchParams fp{0.1, 0.0, 0.5, 0.0, 0.2};
    Vector s2b = filter_volatility(x, fp);
    for (int i = 0; i < 5; ++i) CHECK(s2b[i] == doctest::Approx(0.2).epsilon(1e-15));
}

TEST_CASE("volatility filter: hand-stepped recursion with arch and leverage") {
    Vector x(3);
    x << 1.0, -2.0, 0.5;
    GarchParams p{0.05, 0.1, 0.8, 0.1, 1.0};
    Vector s2 = filter_volatility(x, p);
    CHECK(s2[0] == doctest::Approx(1.0).epsilon(1e-15));
    // t=2: omega + alpha*1^2 + beta*1   (x_1 = 1 > 0, no leverage term)
    CHECK(s2[1] == doctest::Approx(0.05 + 0.1 * 1.0 + 0.8 * 1.0).epsilon(1e-14));
    // t=3: x_2 = -2 < 0 switches the leverage term on.
    double expect = 0.05 + (0.1 + 0.1) * 4.0 + 0.8 * s2[1];
    CHECK(s2[2] == doctest::Approx(expect).epsilon(1e-14));
}

TEST_CASE("volatility filter: parameter validation") {
    Vector x = Vector::Ones(10);
    CHECK_THROWS_AS(filter_volatility(x, GarchParams{0.0, 0.1, 0.8, 0.0, 1.0}),
                    InputError);
    CHECK_THROWS_AS(filter_volatility(x, GarchParams{0.1, -0.1, 0.8, 0.0, 1.0}),
                    InputError);
    CHECK_THROWS_AS(filter_volatility(x, GarchParams{0.1, 0.3, 0.7, 0.0, 1.0}),
                    InputError);
    CHECK_THROWS_AS(filter_volatility(x, GarchParams{0.1, 0.1, 0.7, 0.5, 1.0}),
                    InputError);
    CHECK_THROWS_AS(filter_volatility(x, GarchParams{0.1, 0.1, 0.7, 0.0, 0.0}),
                    InputError);
}

TEST_CASE("standardize: elementwise ratio and error modes") {
    Vector x(2), s(2);
    x << 1.0, -2.0;
    s << 2.0, 4.0;
    Vector z = standardize(x, s);
    CHECK(z[0] == doctest::Approx(0.5).epsilon(1e-15));
    CHECK(z[1] == doctest::Approx(-0.5).epsilon(1e-15));

    CHECK_THROWS_AS(standardize(x, Vector::Ones(3)), InputError);
    Vector bad(2);
    bad << 1.0, 0.0;
    CHECK_THROWS_AS(standardize(x, bad), NumericError);
}

TEST_CASE("loglik is a genuine Gaussian likelihood") {
    // With sigma2 pinned at 1 the loglik reduces to the iid standard normal one.
    Vector x(3);
    x << 0.5, -1.0, 2.0;
    GarchParams unit{1.0, 0.0, 0.0, 0.0, 1.0};
    double ll = garch_loglik(x, unit);
    double expect = 0.0;
    for (int i = 0; i < 3; ++i)
        expect += -0.5 * (std::log(2.0 * M_PI) + x[i] * x[i]);
    CHECK(ll == doctest::Approx(expect).epsilon(1e-12));
}

TEST_CASE("fit: input validation and degenerate series") {
    CHECK_THROWS_AS(fit_garch11(Vector::Ones(50), false), InputError);  // too short
    CHECK_THROWS_AS(fit_garch11(Vector::Ones(500), false), InputError); // zero variance
}

TEST_CASE("fit: plain GARCH keeps gamma at zero, leverage frees it") {
    Vector x = simulate_garch({0.05, 0.08, 0.85, 0.1, 1.0}, 1500, 31);
    GarchFit plain = fit_garch11(x, false);
    CHECK(plain.params.gamma1 == 0.0);
    GarchFit lev = fit_garch11(x, true);
    CHECK(lev.params.gamma1 >= 0.0);
    // The richer model can only improve the in-sample likelihood.
    CHECK(lev.loglik >= plain.loglik - 1e-6);
}

TEST_CASE("fit: recovers simulated parameters (median error over seeds)") {
    const GarchParams truth{0.05, 0.05, 0.90, 0.0, 1.0};
    std::vector<double> err_a, err_b, err_o;
    for (std::uint64_t seed = 1; seed <= 20; ++seed) {
        Vector x = simulate_garch(truth, 5000, seed);
        GarchFit f = fit_garch11(x, false);
        err_a.push_back(std::fabs(f.params.alpha1 - truth.alpha1));
        err_b.push_back(std::fabs(f.params.beta1 - truth.beta1));
        err_o.push_back(std::fabs(f.params.omega - truth.omega));
        // The fitted path must carry the convention sigma2[0] = sample variance.
        double var = (x.array() - x.mean()).square().sum() / (x.size() - 1.0);
        CHECK(f.sigma2[0] == doctest::Approx(var).epsilon(1e-10));
        CHECK(f.sigma.size() == x.size());
        CHECK(f.residuals.size() == x.size());
        // residuals = x / sigma elementwise.
        CHECK((f.residuals - standardize(x, f.sigma)).cwiseAbs().maxCoeff() <= 1e-12);
    }
    auto median = [](std::vector<double> v) {
        std::sort(v.begin(), v.end());
        return v[v.size() / 2];
    };
    CHECK(median(err_a) <= 0.03);
    CHECK(median(err_b) <= 0.03);
    CHECK(median(err_o) <= 0.03);
}

TEST_CASE("fit: median error shrinks as the sample grows") {
    // The expected error ratio between T and 16T is about 4, large enough
    // that a 30-seed median comparison orders reliably.
    const GarchParams truth{0.05, 0.05, 0.90, 0.0, 1.0};
    auto med_total_err = [&](int t) {
        std::vector<double> tot;
        for (std::uint64_t seed = 100; seed < 130; ++seed) {
            Vector x = simulate_garch(truth, t, seed);
            GarchFit f = fit_garch11(x, false);
            tot.push_back(std::fabs(f.params.alpha1 - truth.alpha1) +
                          std::fabs(f.params.beta1 - truth.beta1) +
                          std::fabs(f.params.omega - truth.omega));
        }
        std::sort(tot.begin(), tot.end());
        return tot[tot.size() / 2];
    };
    CHECK(med_total_err(16000) < med_total_err(1000));
}

TEST_CASE("fit: filtered variance tracks the sample variance on iid data") {
    Rng rng(77);
    Vector x(2000);
    for (int i = 0; i < 2000; ++i) x[i] = rng.normal();
    GarchFit f = fit_garch11(x, false);
    double mean_s2 = f.sigma2.mean();
    CHECK(mean_s2 == doctest::Approx(1.0).epsilon(0.2));
}

TEST_CASE("one-step variance forecast matches the recursion by hand") {
    Vector x = simulate_garch({0.05, 0.08, 0.85, 0.05, 1.0}, 300, 9);
    GarchFit f = fit_garch11(x, true);
    double last_x = x[x.size() - 1];
    double last_s2 = f.sigma2[f.sigma2.size() - 1];
    const GarchParams& p = f.params;
    double expect = p.omega +
                    (p.alpha1 + (last_x < 0.0 ? p.gamma1 : 0.0)) * last_x * last_x +
                    p.beta1 * last_s2;
    CHECK(forecast_variance(x, f.sigma2, p) == doctest::Approx(expect).epsilon(1e-12));
    CHECK(forecast_variance(x, f.sigma2, p) > 0.0);
    CHECK_THROWS_AS(forecast_variance(x.head(10), f.sigma2, p), InputError);
}
