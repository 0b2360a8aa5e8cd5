#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <vector>

#include "dcskeptic/diagnostics.hpp"
#include "dcskeptic/rng.hpp"
#include "dcskeptic/types.hpp"

using namespace dcs;

namespace {

Matrix iid_matrix(int t, int p, std::uint64_t seed) {
    Rng rng(seed);
    Matrix x(t, p);
    for (int i = 0; i < t; ++i)
        for (int j = 0; j < p; ++j) x(i, j) = rng.normal();
    return x;
}

}  // namespace

TEST_CASE("portmanteau: nonnegative, correct df note, input checks") {
    Matrix x = iid_matrix(300, 3, 2);
    TestResult r = portmanteau(x, 10, 2);
    CHECK(r.statistic >= 0.0);
    CHECK(r.note == "df=72");  // 3^2 * (10 - 2)
    TestResult floored = portmanteau(x, 2, 5);
    CHECK(floored.note == "df floored at 1 (k >= h)");
    CHECK_THROWS_AS(portmanteau(iid_matrix(10, 2, 1), 10, 0), InputError);
    CHECK_THROWS_AS(portmanteau(x, 0, 0), InputError);
}

TEST_CASE("portmanteau: size close to nominal on white noise") {
    int rejections = 0;
    const int n_sims = 200;
    for (int s = 0; s < n_sims; ++s) {
        Matrix x = iid_matrix(800, 3, static_cast<std::uint64_t>(s) + 100);
        if (portmanteau(x, 10, 0).p_value < 0.05) ++rejections;
    }
    // 5% nominal; [1%, 11%] absorbs simulation noise at 200 draws.
    CHECK(rejections >= 2);
    CHECK(rejections <= 22);
}

TEST_CASE("portmanteau: strong power against a VAR(1)") {
    int rejections = 0;
    for (std::uint64_t seed = 1; seed <= 10; ++seed) {
        Rng rng(seed);
        Matrix x(500, 2);
        x.row(0).setZero();
        for (int i = 1; i < 500; ++i) {
            x(i, 0) = 0.45 * x(i - 1, 0) + rng.normal();
            x(i, 1) = 0.30 * x(i - 1, 0) + rng.normal();
        }
        if (portmanteau(x, 10, 0).p_value < 0.01) ++rejections;
    }
    CHECK(rejections == 10);
}

TEST_CASE("portmanteau: singular contemporaneous covariance is an error") {
    Matrix x = iid_matrix(200, 2, 5);
    Matrix dup(200, 3);
    dup << x, x.col(0);  // third column duplicates the first
    CHECK_THROWS_AS(portmanteau(dup, 5, 0), NumericError);
}

TEST_CASE("jarque-bera: exact value on the alternating series") {
    // +1, -1, ... has skewness 0 and kurtosis 1 under population moments:
    // JB = T/6 * (0 + (1-3)^2/4) = T/6.
    Vector x(100);
    for (int i = 0; i < 100; ++i) x[i] = (i % 2 == 0) ? 1.0 : -1.0;
    TestResult r = jarque_bera(x);
    CHECK(r.statistic == doctest::Approx(100.0 / 6.0).epsilon(1e-12));
    CHECK(r.note == "df=2");
    CHECK_THROWS_AS(jarque_bera(Vector::Constant(50, 2.0)), InputError);
}

TEST_CASE("jarque-bera: size and power") {
    int rejections = 0;
    for (std::uint64_t seed = 1; seed <= 100; ++seed) {
        Rng rng(seed);
        Vector x(2000);
        for (int i = 0; i < 2000; ++i) x[i] = rng.normal();
        if (jarque_bera(x).p_value < 0.05) ++rejections;
    }
    CHECK(rejections >= 1);
    CHECK(rejections <= 12);

    int power = 0;
    for (std::uint64_t seed = 1; seed <= 20; ++seed) {
        Rng rng(seed + 900);
        Vector x(2000);
        for (int i = 0; i < 2000; ++i) x[i] = rng.student_t(3);
        if (jarque_bera(x).p_value < 0.05) ++power;
    }
    CHECK(power == 20);
}

TEST_CASE("ks test: D in [0,1], detects the wrong reference, passes the right one") {
    Rng rng(8);
    Vector x(500);
    for (int i = 0; i < 500; ++i) x[i] = rng.normal();
    TestResult ok = ks_test(x, Reference{});
    CHECK(ok.statistic >= 0.0);
    CHECK(ok.statistic <= 1.0);
    CHECK(ok.note == "reference=normal");
    CHECK(ok.p_value > 0.01);

    // Uniform draws against a normal reference: emphatic rejection.
    Vector u(500);
    for (int i = 0; i < 500; ++i) u[i] = rng.uniform();
    TestResult bad = ks_test(u, Reference{});
    CHECK(bad.p_value < 1e-6);

    // Location-scale reference parameters are honored.
    Vector y = (2.0 * x.array() + 3.0).matrix();
    Reference shifted{Reference::Kind::normal, 3.0, 2.0, 5.0};
    CHECK(ks_test(y, shifted).p_value > 0.01);

    CHECK_THROWS_AS(ks_test(Vector(), Reference{}), InputError);
}

TEST_CASE("ks test: size near nominal under the null") {
    int rejections = 0;
    for (std::uint64_t seed = 1; seed <= 150; ++seed) {
        Rng rng(seed + 4000);
        Vector x(400);
        for (int i = 0; i < 400; ++i) x[i] = rng.normal();
        if (ks_test(x, Reference{}).p_value < 0.05) ++rejections;
    }
    // The asymptotic Kolmogorov tail runs slightly conservative at n = 400.
    CHECK(rejections >= 1);
    CHECK(rejections <= 17);
}

TEST_CASE("ks test: student reference accepts matching heavy tails") {
    int accepted = 0;
    for (std::uint64_t seed = 1; seed <= 10; ++seed) {
        Rng rng(seed + 70);
        Vector x(800);
        for (int i = 0; i < 800; ++i) x[i] = rng.student_t(3);
        Reference ref{Reference::Kind::student_t, 0.0, 1.0, 3.0};
        if (ks_test(x, ref).p_value > 0.05) ++accepted;
    }
    CHECK(accepted >= 8);
}

TEST_CASE("two-sample t: engineered exact statistic") {
    // Both series have sample variance exactly 1e-4 (alternating +/-c with
    // c^2 = 9.9e-5 under the n-1 divisor, n = 100) and means 0.001 and 0:
    // t = 0.001 / sqrt(2e-4/100) = 0.7071.
    const int n = 100;
    const double c = std::sqrt(9.9e-5);
    Vector r1(n), r2(n);
    for (int i = 0; i < n; ++i) {
        double s = (i % 2 == 0) ? c : -c;
        r1[i] = s + 0.001;
        r2[i] = s;
    }
    TestResult r = two_sample_t(r1, r2);
    CHECK(r.statistic == doctest::Approx(std::sqrt(0.5)).epsilon(1e-9));
    CHECK(r.note == "two-sided normal");
    CHECK(r.p_value ==
          doctest::Approx(2.0 * (1.0 - 0.76024993890652326)).epsilon(1e-6));

    // Antisymmetry and the null case.
    TestResult swapped = two_sample_t(r2, r1);
    CHECK(swapped.statistic == doctest::Approx(-r.statistic).epsilon(1e-12));
    TestResult same = two_sample_t(r1, r1);
    CHECK(same.statistic == doctest::Approx(0.0).scale(1.0).epsilon(1e-12));
    CHECK(same.p_value == doctest::Approx(1.0).epsilon(1e-12));

    CHECK_THROWS_AS(two_sample_t(r1, r2.head(50)), InputError);
}

TEST_CASE("variance F: exact ratio under scaling and reciprocal symmetry") {
    Rng rng(3);
    Vector base(200);
    for (int i = 0; i < 200; ++i) base[i] = rng.normal();
    Vector doubled = std::sqrt(2.0) * base;

    TestResult f = variance_f(doubled, base);
    CHECK(f.statistic == doctest::Approx(2.0).epsilon(1e-12));
    CHECK(f.note == "two-sided F(199,199)");

    TestResult same = variance_f(base, base);
    CHECK(same.statistic == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(same.p_value == doctest::Approx(1.0).epsilon(1e-12));

    TestResult inv = variance_f(base, doubled);
    CHECK(inv.statistic == doctest::Approx(0.5).epsilon(1e-12));
    // Two-sided: both orderings must agree on the p-value.
    CHECK(inv.p_value == doctest::Approx(f.p_value).epsilon(1e-10));

    CHECK_THROWS_AS(variance_f(base, Vector::Constant(200, 1.0)), InputError);
}

TEST_CASE("sharpe bootstrap: null behavior, determinism, scale invariance") {
    Rng rng(19);
    Vector r1(400), r2(400);
    for (int i = 0; i < 400; ++i) {
        r1[i] = 0.01 * rng.normal();
        r2[i] = 0.01 * rng.normal();
    }

    TestResult same = sharpe_diff_bootstrap(r1, r1);
    CHECK(same.statistic == doctest::Approx(0.0).scale(1.0).epsilon(1e-15));
    CHECK(same.p_value == doctest::Approx(1.0).epsilon(1e-12));

    TestResult a = sharpe_diff_bootstrap(r1, r2, 0, 500, 11);
    TestResult b = sharpe_diff_bootstrap(r1, r2, 0, 500, 11);
    CHECK(a.statistic == b.statistic);
    CHECK(a.p_value == b.p_value);
    CHECK(a.note.find("circular block bootstrap") != std::string::npos);

    // Sharpe ratios ignore common positive scaling; so does the whole test.
    TestResult scaled = sharpe_diff_bootstrap(3.0 * r1, 3.0 * r2, 0, 500, 11);
    CHECK(scaled.statistic == doctest::Approx(a.statistic).epsilon(1e-12));
    CHECK(scaled.p_value == doctest::Approx(a.p_value).epsilon(0.01));

    TestResult c = sharpe_diff_bootstrap(r1, r2, 0, 500, 12);
    CHECK(c.p_value >= 0.0);
    CHECK(c.p_value <= 1.0);
}

TEST_CASE("sharpe bootstrap: power grows with the true gap") {
    // Annualized Sharpe gap g translates to a per-period mean shift
    // g / sqrt(252) * sigma. At n = 1500 the test has solid power at g = 2.5
    // and nontrivial power at g = 1.0.
    auto rejection_rate = [](double gap, int n_seeds) {
        const double sigma = 0.01;
        const double shift = gap / std::sqrt(252.0) * sigma;
        int rej = 0;
        for (std::uint64_t seed = 1; seed <= static_cast<std::uint64_t>(n_seeds);
             ++seed) {
            Rng rng(seed * 13 + 5);
            Vector r1(1500), r2(1500);
            for (int i = 0; i < 1500; ++i) {
                r1[i] = sigma * rng.normal() + shift;
                r2[i] = sigma * rng.normal();
            }
            if (sharpe_diff_bootstrap(r1, r2, 0, 400, seed).p_value < 0.05) ++rej;
        }
        return static_cast<double>(rej) / n_seeds;
    };
    CHECK(rejection_rate(2.5, 24) >= 0.75);
    CHECK(rejection_rate(1.0, 24) >= 0.10);
}
