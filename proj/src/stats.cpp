#include "dcskeptic/stats.hpp"

#include <boost/math/distributions/chi_squared.hpp>
#include <boost/math/distributions/fisher_f.hpp>
#include <boost/math/distributions/normal.hpp>
#include <boost/math/distributions/students_t.hpp>
#include <cmath>

#include "dcskeptic/types.hpp"

namespace dcs {

namespace {
const boost::math::normal_distribution<double> kStdNormal(0.0, 1.0);
}

double norm_pdf(double x) { return boost::math::pdf(kStdNormal, x); }

double norm_cdf(double x) { return boost::math::cdf(kStdNormal, x); }

double norm_quantile(double u) {
    if (!(u > 0.0 && u < 1.0))
        throw InputError("norm_quantile: argument must lie strictly in (0,1)");
    return boost::math::quantile(kStdNormal, u);
}

double chi2_sf(double x, double df) {
    if (!(df > 0.0)) throw InputError("chi2_sf: df must be positive");
    if (x <= 0.0) return 1.0;
    boost::math::chi_squared_distribution<double> d(df);
    return boost::math::cdf(boost::math::complement(d, x));
}

double t_cdf(double x, double df) {
    if (!(df > 0.0)) throw InputError("t_cdf: df must be positive");
    boost::math::students_t_distribution<double> d(df);
    return boost::math::cdf(d, x);
}

double f_cdf(double x, double d1, double d2) {
    if (!(d1 > 0.0 && d2 > 0.0)) throw InputError("f_cdf: df must be positive");
    if (x <= 0.0) return 0.0;
    boost::math::fisher_f_distribution<double> d(d1, d2);
    return boost::math::cdf(d, x);
}

double kolmogorov_sf(double x) {
    if (x <= 0.0) return 1.0;
    // Series converges very fast for x >~ 0.5; below that the tail is ~1.
    double sum = 0.0;
    for (int k = 1; k <= 100; ++k) {
        double term = std::exp(-2.0 * k * k * x * x);
        sum += (k % 2 == 1) ? term : -term;
        if (term < 1e-16) break;
    }
    double q = 2.0 * sum;
    if (q < 0.0) q = 0.0;
    if (q > 1.0) q = 1.0;
    return q;
}

}  // namespace dcs
