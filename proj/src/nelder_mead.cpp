#include "dcskeptic/nelder_mead.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "dcskeptic/types.hpp"

namespace dcs {

NmResult nelder_mead(const std::function<double(const std::vector<double>&)>& f,
                     std::vector<double> x0, const NmOptions& opt) {
    const std::size_t n = x0.size();
    if (n == 0) throw InputError("nelder_mead: empty starting point");

    auto safe_eval = [&](const std::vector<double>& x) {
        double v = f(x);
        return std::isfinite(v) ? v : std::numeric_limits<double>::max();
    };

    std::vector<std::vector<double>> simplex(n + 1, x0);
    std::vector<double> fv(n + 1);
    for (std::size_t i = 0; i < n; ++i) simplex[i + 1][i] += opt.step;
    for (std::size_t i = 0; i <= n; ++i) fv[i] = safe_eval(simplex[i]);

    std::vector<std::size_t> order(n + 1);
    NmResult res;
    for (res.iterations = 0; res.iterations < opt.max_iter; ++res.iterations) {
        for (std::size_t i = 0; i <= n; ++i) order[i] = i;
        std::sort(order.begin(), order.end(),
                  [&](std::size_t a, std::size_t b) { return fv[a] < fv[b]; });
        const std::size_t best = order[0], worst = order[n], second = order[n - 1];

        if (fv[worst] - fv[best] <= opt.f_tol * (std::fabs(fv[best]) + opt.f_tol)) {
            res.converged = true;
            break;
        }

        std::vector<double> centroid(n, 0.0);
        for (std::size_t i = 0; i <= n; ++i) {
            if (i == worst) continue;
            for (std::size_t j = 0; j < n; ++j) centroid[j] += simplex[i][j];
        }
        for (std::size_t j = 0; j < n; ++j) centroid[j] /= static_cast<double>(n);

        auto blend = [&](double coef) {
            std::vector<double> p(n);
            for (std::size_t j = 0; j < n; ++j)
                p[j] = centroid[j] + coef * (simplex[worst][j] - centroid[j]);
            return p;
        };

        std::vector<double> xr = blend(-1.0);
        double fr = safe_eval(xr);
        if (fr < fv[best]) {
            std::vector<double> xe = blend(-2.0);
            double fe = safe_eval(xe);
            if (fe < fr) {
                simplex[worst] = std::move(xe);
                fv[worst] = fe;
            } else {
                simplex[worst] = std::move(xr);
                fv[worst] = fr;
            }
            continue;
        }
        if (fr < fv[second]) {
            simplex[worst] = std::move(xr);
            fv[worst] = fr;
            continue;
        }
        // Contract, outside or inside depending on where the reflection fell.
        bool outside = fr < fv[worst];
        std::vector<double> xc = blend(outside ? -0.5 : 0.5);
        double fc = safe_eval(xc);
        if (fc < std::min(fr, fv[worst])) {
            simplex[worst] = std::move(xc);
            fv[worst] = fc;
            continue;
        }
        // Shrink toward the best vertex.
        for (std::size_t i = 0; i <= n; ++i) {
            if (i == best) continue;
            for (std::size_t j = 0; j < n; ++j)
                simplex[i][j] = simplex[best][j] + 0.5 * (simplex[i][j] - simplex[best][j]);
            fv[i] = safe_eval(simplex[i]);
        }
    }

    std::size_t best = 0;
    for (std::size_t i = 1; i <= n; ++i)
        if (fv[i] < fv[best]) best = i;
    res.x = simplex[best];
    res.fmin = fv[best];
    return res;
}

}  // namespace dcs
