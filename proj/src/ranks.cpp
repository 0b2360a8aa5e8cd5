#include "dcskeptic/ranks.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "dcskeptic/stats.hpp"

namespace dcs {

namespace {
constexpr double kPi = 3.14159265358979323846;

bool is_constant(const Vector& x) {
    for (Eigen::Index i = 1; i < x.size(); ++i)
        if (x[i] != x[0]) return false;
    return true;
}

// Pairs tied within runs of equal values: sum t(t-1)/2 over runs.
long long tie_pairs(std::vector<double>& sorted) {
    long long total = 0;
    std::size_t i = 0;
    while (i < sorted.size()) {
        std::size_t j = i + 1;
        while (j < sorted.size() && sorted[j] == sorted[i]) ++j;
        long long t = static_cast<long long>(j - i);
        total += t * (t - 1) / 2;
        i = j;
    }
    return total;
}

// Inversions of y via bottom-up merge sort.
long long count_inversions(std::vector<double>& y) {
    const std::size_t n = y.size();
    std::vector<double> buf(n);
    long long inv = 0;
    for (std::size_t width = 1; width < n; width *= 2) {
        for (std::size_t lo = 0; lo + width < n; lo += 2 * width) {
            std::size_t mid = lo + width;
            std::size_t hi = std::min(lo + 2 * width, n);
            std::size_t a = lo, b = mid, k = lo;
            while (a < mid && b < hi) {
                if (y[b] < y[a]) {
                    buf[k++] = y[b++];
                    inv += static_cast<long long>(mid - a);
                } else {
                    buf[k++] = y[a++];
                }
            }
            while (a < mid) buf[k++] = y[a++];
            while (b < hi) buf[k++] = y[b++];
            std::copy(buf.begin() + lo, buf.begin() + hi, y.begin() + lo);
        }
    }
    return inv;
}

// Knight-style S = C - D on pre-paired data. Exact integer arithmetic.
long long kendall_s(std::vector<std::pair<double, double>>& pts) {
    const std::size_t n = pts.size();
    std::sort(pts.begin(), pts.end());

    long long n1 = 0, n3 = 0;
    {
        std::size_t i = 0;
        while (i < n) {
            std::size_t j = i + 1;
            while (j < n && pts[j].first == pts[i].first) ++j;
            long long t = static_cast<long long>(j - i);
            n1 += t * (t - 1) / 2;
            // runs tied in both coordinates (already sorted by y within run)
            std::size_t a = i;
            while (a < j) {
                std::size_t b = a + 1;
                while (b < j && pts[b].second == pts[a].second) ++b;
                long long u = static_cast<long long>(b - a);
                n3 += u * (u - 1) / 2;
                a = b;
            }
            i = j;
        }
    }

    std::vector<double> ys(n);
    for (std::size_t i = 0; i < n; ++i) ys[i] = pts[i].second;
    long long disc = count_inversions(ys);  // strictly discordant pairs

    std::vector<double> ysorted = ys;  // already sorted post merge
    long long n2 = tie_pairs(ysorted);

    long long n0 = static_cast<long long>(n) * (static_cast<long long>(n) - 1) / 2;
    // concordant = n0 - n1 - n2 + n3 - disc
    return n0 - n1 - n2 + n3 - 2 * disc;
}

}  // namespace

void validate_correlation(const Matrix& r, double eig_floor) {
    if (r.rows() != r.cols() || r.rows() == 0)
        throw InputError("correlation matrix must be square and non-empty");
    for (Eigen::Index i = 0; i < r.rows(); ++i) {
        if (std::fabs(r(i, i) - 1.0) > 1e-12)
            throw InputError("correlation matrix diagonal must be one");
        for (Eigen::Index j = 0; j < i; ++j) {
            if (std::fabs(r(i, j) - r(j, i)) > 1e-10)
                throw InputError("correlation matrix must be symmetric");
            if (std::fabs(r(i, j)) > 1.0 + 1e-12)
                throw InputError("correlation entries must lie in [-1, 1]");
        }
    }
    Eigen::SelfAdjointEigenSolver<Matrix> es(r, Eigen::EigenvaluesOnly);
    if (es.eigenvalues().minCoeff() < eig_floor)
        throw InputError("correlation matrix is not positive semidefinite");
}

bool correlation_ok(const Matrix& r, double eig_floor) {
    try {
        validate_correlation(r, eig_floor);
        return true;
    } catch (const InputError&) {
        return false;
    }
}

Vector ecdf_transform(const Vector& x) {
    const Eigen::Index t = x.size();
    if (t < 1) throw InputError("ecdf_transform: empty series");
    for (Eigen::Index i = 0; i < t; ++i)
        if (!std::isfinite(x[i])) throw InputError("ecdf_transform: non-finite value");
    std::vector<double> sorted(x.data(), x.data() + t);
    std::sort(sorted.begin(), sorted.end());
    Vector u(t);
    for (Eigen::Index i = 0; i < t; ++i) {
        auto le = std::upper_bound(sorted.begin(), sorted.end(), x[i]) - sorted.begin();
        u[i] = static_cast<double>(le) / static_cast<double>(t + 1);
    }
    return u;
}

Vector normal_scores(const Vector& u) {
    Vector z(u.size());
    for (Eigen::Index i = 0; i < u.size(); ++i) z[i] = norm_quantile(u[i]);
    return z;
}

ScorePanel score_panel(const Matrix& residuals) {
    const Eigen::Index t = residuals.rows(), p = residuals.cols();
    if (t < 1 || p < 1) throw InputError("score_panel: empty panel");
    ScorePanel out;
    out.scores.resize(t, p);
    out.ranks.resize(t, p);
    std::vector<double> sorted(static_cast<std::size_t>(t));
    for (Eigen::Index j = 0; j < p; ++j) {
        for (Eigen::Index i = 0; i < t; ++i) {
            if (!std::isfinite(residuals(i, j)))
                throw InputError("score_panel: non-finite value");
            sorted[static_cast<std::size_t>(i)] = residuals(i, j);
        }
        std::sort(sorted.begin(), sorted.end());
        for (Eigen::Index i = 0; i < t; ++i) {
            auto le = std::upper_bound(sorted.begin(), sorted.end(), residuals(i, j)) -
                      sorted.begin();
            out.ranks(i, j) = static_cast<int>(le);
            out.scores(i, j) =
                norm_quantile(static_cast<double>(le) / static_cast<double>(t + 1));
        }
    }
    return out;
}

double kendall_tau(const Vector& x, const Vector& y) {
    const Eigen::Index t = x.size();
    if (t != y.size()) throw InputError("kendall_tau: length mismatch");
    if (t < 2) throw InputError("kendall_tau: need at least two observations");
    if (is_constant(x) || is_constant(y))
        throw InputError("kendall_tau: constant input has no defined rank correlation");
    std::vector<std::pair<double, double>> pts(static_cast<std::size_t>(t));
    for (Eigen::Index i = 0; i < t; ++i) pts[static_cast<std::size_t>(i)] = {x[i], y[i]};
    long long s = kendall_s(pts);
    long long n0 = static_cast<long long>(t) * (static_cast<long long>(t) - 1) / 2;
    return static_cast<double>(s) / static_cast<double>(n0);
}

Vector average_ranks(const Vector& x) {
    const Eigen::Index t = x.size();
    std::vector<Eigen::Index> idx(static_cast<std::size_t>(t));
    std::iota(idx.begin(), idx.end(), 0);
    std::sort(idx.begin(), idx.end(),
              [&](Eigen::Index a, Eigen::Index b) { return x[a] < x[b]; });
    Vector r(t);
    std::size_t i = 0;
    while (i < idx.size()) {
        std::size_t j = i + 1;
        while (j < idx.size() && x[idx[j]] == x[idx[i]]) ++j;
        double avg = 0.5 * (static_cast<double>(i + 1) + static_cast<double>(j));
        for (std::size_t k = i; k < j; ++k) r[idx[k]] = avg;
        i = j;
    }
    return r;
}

namespace {
double pearson(const Vector& a, const Vector& b) {
    const double n = static_cast<double>(a.size());
    double ma = a.mean(), mb = b.mean();
    double sab = 0, saa = 0, sbb = 0;
    for (Eigen::Index i = 0; i < a.size(); ++i) {
        double da = a[i] - ma, db = b[i] - mb;
        sab += da * db;
        saa += da * da;
        sbb += db * db;
    }
    (void)n;
    if (saa <= 0.0 || sbb <= 0.0)
        throw InputError("correlation undefined for zero-variance input");
    return sab / std::sqrt(saa * sbb);
}
}  // namespace

double spearman_rho(const Vector& x, const Vector& y) {
    if (x.size() != y.size()) throw InputError("spearman_rho: length mismatch");
    if (x.size() < 2) throw InputError("spearman_rho: need at least two observations");
    Vector rx = average_ranks(x), ry = average_ranks(y);
    return pearson(rx, ry);
}

Matrix sample_correlation(const Matrix& x) {
    const Eigen::Index t = x.rows(), p = x.cols();
    if (t < 2) throw InputError("sample_correlation: need at least two rows");
    Matrix c = x.rowwise() - x.colwise().mean();
    Matrix cov = (c.transpose() * c) / static_cast<double>(t - 1);
    Matrix out(p, p);
    for (Eigen::Index i = 0; i < p; ++i) {
        if (cov(i, i) <= 0.0)
            throw InputError("sample_correlation: zero-variance column");
        for (Eigen::Index j = 0; j <= i; ++j) {
            double v = cov(i, j) / std::sqrt(cov(i, i) * cov(j, j));
            out(i, j) = out(j, i) = v;
        }
        out(i, i) = 1.0;
    }
    return out;
}

CorrMatrix skeptic_matrix(const Matrix& panel, RankMethod method) {
    if (method == RankMethod::pearson)
        throw InputError("skeptic_matrix: method must be tau or rho");
    const Eigen::Index t = panel.rows(), p = panel.cols();
    if (p < 2) throw InputError("skeptic_matrix: need at least two columns");
    if (t < 2) throw InputError("skeptic_matrix: need at least two rows");

    CorrMatrix out;
    out.method = method;
    out.values = Matrix::Identity(p, p);

    if (method == RankMethod::rho) {
        // Spearman of every pair = Pearson of per-column average ranks, so
        // rank each column once and correlate.
        Matrix ranks(t, p);
        for (Eigen::Index j = 0; j < p; ++j) ranks.col(j) = average_ranks(panel.col(j));
        for (Eigen::Index i = 0; i < p; ++i)
            for (Eigen::Index j = 0; j < i; ++j) {
                double rho = pearson(ranks.col(i), ranks.col(j));
                double v = 2.0 * std::sin(kPi * rho / 6.0);
                out.values(i, j) = out.values(j, i) = v;
            }
        return out;
    }

    for (Eigen::Index i = 0; i < p; ++i)
        for (Eigen::Index j = 0; j < i; ++j) {
            double tau = kendall_tau(panel.col(i), panel.col(j));
            double v = std::sin(kPi * tau / 2.0);
            out.values(i, j) = out.values(j, i) = v;
        }
    return out;
}

CorrMatrix nearest_correlation(const CorrMatrix& in, double tol, int max_sweeps) {
    const Matrix& a = in.values;
    if (a.rows() != a.cols() || a.rows() == 0)
        throw InputError("nearest_correlation: matrix must be square");
    if (!a.isApprox(a.transpose(), 1e-8))
        throw InputError("nearest_correlation: matrix must be symmetric");

    if (correlation_ok(a)) return {a, in.method};

    // Higham (2002): alternate the PSD projection (eigenvalue clip at zero,
    // with Dykstra correction) and the unit-diagonal projection.
    const Eigen::Index p = a.rows();
    Matrix y = 0.5 * (a + a.transpose());
    Matrix ds = Matrix::Zero(p, p);
    for (int sweep = 0; sweep < max_sweeps; ++sweep) {
        Matrix rk = y - ds;
        Eigen::SelfAdjointEigenSolver<Matrix> es(rk);
        Vector lam = es.eigenvalues().cwiseMax(0.0);
        Matrix x =
            es.eigenvectors() * lam.asDiagonal() * es.eigenvectors().transpose();
        x = 0.5 * (x + x.transpose());
        ds = x - rk;
        Matrix yn = x;
        yn.diagonal().setOnes();
        double delta = (yn - y).cwiseAbs().maxCoeff();
        y = yn;
        if (delta < tol) {
            // PSD + unit diagonal bounds entries by one up to roundoff.
            y = y.cwiseMax(-1.0).cwiseMin(1.0);
            y = 0.5 * (y + y.transpose());
            return {y, in.method};
        }
    }
    throw ConvergenceError("nearest_correlation: no convergence within sweep limit");
}

}  // namespace dcs
