#include "algset/numeric.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace algset {

double ipow(double x, int e) {
    double r = 1.0;
    for (int i = 0; i < e; ++i) r *= x;
    return r;
}

double pairwise_sum(std::span<const double> values) {
    const std::size_t n = values.size();
    if (n == 0) return 0.0;
    if (n <= 8) {
        double s = 0.0;
        for (double v : values) s += v;
        return s;
    }
    const std::size_t half = n / 2;
    return pairwise_sum(values.first(half)) + pairwise_sum(values.subspan(half));
}

std::uint64_t binomial(int n, int k) {
    if (k < 0 || k > n) return 0;
    k = std::min(k, n - k);
    std::uint64_t r = 1;
    for (int i = 1; i <= k; ++i) {
        r = r * static_cast<std::uint64_t>(n - k + i) / static_cast<std::uint64_t>(i);
    }
    return r;
}

double factorial_d(int n) {
    double r = 1.0;
    for (int i = 2; i <= n; ++i) r *= i;
    return r;
}

SymmetricEigenResult jacobi_eigensym(const Eigen::MatrixXd& input) {
    if (input.rows() != input.cols()) {
        throw std::invalid_argument("jacobi_eigensym: matrix must be square");
    }
    if (!input.allFinite()) {
        throw std::invalid_argument("jacobi_eigensym: non-finite entries");
    }
    const Eigen::Index n = input.rows();
    Eigen::MatrixXd a = 0.5 * (input + input.transpose());
    Eigen::MatrixXd v = Eigen::MatrixXd::Identity(n, n);

    const double norm = a.norm();
    if (norm > 0.0) {
        constexpr int kMaxSweeps = 100;
        for (int sweep = 0; sweep < kMaxSweeps; ++sweep) {
            double off = 0.0;
            for (Eigen::Index p = 0; p < n; ++p)
                for (Eigen::Index q = p + 1; q < n; ++q) off += 2.0 * a(p, q) * a(p, q);
            off = std::sqrt(off);
            if (off <= 1e-12 * norm) break;

            for (Eigen::Index p = 0; p < n - 1; ++p) {
                for (Eigen::Index q = p + 1; q < n; ++q) {
                    const double apq = a(p, q);
                    if (std::abs(apq) <= 1e-300) continue;
                    const double tau = (a(q, q) - a(p, p)) / (2.0 * apq);
                    const double t = (tau >= 0.0)
                                         ? 1.0 / (tau + std::sqrt(1.0 + tau * tau))
                                         : -1.0 / (-tau + std::sqrt(1.0 + tau * tau));
                    const double c = 1.0 / std::sqrt(1.0 + t * t);
                    const double s = t * c;

                    for (Eigen::Index k = 0; k < n; ++k) {
                        const double akp = a(k, p), akq = a(k, q);
                        a(k, p) = c * akp - s * akq;
                        a(k, q) = s * akp + c * akq;
                    }
                    for (Eigen::Index k = 0; k < n; ++k) {
                        const double apk = a(p, k), aqk = a(q, k);
                        a(p, k) = c * apk - s * aqk;
                        a(q, k) = s * apk + c * aqk;
                    }
                    for (Eigen::Index k = 0; k < n; ++k) {
                        const double vkp = v(k, p), vkq = v(k, q);
                        v(k, p) = c * vkp - s * vkq;
                        v(k, q) = s * vkp + c * vkq;
                    }
                }
            }
        }
    }

    std::vector<Eigen::Index> order(static_cast<std::size_t>(n));
    for (Eigen::Index i = 0; i < n; ++i) order[static_cast<std::size_t>(i)] = i;
    std::stable_sort(order.begin(), order.end(),
                     [&](Eigen::Index l, Eigen::Index r) { return a(l, l) < a(r, r); });

    SymmetricEigenResult result;
    result.eigenvalues.resize(n);
    result.eigenvectors.resize(n, n);
    for (Eigen::Index j = 0; j < n; ++j) {
        const Eigen::Index src = order[static_cast<std::size_t>(j)];
        result.eigenvalues(j) = a(src, src);
        Eigen::VectorXd col = v.col(src);
        Eigen::Index imax = 0;
        for (Eigen::Index i = 1; i < n; ++i)
            if (std::abs(col(i)) > std::abs(col(imax))) imax = i;
        if (col(imax) < 0.0) col = -col;
        result.eigenvectors.col(j) = col;
    }
    return result;
}

Eigen::MatrixXd psd_cholesky(const Eigen::MatrixXd& a, double tol) {
    if (a.rows() != a.cols()) throw std::invalid_argument("psd_cholesky: matrix must be square");
    const Eigen::Index n = a.rows();
    const double scale = std::max(1.0, a.diagonal().cwiseAbs().maxCoeff());
    Eigen::MatrixXd l = Eigen::MatrixXd::Zero(n, n);
    for (Eigen::Index j = 0; j < n; ++j) {
        double d = a(j, j) - l.row(j).head(j).squaredNorm();
        if (d < -tol * scale) {
            throw std::invalid_argument("psd_cholesky: matrix is not positive semidefinite");
        }
        if (d <= tol * scale) {
            // zero pivot: leave the column at zero
            continue;
        }
        l(j, j) = std::sqrt(d);
        for (Eigen::Index i = j + 1; i < n; ++i) {
            l(i, j) = (a(i, j) - l.row(i).head(j).dot(l.row(j).head(j))) / l(j, j);
        }
    }
    return l;
}

OlsFit ols_line(std::span<const double> x, std::span<const double> y) {
    if (x.size() != y.size() || x.size() < 3) {
        throw std::invalid_argument("ols_line: need matching inputs with >= 3 points");
    }
    const double n = static_cast<double>(x.size());
    double mx = 0.0, my = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        mx += x[i];
        my += y[i];
    }
    mx /= n;
    my /= n;
    double sxx = 0.0, sxy = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sxx += (x[i] - mx) * (x[i] - mx);
        sxy += (x[i] - mx) * (y[i] - my);
    }
    OlsFit fit;
    fit.slope = sxy / sxx;
    fit.intercept = my - fit.slope * mx;
    double rss = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double r = y[i] - fit.intercept - fit.slope * x[i];
        rss += r * r;
    }
    fit.slope_stderr = std::sqrt(rss / (n - 2.0) / sxx);
    return fit;
}

double median(std::vector<double> values) {
    if (values.empty()) throw std::invalid_argument("median: empty input");
    std::sort(values.begin(), values.end());
    const std::size_t n = values.size();
    return (n % 2 == 1) ? values[n / 2] : 0.5 * (values[n / 2 - 1] + values[n / 2]);
}

double GaussianSampler::uniform01() {
    // top 53 bits, mapped to (0, 1] so log() below is always finite
    const std::uint64_t bits = engine_() >> 11;
    return (static_cast<double>(bits) + 1.0) * 0x1.0p-53;
}

double GaussianSampler::normal() {
    const double u1 = uniform01();
    const double u2 = uniform01();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * M_PI * u2);
}

Eigen::VectorXd GaussianSampler::normal_vector(int d) {
    Eigen::VectorXd z(d);
    for (int i = 0; i < d; ++i) z(i) = normal();
    return z;
}

} // namespace algset
