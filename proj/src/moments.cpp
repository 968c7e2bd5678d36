#include "algset/moments.hpp"

#include "algset/numeric.hpp"

#include <cmath>
#include <functional>
#include <map>
#include <numeric>
#include <stdexcept>
#include <utility>

namespace algset {

NoiseModel::NoiseModel(Kind kind, Eigen::MatrixXd cov) : kind_(kind), covariance_(std::move(cov)) {}

NoiseModel NoiseModel::isotropic(int d, double sigma2) {
    if (d < 1) throw std::invalid_argument("NoiseModel::isotropic: d >= 1 required");
    if (sigma2 < 0.0) throw std::invalid_argument("NoiseModel::isotropic: variance must be >= 0");
    return NoiseModel(Kind::Isotropic, sigma2 * Eigen::MatrixXd::Identity(d, d));
}

NoiseModel NoiseModel::diagonal(const Eigen::VectorXd& sigma2) {
    if (sigma2.size() < 1) throw std::invalid_argument("NoiseModel::diagonal: empty variance vector");
    if ((sigma2.array() < 0.0).any()) {
        throw std::invalid_argument("NoiseModel::diagonal: variances must be >= 0");
    }
    return NoiseModel(Kind::Diagonal, sigma2.asDiagonal());
}

NoiseModel NoiseModel::full(const Eigen::MatrixXd& sigma) {
    if (sigma.rows() != sigma.cols() || sigma.rows() < 1) {
        throw std::invalid_argument("NoiseModel::full: covariance must be square");
    }
    if ((sigma - sigma.transpose()).cwiseAbs().maxCoeff() > 1e-10 * std::max(1.0, sigma.norm())) {
        throw std::invalid_argument("NoiseModel::full: covariance must be symmetric");
    }
    const auto eig = jacobi_eigensym(sigma);
    if (eig.eigenvalues.minCoeff() < -1e-10) {
        throw std::invalid_argument("NoiseModel::full: covariance must be positive semidefinite");
    }
    return NoiseModel(Kind::Full, 0.5 * (sigma + sigma.transpose()));
}

bool NoiseModel::is_zero() const {
    return covariance_.cwiseAbs().maxCoeff() == 0.0;
}

Eigen::MatrixXd vandermonde(const MonomialBasis& basis, const Eigen::MatrixXd& points) {
    if (points.cols() != basis.dimension()) {
        throw std::invalid_argument("vandermonde: column count does not match basis dimension");
    }
    Eigen::MatrixXd v(points.rows(), static_cast<Eigen::Index>(basis.size()));
    for (Eigen::Index i = 0; i < points.rows(); ++i) {
        v.row(i) = veronese(basis, points.row(i).transpose()).transpose();
    }
    return v;
}

namespace {

// One value per distinct multi-index sum i+j; every (i, j) entry with the
// same sum receives the identical double.
MomentMatrix assemble_by_sum(const MonomialBasis& basis, MomentProvenance provenance,
                             const std::function<double(const std::vector<int>&)>& entry_fn) {
    const auto kappa = static_cast<Eigen::Index>(basis.size());
    MomentMatrix m{basis, Eigen::MatrixXd(kappa, kappa), provenance};
    std::map<std::vector<int>, double> cache;
    for (Eigen::Index r = 0; r < kappa; ++r) {
        const auto vr = basis.at(static_cast<std::size_t>(r)).variables();
        for (Eigen::Index c = r; c < kappa; ++c) {
            const auto vc = basis.at(static_cast<std::size_t>(c)).variables();
            std::vector<int> sum(vr.size());
            for (std::size_t k = 0; k < sum.size(); ++k) sum[k] = vr[k] + vc[k];
            auto it = cache.find(sum);
            if (it == cache.end()) it = cache.emplace(sum, entry_fn(sum)).first;
            m.entries(r, c) = it->second;
            m.entries(c, r) = it->second;
        }
    }
    return m;
}

double monomial_mean(const Eigen::MatrixXd& points, const std::vector<int>& a,
                     std::vector<double>& scratch) {
    const Eigen::Index n = points.rows();
    scratch.resize(static_cast<std::size_t>(n));
    for (Eigen::Index s = 0; s < n; ++s) {
        double v = 1.0;
        for (std::size_t j = 0; j < a.size(); ++j) {
            v *= ipow(points(s, static_cast<Eigen::Index>(j)), a[j]);
        }
        scratch[static_cast<std::size_t>(s)] = v;
    }
    return pairwise_sum(scratch) / static_cast<double>(n);
}

} // namespace

MomentMatrix empirical_moment_matrix(const MonomialBasis& basis, const Eigen::MatrixXd& points) {
    if (points.cols() != basis.dimension()) {
        throw std::invalid_argument("empirical_moment_matrix: dimension mismatch");
    }
    if (points.rows() < 1) {
        throw std::invalid_argument("empirical_moment_matrix: need at least one point");
    }
    std::vector<double> scratch;
    return assemble_by_sum(basis, MomentProvenance::Empirical,
                           [&](const std::vector<int>& sum) {
                               return monomial_mean(points, sum, scratch);
                           });
}

double hermite_adjusted_power(double x, int k, double s) {
    double total = 0.0;
    for (int j = 0; 2 * j <= k; ++j) {
        // C_{k,j} = binom(k, 2j) (2j)!/(j! 2^j), an exact small integer
        double c = static_cast<double>(binomial(k, 2 * j));
        for (int i = 2 * j - 1; i >= 3; i -= 2) c *= i; // (2j-1)!!
        total += c * ipow(-s, j) * ipow(x, k - 2 * j);
    }
    return total;
}

double unbiased_monomial_estimator(const Eigen::VectorXd& x, const std::vector<int>& a,
                                   const NoiseModel& noise) {
    if (noise.kind() == NoiseModel::Kind::Full) {
        throw std::invalid_argument(
            "unbiased_monomial_estimator: full covariance requires the general estimator");
    }
    if (static_cast<int>(a.size()) != x.size() || x.size() != noise.dimension()) {
        throw std::invalid_argument("unbiased_monomial_estimator: dimension mismatch");
    }
    double prod = 1.0;
    for (std::size_t j = 0; j < a.size(); ++j) {
        if (a[j] < 0) throw std::invalid_argument("unbiased_monomial_estimator: negative exponent");
        const auto jj = static_cast<Eigen::Index>(j);
        prod *= hermite_adjusted_power(x(jj), a[j], noise.variance(static_cast<int>(j)));
    }
    return prod;
}

namespace {

// Sum over partitions of the index multiset into singletons and exactly
// `pairs` unordered pairs; singletons contribute x~, pairs contribute
// Sigma~. Index 0 is the homogenizing slot (x~_0 = 1, Sigma~ row 0 zero).
// key: (pairs, multiset including slot-0 count)
using PairingMemo = std::map<std::pair<int, std::vector<int>>, double>;

double pairing_sum(const Eigen::VectorXd& x_tilde, const Eigen::MatrixXd& sigma_tilde,
                   std::vector<int>& multiset, int pairs, PairingMemo& memo) {
    int positions = std::accumulate(multiset.begin(), multiset.end(), 0);
    if (positions == 0) return pairs == 0 ? 1.0 : 0.0;
    if (positions < 2 * pairs) return 0.0;

    auto key = std::make_pair(pairs, multiset);
    if (auto it = memo.find(key); it != memo.end()) return it->second;

    // fix one position of the smallest occupied index
    int v = 0;
    while (multiset[static_cast<std::size_t>(v)] == 0) ++v;
    multiset[static_cast<std::size_t>(v)] -= 1;

    double total = x_tilde(v) * pairing_sum(x_tilde, sigma_tilde, multiset, pairs, memo);
    if (pairs > 0) {
        for (int w = 0; w < static_cast<int>(multiset.size()); ++w) {
            const int available = multiset[static_cast<std::size_t>(w)];
            if (available == 0) continue;
            const double svw = sigma_tilde(v, w);
            if (svw == 0.0) continue;
            multiset[static_cast<std::size_t>(w)] -= 1;
            total += available * svw *
                     pairing_sum(x_tilde, sigma_tilde, multiset, pairs - 1, memo);
            multiset[static_cast<std::size_t>(w)] += 1;
        }
    }

    multiset[static_cast<std::size_t>(v)] += 1;
    memo.emplace(std::move(key), total);
    return total;
}

} // namespace

double sym_tensor_entry(const Eigen::VectorXd& x, const Eigen::MatrixXd& sigma_tilde_vars,
                        int tensor_order, int pairs, const std::vector<int>& a) {
    const int d = static_cast<int>(x.size());
    const int var_total = std::accumulate(a.begin(), a.end(), 0);
    if (var_total > tensor_order) {
        throw std::invalid_argument("sym_tensor_entry: multiset larger than tensor order");
    }

    Eigen::VectorXd x_tilde(d + 1);
    x_tilde(0) = 1.0;
    x_tilde.tail(d) = x;

    std::vector<int> multiset(static_cast<std::size_t>(d) + 1, 0);
    multiset[0] = tensor_order - var_total; // homogenizing slots
    for (int j = 0; j < d; ++j) multiset[static_cast<std::size_t>(j) + 1] = a[static_cast<std::size_t>(j)];

    PairingMemo memo;
    const double partitions = pairing_sum(x_tilde, sigma_tilde_vars, multiset, pairs, memo);

    // average over arrangements: (m-2k)! k! 2^k / m! partitions per class
    const int m = tensor_order;
    const double weight =
        factorial_d(m - 2 * pairs) * factorial_d(pairs) * ipow(2.0, pairs) / factorial_d(m);
    return partitions * weight;
}

double general_monomial_estimator(const Eigen::VectorXd& x, const std::vector<int>& a,
                                  const NoiseModel& noise, int tensor_order) {
    const int d = static_cast<int>(x.size());
    if (static_cast<int>(a.size()) != d || noise.dimension() != d) {
        throw std::invalid_argument("general_monomial_estimator: dimension mismatch");
    }
    const int var_total = std::accumulate(a.begin(), a.end(), 0);
    const int m = tensor_order < 0 ? var_total : tensor_order;
    if (var_total > m) {
        throw std::invalid_argument(
            "general_monomial_estimator: |a| exceeds the constructed tensor order");
    }

    // Sigma~ = blockdiag(0, Sigma): the homogenizing coordinate carries no
    // noise, so slot-0 pairings vanish.
    Eigen::MatrixXd sigma_tilde = Eigen::MatrixXd::Zero(d + 1, d + 1);
    sigma_tilde.bottomRightCorner(d, d) = noise.covariance();

    double total = 0.0;
    for (int k = 0; 2 * k <= m; ++k) {
        // C_{m,k} = binom(m, 2k) (2k)!/(k! 2^k)
        double c = static_cast<double>(binomial(m, 2 * k));
        for (int i = 2 * k - 1; i >= 3; i -= 2) c *= i;
        const double sign = (k % 2 == 0) ? 1.0 : -1.0;
        total += c * sign * sym_tensor_entry(x, sigma_tilde, m, k, a);
    }
    return total;
}

MomentMatrix debiased_moment_matrix(const MonomialBasis& basis, const Eigen::MatrixXd& points,
                                    const NoiseModel& noise) {
    if (points.cols() != basis.dimension()) {
        throw std::invalid_argument("debiased_moment_matrix: dimension mismatch");
    }
    if (noise.dimension() != basis.dimension()) {
        throw std::invalid_argument("debiased_moment_matrix: noise dimension mismatch");
    }
    if (points.rows() < 1) {
        throw std::invalid_argument("debiased_moment_matrix: need at least one point");
    }
    const Eigen::Index n = points.rows();
    const bool product_form = noise.kind() != NoiseModel::Kind::Full;
    const int tensor_order = 2 * basis.degree();

    std::vector<double> scratch(static_cast<std::size_t>(n));
    auto entry_fn = [&](const std::vector<int>& sum) {
        for (Eigen::Index s = 0; s < n; ++s) {
            const Eigen::VectorXd xs = points.row(s).transpose();
            scratch[static_cast<std::size_t>(s)] =
                product_form ? unbiased_monomial_estimator(xs, sum, noise)
                             : general_monomial_estimator(xs, sum, noise, tensor_order);
        }
        return pairwise_sum(scratch) / static_cast<double>(n);
    };
    MomentMatrix m = assemble_by_sum(basis, MomentProvenance::Debiased, entry_fn);
    return m;
}

MomentMatrix analytic_bias_matrix(const MonomialBasis& basis, const Eigen::MatrixXd& latent,
                                  const NoiseModel& noise) {
    if (basis.dimension() != 2 || basis.degree() != 2) {
        throw std::invalid_argument("analytic_bias_matrix: only d = 2, g = 2 is supported");
    }
    if (noise.kind() != NoiseModel::Kind::Isotropic) {
        throw std::invalid_argument("analytic_bias_matrix: isotropic noise required");
    }
    if (latent.cols() != 2 || latent.rows() < 1) {
        throw std::invalid_argument("analytic_bias_matrix: latent points must be n x 2");
    }

    const double s2 = noise.variance(0);
    std::vector<double> scratch;
    auto mean_of = [&](const std::vector<int>& a) { return monomial_mean(latent, a, scratch); };
    const double m1 = mean_of({1, 0});
    const double m2 = mean_of({0, 1});
    const double q1 = mean_of({2, 0}); // mean of theta_1^2
    const double q2 = mean_of({0, 2});
    const double c12 = mean_of({1, 1});

    // upper triangle in the canonical order 1, x1, x2, x1*x2, x1^2, x2^2
    Eigen::MatrixXd b(6, 6);
    b.setZero();
    b(0, 4) = 1.0;
    b(0, 5) = 1.0;
    b(1, 1) = 1.0;
    b(1, 3) = m2;
    b(1, 4) = 3.0 * m1;
    b(1, 5) = m1;
    b(2, 2) = 1.0;
    b(2, 3) = m1;
    b(2, 4) = m2;
    b(2, 5) = 3.0 * m2;
    b(3, 3) = s2 + q1 + q2;
    b(3, 4) = 3.0 * c12;
    b(3, 5) = 3.0 * c12;
    b(4, 4) = 6.0 * q1 + 3.0 * s2;
    b(4, 5) = s2 + q1 + q2;
    b(5, 5) = 6.0 * q2 + 3.0 * s2;

    Eigen::MatrixXd full = b.selfadjointView<Eigen::Upper>();
    return MomentMatrix{basis, s2 * full, MomentProvenance::AnalyticBias};
}

} // namespace algset
