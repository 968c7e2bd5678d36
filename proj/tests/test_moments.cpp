#include "algset/moments.hpp"
#include "algset/numeric.hpp"
#include "algset/spectral.hpp"

#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <random>

using namespace algset;

namespace {

Eigen::MatrixXd unit_circle_points(int n) {
    Eigen::MatrixXd pts(n, 2);
    for (int i = 0; i < n; ++i) {
        const double angle = 2.0 * M_PI * i / n;
        pts(i, 0) = std::cos(angle);
        pts(i, 1) = std::sin(angle);
    }
    return pts;
}

Eigen::VectorXd circle_kernel_vector() {
    Eigen::VectorXd u(6);
    u << -1.0, 0.0, 0.0, 0.0, 1.0, 1.0;
    return u;
}

} // namespace

TEST_CASE("vandermonde rows are Veronese images") {
    const auto basis = MonomialBasis::build(2, 2);

    SUBCASE("circle points annihilate the circle coefficients") {
        const Eigen::MatrixXd v = vandermonde(basis, unit_circle_points(8));
        CHECK((v * circle_kernel_vector()).cwiseAbs().maxCoeff() <= 1e-12);
    }
    SUBCASE("origin row") {
        const Eigen::MatrixXd v = vandermonde(basis, Eigen::MatrixXd::Zero(1, 2));
        CHECK(v(0, 0) == 1.0);
        CHECK(v.row(0).tail(5).cwiseAbs().maxCoeff() == 0.0);
    }
    SUBCASE("entries match direct monomial evaluation") {
        std::mt19937_64 rng(3);
        std::uniform_real_distribution<double> unif(-2.0, 2.0);
        Eigen::MatrixXd pts(3, 2);
        for (int i = 0; i < 3; ++i)
            for (int j = 0; j < 2; ++j) pts(i, j) = unif(rng);
        const Eigen::MatrixXd v = vandermonde(basis, pts);
        for (int i = 0; i < 3; ++i) {
            for (std::size_t r = 0; r < basis.size(); ++r) {
                const auto vars = basis.at(r).variables();
                const double expected = ipow(pts(i, 0), vars[0]) * ipow(pts(i, 1), vars[1]);
                CHECK(v(i, static_cast<Eigen::Index>(r)) == doctest::Approx(expected).epsilon(1e-14));
            }
        }
        Eigen::MatrixXd bad(2, 3);
        bad.setZero();
        CHECK_THROWS_AS(vandermonde(basis, bad), std::invalid_argument);
    }
}

TEST_CASE("empirical moment matrix") {
    const auto basis = MonomialBasis::build(2, 2);

    SUBCASE("exact circle points give a one-dimensional kernel") {
        const auto m = empirical_moment_matrix(basis, unit_circle_points(40));
        CHECK(m.provenance == MomentProvenance::Empirical);
        CHECK((m.entries - m.entries.transpose()).cwiseAbs().maxCoeff() <= 1e-12);
        const auto dec = eig_sym(m);
        CHECK(dec.eigenvalues(0) <= 1e-12);
        const Eigen::VectorXd u_star = circle_kernel_vector().normalized();
        CHECK(std::abs(dec.eigenvectors.col(0).dot(u_star)) >= 1.0 - 1e-8);
    }
    SUBCASE("single point gives the rank-one outer product") {
        Eigen::MatrixXd pt(1, 2);
        pt << 0.7, -1.2;
        const auto m = empirical_moment_matrix(basis, pt);
        const Eigen::VectorXd phi = veronese(basis, pt.row(0).transpose());
        CHECK((m.entries - phi * phi.transpose()).cwiseAbs().maxCoeff() <= 1e-12);
    }
    SUBCASE("empirical matrices are positive semidefinite up to roundoff") {
        std::mt19937_64 rng(23);
        std::normal_distribution<double> gauss(0.0, 1.0);
        Eigen::MatrixXd pts(40, 2);
        for (int i = 0; i < 40; ++i)
            for (int j = 0; j < 2; ++j) pts(i, j) = gauss(rng);
        const auto m = empirical_moment_matrix(basis, pts);
        const auto dec = eig_sym(m);
        CHECK(dec.eigenvalues(0) >= -1e-8 * m.entries.trace());
    }
    SUBCASE("kernel coincides with the Vandermonde kernel on low-rank data") {
        // latent points on a line: plenty of degree-2 vanishing polynomials
        Eigen::MatrixXd pts(30, 2);
        std::mt19937_64 rng(11);
        std::uniform_real_distribution<double> unif(-2.0, 2.0);
        for (int i = 0; i < 30; ++i) {
            const double t = unif(rng);
            pts(i, 0) = t;
            pts(i, 1) = 0.5 * t - 1.0;
        }
        const auto m = empirical_moment_matrix(basis, pts);
        const Eigen::MatrixXd v = vandermonde(basis, pts);
        const auto dec = eig_sym(m);
        // count the near-null directions of M and check each annihilates V
        const Eigen::JacobiSVD<Eigen::MatrixXd> svd(v);
        const auto sv = svd.singularValues();
        int v_rank = 0;
        for (Eigen::Index i = 0; i < sv.size(); ++i)
            if (sv(i) > 1e-9 * sv(0)) ++v_rank;
        int m_null = 0;
        for (Eigen::Index i = 0; i < dec.eigenvalues.size(); ++i) {
            if (dec.eigenvalues(i) < 1e-10 * dec.eigenvalues.tail(1)(0)) {
                ++m_null;
                CHECK((v * dec.eigenvectors.col(i)).cwiseAbs().maxCoeff() <= 1e-5);
            }
        }
        CHECK(m_null == static_cast<int>(basis.size()) - v_rank);
        CHECK(m_null == 3); // 1, x, y minus the 2d line leaves xy-ish combos: kappa - rank(V)
    }
}

TEST_CASE("hermite-adjusted powers") {
    Eigen::VectorXd x1(1);
    x1 << 1.5;
    const auto iso = NoiseModel::isotropic(1, 0.16);
    CHECK(unbiased_monomial_estimator(x1, {2}, iso) == doctest::Approx(2.09).epsilon(1e-12));

    Eigen::VectorXd one(1);
    one << 1.0;
    CHECK(unbiased_monomial_estimator(one, {4}, NoiseModel::isotropic(1, 1.0)) ==
          doctest::Approx(-2.0).epsilon(1e-12));

    // sigma = 0 degenerates to the plain monomial
    Eigen::VectorXd x2(2);
    x2 << 1.3, -0.8;
    CHECK(unbiased_monomial_estimator(x2, {3, 2}, NoiseModel::isotropic(2, 0.0)) ==
          doctest::Approx(ipow(1.3, 3) * ipow(-0.8, 2)).epsilon(1e-14));

    CHECK_THROWS_AS(unbiased_monomial_estimator(
                        x2, {1, 1}, NoiseModel::full(Eigen::Matrix2d::Identity())),
                    std::invalid_argument);
}

TEST_CASE("general monomial estimator (full covariance)") {
    Eigen::VectorXd x(2);
    x << 0.9, -1.4;

    SUBCASE("E[X1 X2] bias is the covariance") {
        Eigen::Matrix2d sigma;
        sigma << 0.3, 0.12, 0.12, 0.5;
        const auto noise = NoiseModel::full(sigma);
        CHECK(general_monomial_estimator(x, {1, 1}, noise) ==
              doctest::Approx(x(0) * x(1) - 0.12).epsilon(1e-12));
    }
    SUBCASE("zero covariance leaves the monomial") {
        const auto noise = NoiseModel::full(Eigen::Matrix2d::Zero());
        CHECK(general_monomial_estimator(x, {3, 2}, noise) ==
              doctest::Approx(ipow(0.9, 3) * ipow(-1.4, 2)).epsilon(1e-12));
    }
    SUBCASE("diagonal covariance agrees with the product form") {
        std::mt19937_64 rng(21);
        std::uniform_real_distribution<double> unif(-1.5, 1.5);
        Eigen::Vector2d variances(0.3, 0.7);
        const auto diag = NoiseModel::diagonal(variances);
        const auto full = NoiseModel::full(Eigen::Matrix2d(variances.asDiagonal()));
        for (int a1 = 0; a1 <= 6; ++a1) {
            for (int a2 = 0; a1 + a2 <= 6; ++a2) {
                Eigen::VectorXd p(2);
                p << unif(rng), unif(rng);
                const double lhs = general_monomial_estimator(p, {a1, a2}, full);
                const double rhs = unbiased_monomial_estimator(p, {a1, a2}, diag);
                CHECK(std::abs(lhs - rhs) <= 1e-10 * std::max(1.0, std::abs(rhs)));
            }
        }
    }
    SUBCASE("tensor order cap") {
        const auto noise = NoiseModel::full(Eigen::Matrix2d::Identity());
        CHECK_THROWS_AS(general_monomial_estimator(x, {3, 2}, noise, 4), std::invalid_argument);
    }
}

TEST_CASE("debiased moment matrix") {
    const auto basis = MonomialBasis::build(2, 2);
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> unif(-1.0, 1.0);
    Eigen::MatrixXd pts(25, 2);
    for (int i = 0; i < 25; ++i)
        for (int j = 0; j < 2; ++j) pts(i, j) = unif(rng);
    const double s2 = 0.16;
    const auto noise = NoiseModel::isotropic(2, s2);
    const auto m = debiased_moment_matrix(basis, pts, noise);

    SUBCASE("constant entry needs no debiasing") {
        CHECK(m.entries(0, 0) == 1.0);
        CHECK(m.provenance == MomentProvenance::Debiased);
    }
    SUBCASE("the (x1 x2, x1 x2) entry matches the bias-subtraction form") {
        // mean (X1^2 - s)(X2^2 - s) = naive entry - [s * mean(X1^2 + X2^2) - s^2]
        double naive = 0.0, correction = 0.0;
        for (int i = 0; i < 25; ++i) {
            naive += pts(i, 0) * pts(i, 0) * pts(i, 1) * pts(i, 1);
            correction += s2 * (pts(i, 0) * pts(i, 0) + pts(i, 1) * pts(i, 1)) - s2 * s2;
        }
        naive /= 25.0;
        correction /= 25.0;
        CHECK(m.entries(3, 3) == doctest::Approx(naive - correction).epsilon(1e-12));
    }
    SUBCASE("entries depend only on the multi-index sum, bitwise") {
        // (1, x1^2) and (x1, x1) share the sum (2, 0)
        CHECK(m.entries(0, 4) == m.entries(1, 1));
        // (1, x1 x2) and (x1, x2) share (1, 1)
        CHECK(m.entries(0, 3) == m.entries(1, 2));
        // (x1 x2, x1 x2) and (x1^2, x2^2) share (2, 2)
        CHECK(m.entries(3, 3) == m.entries(4, 5));
    }
    SUBCASE("zero noise reproduces the empirical matrix bitwise") {
        const auto debiased0 = debiased_moment_matrix(basis, pts, NoiseModel::isotropic(2, 0.0));
        const auto empirical = empirical_moment_matrix(basis, pts);
        CHECK((debiased0.entries - empirical.entries).cwiseAbs().maxCoeff() == 0.0);
    }
    SUBCASE("full-covariance route agrees with the product route for diagonal noise") {
        const auto full = NoiseModel::full(s2 * Eigen::Matrix2d::Identity());
        const auto m_full = debiased_moment_matrix(basis, pts, full);
        CHECK((m_full.entries - m.entries).cwiseAbs().maxCoeff() <= 1e-10);
    }
}

TEST_CASE("analytic bias matrix (d=2, g=2 oracle)") {
    const auto basis = MonomialBasis::build(2, 2);
    const Eigen::MatrixXd latent = unit_circle_points(17);

    SUBCASE("zero noise gives the zero matrix") {
        const auto b = analytic_bias_matrix(basis, latent, NoiseModel::isotropic(2, 0.0));
        CHECK(b.entries.cwiseAbs().maxCoeff() == 0.0);
        CHECK(b.provenance == MomentProvenance::AnalyticBias);
    }
    SUBCASE("constant-vs-x1^2 entry is sigma^2") {
        const auto b = analytic_bias_matrix(basis, latent, NoiseModel::isotropic(2, 0.16));
        CHECK(b.entries(0, 4) == doctest::Approx(0.16).epsilon(1e-14));
        CHECK((b.entries - b.entries.transpose()).cwiseAbs().maxCoeff() == 0.0);
    }
    SUBCASE("unsupported configurations are rejected") {
        CHECK_THROWS_AS(analytic_bias_matrix(MonomialBasis::build(2, 3), latent,
                                             NoiseModel::isotropic(2, 0.1)),
                        std::invalid_argument);
        CHECK_THROWS_AS(analytic_bias_matrix(basis, latent,
                                             NoiseModel::diagonal(Eigen::Vector2d(0.1, 0.2))),
                        std::invalid_argument);
    }
}

TEST_SUITE("properties") {

TEST_CASE("gamma/sym extraction reproduces phi(x) phi(x)^T") {
    const auto basis = MonomialBasis::build(2, 2);
    const int g = 2;
    std::mt19937_64 rng(13);
    std::uniform_real_distribution<double> unif(-1.2, 1.2);
    const Eigen::MatrixXd sigma_tilde = Eigen::MatrixXd::Zero(3, 3);
    for (int trial = 0; trial < 10; ++trial) {
        Eigen::VectorXd x(2);
        x << unif(rng), unif(rng);
        const Eigen::VectorXd phi = veronese(basis, x);
        for (std::size_t r = 0; r < basis.size(); ++r) {
            for (std::size_t c = r; c < basis.size(); ++c) {
                const auto vr = basis.at(r).variables();
                const auto vc = basis.at(c).variables();
                std::vector<int> sum{vr[0] + vc[0], vr[1] + vc[1]};
                const double entry = sym_tensor_entry(x, sigma_tilde, 2 * g, 0, sum);
                const double expected = phi(static_cast<Eigen::Index>(r)) *
                                        phi(static_cast<Eigen::Index>(c));
                CHECK(std::abs(entry - expected) <= 1e-10 * std::max(1.0, std::abs(expected)));
            }
        }
    }
}

TEST_CASE("sym tensor entries match brute-force arrangement averaging") {
    // order-4 tensor sym(x~ (x) x~ (x) Sigma~) over d = 2
    Eigen::VectorXd x(2);
    x << 0.8, -1.1;
    Eigen::VectorXd x_tilde(3);
    x_tilde << 1.0, x(0), x(1);
    Eigen::MatrixXd sigma_tilde = Eigen::MatrixXd::Zero(3, 3);
    sigma_tilde(1, 1) = 0.4;
    sigma_tilde(2, 2) = 0.9;
    sigma_tilde(1, 2) = sigma_tilde(2, 1) = -0.2;

    auto brute_force = [&](std::vector<int> tuple) {
        // average T_{t(perm)} over all permutations, T = x~ (x) x~ (x) Sigma~
        std::sort(tuple.begin(), tuple.end());
        double total = 0.0;
        int count = 0;
        do {
            total += x_tilde(tuple[0]) * x_tilde(tuple[1]) * sigma_tilde(tuple[2], tuple[3]);
            ++count;
        } while (std::next_permutation(tuple.begin(), tuple.end()));
        return total / count;
    };

    for (const auto& [a, tuple] :
         std::vector<std::pair<std::vector<int>, std::vector<int>>>{
             {{2, 2}, {1, 1, 2, 2}},
             {{4, 0}, {1, 1, 1, 1}},
             {{1, 2}, {0, 1, 2, 2}},
             {{0, 2}, {0, 0, 2, 2}},
             {{1, 1}, {0, 0, 1, 2}}}) {
        const double entry = sym_tensor_entry(x, sigma_tilde, 4, 1, a);
        const double expected = brute_force(tuple);
        CHECK(std::abs(entry - expected) <= 1e-12 * std::max(1.0, std::abs(expected)));
    }
}

TEST_CASE("hermite expectation identities (Monte Carlo)") {
    // mean of h_K(theta + eps) approaches theta^K at the 1/sqrt(n) scale
    std::mt19937_64 rng(29);
    std::normal_distribution<double> gauss(0.0, 1.0);
    const double theta = 0.8;
    const double sigma = 0.5;
    const int n = 400000;
    for (int k = 1; k <= 6; ++k) {
        double sum = 0.0, sumsq = 0.0;
        std::mt19937_64 local(rng());
        for (int i = 0; i < n; ++i) {
            const double v = hermite_adjusted_power(theta + sigma * gauss(local), k, sigma * sigma);
            sum += v;
            sumsq += v * v;
        }
        const double mean = sum / n;
        const double se = std::sqrt(std::max(sumsq / n - mean * mean, 0.0) / n);
        CHECK(std::abs(mean - ipow(theta, k)) <= 5.0 * se + 1e-12);
    }
}

} // TEST_SUITE
