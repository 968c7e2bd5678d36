#pragma once

#include "algset/basis.hpp"

#include <Eigen/Dense>
#include <cstdint>
#include <optional>
#include <vector>

namespace algset {

// Gaussian noise covariance in variance units. Full covariances are
// validated as symmetric PSD via an eigendecomposition (minimum eigenvalue
// >= -1e-10 relative to scale).
class NoiseModel {
public:
    enum class Kind { Isotropic, Diagonal, Full };

    static NoiseModel isotropic(int d, double sigma2);
    static NoiseModel diagonal(const Eigen::VectorXd& sigma2);
    static NoiseModel full(const Eigen::MatrixXd& sigma);

    Kind kind() const { return kind_; }
    int dimension() const { return static_cast<int>(covariance_.rows()); }
    const Eigen::MatrixXd& covariance() const { return covariance_; }
    double variance(int j) const { return covariance_(j, j); }
    bool is_zero() const;

private:
    NoiseModel(Kind kind, Eigen::MatrixXd cov);

    Kind kind_;
    Eigen::MatrixXd covariance_;
};

struct Dataset {
    Eigen::MatrixXd observed; // n x d
    std::optional<Eigen::MatrixXd> latent;
    std::optional<NoiseModel> noise;
    std::uint64_t seed = 0;

    Eigen::Index n() const { return observed.rows(); }
    int d() const { return static_cast<int>(observed.cols()); }
};

enum class MomentProvenance { Empirical, Debiased, AnalyticBias };

struct MomentMatrix {
    MonomialBasis basis;
    Eigen::MatrixXd entries; // kappa x kappa, symmetric
    MomentProvenance provenance = MomentProvenance::Empirical;
};

// Rows are Veronese images of the data points.
Eigen::MatrixXd vandermonde(const MonomialBasis& basis, const Eigen::MatrixXd& points);

// V^T V / n, assembled entrywise by cascade summation so that entries with
// equal multi-index sums agree bitwise.
MomentMatrix empirical_moment_matrix(const MonomialBasis& basis, const Eigen::MatrixXd& points);

// Hermite-adjusted power h_K(x; s) = sum_j C_{K,j} (-s)^j x^(K-2j) with
// C_{K,j} = binom(K, 2j) (2j)!/(j! 2^j); E[h_K(theta + eps)] = theta^K for
// eps ~ N(0, s).
double hermite_adjusted_power(double x, int k, double s);

// Product-form unbiased estimator of theta^a for isotropic/diagonal noise:
// prod_j h_{a_j}(x_j; sigma_j^2). Rejects full covariances.
double unbiased_monomial_estimator(const Eigen::VectorXd& x, const std::vector<int>& a,
                                   const NoiseModel& noise);

// Pairing sum over the index multiset of `a` (plus inert homogenizing slots
// up to tensor_order): coefficient of monomial a in
//   sum_k C_{m,k} (-1)^k sym(x~^(m-2k) (x) Sigma~^k),  m = tensor_order.
// Works for any symmetric PSD Sigma; memoized per sub-multiset.
double general_monomial_estimator(const Eigen::VectorXd& x, const std::vector<int>& a,
                                  const NoiseModel& noise, int tensor_order = -1);

// Entry of the fully symmetric tensor sym(x~^(singles) (x) Sigma~^(pairs))
// at an index tuple whose multiset has `a` occurrences of each variable and
// the rest homogenizing slots. Exposed for the round-trip checks against
// phi(x) phi(x)^T.
double sym_tensor_entry(const Eigen::VectorXd& x, const Eigen::MatrixXd& sigma_tilde_vars,
                        int tensor_order, int pairs, const std::vector<int>& a);

// Unbiased estimator of the latent moment matrix M_g(nu_n): each entry is
// the average of the monomial estimator at the entry's multi-index sum.
// Computed once per distinct sum, so symmetry is exact by construction.
// Debiased matrices are not necessarily PSD.
MomentMatrix debiased_moment_matrix(const MonomialBasis& basis, const Eigen::MatrixXd& points,
                                    const NoiseModel& noise);

// Closed-form E[M_g(mu_n)] - M_g(nu_n) for d = 2, g = 2 under isotropic
// noise, evaluated from the latent points. Test oracle scope only.
MomentMatrix analytic_bias_matrix(const MonomialBasis& basis, const Eigen::MatrixXd& latent,
                                  const NoiseModel& noise);

} // namespace algset
