#pragma once

#include "algset/moments.hpp"

#include <Eigen/Dense>
#include <cstddef>

namespace algset {

struct SpectralDecomposition {
    Eigen::VectorXd eigenvalues;  // ascending
    Eigen::MatrixXd eigenvectors; // orthonormal columns aligned with eigenvalues
};

// Near-null eigenspace of a (debiased) moment matrix: the coefficient
// vectors of the fitted vanishing polynomials.
struct KernelEstimate {
    std::size_t k_hat = 0;
    Eigen::MatrixXd vectors; // kappa x k_hat, orthonormal columns
    double cutoff = 0.0;
    // lambda_{k_hat+1} - lambda_{k_hat} with the conventions lambda_0 = 0
    // (empty estimate) and gap 0 when everything is retained
    double eigengap = 0.0;
    Eigen::VectorXd eigenvalues_kept;
};

// Eigendecomposition of the symmetrized input via cyclic Jacobi sweeps.
// Deterministic for identical input bits; eigenvector signs canonicalized.
SpectralDecomposition eig_sym(const MomentMatrix& m);
SpectralDecomposition eig_sym(const Eigen::MatrixXd& m);

// Retains exactly the eigenpairs with eigenvalue < cutoff. An empty
// estimate (k_hat = 0) is a valid result.
KernelEstimate extract_kernel(const SpectralDecomposition& dec, double cutoff);

// r_n = c * n^(-1/4); satisfies r_n -> 0 and sqrt(n) r_n -> infinity.
double default_cutoff(std::size_t n, double c = 1.0);

// Frobenius norm of the difference of orthogonal projectors (chordal
// distance). Columns of both inputs must be orthonormal to 1e-8.
double subspace_distance(const Eigen::MatrixXd& u, const Eigen::MatrixXd& v);

// Informational only: the cut below which the relative eigengap
// max |lambda_{j+1}| / |lambda_j| is largest, as a suggestion for k_hat.
// Never applied automatically.
std::size_t largest_relative_gap_index(const Eigen::VectorXd& ascending_eigenvalues);

} // namespace algset
