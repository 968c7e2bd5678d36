#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <random>
#include <span>
#include <vector>

namespace algset {

// Integer power with the 0^0 = 1 convention.
double ipow(double x, int e);

// Fixed-order pairwise (cascade) summation. Deterministic for a given
// length; accurate to ~1e-13 relative on desk-scale accumulations.
double pairwise_sum(std::span<const double> values);

std::uint64_t binomial(int n, int k);
double factorial_d(int n);

struct SymmetricEigenResult {
    Eigen::VectorXd eigenvalues;  // ascending
    Eigen::MatrixXd eigenvectors; // orthonormal columns aligned with eigenvalues
};

// Cyclic Jacobi sweeps on (A + A^T)/2. Converges when the off-diagonal
// Frobenius mass drops below 1e-12 * ||A||_F. Deterministic for identical
// input bits; eigenvector signs are canonicalized so that the largest-
// magnitude entry of each column is positive. Throws on non-finite input.
SymmetricEigenResult jacobi_eigensym(const Eigen::MatrixXd& a);

// Lower-triangular L with L L^T = a for symmetric positive SEMIdefinite a.
// Pivots below `tol` are treated as zero, so rank-deficient covariances
// (including the zero matrix) color correctly.
Eigen::MatrixXd psd_cholesky(const Eigen::MatrixXd& a, double tol = 1e-12);

struct OlsFit {
    double slope = 0.0;
    double intercept = 0.0;
    double slope_stderr = 0.0;
};
OlsFit ols_line(std::span<const double> x, std::span<const double> y);

double median(std::vector<double> values); // by value: sorts a copy

// Seedable Gaussian source: Box-Muller over the raw 64-bit stream of a
// mt19937_64, so the emitted values depend only on the seed and draw index
// (no reliance on std::normal_distribution internals). Each normal consumes
// exactly two engine draws.
class GaussianSampler {
public:
    explicit GaussianSampler(std::uint64_t seed) : engine_(seed) {}

    double uniform01(); // (0, 1]
    double normal();
    Eigen::VectorXd normal_vector(int d);

private:
    std::mt19937_64 engine_;
};

} // namespace algset
