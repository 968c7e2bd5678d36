#pragma once

#include "algset/basis.hpp"
#include "algset/spectral.hpp"

#include <Eigen/Dense>
#include <array>
#include <cstdint>
#include <vector>

namespace algset {

// Polynomials P_1, ..., P_k as coefficient vectors over a shared basis.
// System members are unit-norm by convention.
struct PolynomialSystem {
    MonomialBasis basis;
    std::vector<Eigen::VectorXd> coeffs;

    std::size_t size() const { return coeffs.size(); }
};

double evaluate_polynomial(const MonomialBasis& basis, const Eigen::VectorXd& coeffs,
                           const Eigen::VectorXd& x);
Eigen::VectorXd evaluate_system(const PolynomialSystem& sys, const Eigen::VectorXd& x);

// ---------------------------------------------------------------------------
// univariate real roots (Sturm isolation + bisection/Newton polish)

struct RootResult {
    bool identically_zero = false;
    std::vector<double> roots; // sorted ascending, multiple roots reported once
};

// All real roots of the polynomial (ascending coefficients) in [a, b], each
// satisfying |P(root)| <= tol * max |coefficient|.
RootResult real_roots_univariate(const std::vector<double>& coeffs, double a, double b,
                                 double tol = 1e-10);

// ---------------------------------------------------------------------------
// zero-set slicing (d = 2)

struct Window2d {
    double x_min = -3.0, x_max = 3.0;
    double y_min = -3.0, y_max = 3.0;
};

// Grid-slices both axes: along each of the N abscissae the univariate
// restrictions of all system polynomials are solved, and the roots at which
// every polynomial vanishes (within 1e-6 relative to the coefficient scale)
// are kept. Returns the union of both passes.
std::vector<Eigen::Vector2d> zero_set_slice_2d(const PolynomialSystem& sys, const Window2d& window,
                                               int resolution);

// ---------------------------------------------------------------------------
// semi-algebraic tube

// lambda_n = (log n) / sqrt(n)
double default_lambda(double n);

// true iff max_i |P_i(x)| <= lambda
bool tube_membership(const PolynomialSystem& sys, const Eigen::VectorXd& x, double lambda);

struct Polyline {
    std::vector<Eigen::Vector2d> points;
    bool closed = false;
};

// Marching-squares contour of F(x) = max_i |P_i(x)| - lambda at level 0 on
// an N x N sample grid over the window.
std::vector<Polyline> tube_contour_2d(const PolynomialSystem& sys, double lambda,
                                      const Window2d& window, int resolution);

// ---------------------------------------------------------------------------
// structure-aware factorized projection

struct FactorStructure {
    std::vector<int> degrees; // (g_1, ..., g_m), m >= 2, sum = g of the target

    int total_degree() const;
};

struct FactoredPolynomial {
    double scale = 0.0;                   // lambda with P ~ scale * prod factors
    std::vector<Eigen::VectorXd> factors; // unit-norm over basis (d, g_j)
    double residual = 0.0;                // ||expansion - target||
};

struct ProjectionOptions {
    int restarts = 20;
    int max_iters = 500;
    double tol = 1e-10;
    std::uint64_t seed = 0;
};

// Exact convolution product under the canonical bases; bilinear, and an
// evaluation homomorphism: (p*q)(x) = p(x) q(x).
Eigen::VectorXd multiply_polynomials(const MonomialBasis& basis_p, const Eigen::VectorXd& p,
                                     const MonomialBasis& basis_q, const Eigen::VectorXd& q,
                                     const MonomialBasis& basis_out);

// Nearest coefficient vector (in Euclidean norm) whose polynomial factors
// into components of the prescribed degrees, by block-coordinate descent:
// each factor in turn solves a linear least-squares against the target with
// the other factors held fixed. Best of `restarts` random unit
// initializations; deterministic given the seed.
FactoredPolynomial project_factorized(const MonomialBasis& basis, const Eigen::VectorXd& u,
                                      const FactorStructure& structure,
                                      const ProjectionOptions& opts = {});

// Expanded coefficient vector scale * prod factors over the target basis.
Eigen::VectorXd expand_factored(const MonomialBasis& basis, const FactoredPolynomial& fp,
                                const FactorStructure& structure);

// Projects each kernel basis vector independently and returns the system of
// expanded products (unit-norm members). Also exposes the factorizations.
struct StructuredSystem {
    PolynomialSystem system;
    std::vector<FactoredPolynomial> factorizations;
};
StructuredSystem structured_system(const MonomialBasis& basis, const KernelEstimate& kernel,
                                   const FactorStructure& structure,
                                   const ProjectionOptions& opts = {});

// Flips the sign so the first nonzero coefficient of the highest nonzero
// degree block is positive; matches the reference generator conventions.
Eigen::VectorXd canonical_sign(const MonomialBasis& basis, Eigen::VectorXd coeffs);

} // namespace algset
