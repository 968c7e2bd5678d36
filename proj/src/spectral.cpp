#include "algset/spectral.hpp"

#include "algset/numeric.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace algset {

SpectralDecomposition eig_sym(const Eigen::MatrixXd& m) {
    auto result = jacobi_eigensym(m);
    return SpectralDecomposition{std::move(result.eigenvalues), std::move(result.eigenvectors)};
}

SpectralDecomposition eig_sym(const MomentMatrix& m) {
    return eig_sym(m.entries);
}

KernelEstimate extract_kernel(const SpectralDecomposition& dec, double cutoff) {
    if (cutoff <= 0.0) throw std::invalid_argument("extract_kernel: cutoff must be > 0");
    const Eigen::Index kappa = dec.eigenvalues.size();
    Eigen::Index k = 0;
    while (k < kappa && dec.eigenvalues(k) < cutoff) ++k;

    KernelEstimate est;
    est.k_hat = static_cast<std::size_t>(k);
    est.cutoff = cutoff;
    est.vectors = dec.eigenvectors.leftCols(k);
    est.eigenvalues_kept = dec.eigenvalues.head(k);
    if (k == kappa) {
        est.eigengap = 0.0;
    } else {
        const double below = (k == 0) ? 0.0 : dec.eigenvalues(k - 1);
        est.eigengap = dec.eigenvalues(k) - below;
    }
    return est;
}

double default_cutoff(std::size_t n, double c) {
    if (n < 2) throw std::invalid_argument("default_cutoff: n >= 2 required");
    return c * std::pow(static_cast<double>(n), -0.25);
}

double subspace_distance(const Eigen::MatrixXd& u, const Eigen::MatrixXd& v) {
    auto check_orthonormal = [](const Eigen::MatrixXd& m, const char* name) {
        if (m.cols() == 0) return;
        const Eigen::MatrixXd gram = m.transpose() * m;
        const Eigen::MatrixXd id = Eigen::MatrixXd::Identity(m.cols(), m.cols());
        if ((gram - id).cwiseAbs().maxCoeff() > 1e-8) {
            throw std::invalid_argument(std::string("subspace_distance: ") + name +
                                        " does not have orthonormal columns");
        }
    };
    if (u.rows() != v.rows()) {
        throw std::invalid_argument("subspace_distance: ambient dimensions differ");
    }
    check_orthonormal(u, "first argument");
    check_orthonormal(v, "second argument");

    const Eigen::MatrixXd diff = u * u.transpose() - v * v.transpose();
    return diff.norm();
}

std::size_t largest_relative_gap_index(const Eigen::VectorXd& ascending_eigenvalues) {
    const Eigen::Index kappa = ascending_eigenvalues.size();
    if (kappa < 2) return 0;
    Eigen::VectorXd mags = ascending_eigenvalues.cwiseAbs();
    std::sort(mags.data(), mags.data() + kappa);
    Eigen::Index best = 0;
    double best_ratio = -1.0;
    for (Eigen::Index j = 0; j + 1 < kappa; ++j) {
        const double ratio = mags(j + 1) / std::max(mags(j), 1e-300);
        if (ratio > best_ratio) {
            best_ratio = ratio;
            best = j;
        }
    }
    return static_cast<std::size_t>(best + 1); // count of eigenvalues below the gap
}

} // namespace algset
