#include "algset/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

namespace algset {

namespace {

// directed sup-inf over index subsets; columns of qt/rt are points
double directed(const Eigen::MatrixXd& from, const std::vector<Eigen::Index>& from_idx,
                const Eigen::MatrixXd& to, const std::vector<Eigen::Index>& to_idx) {
    double worst = 0.0;
    for (const Eigen::Index i : from_idx) {
        double best = std::numeric_limits<double>::infinity();
        for (const Eigen::Index j : to_idx) {
            const double dist = (from.col(i) - to.col(j)).squaredNorm();
            if (dist < best) best = dist;
        }
        if (best > worst) worst = best;
    }
    return std::sqrt(worst);
}

} // namespace

double hausdorff(const PointCloud& a, const PointCloud& b) {
    if (a.size() == 0 || b.size() == 0) {
        throw std::invalid_argument("hausdorff: point clouds must be nonempty");
    }
    if (a.points.cols() != b.points.cols()) {
        throw std::invalid_argument("hausdorff: dimension mismatch");
    }
    if (!a.points.allFinite() || !b.points.allFinite()) {
        throw std::invalid_argument("hausdorff: non-finite coordinates");
    }
    const Eigen::MatrixXd at = a.points.transpose(); // d x n, contiguous columns
    const Eigen::MatrixXd bt = b.points.transpose();
    std::vector<Eigen::Index> ai(static_cast<std::size_t>(at.cols()));
    std::vector<Eigen::Index> bi(static_cast<std::size_t>(bt.cols()));
    for (std::size_t i = 0; i < ai.size(); ++i) ai[i] = static_cast<Eigen::Index>(i);
    for (std::size_t i = 0; i < bi.size(); ++i) bi[i] = static_cast<Eigen::Index>(i);
    return std::max(directed(bt, bi, at, ai), directed(at, ai, bt, bi));
}

PkResult pk_distance(const PointCloud& a, const PointCloud& b, double truncation, int nodes) {
    if (truncation <= 0.0) throw std::invalid_argument("pk_distance: truncation radius must be > 0");
    if (nodes < 8) throw std::invalid_argument("pk_distance: at least 8 quadrature nodes required");
    if (a.points.cols() != b.points.cols()) {
        throw std::invalid_argument("pk_distance: dimension mismatch");
    }

    const Eigen::MatrixXd at = a.points.transpose();
    const Eigen::MatrixXd bt = b.points.transpose();
    const Eigen::VectorXd norms_a = at.colwise().norm();
    const Eigen::VectorXd norms_b = bt.colwise().norm();

    auto integrand = [&](double t) {
        std::vector<Eigen::Index> ai, bi;
        for (Eigen::Index i = 0; i < at.cols(); ++i)
            if (norms_a(i) <= t) ai.push_back(i);
        for (Eigen::Index i = 0; i < bt.cols(); ++i)
            if (norms_b(i) <= t) bi.push_back(i);
        double dh = 0.0;
        if (ai.empty() && bi.empty()) {
            dh = 0.0;
        } else if (ai.empty() || bi.empty()) {
            dh = 2.0 * t; // ball diameter cap
        } else {
            dh = std::max(directed(bt, bi, at, ai), directed(at, ai, bt, bi));
        }
        return dh * std::exp(-t);
    };

    const double h = truncation / static_cast<double>(nodes - 1);
    double sum = 0.0;
    for (int i = 0; i < nodes; ++i) {
        const double w = (i == 0 || i == nodes - 1) ? 0.5 : 1.0;
        sum += w * integrand(h * static_cast<double>(i));
    }

    PkResult result;
    result.value = sum * h;
    result.tail_bound = 2.0 * (truncation + 1.0) * std::exp(-truncation);
    result.truncation = truncation;
    result.nodes = nodes;
    return result;
}

} // namespace algset
