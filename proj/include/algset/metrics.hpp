#pragma once

#include <Eigen/Dense>
#include <string>

namespace algset {

struct PointCloud {
    Eigen::MatrixXd points; // n x d
    std::string label;

    Eigen::Index size() const { return points.rows(); }
};

// max of the two directed sup-inf distances; throws on empty input
double hausdorff(const PointCloud& a, const PointCloud& b);

struct PkResult {
    double value = 0.0;      // trapezoidal quadrature of d_H(A cap B_t, B cap B_t) e^{-t}
    double tail_bound = 0.0; // 2 (T+1) e^{-T}, reported separately, never added in
    double truncation = 0.0; // T
    int nodes = 0;
};

// Truncated Painleve-Kuratowski distance between finite samples. When the
// ball B_t meets only one of the sets the integrand is capped at the ball
// diameter 2t; when it meets neither, the integrand is 0.
PkResult pk_distance(const PointCloud& a, const PointCloud& b, double truncation, int nodes);

} // namespace algset
