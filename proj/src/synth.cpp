#include "algset/synth.hpp"

#include "algset/estimators.hpp"
#include "algset/numeric.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace algset {

namespace {

constexpr double kLineWindow = 3.0; // line components live in [-3, 3]^2

// clip the line {origin + t * direction} to the square [-w, w]^2
bool clip_to_window(const Eigen::Vector2d& origin, const Eigen::Vector2d& direction, double w,
                    double& t0, double& t1) {
    t0 = -std::numeric_limits<double>::infinity();
    t1 = std::numeric_limits<double>::infinity();
    for (int axis = 0; axis < 2; ++axis) {
        const double o = origin(axis);
        const double d = direction(axis);
        if (std::abs(d) < 1e-15) {
            if (std::abs(o) > w) return false;
            continue;
        }
        double lo = (-w - o) / d;
        double hi = (w - o) / d;
        if (lo > hi) std::swap(lo, hi);
        t0 = std::max(t0, lo);
        t1 = std::min(t1, hi);
    }
    return t0 < t1;
}

ShapeSpec::Segment line_segment(double angle, double offset) {
    const Eigen::Vector2d direction(std::cos(angle), std::sin(angle));
    const Eigen::Vector2d normal(-std::sin(angle), std::cos(angle));
    const Eigen::Vector2d origin = offset * normal;
    double t0 = 0.0, t1 = 0.0;
    if (!clip_to_window(origin, direction, kLineWindow, t0, t1)) {
        throw std::invalid_argument("ShapeSpec: line does not intersect the sampling window");
    }
    return {origin, direction, t0, t1};
}

// linear polynomial vanishing on the line, over the degree-1 basis 1, x, y
Eigen::Vector3d line_coeffs(double angle, double offset) {
    return {-offset, -std::sin(angle), std::cos(angle)};
}

Eigen::VectorXd circle_coeffs(const Eigen::Vector2d& center, double radius) {
    // (x - c1)^2 + (y - c2)^2 - r^2 over 1, x, y, xy, x^2, y^2
    Eigen::VectorXd c(6);
    c << center.squaredNorm() - radius * radius, -2.0 * center.x(), -2.0 * center.y(), 0.0, 1.0, 1.0;
    return c;
}

} // namespace

ShapeSpec ShapeSpec::circle(Eigen::Vector2d center, double radius) {
    if (radius <= 0.0) throw std::invalid_argument("ShapeSpec::circle: radius must be > 0");
    ShapeSpec s;
    s.kind_ = Kind::Circle;
    s.name_ = "circle";
    s.g_star_ = 2;
    s.components_ = 1;
    s.center_ = center;
    s.radius_ = radius;
    return s;
}

ShapeSpec ShapeSpec::cross() {
    ShapeSpec s;
    s.kind_ = Kind::Cross;
    s.name_ = "cross";
    s.g_star_ = 2;
    s.components_ = 2;
    s.segments_ = {line_segment(M_PI / 4.0, 0.0), line_segment(-M_PI / 4.0, 0.0)};
    return s;
}

ShapeSpec ShapeSpec::three_lines(std::array<double, 3> angles, std::array<double, 3> offsets) {
    for (int i = 0; i < 3; ++i) {
        for (int j = i + 1; j < 3; ++j) {
            double diff = std::fmod(std::abs(angles[i] - angles[j]), M_PI);
            if (std::min(diff, M_PI - diff) < 1e-9) {
                throw std::invalid_argument(
                    "ShapeSpec::three_lines: angles must be pairwise distinct mod pi");
            }
        }
    }
    ShapeSpec s;
    s.kind_ = Kind::ThreeLines;
    s.name_ = "three_lines";
    s.g_star_ = 3;
    s.components_ = 3;
    s.angles_ = angles;
    s.offsets_ = offsets;
    for (int i = 0; i < 3; ++i) s.segments_.push_back(line_segment(angles[i], offsets[i]));
    return s;
}

ShapeSpec ShapeSpec::concentric(double r1, double r2) {
    if (r1 <= 0.0 || r2 <= 0.0) throw std::invalid_argument("ShapeSpec::concentric: radii must be > 0");
    if (r1 == r2) throw std::invalid_argument("ShapeSpec::concentric: radii must differ");
    ShapeSpec s;
    s.kind_ = Kind::Concentric;
    s.name_ = "concentric";
    s.g_star_ = 4;
    s.components_ = 2;
    s.radius_ = r1;
    s.radius2_ = r2;
    return s;
}

ShapeSpec ShapeSpec::affine_line(double angle, double offset) {
    ShapeSpec s;
    s.kind_ = Kind::Line;
    s.name_ = "line";
    s.g_star_ = 1;
    s.components_ = 1;
    s.angles_ = {angle, 0.0, 0.0};
    s.offsets_ = {offset, 0.0, 0.0};
    s.segments_ = {line_segment(angle, offset)};
    return s;
}

ShapeSpec ShapeSpec::custom(int d, int g_star, int components, Sampler sampler) {
    if (d < 1 || g_star < 1 || components < 1 || !sampler) {
        throw std::invalid_argument("ShapeSpec::custom: invalid parameters");
    }
    ShapeSpec s;
    s.kind_ = Kind::Custom;
    s.name_ = "custom";
    s.d_ = d;
    s.g_star_ = g_star;
    s.components_ = components;
    s.sampler_ = std::move(sampler);
    return s;
}

ShapeSpec ShapeSpec::by_name(const std::string& name) {
    if (name == "circle") return circle();
    if (name == "cross") return cross();
    if (name == "three_lines") return three_lines();
    if (name == "concentric") return concentric();
    if (name == "line") return affine_line(M_PI / 6.0, 0.5);
    throw std::invalid_argument("ShapeSpec::by_name: unknown shape '" + name + "'");
}

Eigen::VectorXd ShapeSpec::point_on(int component, double u) const {
    switch (kind_) {
        case Kind::Circle: {
            const double angle = 2.0 * M_PI * u;
            return center_ + radius_ * Eigen::Vector2d(std::cos(angle), std::sin(angle));
        }
        case Kind::Concentric: {
            const double angle = 2.0 * M_PI * u;
            const double r = component == 0 ? radius_ : radius2_;
            return r * Eigen::Vector2d(std::cos(angle), std::sin(angle));
        }
        case Kind::Cross:
        case Kind::ThreeLines:
        case Kind::Line: {
            const Segment& seg = segments_.at(static_cast<std::size_t>(component));
            const double t = seg.t0 + u * (seg.t1 - seg.t0);
            return seg.origin + t * seg.direction;
        }
        case Kind::Custom:
            return sampler_(component, u);
    }
    throw std::logic_error("ShapeSpec::point_on: unreachable");
}

Eigen::VectorXd ShapeSpec::reference_coeffs(const MonomialBasis& basis) const {
    if (basis.dimension() != d_) {
        throw std::invalid_argument("reference_coeffs: basis dimension mismatch");
    }
    if (basis.degree() != g_star_) {
        throw std::invalid_argument("reference_coeffs: basis degree must equal the shape's g*");
    }
    Eigen::VectorXd coeffs;
    switch (kind_) {
        case Kind::Circle:
            coeffs = circle_coeffs(center_, radius_);
            break;
        case Kind::Cross: {
            // (x + y)(x - y) = x^2 - y^2 over the order 1, x, y, xy, x^2, y^2
            coeffs.resize(6);
            coeffs << 0.0, 0.0, 0.0, 0.0, 1.0, -1.0;
            break;
        }
        case Kind::Line:
            coeffs = line_coeffs(angles_[0], offsets_[0]);
            break;
        case Kind::ThreeLines: {
            const MonomialBasis b1 = MonomialBasis::build(2, 1);
            const MonomialBasis b2 = MonomialBasis::build(2, 2);
            Eigen::VectorXd p01 = multiply_polynomials(b1, line_coeffs(angles_[0], offsets_[0]), b1,
                                                       line_coeffs(angles_[1], offsets_[1]), b2);
            coeffs = multiply_polynomials(b2, p01, b1, line_coeffs(angles_[2], offsets_[2]), basis);
            break;
        }
        case Kind::Concentric: {
            const MonomialBasis b2 = MonomialBasis::build(2, 2);
            coeffs = multiply_polynomials(b2, circle_coeffs({0.0, 0.0}, radius_), b2,
                                          circle_coeffs({0.0, 0.0}, radius2_), basis);
            break;
        }
        case Kind::Custom:
            throw std::invalid_argument("reference_coeffs: custom shapes carry no reference");
    }
    return canonical_sign(basis, coeffs.normalized());
}

Eigen::MatrixXd sample_latent(const ShapeSpec& shape, Eigen::Index n, std::uint64_t seed) {
    if (n < 1) throw std::invalid_argument("sample_latent: n >= 1 required");
    GaussianSampler rng(seed);
    Eigen::MatrixXd latent(n, shape.dimension());
    for (Eigen::Index i = 0; i < n; ++i) {
        const int component = static_cast<int>(i % shape.components());
        double u = rng.uniform01();
        if (u == 1.0) u = 0.0;
        latent.row(i) = shape.point_on(component, u).transpose();
    }
    return latent;
}

Eigen::MatrixXd add_noise(const Eigen::MatrixXd& latent, const NoiseModel& noise,
                          std::uint64_t seed) {
    const int d = static_cast<int>(latent.cols());
    if (noise.dimension() != d) throw std::invalid_argument("add_noise: dimension mismatch");
    if (noise.is_zero()) return latent;

    const Eigen::MatrixXd color = psd_cholesky(noise.covariance());
    GaussianSampler rng(seed);
    Eigen::MatrixXd observed(latent.rows(), d);
    for (Eigen::Index i = 0; i < latent.rows(); ++i) {
        observed.row(i) = latent.row(i) + (color * rng.normal_vector(d)).transpose();
    }
    return observed;
}

} // namespace algset
