#pragma once

#include "algset/basis.hpp"
#include "algset/moments.hpp"

#include <Eigen/Dense>
#include <array>
#include <cstdint>
#include <functional>
#include <string>
#include <vector>

namespace algset {

// Ground-truth generator shapes. Built-ins live in R^2; line components are
// truncated to the window [-3, 3]^2.
class ShapeSpec {
public:
    enum class Kind { Circle, Cross, ThreeLines, Concentric, Line, Custom };

    // component index, u in [0, 1) -> point on the component
    using Sampler = std::function<Eigen::VectorXd(int component, double u)>;

    static ShapeSpec circle(Eigen::Vector2d center = {0.0, 0.0}, double radius = 1.0);
    static ShapeSpec cross();
    // default: near-horizontal, near-vertical and diagonal lines whose three
    // pairwise intersections all sit inside the window; well-separated
    // spectrum at desk-scale n (symmetric concurrent triples are much worse
    // conditioned)
    static ShapeSpec three_lines(std::array<double, 3> angles = {0.03, 1.54, 0.78},
                                 std::array<double, 3> offsets = {2.0, -2.0, 0.0});
    static ShapeSpec concentric(double r1 = 1.0, double r2 = 2.0);
    static ShapeSpec affine_line(double angle, double offset);
    static ShapeSpec custom(int d, int g_star, int components, Sampler sampler);

    static ShapeSpec by_name(const std::string& name); // circle|cross|three_lines|concentric|line

    Kind kind() const { return kind_; }
    const std::string& name() const { return name_; }
    int dimension() const { return d_; }
    int g_star() const { return g_star_; } // minimal degree, hard-coded per shape
    int components() const { return components_; }

    Eigen::VectorXd point_on(int component, double u) const;

    // exact generator coefficients in canonical order, unit norm, canonical
    // sign; requires basis degree == g_star
    Eigen::VectorXd reference_coeffs(const MonomialBasis& basis) const;

    // clipped segment {origin + t * direction : t in [t0, t1]} for line components
    struct Segment {
        Eigen::Vector2d origin;
        Eigen::Vector2d direction;
        double t0, t1;
    };

private:
    ShapeSpec() = default;

    Kind kind_ = Kind::Custom;
    std::string name_;
    int d_ = 2;
    int g_star_ = 0;
    int components_ = 1;

    Eigen::Vector2d center_{0.0, 0.0};
    double radius_ = 1.0;
    double radius2_ = 2.0;
    std::array<double, 3> angles_{};
    std::array<double, 3> offsets_{};
    Sampler sampler_;
    std::vector<Segment> segments_;
};

// Uniform arc/segment-length sampling; component c takes the points with
// index i = c (mod m), so counts differ by at most one and prefixes of a
// longer sample coincide with shorter samples of the same seed.
Eigen::MatrixXd sample_latent(const ShapeSpec& shape, Eigen::Index n, std::uint64_t seed);

// observed = latent + eps with eps rows iid N(0, Sigma); Cholesky coloring
// for full covariances. sigma = 0 reproduces the latent points bitwise.
Eigen::MatrixXd add_noise(const Eigen::MatrixXd& latent, const NoiseModel& noise,
                          std::uint64_t seed);

} // namespace algset
