#pragma once

#include "algset/estimators.hpp"

#include <Eigen/Dense>
#include <string>
#include <vector>

namespace algset {

// Static SVG figures: scatter layers, curve layers (polylines through point
// sequences), and filled tube regions. Colors follow the convention green
// latent / black data / blue estimate / red naive / purple tube.
class SvgFigure {
public:
    SvgFigure(int width_px = 640, int height_px = 640);

    void add_scatter(const Eigen::MatrixXd& points, const std::string& color,
                     const std::string& label, double radius_px = 1.6);
    // consecutive points joined when closer than `gap_break` in data units;
    // pass 0 to always join
    void add_point_set(const std::vector<Eigen::Vector2d>& points, const std::string& color,
                       const std::string& label, double marker_px = 1.6);
    void add_curves(const std::vector<Polyline>& polylines, const std::string& color,
                    const std::string& label);
    void add_region(const std::vector<Polyline>& polylines, const std::string& color,
                    const std::string& label, double fill_opacity = 0.35);

    // when false, a generated-at comment is embedded in the header
    void set_deterministic(bool deterministic) { deterministic_ = deterministic; }

    void write(const std::string& path) const;

    static const char* kGreen;  // latent points
    static const char* kBlack;  // observations
    static const char* kBlue;   // estimated set
    static const char* kRed;    // naive estimate
    static const char* kPurple; // semi-algebraic tube
    static const char* kOrange;

private:
    struct Layer {
        enum class Type { Scatter, Curves, Region } type;
        std::vector<std::vector<Eigen::Vector2d>> paths; // scatter uses single-point paths
        std::vector<bool> closed;
        std::string color;
        std::string label;
        double marker_px = 1.6;
        double fill_opacity = 0.0;
    };

    void extend_bounds(const Eigen::Vector2d& p);

    int width_, height_;
    bool deterministic_ = false;
    double min_x_ = 0.0, max_x_ = 0.0, min_y_ = 0.0, max_y_ = 0.0;
    bool has_bounds_ = false;
    std::vector<Layer> layers_;
};

} // namespace algset
