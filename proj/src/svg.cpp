#include "algset/svg.hpp"

#include <chrono>
#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace algset {

const char* SvgFigure::kGreen = "#2ca02c";
const char* SvgFigure::kBlack = "#222222";
const char* SvgFigure::kBlue = "#1f77b4";
const char* SvgFigure::kRed = "#d62728";
const char* SvgFigure::kPurple = "#9467bd";
const char* SvgFigure::kOrange = "#ff7f0e";

SvgFigure::SvgFigure(int width_px, int height_px) : width_(width_px), height_(height_px) {}

void SvgFigure::extend_bounds(const Eigen::Vector2d& p) {
    if (!has_bounds_) {
        min_x_ = max_x_ = p.x();
        min_y_ = max_y_ = p.y();
        has_bounds_ = true;
        return;
    }
    min_x_ = std::min(min_x_, p.x());
    max_x_ = std::max(max_x_, p.x());
    min_y_ = std::min(min_y_, p.y());
    max_y_ = std::max(max_y_, p.y());
}

void SvgFigure::add_scatter(const Eigen::MatrixXd& points, const std::string& color,
                            const std::string& label, double radius_px) {
    if (points.cols() < 2) throw std::invalid_argument("SvgFigure: need two coordinate columns");
    Layer layer{Layer::Type::Scatter, {}, {}, color, label, radius_px, 0.0};
    for (Eigen::Index i = 0; i < points.rows(); ++i) {
        const Eigen::Vector2d p(points(i, 0), points(i, 1));
        layer.paths.push_back({p});
        layer.closed.push_back(false);
        extend_bounds(p);
    }
    layers_.push_back(std::move(layer));
}

void SvgFigure::add_point_set(const std::vector<Eigen::Vector2d>& points, const std::string& color,
                              const std::string& label, double marker_px) {
    Layer layer{Layer::Type::Scatter, {}, {}, color, label, marker_px, 0.0};
    for (const auto& p : points) {
        layer.paths.push_back({p});
        layer.closed.push_back(false);
        extend_bounds(p);
    }
    layers_.push_back(std::move(layer));
}

void SvgFigure::add_curves(const std::vector<Polyline>& polylines, const std::string& color,
                           const std::string& label) {
    Layer layer{Layer::Type::Curves, {}, {}, color, label, 0.0, 0.0};
    for (const auto& line : polylines) {
        if (line.points.empty()) continue;
        layer.paths.push_back(line.points);
        layer.closed.push_back(line.closed);
        for (const auto& p : line.points) extend_bounds(p);
    }
    layers_.push_back(std::move(layer));
}

void SvgFigure::add_region(const std::vector<Polyline>& polylines, const std::string& color,
                           const std::string& label, double fill_opacity) {
    Layer layer{Layer::Type::Region, {}, {}, color, label, 0.0, fill_opacity};
    for (const auto& line : polylines) {
        if (line.points.empty()) continue;
        layer.paths.push_back(line.points);
        layer.closed.push_back(line.closed);
        for (const auto& p : line.points) extend_bounds(p);
    }
    layers_.push_back(std::move(layer));
}

void SvgFigure::write(const std::string& path) const {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open '" + path + "' for writing");

    double lo_x = has_bounds_ ? min_x_ : -1.0, hi_x = has_bounds_ ? max_x_ : 1.0;
    double lo_y = has_bounds_ ? min_y_ : -1.0, hi_y = has_bounds_ ? max_y_ : 1.0;
    const double pad_x = 0.05 * std::max(hi_x - lo_x, 1e-6);
    const double pad_y = 0.05 * std::max(hi_y - lo_y, 1e-6);
    lo_x -= pad_x;
    hi_x += pad_x;
    lo_y -= pad_y;
    hi_y += pad_y;

    const double margin = 8.0;
    const double legend_h = 22.0;
    const double plot_w = width_ - 2.0 * margin;
    const double plot_h = height_ - 2.0 * margin - legend_h;
    const double scale = std::min(plot_w / (hi_x - lo_x), plot_h / (hi_y - lo_y));
    auto sx = [&](double x) { return margin + (x - lo_x) * scale; };
    auto sy = [&](double y) { return margin + (hi_y - y) * scale; }; // y axis up

    out << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
    out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width_ << "\" height=\""
        << height_ << "\" viewBox=\"0 0 " << width_ << " " << height_ << "\">\n";
    if (!deterministic_) {
        const auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
        out << "<!-- generated " << now << " -->\n";
    }
    out << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";

    char buf[64];
    auto fmt = [&](double v) {
        std::snprintf(buf, sizeof(buf), "%.2f", v);
        return std::string(buf);
    };

    for (const auto& layer : layers_) {
        switch (layer.type) {
            case Layer::Type::Scatter:
                out << "<g fill=\"" << layer.color << "\" fill-opacity=\"0.75\">\n";
                for (const auto& p : layer.paths) {
                    out << "<circle cx=\"" << fmt(sx(p[0].x())) << "\" cy=\"" << fmt(sy(p[0].y()))
                        << "\" r=\"" << fmt(layer.marker_px) << "\"/>\n";
                }
                out << "</g>\n";
                break;
            case Layer::Type::Curves:
                out << "<g stroke=\"" << layer.color
                    << "\" stroke-width=\"1.8\" fill=\"none\" stroke-linejoin=\"round\">\n";
                for (std::size_t k = 0; k < layer.paths.size(); ++k) {
                    out << (layer.closed[k] ? "<polygon points=\"" : "<polyline points=\"");
                    for (const auto& p : layer.paths[k]) {
                        out << fmt(sx(p.x())) << "," << fmt(sy(p.y())) << " ";
                    }
                    out << "\"/>\n";
                }
                out << "</g>\n";
                break;
            case Layer::Type::Region: {
                out << "<path fill=\"" << layer.color << "\" fill-opacity=\"" << layer.fill_opacity
                    << "\" fill-rule=\"evenodd\" stroke=\"" << layer.color
                    << "\" stroke-width=\"1.2\" d=\"";
                for (const auto& path : layer.paths) {
                    for (std::size_t i = 0; i < path.size(); ++i) {
                        out << (i == 0 ? "M" : "L") << fmt(sx(path[i].x())) << " "
                            << fmt(sy(path[i].y())) << " ";
                    }
                    out << "Z ";
                }
                out << "\"/>\n";
                break;
            }
        }
    }

    // legend strip along the bottom
    double lx = margin;
    const double ly = height_ - margin - legend_h / 2.0;
    out << "<g font-family=\"sans-serif\" font-size=\"12\">\n";
    for (const auto& layer : layers_) {
        if (layer.label.empty()) continue;
        out << "<rect x=\"" << fmt(lx) << "\" y=\"" << fmt(ly - 5) << "\" width=\"10\" height=\"10\" fill=\""
            << layer.color << "\"/>\n";
        lx += 14.0;
        out << "<text x=\"" << fmt(lx) << "\" y=\"" << fmt(ly + 5) << "\">" << layer.label
            << "</text>\n";
        lx += 8.0 * static_cast<double>(layer.label.size()) + 14.0;
    }
    out << "</g>\n</svg>\n";
}

} // namespace algset
