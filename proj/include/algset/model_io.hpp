#pragma once

#include "algset/estimators.hpp"
#include "algset/moments.hpp"
#include "algset/spectral.hpp"

#include <Eigen/Dense>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace algset {

// ---------------------------------------------------------------------------
// CSV

// header x1,...,xd; one observation per row; shortest round-trip decimal
// printing so identical inputs produce identical bytes
void write_points_csv(const std::string& path, const Eigen::MatrixXd& points);
Eigen::MatrixXd read_points_csv(const std::string& path);

// x,y rows, optionally with a trailing branch id column
void write_set_csv(const std::string& path, const std::vector<Eigen::Vector2d>& points);
void write_contours_csv(const std::string& path, const std::vector<Polyline>& polylines);
struct SetCsv {
    std::vector<Eigen::Vector2d> points;
    std::vector<int> branch; // empty when the file has no branch column
};
SetCsv read_set_csv(const std::string& path);

void write_matrix_csv(const std::string& path, const Eigen::MatrixXd& m); // debugging dumps

std::string format_double(double v); // shortest round-trip representation

// ---------------------------------------------------------------------------
// sidecar and model JSON

struct DatasetMeta {
    std::string shape;
    Eigen::Index n = 0;
    std::optional<NoiseModel> noise;
    std::uint64_t seed = 0;
    int g_star = 0;
};

// data.csv -> data.latent.csv / data.meta.json
std::string latent_path_for(const std::string& data_path);
std::string meta_path_for(const std::string& data_path);

void write_dataset_meta(const std::string& path, const DatasetMeta& meta);
DatasetMeta read_dataset_meta(const std::string& path);

struct StructureBlock {
    std::vector<int> degrees;
    double scale = 0.0;
    std::vector<Eigen::VectorXd> factors;
    double residual = 0.0;
    int restarts = 0;
    std::uint64_t seed = 0;
    std::vector<Eigen::VectorXd> system; // expanded unit-norm products
};

struct FitModel {
    int d = 0;
    int g = 0;
    Eigen::Index n = 0;
    std::uint64_t seed = 0;
    std::vector<std::vector<int>> basis_order; // variable exponents, canonical order
    std::optional<NoiseModel> noise;           // absent for --naive fits
    bool naive = false;
    Eigen::VectorXd eigenvalues; // ascending
    double cutoff = 0.0;
    double cutoff_const = 0.0;
    std::size_t k_hat = 0;
    double eigengap = 0.0;
    std::vector<Eigen::VectorXd> coefficients; // kept kernel vectors
    std::size_t suggested_k = 0;               // largest-relative-eigengap diagnostic
    std::optional<StructureBlock> structure;

    MonomialBasis basis() const; // rebuilt with the stored order
    PolynomialSystem system() const;
    KernelEstimate kernel() const;
};

void write_model_json(const std::string& path, const FitModel& model);
FitModel read_model_json(const std::string& path);

// metrics record {metric, value, T, nodes, tail_bound}
void write_metric_json(const std::string& path, const std::string& metric, double value,
                       std::optional<double> truncation = std::nullopt,
                       std::optional<int> nodes = std::nullopt,
                       std::optional<double> tail_bound = std::nullopt);

} // namespace algset
