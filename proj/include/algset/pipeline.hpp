#pragma once

#include "algset/estimators.hpp"
#include "algset/model_io.hpp"
#include "algset/moments.hpp"
#include "algset/spectral.hpp"
#include "algset/synth.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace algset {

// Default constant c for the kernel cutoff r_n = c n^{-1/4}. Calibrated so
// that r_n separates the O(n^{-1/2}) kernel eigenvalues from the smallest
// stable eigenvalue of the benchmark shapes at desk-scale n (the unit
// circle's smallest nonzero eigenvalue is 1/8, which n^{-1/4} alone does
// not clear until n > 4096).
inline constexpr double kPipelineCutoffConst = 0.35;

std::uint64_t mix_stream(std::uint64_t seed, std::uint64_t stream);

// latent + observed with independent, seed-derived streams; prefixes of a
// larger n reproduce smaller draws with the same seed bit for bit
Dataset make_dataset(const ShapeSpec& shape, Eigen::Index n, const NoiseModel& noise,
                     std::uint64_t seed);

struct FitOptions {
    int degree = 2;
    std::optional<NoiseModel> noise; // nullopt => naive fit on the raw observations
    std::optional<double> cutoff;    // explicit r_n; otherwise cutoff_const * n^(-1/4)
    double cutoff_const = kPipelineCutoffConst;
    std::uint64_t seed = 0; // echoed into the model
};

FitModel fit_model(const Eigen::MatrixXd& points, const FitOptions& opts);

// ---------------------------------------------------------------------------
// experiment studies

struct ExperimentConfig {
    std::string study = "rate"; // rate | dichotomy | tube-rate
    std::string shape = "circle";
    double sigma = 0.4;
    std::vector<Eigen::Index> ns = {500, 1000, 2000, 4000, 8000, 16000, 32000};
    int reps = 20;
    std::uint64_t seed = 1;
    int degree = 0; // 0 => the shape's g*
    double cutoff_const = kPipelineCutoffConst;
    int tube_grid = 201;
    int truth_points = 4000;
    int threads = 0; // 0 => ALGSET_THREADS or hardware concurrency
};

struct RepRecord {
    Eigen::Index n = 0;
    int rep = 0;
    std::size_t k_hat = 0;
    double dist = 0.0;       // chordal distance to the reference span
    double lam1 = 0.0;       // smallest eigenvalue (debiased fit)
    double lam2 = 0.0;
    double lam1_naive = 0.0; // dichotomy study only
    double lam2_naive = 0.0;
    double hausdorff = 0.0;  // tube-rate study only; infinity when no tube
    bool tube_valid = false;
};

struct PerNSummary {
    Eigen::Index n = 0;
    double mean_dist = 0.0;
    double median_abs_lam1 = 0.0;
    double median_lam2 = 0.0;
    double median_abs_lam1_naive = 0.0;
    double median_lam2_naive = 0.0;
    double median_hausdorff = 0.0;
};

struct ExperimentReport {
    ExperimentConfig config;
    std::vector<RepRecord> records; // ordered by (n index, rep)
    std::vector<PerNSummary> per_n;
    double slope = 0.0; // OLS log-log slope of the study's target quantity
    double slope_stderr = 0.0;
    std::vector<double> lam1_doubling_ratios; // consecutive median |lam1| ratios
};

ExperimentReport run_experiment(const ExperimentConfig& config);
void write_experiment_json(const std::string& path, const ExperimentReport& report);

// grid sample of the tube region within the window
std::vector<Eigen::Vector2d> tube_grid_sample(const PolynomialSystem& sys, double lambda,
                                              const Window2d& window, int resolution);

} // namespace algset
