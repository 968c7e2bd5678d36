#include "algset/pipeline.hpp"

#include "algset/metrics.hpp"
#include "algset/numeric.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <limits>
#include <stdexcept>
#include <thread>

namespace algset {

std::uint64_t mix_stream(std::uint64_t seed, std::uint64_t stream) {
    std::uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (stream + 1);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

Dataset make_dataset(const ShapeSpec& shape, Eigen::Index n, const NoiseModel& noise,
                     std::uint64_t seed) {
    Dataset data;
    data.seed = seed;
    data.noise = noise;
    data.latent = sample_latent(shape, n, mix_stream(seed, 1));
    data.observed = add_noise(*data.latent, noise, mix_stream(seed, 2));
    return data;
}

FitModel fit_model(const Eigen::MatrixXd& points, const FitOptions& opts) {
    const int d = static_cast<int>(points.cols());
    const Eigen::Index n = points.rows();
    if (n < 1) throw std::invalid_argument("fit_model: empty dataset");

    const MonomialBasis basis = MonomialBasis::build(d, opts.degree);
    const MomentMatrix moment = opts.noise ? debiased_moment_matrix(basis, points, *opts.noise)
                                           : empirical_moment_matrix(basis, points);
    const SpectralDecomposition dec = eig_sym(moment);
    const double cutoff = opts.cutoff ? *opts.cutoff : default_cutoff(static_cast<std::size_t>(n),
                                                                      opts.cutoff_const);
    const KernelEstimate kernel = extract_kernel(dec, cutoff);

    FitModel model;
    model.d = d;
    model.g = opts.degree;
    model.n = n;
    model.seed = opts.seed;
    for (const auto& element : basis.elements()) model.basis_order.push_back(element.variables());
    model.noise = opts.noise;
    model.naive = !opts.noise.has_value();
    model.eigenvalues = dec.eigenvalues;
    model.cutoff = cutoff;
    model.cutoff_const = opts.cutoff ? 0.0 : opts.cutoff_const;
    model.k_hat = kernel.k_hat;
    model.eigengap = kernel.eigengap;
    for (std::size_t j = 0; j < kernel.k_hat; ++j) {
        model.coefficients.push_back(kernel.vectors.col(static_cast<Eigen::Index>(j)));
    }
    model.suggested_k = largest_relative_gap_index(dec.eigenvalues);
    return model;
}

std::vector<Eigen::Vector2d> tube_grid_sample(const PolynomialSystem& sys, double lambda,
                                              const Window2d& window, int resolution) {
    std::vector<Eigen::Vector2d> inside;
    for (int i = 0; i < resolution; ++i) {
        const double x = window.x_min +
                         (window.x_max - window.x_min) * i / static_cast<double>(resolution - 1);
        for (int j = 0; j < resolution; ++j) {
            const double y = window.y_min +
                             (window.y_max - window.y_min) * j / static_cast<double>(resolution - 1);
            const Eigen::Vector2d p(x, y);
            if (tube_membership(sys, p, lambda)) inside.push_back(p);
        }
    }
    return inside;
}

namespace {

int resolve_threads(int requested) {
    if (requested > 0) return requested;
    if (const char* env = std::getenv("ALGSET_THREADS")) {
        const int v = std::atoi(env);
        if (v > 0) return v;
    }
    const unsigned hw = std::thread::hardware_concurrency();
    return hw == 0 ? 1 : static_cast<int>(hw);
}

} // namespace

ExperimentReport run_experiment(const ExperimentConfig& config) {
    if (config.study != "rate" && config.study != "dichotomy" && config.study != "tube-rate") {
        throw std::invalid_argument("run_experiment: unknown study '" + config.study + "'");
    }
    if (config.ns.empty() || config.reps < 1) {
        throw std::invalid_argument("run_experiment: need sample sizes and reps >= 1");
    }

    const ShapeSpec shape = ShapeSpec::by_name(config.shape);
    const int degree = config.degree > 0 ? config.degree : shape.g_star();
    const NoiseModel noise = NoiseModel::isotropic(shape.dimension(), config.sigma * config.sigma);
    const MonomialBasis basis = MonomialBasis::build(shape.dimension(), degree);
    const bool want_reference = degree == shape.g_star();
    Eigen::MatrixXd reference_span(static_cast<Eigen::Index>(basis.size()), want_reference ? 1 : 0);
    if (want_reference) reference_span.col(0) = shape.reference_coeffs(basis);

    // truth sample for tube Hausdorff distances
    PointCloud truth;
    if (config.study == "tube-rate") {
        truth.points = sample_latent(shape, config.truth_points, 424242);
        truth.label = "latent";
    }

    const Eigen::Index n_max = *std::max_element(config.ns.begin(), config.ns.end());
    const std::size_t n_count = config.ns.size();

    ExperimentReport report;
    report.config = config;
    report.records.resize(n_count * static_cast<std::size_t>(config.reps));

    std::atomic<int> next_rep{0};
    auto worker = [&]() {
        while (true) {
            const int rep = next_rep.fetch_add(1);
            if (rep >= config.reps) break;
            const std::uint64_t rep_seed = config.seed ^ static_cast<std::uint64_t>(rep);
            const Dataset data = make_dataset(shape, n_max, noise, rep_seed);

            for (std::size_t ni = 0; ni < n_count; ++ni) {
                const Eigen::Index n = config.ns[ni];
                const Eigen::MatrixXd points = data.observed.topRows(n);

                FitOptions fit_opts;
                fit_opts.degree = degree;
                fit_opts.noise = noise;
                fit_opts.cutoff_const = config.cutoff_const;
                fit_opts.seed = rep_seed;
                const FitModel model = fit_model(points, fit_opts);

                RepRecord record;
                record.n = n;
                record.rep = rep;
                record.k_hat = model.k_hat;
                record.lam1 = model.eigenvalues(0);
                record.lam2 = model.eigenvalues(1);
                if (want_reference) {
                    record.dist = subspace_distance(model.kernel().vectors, reference_span);
                }

                if (config.study == "dichotomy") {
                    const FitModel naive = fit_model(points, FitOptions{degree, std::nullopt,
                                                                        std::nullopt,
                                                                        config.cutoff_const,
                                                                        rep_seed});
                    record.lam1_naive = naive.eigenvalues(0);
                    record.lam2_naive = naive.eigenvalues(1);
                }

                if (config.study == "tube-rate") {
                    const double lambda = default_lambda(static_cast<double>(n));
                    if (model.k_hat >= 1) {
                        const Window2d window; // [-3, 3]^2
                        const auto tube = tube_grid_sample(model.system(), lambda, window,
                                                           config.tube_grid);
                        if (!tube.empty()) {
                            Eigen::MatrixXd pts(static_cast<Eigen::Index>(tube.size()), 2);
                            for (std::size_t i = 0; i < tube.size(); ++i) {
                                pts.row(static_cast<Eigen::Index>(i)) = tube[i].transpose();
                            }
                            record.hausdorff = hausdorff(PointCloud{pts, "tube"}, truth);
                            record.tube_valid = true;
                        }
                    }
                    if (!record.tube_valid) {
                        record.hausdorff = std::numeric_limits<double>::infinity();
                    }
                }
                report.records[ni * static_cast<std::size_t>(config.reps) +
                               static_cast<std::size_t>(rep)] = record;
            }
        }
    };

    const int thread_count = std::min(resolve_threads(config.threads), config.reps);
    std::vector<std::thread> pool;
    pool.reserve(static_cast<std::size_t>(thread_count));
    for (int t = 0; t < thread_count; ++t) pool.emplace_back(worker);
    for (auto& t : pool) t.join();

    // per-n summaries
    std::vector<double> log_n, log_target;
    for (std::size_t ni = 0; ni < n_count; ++ni) {
        PerNSummary s;
        s.n = config.ns[ni];
        std::vector<double> dist, abs_lam1, lam2, abs_lam1_naive, lam2_naive, haus;
        for (int rep = 0; rep < config.reps; ++rep) {
            const RepRecord& r =
                report.records[ni * static_cast<std::size_t>(config.reps) + static_cast<std::size_t>(rep)];
            dist.push_back(r.dist);
            abs_lam1.push_back(std::abs(r.lam1));
            lam2.push_back(r.lam2);
            abs_lam1_naive.push_back(std::abs(r.lam1_naive));
            lam2_naive.push_back(r.lam2_naive);
            haus.push_back(r.hausdorff);
        }
        s.mean_dist = pairwise_sum(dist) / static_cast<double>(dist.size());
        s.median_abs_lam1 = median(abs_lam1);
        s.median_lam2 = median(lam2);
        s.median_abs_lam1_naive = median(abs_lam1_naive);
        s.median_lam2_naive = median(lam2_naive);
        s.median_hausdorff = median(haus);
        report.per_n.push_back(s);

        double target = 0.0;
        if (config.study == "rate") target = s.mean_dist;
        if (config.study == "dichotomy") target = s.median_abs_lam1;
        if (config.study == "tube-rate") target = s.median_hausdorff;
        if (target > 0.0 && std::isfinite(target)) {
            log_n.push_back(std::log(static_cast<double>(s.n)));
            log_target.push_back(std::log(target));
        }
    }

    if (log_n.size() >= 3) {
        const OlsFit fit = ols_line(log_n, log_target);
        report.slope = fit.slope;
        report.slope_stderr = fit.slope_stderr;
    }
    for (std::size_t ni = 0; ni + 1 < n_count; ++ni) {
        if (report.per_n[ni + 1].median_abs_lam1 > 0.0) {
            report.lam1_doubling_ratios.push_back(report.per_n[ni].median_abs_lam1 /
                                                  report.per_n[ni + 1].median_abs_lam1);
        }
    }
    return report;
}

void write_experiment_json(const std::string& path, const ExperimentReport& report) {
    using ordered_json = nlohmann::ordered_json;
    ordered_json j;
    j["study"] = report.config.study;
    j["shape"] = report.config.shape;
    j["sigma"] = report.config.sigma;
    j["degree"] = report.config.degree;
    j["cutoff_const"] = report.config.cutoff_const;
    j["seed"] = report.config.seed;
    j["reps"] = report.config.reps;
    j["ns"] = report.config.ns;

    ordered_json records = ordered_json::array();
    for (const auto& r : report.records) {
        ordered_json rec;
        rec["n"] = r.n;
        rec["rep"] = r.rep;
        rec["k_hat"] = r.k_hat;
        rec["dist"] = r.dist;
        rec["lam1"] = r.lam1;
        rec["lam2"] = r.lam2;
        if (report.config.study == "dichotomy") {
            rec["lam1_naive"] = r.lam1_naive;
            rec["lam2_naive"] = r.lam2_naive;
        }
        if (report.config.study == "tube-rate") {
            rec["hausdorff"] = r.tube_valid ? ordered_json(r.hausdorff) : ordered_json(nullptr);
        }
        records.push_back(std::move(rec));
    }
    j["records"] = std::move(records);

    ordered_json per_n = ordered_json::array();
    for (const auto& s : report.per_n) {
        ordered_json row;
        row["n"] = s.n;
        row["mean_dist"] = s.mean_dist;
        row["median_abs_lam1"] = s.median_abs_lam1;
        row["median_lam2"] = s.median_lam2;
        if (report.config.study == "dichotomy") {
            row["median_abs_lam1_naive"] = s.median_abs_lam1_naive;
            row["median_lam2_naive"] = s.median_lam2_naive;
        }
        if (report.config.study == "tube-rate") {
            row["median_hausdorff"] = std::isfinite(s.median_hausdorff)
                                          ? ordered_json(s.median_hausdorff)
                                          : ordered_json(nullptr);
        }
        per_n.push_back(std::move(row));
    }
    j["summary"]["per_n"] = std::move(per_n);
    j["summary"]["slope"] = report.slope;
    j["summary"]["slope_stderr"] = report.slope_stderr;
    j["summary"]["lam1_doubling_ratios"] = report.lam1_doubling_ratios;

    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open '" + path + "' for writing");
    out << j.dump(2) << "\n";
}

} // namespace algset
