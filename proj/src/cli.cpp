#include "algset/cli.hpp"

#include "algset/metrics.hpp"
#include "algset/model_io.hpp"
#include "algset/pipeline.hpp"
#include "algset/svg.hpp"

#include <CLI11.hpp>

#include <cstdio>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

namespace algset::cli {

namespace {

struct NoiseFlags {
    std::optional<double> sigma;
    std::string cov_file;

    void attach(CLI::App* app, bool* naive = nullptr) {
        auto* s = app->add_option("--sigma", sigma, "noise standard deviation (isotropic)");
        auto* c = app->add_option("--cov", cov_file, "CSV file with the d x d noise covariance");
        s->excludes(c);
        if (naive) {
            app->add_flag("--naive", *naive, "skip debiasing (moment matrix of the raw data)")
                ->excludes(s)
                ->excludes(c);
        }
    }

    std::optional<NoiseModel> resolve(int d) const {
        if (sigma) {
            if (*sigma < 0.0) throw CLI::ValidationError("--sigma", "must be >= 0");
            return NoiseModel::isotropic(d, (*sigma) * (*sigma));
        }
        if (!cov_file.empty()) {
            return NoiseModel::full(read_points_csv(cov_file));
        }
        return std::nullopt;
    }
};

Window2d parse_window(const std::vector<double>& w) {
    if (w.empty()) return Window2d{};
    if (w.size() != 4) throw CLI::ValidationError("--window", "expects x_min,x_max,y_min,y_max");
    if (w[0] >= w[1] || w[2] >= w[3]) throw CLI::ValidationError("--window", "empty window");
    return Window2d{w[0], w[1], w[2], w[3]};
}

int cmd_generate(const std::string& shape_name, Eigen::Index n, const NoiseFlags& noise_flags,
                 std::uint64_t seed, const std::string& output, bool write_latent, bool verbose) {
    const ShapeSpec shape = ShapeSpec::by_name(shape_name);
    const auto noise = noise_flags.resolve(shape.dimension());
    if (!noise) {
        std::cerr << "generate: specify --sigma or --cov\n";
        return kUsage;
    }
    const Dataset data = make_dataset(shape, n, *noise, seed);
    write_points_csv(output, data.observed);
    if (write_latent) write_points_csv(latent_path_for(output), *data.latent);
    DatasetMeta meta{shape.name(), n, *noise, seed, shape.g_star()};
    write_dataset_meta(meta_path_for(output), meta);
    if (verbose) {
        std::cout << "wrote " << n << " observations to " << output << " (seed " << seed << ")\n";
    }
    return kOk;
}

int cmd_fit(const std::string& data_file, int degree, const NoiseFlags& noise_flags, bool naive,
            std::optional<double> cutoff, double cutoff_const, std::uint64_t seed,
            const std::string& output, const std::string& dump_moment, bool verbose) {
    const Eigen::MatrixXd points = read_points_csv(data_file);
    const auto noise = noise_flags.resolve(static_cast<int>(points.cols()));
    if (!noise && !naive) {
        std::cerr << "fit: specify --sigma or --cov, or pass --naive\n";
        return kUsage;
    }

    FitOptions opts;
    opts.degree = degree;
    opts.noise = naive ? std::nullopt : noise;
    opts.cutoff = cutoff;
    opts.cutoff_const = cutoff_const;
    opts.seed = seed;
    const FitModel model = fit_model(points, opts);
    write_model_json(output, model);

    if (!dump_moment.empty()) {
        const MonomialBasis basis = MonomialBasis::build(static_cast<int>(points.cols()), degree);
        const MomentMatrix mm = opts.noise ? debiased_moment_matrix(basis, points, *opts.noise)
                                           : empirical_moment_matrix(basis, points);
        write_matrix_csv(dump_moment, mm.entries);
    }

    std::ostringstream spectrum;
    for (Eigen::Index i = 0; i < model.eigenvalues.size(); ++i) {
        spectrum << (i ? " " : "") << format_double(model.eigenvalues(i));
    }
    std::cout << "eigenvalues: " << spectrum.str() << "\n";
    std::cout << "k_hat: " << model.k_hat << " (cutoff " << format_double(model.cutoff)
              << ", largest relative eigengap suggests " << model.suggested_k << ")\n";
    if (verbose) std::cout << "model written to " << output << "\n";
    return kOk;
}

int cmd_zeros(const std::string& model_file, const std::vector<double>& window_flag, int grid,
              const std::string& output, bool verbose) {
    const FitModel model = read_model_json(model_file);
    if (model.k_hat < 1) {
        std::cerr << "zeros: no vanishing polynomials at cutoff\n";
        return kEmptyResult;
    }
    const Window2d window = parse_window(window_flag);
    const auto points = zero_set_slice_2d(model.system(), window, grid);
    write_set_csv(output, points);
    if (verbose) std::cout << points.size() << " zero-set points written to " << output << "\n";
    return kOk;
}

int cmd_tube(const std::string& model_file, const std::vector<double>& window_flag, int grid,
             std::optional<double> lambda, const std::string& output, bool verbose) {
    const FitModel model = read_model_json(model_file);
    if (model.k_hat < 1) {
        std::cerr << "tube: no vanishing polynomials at cutoff\n";
        return kEmptyResult;
    }
    const Window2d window = parse_window(window_flag);
    const double lam = lambda ? *lambda : default_lambda(static_cast<double>(model.n));
    const auto contours = tube_contour_2d(model.system(), lam, window, grid);
    write_contours_csv(output, contours);
    if (verbose) {
        std::cout << contours.size() << " contour branches (lambda " << format_double(lam)
                  << ") written to " << output << "\n";
    }
    return kOk;
}

int cmd_project(const std::string& model_file, const std::string& structure_flag, int restarts,
                std::uint64_t seed, const std::string& output, const std::string& set_output,
                const std::vector<double>& window_flag, int grid, bool verbose) {
    FitModel model = read_model_json(model_file);

    FactorStructure structure;
    {
        std::stringstream ss(structure_flag);
        std::string tok;
        while (std::getline(ss, tok, ',')) {
            if (!tok.empty()) structure.degrees.push_back(std::stoi(tok));
        }
    }
    if (structure.degrees.size() < 2) {
        std::cerr << "project: structure needs at least two factors (m >= 2)\n";
        return kUsage;
    }
    if (structure.total_degree() != model.g) {
        std::cerr << "project: factor degrees sum to " << structure.total_degree()
                  << " but the model degree is " << model.g << "\n";
        return kUsage;
    }
    if (model.k_hat < 1) {
        std::cerr << "project: no vanishing polynomials at cutoff\n";
        return kEmptyResult;
    }

    ProjectionOptions opts;
    opts.restarts = restarts;
    opts.seed = seed;
    const MonomialBasis basis = model.basis();
    const StructuredSystem structured = structured_system(basis, model.kernel(), structure, opts);

    StructureBlock block;
    block.degrees = structure.degrees;
    block.scale = structured.factorizations.front().scale;
    block.factors = structured.factorizations.front().factors;
    block.residual = structured.factorizations.front().residual;
    block.restarts = restarts;
    block.seed = seed;
    block.system = structured.system.coeffs;
    model.structure = block;
    write_model_json(output, model);

    std::string set_path = set_output;
    if (set_path.empty()) {
        set_path = output;
        if (set_path.size() > 5 && set_path.rfind(".json") == set_path.size() - 5) {
            set_path.resize(set_path.size() - 5);
        }
        set_path += ".set.csv";
    }
    // the structure prior assumes a single generating polynomial, so the
    // factored set is the zero locus of the first (smallest-eigenvalue)
    // projected member even when the cutoff retained more vectors
    const PolynomialSystem factored_set{basis, {structured.system.coeffs.front()}};
    const auto points = zero_set_slice_2d(factored_set, parse_window(window_flag), grid);
    write_set_csv(set_path, points);

    if (verbose) {
        std::cout << "projection residual " << format_double(block.residual) << ", factored set in "
                  << set_path << "\n";
    }
    return kOk;
}

int cmd_experiment(const ExperimentConfig& config, const std::string& output, bool verbose) {
    const ExperimentReport report = run_experiment(config);
    write_experiment_json(output, report);
    if (verbose) {
        std::cout << config.study << " study: slope " << format_double(report.slope) << " (se "
                  << format_double(report.slope_stderr) << ") written to " << output << "\n";
    }
    return kOk;
}

int cmd_plot(const std::string& data_file, const std::vector<std::string>& set_files,
             const std::string& style, const std::string& latent_file, const std::string& output,
             bool deterministic) {
    SvgFigure figure;
    figure.set_deterministic(deterministic);

    if (!latent_file.empty()) {
        figure.add_scatter(read_points_csv(latent_file), SvgFigure::kGreen, "latent");
    }
    figure.add_scatter(read_points_csv(data_file), SvgFigure::kBlack, "data");

    const char* palette[] = {SvgFigure::kBlue, SvgFigure::kRed, SvgFigure::kPurple,
                             SvgFigure::kOrange};
    const char* names[] = {"estimate", "naive", "tube", "extra"};
    int slot = style == "tube" ? 2 : 0;
    for (const auto& file : set_files) {
        const SetCsv set = read_set_csv(file);
        if (set.points.empty()) {
            std::cerr << "plot: warning: '" << file << "' has no points, skipping layer\n";
            continue;
        }
        const char* color = palette[std::min(slot, 3)];
        const char* label = names[std::min(slot, 3)];
        if (!set.branch.empty()) {
            // branch column: group into polylines
            std::vector<Polyline> lines;
            for (std::size_t i = 0; i < set.points.size(); ++i) {
                if (lines.empty() || (i > 0 && set.branch[i] != set.branch[i - 1])) {
                    lines.push_back(Polyline{});
                }
                lines.back().points.push_back(set.points[i]);
            }
            for (auto& line : lines) {
                line.closed = line.points.size() > 2 &&
                              (line.points.front() - line.points.back()).norm() < 1e-12;
            }
            if (style == "tube") {
                figure.add_region(lines, color, label);
            } else {
                figure.add_curves(lines, color, label);
            }
        } else if (style == "scatter" || style == "curve") {
            figure.add_point_set(set.points, color, label);
        } else {
            figure.add_point_set(set.points, color, label);
        }
        ++slot;
    }

    figure.write(output);
    return kOk;
}

} // namespace

int run(int argc, const char* const* argv) {
    CLI::App app{"estimation of algebraic sets from noisy samples"};
    app.require_subcommand(1);
    app.fallthrough(); // global flags may appear after the subcommand

    bool verbose = false;
    app.add_flag("-v,--verbose", verbose, "chatty output");

    // generate
    auto* generate = app.add_subcommand("generate", "sample a shape and add Gaussian noise");
    std::string gen_shape = "circle";
    Eigen::Index gen_n = 600;
    std::uint64_t gen_seed = 1;
    std::string gen_out = "data.csv";
    bool gen_latent = true;
    NoiseFlags gen_noise;
    generate->add_option("--shape", gen_shape, "circle|cross|three_lines|concentric|line");
    generate->add_option("--n", gen_n, "sample size")->check(CLI::PositiveNumber);
    gen_noise.attach(generate);
    generate->add_option("--seed", gen_seed, "RNG seed");
    generate->add_option("-o,--output", gen_out, "observed CSV path");
    generate->add_flag("--latent,!--no-latent", gen_latent, "write the latent sibling CSV");

    // fit
    auto* fit = app.add_subcommand("fit", "debiased moment matrix and kernel extraction");
    std::string fit_data;
    int fit_degree = 2;
    bool fit_naive = false;
    std::optional<double> fit_cutoff;
    double fit_cutoff_const = kPipelineCutoffConst;
    std::uint64_t fit_seed = 0;
    std::string fit_out = "model.json";
    std::string fit_dump_moment;
    NoiseFlags fit_noise;
    fit->add_option("data", fit_data, "observations CSV")->required();
    fit->add_option("--degree", fit_degree, "degree g of the fitted polynomials")
        ->check(CLI::PositiveNumber);
    fit_noise.attach(fit, &fit_naive);
    fit->add_option("--cutoff", fit_cutoff, "explicit eigenvalue cutoff r_n");
    fit->add_option("--cutoff-const", fit_cutoff_const, "constant c in r_n = c n^(-1/4)");
    fit->add_option("--seed", fit_seed, "seed echoed into the model");
    fit->add_option("-o,--output", fit_out, "model JSON path");
    fit->add_option("--dump-moment", fit_dump_moment, "also dump the moment matrix as CSV");

    // zeros
    auto* zeros = app.add_subcommand("zeros", "zero set of the fitted polynomials (d = 2)");
    std::string zeros_model;
    std::vector<double> zeros_window;
    int zeros_grid = 400;
    std::string zeros_out = "set.csv";
    zeros->add_option("model", zeros_model, "model JSON")->required();
    zeros->add_option("--window", zeros_window, "x_min,x_max,y_min,y_max")->delimiter(',');
    zeros->add_option("--grid", zeros_grid, "slice count per axis")->check(CLI::PositiveNumber);
    zeros->add_option("-o,--output", zeros_out, "zero-set CSV path");

    // tube
    auto* tube = app.add_subcommand("tube", "semi-algebraic tube contour (d = 2)");
    std::string tube_model;
    std::vector<double> tube_window;
    int tube_grid = 400;
    std::optional<double> tube_lambda;
    bool tube_lambda_default = false;
    std::string tube_out = "tube.csv";
    tube->add_option("model", tube_model, "model JSON")->required();
    tube->add_option("--window", tube_window, "x_min,x_max,y_min,y_max")->delimiter(',');
    tube->add_option("--grid", tube_grid, "contour grid resolution")->check(CLI::PositiveNumber);
    auto* lam_opt = tube->add_option("--lambda", tube_lambda, "tube half-width");
    tube->add_flag("--lambda-default", tube_lambda_default, "use (log n)/sqrt(n) from the model")
        ->excludes(lam_opt);
    tube->add_option("-o,--output", tube_out, "contour CSV path (x,y,branch)");

    // project
    auto* project = app.add_subcommand("project", "structure-aware factorized projection");
    std::string proj_model;
    std::string proj_structure;
    int proj_restarts = 20;
    std::uint64_t proj_seed = 1;
    std::string proj_out = "model.json";
    std::string proj_set_out;
    std::vector<double> proj_window;
    int proj_grid = 400;
    project->add_option("model", proj_model, "model JSON")->required();
    project->add_option("--structure", proj_structure, "factor degrees, e.g. 1,1 or 2,2")
        ->required();
    project->add_option("--restarts", proj_restarts, "random restarts")->check(CLI::PositiveNumber);
    project->add_option("--seed", proj_seed, "RNG seed for the restarts");
    project->add_option("-o,--output", proj_out, "output model JSON (structure block appended)");
    project->add_option("--set-out", proj_set_out, "factored zero-set CSV (default <output>.set.csv)");
    project->add_option("--window", proj_window, "x_min,x_max,y_min,y_max")->delimiter(',');
    project->add_option("--grid", proj_grid, "slice count per axis")->check(CLI::PositiveNumber);

    // experiment
    auto* experiment = app.add_subcommand("experiment", "Monte Carlo studies over sample sizes");
    ExperimentConfig exp_config;
    std::string exp_out = "report.json";
    experiment->add_option("--study", exp_config.study, "rate|dichotomy|tube-rate")->required();
    experiment->add_option("--shape", exp_config.shape, "shape name");
    experiment->add_option("--sigma", exp_config.sigma, "noise standard deviation");
    experiment->add_option("--ns", exp_config.ns, "sample sizes")->delimiter(',');
    experiment->add_option("--reps", exp_config.reps, "replicates per sample size")
        ->check(CLI::PositiveNumber);
    experiment->add_option("--seed", exp_config.seed, "base seed (per-rep seeds are seed XOR rep)");
    experiment->add_option("--degree", exp_config.degree, "fit degree (default: the shape's g*)");
    experiment->add_option("--cutoff-const", exp_config.cutoff_const, "cutoff constant c");
    experiment->add_option("--grid", exp_config.tube_grid, "tube sampling grid (tube-rate study)");
    experiment->add_option("--threads", exp_config.threads, "worker pool cap (or ALGSET_THREADS)");
    experiment->add_option("-o,--output", exp_out, "report JSON path");

    // plot
    auto* plot = app.add_subcommand("plot", "static SVG figure");
    std::string plot_data;
    std::vector<std::string> plot_sets;
    std::string plot_style = "curve";
    std::string plot_latent;
    std::string plot_out = "figure.svg";
    bool plot_deterministic = false;
    plot->add_option("data", plot_data, "observations CSV")->required();
    plot->add_option("sets", plot_sets, "estimated set CSVs");
    plot->add_option("--style", plot_style, "scatter|curve|tube")
        ->check(CLI::IsMember({"scatter", "curve", "tube"}));
    plot->add_option("--latent", plot_latent, "latent CSV overlay");
    plot->add_option("-o,--output", plot_out, "SVG path");
    plot->add_flag("--deterministic", plot_deterministic, "suppress the timestamp comment");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kOk : kUsage;
    }

    try {
        if (generate->parsed()) {
            return cmd_generate(gen_shape, gen_n, gen_noise, gen_seed, gen_out, gen_latent, verbose);
        }
        if (fit->parsed()) {
            return cmd_fit(fit_data, fit_degree, fit_noise, fit_naive, fit_cutoff, fit_cutoff_const,
                           fit_seed, fit_out, fit_dump_moment, verbose);
        }
        if (zeros->parsed()) return cmd_zeros(zeros_model, zeros_window, zeros_grid, zeros_out, verbose);
        if (tube->parsed()) {
            return cmd_tube(tube_model, tube_window, tube_grid, tube_lambda, tube_out, verbose);
        }
        if (project->parsed()) {
            return cmd_project(proj_model, proj_structure, proj_restarts, proj_seed, proj_out,
                               proj_set_out, proj_window, proj_grid, verbose);
        }
        if (experiment->parsed()) return cmd_experiment(exp_config, exp_out, verbose);
        if (plot->parsed()) {
            return cmd_plot(plot_data, plot_sets, plot_style, plot_latent, plot_out,
                            plot_deterministic);
        }
    } catch (const CLI::Error& e) {
        std::cerr << e.what() << "\n";
        return kUsage;
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kUsage;
    } catch (const std::exception& e) {
        std::cerr << "numerical failure: " << e.what() << "\n";
        return kNumericFailure;
    }
    return kUsage;
}

} // namespace algset::cli
