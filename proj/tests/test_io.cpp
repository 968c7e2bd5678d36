#include "algset/model_io.hpp"
#include "algset/pipeline.hpp"
#include "algset/synth.hpp"

#include <doctest.h>
#include <nlohmann/json.hpp>

#include <cstdlib>
#include <fstream>
#include <sstream>
#include <string>

using namespace algset;

namespace {

const std::string tmpdir = ALGSET_TEST_TMPDIR;
const std::string cli = ALGSET_CLI_PATH;

std::string slurp(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    REQUIRE(in);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

int run_cli(const std::string& args) {
    const std::string cmd = cli + " " + args + " >/dev/null 2>&1";
    const int status = std::system(cmd.c_str());
    return WEXITSTATUS(status);
}

// headerless numeric CSV (the moment-matrix dump format)
Eigen::MatrixXd read_matrix_csv_for_test(const std::string& path) {
    std::ifstream in(path);
    REQUIRE(in);
    std::vector<std::vector<double>> rows;
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::vector<double> row;
        std::stringstream ss(line);
        std::string tok;
        while (std::getline(ss, tok, ',')) row.push_back(std::stod(tok));
        rows.push_back(std::move(row));
    }
    Eigen::MatrixXd m(rows.size(), rows.empty() ? 0 : rows[0].size());
    for (std::size_t r = 0; r < rows.size(); ++r)
        for (std::size_t c = 0; c < rows[r].size(); ++c)
            m(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = rows[r][c];
    return m;
}

} // namespace

TEST_SUITE("properties") {

TEST_CASE("points CSV round trip is exact") {
    const auto pts = sample_latent(ShapeSpec::circle(), 50, 3);
    const std::string path = tmpdir + "/roundtrip.csv";
    write_points_csv(path, pts);
    const Eigen::MatrixXd back = read_points_csv(path);
    CHECK((back - pts).cwiseAbs().maxCoeff() == 0.0);

    const std::string path2 = tmpdir + "/roundtrip2.csv";
    write_points_csv(path2, back);
    CHECK(slurp(path) == slurp(path2));
}

TEST_CASE("model JSON round trip preserves the basis order and coefficients") {
    const auto noise = NoiseModel::isotropic(2, 0.16);
    const Dataset data = make_dataset(ShapeSpec::circle(), 300, noise, 21);
    FitOptions opts;
    opts.degree = 2;
    opts.noise = noise;
    opts.seed = 21;
    const FitModel model = fit_model(data.observed, opts);

    const std::string path = tmpdir + "/model.json";
    write_model_json(path, model);
    const FitModel back = read_model_json(path);

    CHECK(back.d == model.d);
    CHECK(back.g == model.g);
    CHECK(back.n == model.n);
    CHECK(back.seed == model.seed);
    CHECK(back.basis_order == model.basis_order);
    CHECK(back.k_hat == model.k_hat);
    CHECK((back.eigenvalues - model.eigenvalues).cwiseAbs().maxCoeff() == 0.0);
    REQUIRE(back.coefficients.size() == model.coefficients.size());
    for (std::size_t i = 0; i < back.coefficients.size(); ++i) {
        CHECK((back.coefficients[i] - model.coefficients[i]).cwiseAbs().maxCoeff() == 0.0);
    }
    CHECK(back.basis() == model.basis());

    // serialized twice, identical bytes
    const std::string path2 = tmpdir + "/model2.json";
    write_model_json(path2, back);
    CHECK(slurp(path) == slurp(path2));
}

} // TEST_SUITE

TEST_CASE("dataset meta round trip") {
    const std::string path = tmpdir + "/meta.json";
    DatasetMeta meta{"circle", 600, NoiseModel::isotropic(2, 0.16), 9, 2};
    write_dataset_meta(path, meta);
    const DatasetMeta back = read_dataset_meta(path);
    CHECK(back.shape == "circle");
    CHECK(back.n == 600);
    CHECK(back.seed == 9);
    CHECK(back.g_star == 2);
    REQUIRE(back.noise.has_value());
    CHECK(back.noise->variance(0) == 0.16);
}

TEST_CASE("metric JSON records carry the quadrature metadata") {
    const std::string path = tmpdir + "/metric.json";
    write_metric_json(path, "pk_distance", 0.25, 5.0, 256, 0.0809);
    const std::string body = slurp(path);
    CHECK(body.find("\"metric\": \"pk_distance\"") != std::string::npos);
    CHECK(body.find("\"value\"") != std::string::npos);
    CHECK(body.find("\"T\"") != std::string::npos);
    CHECK(body.find("\"nodes\"") != std::string::npos);
    CHECK(body.find("\"tail_bound\"") != std::string::npos);
}

TEST_CASE("contour CSV round trip keeps branch structure") {
    std::vector<Polyline> lines(2);
    lines[0].points = {{0.0, 0.0}, {1.0, 0.5}, {2.0, 1.0}};
    lines[1].points = {{-1.0, -1.0}, {-2.0, -0.5}};
    const std::string path = tmpdir + "/contours.csv";
    write_contours_csv(path, lines);
    const SetCsv set = read_set_csv(path);
    REQUIRE(set.points.size() == 5);
    REQUIRE(set.branch.size() == 5);
    CHECK(set.branch[2] == 0);
    CHECK(set.branch[3] == 1);
}

TEST_SUITE("cli") {

TEST_CASE("generate is byte-deterministic and honors sigma = 0") {
    const std::string out1 = tmpdir + "/gen1.csv";
    const std::string out2 = tmpdir + "/gen2.csv";
    REQUIRE(run_cli("generate --shape circle --n 100 --sigma 0.4 --seed 1 -o " + out1) == 0);
    REQUIRE(run_cli("generate --shape circle --n 100 --sigma 0.4 --seed 1 -o " + out2) == 0);
    CHECK(slurp(out1) == slurp(out2));
    CHECK(slurp(latent_path_for(out1)) == slurp(latent_path_for(out2)));
    CHECK(slurp(meta_path_for(out1)) == slurp(meta_path_for(out2)));

    const std::string zero = tmpdir + "/gen0.csv";
    REQUIRE(run_cli("generate --shape circle --n 50 --sigma 0 --seed 2 -o " + zero) == 0);
    CHECK(slurp(zero) == slurp(latent_path_for(zero)));
}

TEST_CASE("unknown shape exits with the usage code") {
    CHECK(run_cli("generate --shape klein_bottle --n 10 --sigma 0.1 -o " + tmpdir + "/x.csv") == 2);
}

TEST_CASE("fit requires a noise model unless naive") {
    const std::string data = tmpdir + "/fitdata.csv";
    REQUIRE(run_cli("generate --shape circle --n 200 --sigma 0.4 --seed 3 -o " + data) == 0);
    CHECK(run_cli("fit " + data + " --degree 2 -o " + tmpdir + "/m.json") == 2);
    CHECK(run_cli("fit " + data + " --degree 2 --naive -o " + tmpdir + "/m_naive.json") == 0);
    CHECK(run_cli("fit " + data + " --degree 2 --sigma 0.4 -o " + tmpdir + "/m.json") == 0);
}

TEST_CASE("fit -> zeros round trip uses the stored model") {
    const std::string data = tmpdir + "/pipe.csv";
    const std::string model = tmpdir + "/pipe.json";
    const std::string set1 = tmpdir + "/pipe_set1.csv";
    const std::string set2 = tmpdir + "/pipe_set2.csv";
    REQUIRE(run_cli("generate --shape circle --n 600 --sigma 0.4 --seed 1 -o " + data) == 0);
    REQUIRE(run_cli("fit " + data + " --degree 2 --sigma 0.4 -o " + model) == 0);
    REQUIRE(run_cli("zeros " + model + " --window -2,2,-2,2 --grid 120 -o " + set1) == 0);
    REQUIRE(run_cli("zeros " + model + " --window -2,2,-2,2 --grid 120 -o " + set2) == 0);
    CHECK(slurp(set1) == slurp(set2));

    const FitModel m = read_model_json(model);
    CHECK(m.k_hat >= 1);
    const SetCsv set = read_set_csv(set1);
    CHECK(set.points.size() > 50);
    // estimated circle: all points near the unit circle at this n/sigma
    for (const auto& p : set.points) {
        CHECK(std::abs(p.norm() - 1.0) <= 0.05);
    }
}

TEST_CASE("zeros on an empty-kernel model exits with the empty-result code") {
    const std::string data = tmpdir + "/empty.csv";
    const std::string model = tmpdir + "/empty.json";
    REQUIRE(run_cli("generate --shape circle --n 400 --sigma 0.4 --seed 4 -o " + data) == 0);
    // naive fit at this noise level retains nothing under the default cutoff
    REQUIRE(run_cli("fit " + data + " --degree 2 --naive -o " + model) == 0);
    const FitModel m = read_model_json(model);
    REQUIRE(m.k_hat == 0);
    CHECK(run_cli("zeros " + model + " -o " + tmpdir + "/never.csv") == 3);
}

TEST_CASE("coarse zero set lies inside a 3-pixel dilation of the fine set") {
    const std::string data = tmpdir + "/grid.csv";
    const std::string model = tmpdir + "/grid.json";
    const std::string coarse_path = tmpdir + "/grid_coarse.csv";
    const std::string fine_path = tmpdir + "/grid_fine.csv";
    REQUIRE(run_cli("generate --shape circle --n 600 --sigma 0.4 --seed 5 -o " + data) == 0);
    REQUIRE(run_cli("fit " + data + " --degree 2 --sigma 0.4 -o " + model) == 0);
    REQUIRE(run_cli("zeros " + model + " --window -2,2,-2,2 --grid 50 -o " + coarse_path) == 0);
    REQUIRE(run_cli("zeros " + model + " --window -2,2,-2,2 --grid 400 -o " + fine_path) == 0);
    const SetCsv coarse = read_set_csv(coarse_path);
    const SetCsv fine = read_set_csv(fine_path);
    REQUIRE_FALSE(coarse.points.empty());
    REQUIRE_FALSE(fine.points.empty());
    const double pixel = 4.0 / 400.0;
    for (const auto& p : coarse.points) {
        double best = std::numeric_limits<double>::infinity();
        for (const auto& q : fine.points) best = std::min(best, (p - q).norm());
        CHECK(best <= 3.0 * pixel);
    }
}

TEST_CASE("tube and project commands produce usable artifacts") {
    const std::string data = tmpdir + "/cross.csv";
    const std::string model = tmpdir + "/cross.json";
    const std::string tube = tmpdir + "/cross_tube.csv";
    const std::string projected = tmpdir + "/cross_proj.json";
    REQUIRE(run_cli("generate --shape cross --n 600 --sigma 0.4 --seed 1 -o " + data) == 0);
    // cross data scale needs the larger cutoff constant
    REQUIRE(run_cli("fit " + data + " --degree 2 --sigma 0.4 --cutoff-const 1 -o " + model) == 0);
    REQUIRE(run_cli("tube " + model + " --grid 200 --lambda-default -o " + tube) == 0);
    const SetCsv contours = read_set_csv(tube);
    CHECK(contours.points.size() > 20);
    REQUIRE_FALSE(contours.branch.empty());

    REQUIRE(run_cli("project " + model + " --structure 1,1 --restarts 10 --seed 2 -o " +
                    projected) == 0);
    const FitModel m = read_model_json(projected);
    REQUIRE(m.structure.has_value());
    CHECK(m.structure->degrees == std::vector<int>{1, 1});
    CHECK(m.structure->factors.size() == 2);
    CHECK(m.structure->system.size() >= 1);

    // structure degrees must sum to the model degree
    CHECK(run_cli("project " + model + " --structure 1,2 -o " + tmpdir + "/bad.json") == 2);
    CHECK(run_cli("project " + model + " --structure 2 -o " + tmpdir + "/bad.json") == 2);
}

TEST_CASE("experiment reports are deterministic and schedule-independent") {
    const std::string r1 = tmpdir + "/exp1.json";
    const std::string r2 = tmpdir + "/exp2.json";
    const std::string flags =
        " --study rate --shape circle --sigma 0.4 --ns 200,400,800 --reps 4 --seed 11 -o ";
    // different worker-pool sizes must not change a single byte
    const int s1 = std::system(("ALGSET_THREADS=1 " + cli + " experiment" + flags + r1 +
                                " >/dev/null 2>&1").c_str());
    const int s2 = std::system(("ALGSET_THREADS=4 " + cli + " experiment" + flags + r2 +
                                " >/dev/null 2>&1").c_str());
    REQUIRE(WEXITSTATUS(s1) == 0);
    REQUIRE(WEXITSTATUS(s2) == 0);
    CHECK(slurp(r1) == slurp(r2));
    const std::string body = slurp(r1);
    CHECK(body.find("\"slope\"") != std::string::npos);
    CHECK(body.find("\"slope_stderr\"") != std::string::npos);
    CHECK(body.find("\"records\"") != std::string::npos);
}

TEST_CASE("dichotomy study separates the naive and debiased spectra") {
    const std::string out = tmpdir + "/dicho.json";
    REQUIRE(run_cli("experiment --study dichotomy --shape circle --sigma 0.4 --ns 500,4000 "
                    "--reps 6 --seed 3 -o " + out) == 0);
    // lam1 column shrinks while the naive lam1 and lam2 columns hold still
    std::ifstream in(out);
    REQUIRE(in);
    nlohmann::json j = nlohmann::json::parse(in);
    const auto& per_n = j["summary"]["per_n"];
    REQUIRE(per_n.size() == 2);
    const double lam1_small = per_n[0]["median_abs_lam1"].get<double>();
    const double lam1_big = per_n[1]["median_abs_lam1"].get<double>();
    CHECK(lam1_big < lam1_small);
    const double naive_small = per_n[0]["median_abs_lam1_naive"].get<double>();
    const double naive_big = per_n[1]["median_abs_lam1_naive"].get<double>();
    CHECK(naive_big > 0.5 * naive_small);
    const double lam2_small = per_n[0]["median_lam2"].get<double>();
    const double lam2_big = per_n[1]["median_lam2"].get<double>();
    CHECK(std::abs(lam2_big - lam2_small) < 0.25 * lam2_small);
}

TEST_CASE("fit on exact latent data with zero noise exposes the kernel") {
    const std::string data = tmpdir + "/exact.csv";
    const std::string model = tmpdir + "/exact.json";
    REQUIRE(run_cli("generate --shape circle --n 200 --sigma 0 --seed 8 -o " + data) == 0);
    REQUIRE(run_cli("fit " + data + " --degree 2 --sigma 0 -o " + model) == 0);
    const FitModel m = read_model_json(model);
    CHECK(m.eigenvalues(0) <= 1e-10);
    CHECK(m.k_hat >= 1);
}

TEST_CASE("generate supports every built-in shape") {
    for (const std::string shape : {"circle", "cross", "three_lines", "concentric", "line"}) {
        const std::string out = tmpdir + "/shape_" + shape + ".csv";
        REQUIRE(run_cli("generate --shape " + shape + " --n 120 --sigma 0.4 --seed 4 -o " + out) ==
                0);
        CHECK(read_points_csv(out).rows() == 120);
        const DatasetMeta meta = read_dataset_meta(meta_path_for(out));
        CHECK(meta.shape == shape);
        CHECK(meta.g_star >= 1);
    }
}

TEST_CASE("fit can dump the moment matrix for debugging") {
    const std::string data = tmpdir + "/dump.csv";
    const std::string model = tmpdir + "/dump.json";
    const std::string mm = tmpdir + "/dump_moment.csv";
    REQUIRE(run_cli("generate --shape circle --n 100 --sigma 0.4 --seed 9 -o " + data) == 0);
    REQUIRE(run_cli("fit " + data + " --degree 2 --sigma 0.4 --dump-moment " + mm + " -o " +
                    model) == 0);
    const Eigen::MatrixXd dumped = read_matrix_csv_for_test(mm);
    CHECK(dumped.rows() == 6);
    CHECK(dumped.cols() == 6);
    CHECK((dumped - dumped.transpose()).cwiseAbs().maxCoeff() == 0.0);
    CHECK(dumped(0, 0) == 1.0);
}

TEST_CASE("plot emits scatter marks and curves") {
    const std::string data = tmpdir + "/plotdata.csv";
    const std::string model = tmpdir + "/plotmodel.json";
    const std::string set = tmpdir + "/plotset.csv";
    const std::string svg = tmpdir + "/figure.svg";
    REQUIRE(run_cli("generate --shape circle --n 80 --sigma 0.4 --seed 6 -o " + data) == 0);
    REQUIRE(run_cli("fit " + data + " --degree 2 --sigma 0.4 -o " + model) == 0);
    REQUIRE(run_cli("zeros " + model + " --window -2,2,-2,2 --grid 100 -o " + set) == 0);
    REQUIRE(run_cli("plot " + data + " " + set + " --latent " + latent_path_for(data) +
                    " --style curve --deterministic -o " + svg) == 0);
    const std::string body = slurp(svg);
    CHECK(body.find("<svg") != std::string::npos);
    std::size_t circles = 0;
    for (std::size_t pos = body.find("<circle"); pos != std::string::npos;
         pos = body.find("<circle", pos + 1)) {
        ++circles;
    }
    CHECK(circles >= 160); // 80 observations + 80 latent points

    // deterministic SVG: identical bytes on rerun
    const std::string svg2 = tmpdir + "/figure2.svg";
    REQUIRE(run_cli("plot " + data + " " + set + " --latent " + latent_path_for(data) +
                    " --style curve --deterministic -o " + svg2) == 0);
    CHECK(slurp(svg) == slurp(svg2));

    // an empty set layer degrades to scatter-only with exit 0
    const std::string empty_set = tmpdir + "/emptyset.csv";
    {
        std::ofstream out(empty_set);
        out << "x,y\n";
    }
    CHECK(run_cli("plot " + data + " " + empty_set + " --deterministic -o " + tmpdir +
                  "/figure3.svg") == 0);

    // malformed CSV is a usage error
    const std::string broken = tmpdir + "/broken.csv";
    {
        std::ofstream out(broken);
        out << "x,y\n1.0\n";
    }
    CHECK(run_cli("plot " + broken + " --deterministic -o " + tmpdir + "/figure4.svg") == 2);
}

TEST_CASE("tube style renders a filled region") {
    const std::string data = tmpdir + "/tubeplot.csv";
    const std::string model = tmpdir + "/tubeplot.json";
    const std::string tube = tmpdir + "/tubeplot_set.csv";
    const std::string svg = tmpdir + "/tubeplot.svg";
    REQUIRE(run_cli("generate --shape cross --n 600 --sigma 0.4 --seed 2 -o " + data) == 0);
    REQUIRE(run_cli("fit " + data + " --degree 2 --sigma 0.4 --cutoff-const 1 -o " + model) == 0);
    REQUIRE(run_cli("tube " + model + " --grid 150 --lambda-default -o " + tube) == 0);
    REQUIRE(run_cli("plot " + data + " " + tube + " --style tube --deterministic -o " + svg) == 0);
    const std::string body = slurp(svg);
    CHECK(body.find("<path fill=") != std::string::npos);
}

} // TEST_SUITE
