#include "algset/model_io.hpp"

#include <nlohmann/json.hpp>

#include <charconv>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace algset {

using ordered_json = nlohmann::ordered_json;

std::string format_double(double v) {
    char buf[40];
    const auto res = std::to_chars(buf, buf + sizeof(buf), v);
    return {buf, res.ptr};
}

namespace {

double parse_double(std::string_view token) {
    double v = 0.0;
    const auto res = std::from_chars(token.data(), token.data() + token.size(), v);
    if (res.ec != std::errc()) {
        throw std::invalid_argument("CSV: cannot parse number '" + std::string(token) + "'");
    }
    return v;
}

std::ofstream open_out(const std::string& path) {
    std::ofstream out(path, std::ios::binary); // binary: LF line endings everywhere
    if (!out) throw std::invalid_argument("cannot open '" + path + "' for writing");
    return out;
}

std::ifstream open_in(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::invalid_argument("cannot open '" + path + "' for reading");
    return in;
}

std::vector<std::string_view> split(std::string_view line, char sep) {
    std::vector<std::string_view> out;
    std::size_t start = 0;
    while (true) {
        const std::size_t pos = line.find(sep, start);
        if (pos == std::string_view::npos) {
            out.push_back(line.substr(start));
            break;
        }
        out.push_back(line.substr(start, pos - start));
        start = pos + 1;
    }
    return out;
}

ordered_json noise_to_json(const NoiseModel& noise) {
    ordered_json j;
    switch (noise.kind()) {
        case NoiseModel::Kind::Isotropic:
            j["kind"] = "isotropic";
            j["sigma2"] = noise.variance(0);
            break;
        case NoiseModel::Kind::Diagonal: {
            j["kind"] = "diagonal";
            std::vector<double> v;
            for (int i = 0; i < noise.dimension(); ++i) v.push_back(noise.variance(i));
            j["sigma2"] = v;
            break;
        }
        case NoiseModel::Kind::Full: {
            j["kind"] = "full";
            std::vector<std::vector<double>> rows;
            const auto& cov = noise.covariance();
            for (Eigen::Index r = 0; r < cov.rows(); ++r) {
                std::vector<double> row;
                for (Eigen::Index c = 0; c < cov.cols(); ++c) row.push_back(cov(r, c));
                rows.push_back(std::move(row));
            }
            j["cov"] = rows;
            break;
        }
    }
    return j;
}

NoiseModel noise_from_json(const ordered_json& j, int d) {
    const std::string kind = j.at("kind").get<std::string>();
    if (kind == "isotropic") return NoiseModel::isotropic(d, j.at("sigma2").get<double>());
    if (kind == "diagonal") {
        const auto v = j.at("sigma2").get<std::vector<double>>();
        return NoiseModel::diagonal(Eigen::Map<const Eigen::VectorXd>(v.data(),
                                                                      static_cast<Eigen::Index>(v.size())));
    }
    if (kind == "full") {
        const auto rows = j.at("cov").get<std::vector<std::vector<double>>>();
        Eigen::MatrixXd cov(rows.size(), rows.empty() ? 0 : rows.front().size());
        for (std::size_t r = 0; r < rows.size(); ++r) {
            for (std::size_t c = 0; c < rows[r].size(); ++c) {
                cov(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = rows[r][c];
            }
        }
        return NoiseModel::full(cov);
    }
    throw std::invalid_argument("unknown noise kind '" + kind + "'");
}

std::vector<double> to_std(const Eigen::VectorXd& v) {
    return {v.data(), v.data() + v.size()};
}

Eigen::VectorXd to_eigen(const std::vector<double>& v) {
    return Eigen::Map<const Eigen::VectorXd>(v.data(), static_cast<Eigen::Index>(v.size()));
}

void dump_json(const std::string& path, const ordered_json& j) {
    auto out = open_out(path);
    out << j.dump(2) << "\n";
}

ordered_json load_json(const std::string& path) {
    auto in = open_in(path);
    try {
        return ordered_json::parse(in);
    } catch (const ordered_json::exception& e) {
        throw std::invalid_argument("cannot parse '" + path + "': " + e.what());
    }
}

} // namespace

void write_points_csv(const std::string& path, const Eigen::MatrixXd& points) {
    auto out = open_out(path);
    for (Eigen::Index c = 0; c < points.cols(); ++c) {
        out << (c ? "," : "") << "x" << (c + 1);
    }
    out << "\n";
    for (Eigen::Index r = 0; r < points.rows(); ++r) {
        for (Eigen::Index c = 0; c < points.cols(); ++c) {
            out << (c ? "," : "") << format_double(points(r, c));
        }
        out << "\n";
    }
}

Eigen::MatrixXd read_points_csv(const std::string& path) {
    auto in = open_in(path);
    std::string line;
    if (!std::getline(in, line)) throw std::invalid_argument("CSV '" + path + "': missing header");
    const std::size_t cols = split(line, ',').size();
    std::vector<double> values;
    std::size_t rows = 0;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        const auto tokens = split(line, ',');
        if (tokens.size() != cols) {
            throw std::invalid_argument("CSV '" + path + "': inconsistent column count");
        }
        for (const auto& t : tokens) values.push_back(parse_double(t));
        ++rows;
    }
    Eigen::MatrixXd m(rows, cols);
    for (std::size_t r = 0; r < rows; ++r) {
        for (std::size_t c = 0; c < cols; ++c) {
            m(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = values[r * cols + c];
        }
    }
    return m;
}

void write_set_csv(const std::string& path, const std::vector<Eigen::Vector2d>& points) {
    auto out = open_out(path);
    out << "x,y\n";
    for (const auto& p : points) {
        out << format_double(p.x()) << "," << format_double(p.y()) << "\n";
    }
}

void write_contours_csv(const std::string& path, const std::vector<Polyline>& polylines) {
    auto out = open_out(path);
    out << "x,y,branch\n";
    for (std::size_t b = 0; b < polylines.size(); ++b) {
        for (const auto& p : polylines[b].points) {
            out << format_double(p.x()) << "," << format_double(p.y()) << "," << b << "\n";
        }
    }
}

SetCsv read_set_csv(const std::string& path) {
    auto in = open_in(path);
    std::string line;
    if (!std::getline(in, line)) throw std::invalid_argument("CSV '" + path + "': missing header");
    const bool has_branch = split(line, ',').size() >= 3;
    SetCsv set;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        const auto tokens = split(line, ',');
        if (tokens.size() < 2) throw std::invalid_argument("CSV '" + path + "': malformed row");
        set.points.emplace_back(parse_double(tokens[0]), parse_double(tokens[1]));
        if (has_branch && tokens.size() >= 3) {
            set.branch.push_back(static_cast<int>(parse_double(tokens[2])));
        }
    }
    return set;
}

void write_matrix_csv(const std::string& path, const Eigen::MatrixXd& m) {
    auto out = open_out(path);
    for (Eigen::Index r = 0; r < m.rows(); ++r) {
        for (Eigen::Index c = 0; c < m.cols(); ++c) {
            out << (c ? "," : "") << format_double(m(r, c));
        }
        out << "\n";
    }
}

std::string latent_path_for(const std::string& data_path) {
    const std::size_t pos = data_path.rfind(".csv");
    const std::string stem =
        (pos != std::string::npos && pos == data_path.size() - 4) ? data_path.substr(0, pos)
                                                                  : data_path;
    return stem + ".latent.csv";
}

std::string meta_path_for(const std::string& data_path) {
    const std::size_t pos = data_path.rfind(".csv");
    const std::string stem =
        (pos != std::string::npos && pos == data_path.size() - 4) ? data_path.substr(0, pos)
                                                                  : data_path;
    return stem + ".meta.json";
}

void write_dataset_meta(const std::string& path, const DatasetMeta& meta) {
    ordered_json j;
    j["shape"] = meta.shape;
    j["n"] = meta.n;
    j["noise"] = meta.noise ? noise_to_json(*meta.noise) : ordered_json(nullptr);
    j["seed"] = meta.seed;
    j["g_star"] = meta.g_star;
    dump_json(path, j);
}

DatasetMeta read_dataset_meta(const std::string& path) {
    const ordered_json j = load_json(path);
    DatasetMeta meta;
    meta.shape = j.at("shape").get<std::string>();
    meta.n = j.at("n").get<Eigen::Index>();
    meta.seed = j.at("seed").get<std::uint64_t>();
    meta.g_star = j.at("g_star").get<int>();
    if (!j.at("noise").is_null()) {
        // dimension recovered from the entries themselves; built-ins are 2-d
        const auto& nj = j.at("noise");
        int d = 2;
        if (nj.at("kind") == "diagonal") d = static_cast<int>(nj.at("sigma2").size());
        if (nj.at("kind") == "full") d = static_cast<int>(nj.at("cov").size());
        meta.noise = noise_from_json(nj, d);
    }
    return meta;
}

MonomialBasis FitModel::basis() const {
    return MonomialBasis::from_variable_exponents(d, g, basis_order);
}

PolynomialSystem FitModel::system() const {
    return PolynomialSystem{basis(), coefficients};
}

KernelEstimate FitModel::kernel() const {
    KernelEstimate k;
    k.k_hat = k_hat;
    k.cutoff = cutoff;
    k.eigengap = eigengap;
    k.vectors.resize(static_cast<Eigen::Index>(basis_order.size()),
                     static_cast<Eigen::Index>(coefficients.size()));
    for (std::size_t j = 0; j < coefficients.size(); ++j) {
        k.vectors.col(static_cast<Eigen::Index>(j)) = coefficients[j];
    }
    k.eigenvalues_kept = eigenvalues.head(static_cast<Eigen::Index>(k_hat));
    return k;
}

void write_model_json(const std::string& path, const FitModel& model) {
    ordered_json j;
    j["d"] = model.d;
    j["g"] = model.g;
    j["n"] = model.n;
    j["seed"] = model.seed;
    j["basis"] = model.basis_order;
    j["noise"] = model.noise ? noise_to_json(*model.noise) : ordered_json(nullptr);
    j["naive"] = model.naive;
    j["eigenvalues"] = to_std(model.eigenvalues);
    j["cutoff"] = model.cutoff;
    j["cutoff_const"] = model.cutoff_const;
    j["k_hat"] = model.k_hat;
    j["eigengap"] = model.eigengap;
    std::vector<std::vector<double>> coeffs;
    for (const auto& c : model.coefficients) coeffs.push_back(to_std(c));
    j["coefficients"] = coeffs;
    j["suggested_k"] = model.suggested_k;
    if (model.structure) {
        ordered_json s;
        s["degrees"] = model.structure->degrees;
        s["scale"] = model.structure->scale;
        std::vector<std::vector<double>> factors;
        for (const auto& f : model.structure->factors) factors.push_back(to_std(f));
        s["factors"] = factors;
        s["residual"] = model.structure->residual;
        s["restarts"] = model.structure->restarts;
        s["seed"] = model.structure->seed;
        std::vector<std::vector<double>> system;
        for (const auto& p : model.structure->system) system.push_back(to_std(p));
        s["system"] = system;
        j["structure"] = s;
    }
    dump_json(path, j);
}

FitModel read_model_json(const std::string& path) {
    const ordered_json j = load_json(path);
    FitModel model;
    model.d = j.at("d").get<int>();
    model.g = j.at("g").get<int>();
    model.n = j.at("n").get<Eigen::Index>();
    model.seed = j.at("seed").get<std::uint64_t>();
    model.basis_order = j.at("basis").get<std::vector<std::vector<int>>>();
    if (!j.at("noise").is_null()) model.noise = noise_from_json(j.at("noise"), model.d);
    model.naive = j.at("naive").get<bool>();
    model.eigenvalues = to_eigen(j.at("eigenvalues").get<std::vector<double>>());
    model.cutoff = j.at("cutoff").get<double>();
    model.cutoff_const = j.at("cutoff_const").get<double>();
    model.k_hat = j.at("k_hat").get<std::size_t>();
    model.eigengap = j.at("eigengap").get<double>();
    for (const auto& c : j.at("coefficients")) {
        model.coefficients.push_back(to_eigen(c.get<std::vector<double>>()));
    }
    model.suggested_k = j.at("suggested_k").get<std::size_t>();
    if (j.contains("structure") && !j.at("structure").is_null()) {
        const auto& s = j.at("structure");
        StructureBlock block;
        block.degrees = s.at("degrees").get<std::vector<int>>();
        block.scale = s.at("scale").get<double>();
        for (const auto& f : s.at("factors")) block.factors.push_back(to_eigen(f.get<std::vector<double>>()));
        block.residual = s.at("residual").get<double>();
        block.restarts = s.at("restarts").get<int>();
        block.seed = s.at("seed").get<std::uint64_t>();
        for (const auto& p : s.at("system")) block.system.push_back(to_eigen(p.get<std::vector<double>>()));
        model.structure = std::move(block);
    }
    return model;
}

void write_metric_json(const std::string& path, const std::string& metric, double value,
                       std::optional<double> truncation, std::optional<int> nodes,
                       std::optional<double> tail_bound) {
    ordered_json j;
    j["metric"] = metric;
    j["value"] = value;
    if (truncation) j["T"] = *truncation;
    if (nodes) j["nodes"] = *nodes;
    if (tail_bound) j["tail_bound"] = *tail_bound;
    dump_json(path, j);
}

} // namespace algset
