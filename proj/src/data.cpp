#include "mvmc/data.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numeric>
#include <random>
#include <sstream>

#include <nlohmann/json.hpp>

namespace fs = std::filesystem;
using json = nlohmann::json;

namespace mvmc {

std::vector<Eigen::Index> MultiViewDataset::dims() const {
    std::vector<Eigen::Index> d;
    d.reserve(views.size());
    for (const auto& X : views) d.push_back(X.rows());
    return d;
}

void MultiViewDataset::validate() const {
    if (views.empty()) throw ValidationError("dataset has no views");
    const Eigen::Index nn = views.front().cols();
    if (nn < 2) throw ValidationError("dataset needs at least 2 samples");
    for (int v = 0; v < num_views(); ++v) {
        const auto& X = views[v];
        if (X.rows() < 1)
            throw ValidationError("view " + std::to_string(v) + " has no features");
        if (X.cols() != nn)
            throw ShapeError("view " + std::to_string(v) + " has " +
                             std::to_string(X.cols()) + " columns, expected " +
                             std::to_string(nn));
        for (Eigen::Index i = 0; i < X.rows(); ++i)
            for (Eigen::Index j = 0; j < X.cols(); ++j)
                if (!std::isfinite(X(i, j)))
                    throw ValidationError("non-finite entry at (view " +
                                          std::to_string(v) + ", " + std::to_string(i) +
                                          ", " + std::to_string(j) + ")");
    }
    for (size_t g = 0; g < ground_truths.size(); ++g) {
        const auto& labels = ground_truths[g];
        if (static_cast<Eigen::Index>(labels.size()) != nn)
            throw ShapeError("ground truth " + std::to_string(g) +
                             " length does not match sample count");
        int max_label = -1;
        for (int l : labels) {
            if (l < 0)
                throw ValidationError("ground truth " + std::to_string(g) +
                                      " contains a negative label");
            max_label = std::max(max_label, l);
        }
        std::vector<char> seen(static_cast<size_t>(max_label) + 1, 0);
        for (int l : labels) seen[static_cast<size_t>(l)] = 1;
        if (std::find(seen.begin(), seen.end(), 0) != seen.end())
            throw ValidationError("ground truth " + std::to_string(g) +
                                  " labels are not a contiguous range from 0");
    }
}

void SyntheticSpec::validate() const {
    if (n < 2) throw ParameterError("synthetic spec: n must be >= 2");
    if (m < 1) throw ParameterError("synthetic spec: m must be >= 1");
    if (static_cast<int>(view_dims.size()) != m)
        throw ParameterError("synthetic spec: view_dims must have m entries");
    for (int d : view_dims)
        if (d < 1) throw ParameterError("synthetic spec: every view_dim must be >= 1");
    if (num_labelings < 1)
        throw ParameterError("synthetic spec: num_labelings must be >= 1");
    if (num_labelings > m)
        throw ParameterError("synthetic spec: num_labelings must not exceed m");
    if (static_cast<int>(clusters_per_labeling.size()) != num_labelings)
        throw ParameterError(
            "synthetic spec: clusters_per_labeling must have num_labelings entries");
    for (int c : clusters_per_labeling) {
        if (c < 2) throw ParameterError("synthetic spec: cluster counts must be >= 2");
        if (c > n) throw ParameterError("synthetic spec: cluster count exceeds n");
    }
    if (noise_sigma < 0) throw ParameterError("synthetic spec: noise_sigma must be >= 0");
}

MultiViewDataset generate_synthetic(const SyntheticSpec& spec) {
    spec.validate();
    std::mt19937_64 rng(spec.seed);

    // Planted labelings: balanced blocks over a shuffled sample order.
    std::vector<std::vector<int>> labelings(spec.num_labelings);
    for (int j = 0; j < spec.num_labelings; ++j) {
        const int c = spec.clusters_per_labeling[j];
        std::vector<int> order(spec.n);
        std::iota(order.begin(), order.end(), 0);
        std::shuffle(order.begin(), order.end(), rng);
        labelings[j].resize(spec.n);
        for (int pos = 0; pos < spec.n; ++pos)
            labelings[j][order[pos]] = static_cast<int>(
                static_cast<long long>(pos) * c / spec.n);
    }

    std::normal_distribution<double> gauss(0.0, 1.0);
    MultiViewDataset ds;
    for (int v = 0; v < spec.m; ++v) {
        const int j = v % spec.num_labelings;
        const int d = spec.view_dims[v];
        const int c = spec.clusters_per_labeling[j];
        Eigen::MatrixXd means(d, c);
        for (int col = 0; col < c; ++col)
            for (int row = 0; row < d; ++row) means(row, col) = gauss(rng);
        Eigen::MatrixXd X(d, spec.n);
        for (int i = 0; i < spec.n; ++i) {
            X.col(i) = means.col(labelings[j][i]);
            for (int row = 0; row < d; ++row)
                X(row, i) += spec.noise_sigma * gauss(rng);
        }
        ds.views.push_back(std::move(X));
        ds.names.push_back("view_" + std::to_string(v));
    }
    ds.ground_truths = std::move(labelings);
    ds.validate();
    return ds;
}

namespace {

std::vector<double> parse_csv_row(const std::string& line, const std::string& context) {
    std::vector<double> out;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) {
        try {
            size_t used = 0;
            double val = std::stod(cell, &used);
            out.push_back(val);
        } catch (const std::exception&) {
            throw IngestionError("unparseable value '" + cell + "' in " + context);
        }
    }
    return out;
}

Eigen::MatrixXd read_matrix_csv(const fs::path& file, const std::string& context) {
    std::ifstream in(file);
    if (!in) throw IngestionError("cannot open " + file.string() + " for " + context);
    std::vector<std::vector<double>> rows;
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        rows.push_back(parse_csv_row(line, context));
        if (rows.back().size() != rows.front().size())
            throw IngestionError("ragged row " + std::to_string(rows.size() - 1) +
                                 " in " + context);
    }
    if (rows.empty()) throw IngestionError("empty matrix file for " + context);
    Eigen::MatrixXd M(rows.size(), rows.front().size());
    for (size_t i = 0; i < rows.size(); ++i)
        for (size_t j = 0; j < rows[i].size(); ++j)
            M(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = rows[i][j];
    return M;
}

std::vector<int> read_labels_csv(const fs::path& file, const std::string& context) {
    std::ifstream in(file);
    if (!in) throw IngestionError("cannot open " + file.string() + " for " + context);
    std::vector<int> labels;
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        try {
            labels.push_back(std::stoi(line));
        } catch (const std::exception&) {
            throw IngestionError("unparseable label '" + line + "' in " + context);
        }
    }
    return labels;
}

void write_matrix_csv(const Eigen::MatrixXd& M, const fs::path& file) {
    std::ofstream out(file);
    if (!out) throw IoError("cannot write " + file.string());
    char buf[64];
    for (Eigen::Index i = 0; i < M.rows(); ++i) {
        for (Eigen::Index j = 0; j < M.cols(); ++j) {
            std::snprintf(buf, sizeof(buf), "%.17g", M(i, j));
            out << buf;
            if (j + 1 < M.cols()) out << ',';
        }
        out << '\n';
    }
}

}  // namespace

MultiViewDataset load_dataset(const fs::path& root) {
    const fs::path manifest_path = root / "manifest.json";
    std::ifstream in(manifest_path);
    if (!in) throw IngestionError("missing manifest: " + manifest_path.string());
    json manifest;
    try {
        in >> manifest;
    } catch (const json::exception& e) {
        throw IngestionError("bad manifest " + manifest_path.string() + ": " + e.what());
    }

    MultiViewDataset ds;
    const Eigen::Index n = manifest.at("n").get<Eigen::Index>();
    int v = 0;
    for (const auto& view : manifest.at("views")) {
        const std::string file = view.at("file").get<std::string>();
        const std::string context = "view " + std::to_string(v);
        Eigen::MatrixXd X = read_matrix_csv(root / file, context);
        if (manifest.contains("dims")) {
            const auto dims = manifest["dims"].get<std::vector<Eigen::Index>>();
            if (v < static_cast<int>(dims.size()) && X.rows() != dims[v])
                throw IngestionError(context + " has " + std::to_string(X.rows()) +
                                     " rows, manifest says " + std::to_string(dims[v]));
        }
        if (X.cols() != n)
            throw ShapeError(context + " has " + std::to_string(X.cols()) +
                             " columns, manifest says n=" + std::to_string(n));
        ds.views.push_back(std::move(X));
        ds.names.push_back(view.contains("name") ? view["name"].get<std::string>()
                                                 : "view_" + std::to_string(v));
        ++v;
    }
    if (manifest.contains("ground_truths")) {
        int g = 0;
        for (const auto& file : manifest["ground_truths"]) {
            auto labels = read_labels_csv(root / file.get<std::string>(),
                                          "ground truth " + std::to_string(g));
            ds.ground_truths.push_back(std::move(labels));
            ++g;
        }
    }
    ds.validate();
    return ds;
}

void save_dataset(const MultiViewDataset& ds, const fs::path& root) {
    ds.validate();
    std::error_code ec;
    fs::create_directories(root, ec);
    if (ec) throw IoError("cannot create directory " + root.string());

    json manifest;
    manifest["n"] = ds.n();
    manifest["dims"] = ds.dims();
    manifest["views"] = json::array();
    for (int v = 0; v < ds.num_views(); ++v) {
        const std::string file = "view_" + std::to_string(v) + ".csv";
        write_matrix_csv(ds.views[v], root / file);
        json entry;
        entry["file"] = file;
        entry["name"] = v < static_cast<int>(ds.names.size())
                            ? ds.names[v]
                            : "view_" + std::to_string(v);
        manifest["views"].push_back(entry);
    }
    if (!ds.ground_truths.empty()) {
        manifest["ground_truths"] = json::array();
        for (size_t g = 0; g < ds.ground_truths.size(); ++g) {
            const std::string file = "ground_truth_" + std::to_string(g) + ".csv";
            std::ofstream out(root / file);
            if (!out) throw IoError("cannot write " + (root / file).string());
            for (int l : ds.ground_truths[g]) out << l << '\n';
            manifest["ground_truths"].push_back(file);
        }
    }
    std::ofstream out(root / "manifest.json");
    if (!out) throw IoError("cannot write " + (root / "manifest.json").string());
    out << manifest.dump(2) << '\n';
}

SyntheticSpec load_synthetic_spec(const fs::path& json_file) {
    std::ifstream in(json_file);
    if (!in) throw IngestionError("cannot open spec file " + json_file.string());
    json j;
    try {
        in >> j;
    } catch (const json::exception& e) {
        throw IngestionError(std::string("bad spec JSON: ") + e.what());
    }
    SyntheticSpec spec;
    try {
        spec.n = j.at("n").get<int>();
        spec.m = j.at("m").get<int>();
        spec.view_dims = j.at("view_dims").get<std::vector<int>>();
        spec.num_labelings = j.at("num_labelings").get<int>();
        spec.clusters_per_labeling = j.at("clusters_per_labeling").get<std::vector<int>>();
        spec.noise_sigma = j.value("noise_sigma", 0.0);
        spec.seed = j.value("seed", std::uint64_t{0});
    } catch (const json::exception& e) {
        throw ParameterError(std::string("bad synthetic spec: ") + e.what());
    }
    spec.validate();
    return spec;
}

NormalizeMode parse_normalize_mode(const std::string& s) {
    if (s == "none") return NormalizeMode::none;
    if (s == "unit_columns") return NormalizeMode::unit_columns;
    if (s == "zscore_rows") return NormalizeMode::zscore_rows;
    throw ParameterError("unknown normalize mode '" + s + "'");
}

NormalizeResult normalize_views(const MultiViewDataset& ds, NormalizeMode mode) {
    ds.validate();
    NormalizeResult result;
    result.dataset = ds;
    if (mode == NormalizeMode::none) return result;

    for (auto& X : result.dataset.views) {
        if (mode == NormalizeMode::unit_columns) {
            for (Eigen::Index j = 0; j < X.cols(); ++j) {
                const double norm = X.col(j).norm();
                if (norm == 0.0)
                    result.zero_column_warning = true;
                else
                    X.col(j) /= norm;
            }
        } else {  // zscore_rows
            for (Eigen::Index i = 0; i < X.rows(); ++i) {
                const double mean = X.row(i).mean();
                const double var =
                    (X.row(i).array() - mean).square().sum() / X.cols();
                if (var > 0.0) {
                    X.row(i) = (X.row(i).array() - mean) / std::sqrt(var);
                }
                // zero-variance rows left untouched
            }
        }
    }
    return result;
}

}  // namespace mvmc
