// Command-line front end: dataset generation, solver runs, sweeps, reports.
#include <CLI11.hpp>
#include <chrono>
#include <cstdint>
#include <cstdio>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <functional>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "mvmc/data.hpp"
#include "mvmc/errors.hpp"
#include "mvmc/graph.hpp"
#include "mvmc/metrics.hpp"
#include "mvmc/mvmc_solver.hpp"
#include "mvmc/mvmcc_solver.hpp"

#include <nlohmann/json.hpp>

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitParameter = 2;
constexpr int kExitNotConverged = 3;
constexpr int kExitDivergence = 4;
constexpr int kExitIo = 5;

std::string iso_now() {
    const auto t = std::chrono::system_clock::to_time_t(
        std::chrono::system_clock::now());
    std::tm tm{};
    gmtime_r(&t, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

std::string hash_hex(const std::string& s) {
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016zx", std::hash<std::string>{}(s));
    return buf;
}

void write_file(const fs::path& p, const std::string& content) {
    std::ofstream out(p);
    if (!out) throw mvmc::IoError("cannot open " + p.string() + " for writing");
    out << content;
    if (!out) throw mvmc::IoError("write failed for " + p.string());
}

void write_labels(const fs::path& p, const std::vector<int>& labels) {
    std::ostringstream out;
    for (int l : labels) out << l << '\n';
    write_file(p, out.str());
}

std::vector<int> read_labels(const fs::path& p) {
    std::ifstream in(p);
    if (!in) throw mvmc::IoError("cannot open " + p.string());
    std::vector<int> labels;
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        try {
            labels.push_back(std::stoi(line));
        } catch (const std::exception&) {
            throw mvmc::IoError("non-integer label in " + p.string());
        }
    }
    if (labels.empty()) throw mvmc::IoError("no labels in " + p.string());
    return labels;
}

std::string matrix_csv(const Eigen::MatrixXd& M) {
    std::ostringstream out;
    for (Eigen::Index i = 0; i < M.rows(); ++i) {
        for (Eigen::Index j = 0; j < M.cols(); ++j) {
            if (j) out << ',';
            char buf[32];
            std::snprintf(buf, sizeof buf, "%.17g", M(i, j));
            out << buf;
        }
        out << '\n';
    }
    return out.str();
}

// Tracks outputs and timing for one command invocation.
struct ManifestBuilder {
    std::string config_hash;
    std::string dataset_path;
    std::uint64_t seed = 0;
    std::string command;
    std::string started = iso_now();
    std::vector<std::string> outputs;
    bool converged = true;

    void add(const fs::path& p) { outputs.push_back(p.filename().string()); }

    void write(const fs::path& out_dir) const {
        json j;
        j["config_hash"] = config_hash;
        j["dataset"] = dataset_path;
        j["seed"] = seed;
        j["command"] = command;
        j["started"] = started;
        j["finished"] = iso_now();
        j["outputs"] = outputs;
        j["converged"] = converged;
        write_file(out_dir / "run_manifest.json", j.dump(2) + "\n");
    }
};

std::string join_args(int argc, char** argv) {
    std::string s;
    for (int i = 0; i < argc; ++i) {
        if (i) s += ' ';
        s += argv[i];
    }
    return s;
}

// Quality in per-view spaces: sc/di of each labeling averaged over views.
void apply_metric_space(mvmc::ClusteringReport& rep,
                        const mvmc::MultiViewDataset& ds,
                        const std::string& metric_space) {
    if (metric_space != "per-view") return;
    const size_t h = rep.labelings.size();
    std::vector<double> sc_sum(h, 0.0), di_sum(h, 0.0);
    std::vector<int> sc_cnt(h, 0), di_cnt(h, 0);
    for (const auto& view : ds.views) {
        mvmc::MultiViewDataset one;
        one.views = {view};
        const Eigen::MatrixXd X = mvmc::concat_standardized(one);
        for (size_t k = 0; k < h; ++k) {
            try {
                sc_sum[k] += mvmc::silhouette(X, rep.labelings[k]);
                ++sc_cnt[k];
            } catch (const mvmc::MetricError&) {
            }
            try {
                di_sum[k] += mvmc::dunn_index(X, rep.labelings[k]);
                ++di_cnt[k];
            } catch (const mvmc::MetricError&) {
            }
        }
    }
    double msc = 0, mdi = 0;
    int nsc = 0, ndi = 0;
    for (size_t k = 0; k < h; ++k) {
        rep.sc[k] = sc_cnt[k] ? std::optional<double>(sc_sum[k] / sc_cnt[k])
                              : std::nullopt;
        rep.di[k] = di_cnt[k] ? std::optional<double>(di_sum[k] / di_cnt[k])
                              : std::nullopt;
        if (rep.sc[k]) msc += *rep.sc[k], ++nsc;
        if (rep.di[k]) mdi += *rep.di[k], ++ndi;
    }
    rep.mean_sc = nsc ? std::optional<double>(msc / nsc) : std::nullopt;
    rep.mean_di = ndi ? std::optional<double>(mdi / ndi) : std::nullopt;
}

struct SweepAxis {
    std::string key;             // lambda1 | lambda2 | h
    std::vector<double> values;  // h values are integral
};

// "key=lo..hi:steps", log-spaced for the lambdas, integer-linear for h.
SweepAxis parse_sweep(const std::string& s) {
    const auto eq = s.find('=');
    const auto dots = s.find("..", eq == std::string::npos ? 0 : eq);
    const auto colon = s.rfind(':');
    if (eq == std::string::npos || dots == std::string::npos ||
        colon == std::string::npos || colon < dots)
        throw mvmc::ParameterError("sweep syntax is key=lo..hi:steps");
    SweepAxis axis;
    axis.key = s.substr(0, eq);
    if (axis.key != "lambda1" && axis.key != "lambda2" && axis.key != "h")
        throw mvmc::ParameterError("sweep key must be lambda1, lambda2 or h");
    double lo, hi;
    int steps;
    try {
        lo = std::stod(s.substr(eq + 1, dots - eq - 1));
        hi = std::stod(s.substr(dots + 2, colon - dots - 2));
        steps = std::stoi(s.substr(colon + 1));
    } catch (const std::exception&) {
        throw mvmc::ParameterError("sweep syntax is key=lo..hi:steps");
    }
    if (steps < 1) throw mvmc::ParameterError("sweep needs at least one step");
    if (axis.key == "h") {
        for (int i = 0; i < steps; ++i) {
            const double v =
                steps == 1 ? lo : lo + (hi - lo) * i / double(steps - 1);
            axis.values.push_back(std::round(v));
        }
    } else {
        if (lo <= 0.0 || hi <= 0.0)
            throw mvmc::ParameterError("log sweep bounds must be positive");
        const double llo = std::log10(lo), lhi = std::log10(hi);
        for (int i = 0; i < steps; ++i) {
            const double e =
                steps == 1 ? llo : llo + (lhi - llo) * i / double(steps - 1);
            axis.values.push_back(std::pow(10.0, e));
        }
    }
    return axis;
}

std::string opt_cell(const std::optional<double>& v) {
    if (!v) return "";
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", *v);
    return buf;
}

// ---------------------------------------------------------------- generate

int cmd_generate(const fs::path& spec_file, const fs::path& out_dir) {
    const auto spec = mvmc::load_synthetic_spec(spec_file);
    const auto ds = mvmc::generate_synthetic(spec);
    mvmc::save_dataset(ds, out_dir);
    std::ifstream in(spec_file);
    std::stringstream buf;
    buf << in.rdbuf();
    write_file(out_dir / "synthetic_spec.json", buf.str());
    std::printf("wrote dataset with %d views, n=%lld to %s\n", ds.num_views(),
                static_cast<long long>(ds.n()), out_dir.string().c_str());
    return kExitOk;
}

// -------------------------------------------------------------------- mvmc

struct SolveOptions {
    fs::path dataset_dir, config_file, out_dir;
    std::optional<std::uint64_t> seed;
    int threads = 1;
    bool no_shared = false;
    std::string sweep;
    std::string metric_space = "concat";
    std::string normalize = "none";
    bool dump_graphs = false;
};

mvmc::MultiViewDataset load_input(const SolveOptions& opt) {
    auto ds = mvmc::load_dataset(opt.dataset_dir);
    auto norm =
        mvmc::normalize_views(ds, mvmc::parse_normalize_mode(opt.normalize));
    if (norm.zero_column_warning)
        std::fprintf(stderr, "warning: all-zero column left unscaled\n");
    return std::move(norm.dataset);
}

void dump_graphs(const mvmc::GraphSet& graphs, const fs::path& out_dir,
                 ManifestBuilder& mf) {
    for (size_t v = 0; v < graphs.similarities.size(); ++v) {
        const fs::path p = out_dir / ("graph_W_" + std::to_string(v) + ".csv");
        write_file(p, matrix_csv(graphs.similarities[v]));
        mf.add(p);
    }
    const fs::path p = out_dir / "graph_L.csv";
    write_file(p, matrix_csv(graphs.laplacian_sum));
    mf.add(p);
}

// One MVMC run into out_dir; returns exit code, fills summary fields.
int run_mvmc_once(const mvmc::MultiViewDataset& ds, mvmc::MvmcConfig cfg,
                  const SolveOptions& opt, const fs::path& out_dir,
                  const std::string& command,
                  mvmc::ClusteringReport* report_out) {
    fs::create_directories(out_dir);
    ManifestBuilder mf;
    mf.config_hash = hash_hex(mvmc::mvmc_config_to_json(cfg));
    mf.dataset_path = opt.dataset_dir.string();
    mf.seed = cfg.seed;
    mf.command = command;

    const auto graphs = mvmc::build_graph_set(ds, cfg.epsilon_knn);
    if (opt.dump_graphs) dump_graphs(graphs, out_dir, mf);

    std::vector<mvmc::TraceRow> trace_copy;
    mvmc::MvmcResult result;
    try {
        result = mvmc::solve(ds, graphs, cfg,
                             [&](int, int, const mvmc::MvmcState& s) {
                                 trace_copy = s.trace;
                             });
    } catch (const mvmc::DivergenceError& e) {
        write_file(out_dir / "trace.csv", mvmc::trace_to_csv(trace_copy));
        mf.add(out_dir / "trace.csv");
        mf.converged = false;
        mf.write(out_dir);
        std::fprintf(stderr, "error: %s\n", e.what());
        return kExitDivergence;
    }

    for (size_t k = 0; k < result.labelings.size(); ++k) {
        const fs::path p = out_dir / ("labels_" + std::to_string(k) + ".csv");
        write_labels(p, result.labelings[k]);
        mf.add(p);
    }
    write_file(out_dir / "trace.csv", mvmc::trace_to_csv(result.state.trace));
    mf.add(out_dir / "trace.csv");

    auto report = mvmc::build_report(ds, result.labelings);
    report.zero_row_warnings = result.zero_row_warnings;
    apply_metric_space(report, ds, opt.metric_space);
    write_file(out_dir / "report.json", report.to_json() + "\n");
    mf.add(out_dir / "report.json");
    write_file(out_dir / "report.csv", report.to_csv());
    mf.add(out_dir / "report.csv");
    write_file(out_dir / "config.json", mvmc::mvmc_config_to_json(cfg) + "\n");
    mf.add(out_dir / "config.json");

    mf.converged = result.state.converged;
    mf.write(out_dir);
    if (report_out) *report_out = std::move(report);
    return result.state.converged ? kExitOk : kExitNotConverged;
}

int cmd_mvmc(const SolveOptions& opt, const std::string& command) {
    auto cfg = mvmc::load_mvmc_config(opt.config_file);
    if (opt.seed) cfg.seed = *opt.seed;
    if (opt.no_shared) cfg.use_shared = false;
    cfg.validate();
    const auto ds = load_input(opt);

    if (opt.sweep.empty())
        return run_mvmc_once(ds, cfg, opt, opt.out_dir, command, nullptr);

    const SweepAxis axis = parse_sweep(opt.sweep);
    fs::create_directories(opt.out_dir);
    std::ostringstream summary;
    summary << "lambda1,lambda2,h,mean_sc,mean_di,mean_nmi,mean_jc\n";
    int worst = kExitOk;
    for (size_t i = 0; i < axis.values.size(); ++i) {
        mvmc::MvmcConfig sub = cfg;
        if (axis.key == "lambda1") sub.lambda1 = axis.values[i];
        if (axis.key == "lambda2") sub.lambda2 = axis.values[i];
        if (axis.key == "h") {
            sub.h = static_cast<int>(axis.values[i]);
            sub.r.resize(sub.h, sub.r.empty() ? 2 : sub.r.back());
        }
        sub.validate();
        char name[32];
        std::snprintf(name, sizeof name, "run_%03zu", i);
        mvmc::ClusteringReport rep;
        const int code =
            run_mvmc_once(ds, sub, opt, opt.out_dir / name, command, &rep);
        if (code > worst) worst = code;
        summary << sub.lambda1 << ',' << sub.lambda2 << ',' << sub.h << ','
                << opt_cell(rep.mean_sc) << ',' << opt_cell(rep.mean_di) << ','
                << opt_cell(rep.mean_nmi) << ',' << opt_cell(rep.mean_jc)
                << '\n';
    }
    write_file(opt.out_dir / "sweep_summary.csv", summary.str());
    return worst;
}

// ------------------------------------------------------------------- mvmcc

int run_mvmcc_once(const mvmc::MultiViewDataset& ds, mvmc::MvmccConfig cfg,
                   const SolveOptions& opt, const fs::path& out_dir,
                   const std::string& command,
                   mvmc::ClusteringReport* report_out) {
    fs::create_directories(out_dir);
    ManifestBuilder mf;
    {
        json j;
        j["r"] = cfg.r;
        j["c"] = cfg.c;
        j["lambda1"] = cfg.lambda1;
        j["lambda2"] = cfg.lambda2;
        j["mu0"] = cfg.mu0;
        j["rho"] = cfg.rho;
        j["mu_max"] = cfg.mu_max;
        j["max_outer_iters"] = cfg.max_outer_iters;
        j["tol_obj"] = cfg.tol_obj;
        j["tol_feas"] = cfg.tol_feas;
        j["seed"] = cfg.seed;
        j["epsilon_knn"] = cfg.epsilon_knn;
        write_file(out_dir / "config.json", j.dump(2) + "\n");
        mf.config_hash = hash_hex(j.dump());
    }
    mf.add(out_dir / "config.json");
    mf.dataset_path = opt.dataset_dir.string();
    mf.seed = cfg.seed;
    mf.command = command;

    const auto graphs = mvmc::build_graph_set(ds, cfg.epsilon_knn);
    if (opt.dump_graphs) dump_graphs(graphs, out_dir, mf);

    std::vector<mvmc::TraceRow> trace_copy;
    mvmc::MvmccResult result;
    try {
        result = mvmc::solve_cc(ds, graphs, cfg,
                                [&](int, int, const mvmc::MvmccState& s) {
                                    trace_copy = s.trace;
                                });
    } catch (const mvmc::DivergenceError& e) {
        write_file(out_dir / "trace.csv", mvmc::trace_to_csv(trace_copy));
        mf.add(out_dir / "trace.csv");
        mf.converged = false;
        mf.write(out_dir);
        std::fprintf(stderr, "error: %s\n", e.what());
        return kExitDivergence;
    }

    for (size_t v = 0; v < result.row_labelings.size(); ++v) {
        const fs::path pr = out_dir / ("rows_" + std::to_string(v) + ".csv");
        write_labels(pr, result.row_labelings[v]);
        mf.add(pr);
        const fs::path pc = out_dir / ("cols_" + std::to_string(v) + ".csv");
        write_labels(pc, result.column_labelings[v]);
        mf.add(pc);
    }
    write_file(out_dir / "trace.csv", mvmc::trace_to_csv(result.state.trace));
    mf.add(out_dir / "trace.csv");

    // Diversity over the column (sample) labelings.
    auto report = mvmc::build_report(ds, result.column_labelings);
    report.zero_row_warnings = result.zero_row_warnings;
    apply_metric_space(report, ds, opt.metric_space);
    write_file(out_dir / "report.json", report.to_json() + "\n");
    mf.add(out_dir / "report.json");
    write_file(out_dir / "report.csv", report.to_csv());
    mf.add(out_dir / "report.csv");

    mf.converged = result.state.converged;
    mf.write(out_dir);
    if (report_out) *report_out = std::move(report);
    return result.state.converged ? kExitOk : kExitNotConverged;
}

int cmd_mvmcc(const SolveOptions& opt, const std::string& command) {
    auto cfg = mvmc::load_mvmcc_config(opt.config_file);
    if (opt.seed) cfg.seed = *opt.seed;
    cfg.validate();
    const auto ds = load_input(opt);

    if (opt.sweep.empty())
        return run_mvmcc_once(ds, cfg, opt, opt.out_dir, command, nullptr);

    const SweepAxis axis = parse_sweep(opt.sweep);
    if (axis.key == "h")
        throw mvmc::ParameterError(
            "mvmcc fixes the head count to the view count; sweep lambda1 or "
            "lambda2");
    fs::create_directories(opt.out_dir);
    std::ostringstream summary;
    summary << "lambda1,lambda2,h,mean_sc,mean_di,mean_nmi,mean_jc\n";
    int worst = kExitOk;
    for (size_t i = 0; i < axis.values.size(); ++i) {
        mvmc::MvmccConfig sub = cfg;
        if (axis.key == "lambda1") sub.lambda1 = axis.values[i];
        if (axis.key == "lambda2") sub.lambda2 = axis.values[i];
        char name[32];
        std::snprintf(name, sizeof name, "run_%03zu", i);
        mvmc::ClusteringReport rep;
        const int code =
            run_mvmcc_once(ds, sub, opt, opt.out_dir / name, command, &rep);
        if (code > worst) worst = code;
        summary << sub.lambda1 << ',' << sub.lambda2 << ','
                << ds.num_views() << ',' << opt_cell(rep.mean_sc) << ','
                << opt_cell(rep.mean_di) << ',' << opt_cell(rep.mean_nmi)
                << ',' << opt_cell(rep.mean_jc) << '\n';
    }
    write_file(opt.out_dir / "sweep_summary.csv", summary.str());
    return worst;
}

// ------------------------------------------------------------------ report

int cmd_report(const std::vector<fs::path>& label_files,
               const fs::path& dataset_dir, const fs::path& out_file,
               const fs::path& truth_file, const std::string& metric_space,
               const std::string& normalize) {
    auto ds = mvmc::load_dataset(dataset_dir);
    auto norm = mvmc::normalize_views(ds, mvmc::parse_normalize_mode(normalize));
    ds = std::move(norm.dataset);

    std::vector<std::vector<int>> labelings;
    for (const auto& f : label_files) labelings.push_back(read_labels(f));
    for (const auto& l : labelings)
        if (static_cast<Eigen::Index>(l.size()) != ds.n())
            throw mvmc::ShapeError("label file length does not match dataset n");

    auto report = mvmc::build_report(ds, labelings);
    apply_metric_space(report, ds, metric_space);
    json j = json::parse(report.to_json());
    if (!truth_file.empty()) {
        const auto truth = read_labels(truth_file);
        if (static_cast<Eigen::Index>(truth.size()) != ds.n())
            throw mvmc::ShapeError("truth file length does not match dataset n");
        json nmis = json::array();
        for (const auto& l : labelings) nmis.push_back(mvmc::nmi(l, truth));
        j["nmi_to_truth"] = nmis;
    }
    const std::string text = j.dump(2) + "\n";
    if (out_file.empty())
        std::fputs(text.c_str(), stdout);
    else
        write_file(out_file, text);
    return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"multi-view multiple (co-)clustering"};
    app.require_subcommand(1);
    const std::string command = join_args(argc, argv);

    fs::path gen_spec, gen_out;
    auto* gen = app.add_subcommand("generate", "write a synthetic dataset");
    gen->add_option("spec", gen_spec, "SyntheticSpec JSON file")->required();
    gen->add_option("out", gen_out, "output dataset directory")->required();

    SolveOptions mv, cc;
    auto add_solve_opts = [](CLI::App* sub, SolveOptions& o) {
        sub->add_option("dataset", o.dataset_dir, "dataset directory")
            ->required();
        sub->add_option("--config", o.config_file, "solver config JSON")
            ->required();
        sub->add_option("--out", o.out_dir, "output directory")->required();
        sub->add_option_function<std::uint64_t>(
            "--seed", [&o](const std::uint64_t& v) { o.seed = v; },
            "override config seed");
        sub->add_option("--threads", o.threads, "worker thread count");
        sub->add_option("--sweep", o.sweep, "key=lo..hi:steps (log spacing)");
        sub->add_option("--metric-space", o.metric_space,
                        "quality metric space: concat or per-view")
            ->check(CLI::IsMember({"concat", "per-view"}));
        sub->add_option("--normalize", o.normalize,
                        "none, unit_columns or zscore_rows");
        sub->add_flag("--dump-graphs", o.dump_graphs,
                      "write W^v and the summed Laplacian as CSV");
    };
    auto* mvc = app.add_subcommand("mvmc", "multiple clustering run");
    add_solve_opts(mvc, mv);
    mvc->add_flag("--no-shared", mv.no_shared,
                  "drop the shared commonality matrix (ablation)");
    auto* ccc = app.add_subcommand("mvmcc", "multiple co-clustering run");
    add_solve_opts(ccc, cc);

    std::vector<fs::path> rep_labels;
    fs::path rep_dataset, rep_out, rep_truth;
    std::string rep_space = "concat", rep_norm = "none";
    auto* rep = app.add_subcommand("report", "metrics for given labelings");
    rep->add_option("labels", rep_labels, "label CSV files")->required();
    rep->add_option("--dataset", rep_dataset, "dataset directory")->required();
    rep->add_option("--out", rep_out, "output JSON (stdout if omitted)");
    rep->add_option("--truth", rep_truth, "ground-truth label CSV");
    rep->add_option("--metric-space", rep_space,
                    "quality metric space: concat or per-view")
        ->check(CLI::IsMember({"concat", "per-view"}));
    rep->add_option("--normalize", rep_norm,
                    "none, unit_columns or zscore_rows");

    CLI11_PARSE(app, argc, argv);

    try {
        if (gen->parsed()) return cmd_generate(gen_spec, gen_out);
        if (mvc->parsed()) {
            Eigen::setNbThreads(mv.threads);
            return cmd_mvmc(mv, command);
        }
        if (ccc->parsed()) {
            Eigen::setNbThreads(cc.threads);
            return cmd_mvmcc(cc, command);
        }
        if (rep->parsed())
            return cmd_report(rep_labels, rep_dataset, rep_out, rep_truth,
                              rep_space, rep_norm);
    } catch (const mvmc::DivergenceError& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return kExitDivergence;
    } catch (const mvmc::IoError& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return kExitIo;
    } catch (const mvmc::IngestionError& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return kExitIo;
    } catch (const mvmc::Error& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return kExitParameter;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return kExitParameter;
    }
    return kExitOk;
}
