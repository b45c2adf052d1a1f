// Python bindings for the core operations.
#include <pybind11/eigen.h>
#include <pybind11/functional.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "mvmc/data.hpp"
#include "mvmc/factorize.hpp"
#include "mvmc/graph.hpp"
#include "mvmc/hsic.hpp"
#include "mvmc/metrics.hpp"
#include "mvmc/mvmc_solver.hpp"
#include "mvmc/mvmcc_solver.hpp"

namespace py = pybind11;
using namespace mvmc;

namespace {

MultiViewDataset make_dataset(const std::vector<Eigen::MatrixXd>& views,
                              const std::vector<std::vector<int>>& truths) {
    MultiViewDataset ds;
    ds.views = views;
    ds.ground_truths = truths;
    ds.validate();
    return ds;
}

}  // namespace

PYBIND11_MODULE(_mvmc, mod) {
    mod.doc() = "multi-view multiple (co-)clustering core";

    py::register_exception<Error>(mod, "MvmcError");

    py::class_<MultiViewDataset>(mod, "Dataset")
        .def(py::init(&make_dataset), py::arg("views"),
             py::arg("ground_truths") = std::vector<std::vector<int>>{})
        .def_readonly("views", &MultiViewDataset::views)
        .def_readonly("ground_truths", &MultiViewDataset::ground_truths)
        .def_property_readonly("n", &MultiViewDataset::n)
        .def_property_readonly("num_views", &MultiViewDataset::num_views);

    mod.def(
        "load_dataset",
        [](const std::string& root) { return load_dataset(root); },
        py::arg("root"));
    mod.def(
        "save_dataset",
        [](const MultiViewDataset& ds, const std::string& root) {
            save_dataset(ds, root);
        },
        py::arg("dataset"), py::arg("root"));

    py::class_<SyntheticSpec>(mod, "SyntheticSpec")
        .def(py::init([](int n, int m, std::vector<int> view_dims,
                         int num_labelings,
                         std::vector<int> clusters_per_labeling,
                         double noise_sigma, std::uint64_t seed) {
                 SyntheticSpec s;
                 s.n = n;
                 s.m = m;
                 s.view_dims = std::move(view_dims);
                 s.num_labelings = num_labelings;
                 s.clusters_per_labeling = std::move(clusters_per_labeling);
                 s.noise_sigma = noise_sigma;
                 s.seed = seed;
                 s.validate();
                 return s;
             }),
             py::arg("n"), py::arg("m"), py::arg("view_dims"),
             py::arg("num_labelings"), py::arg("clusters_per_labeling"),
             py::arg("noise_sigma") = 0.0, py::arg("seed") = 0);
    mod.def("generate_synthetic", &generate_synthetic, py::arg("spec"));

    mod.def(
        "build_knn_graph",
        [](const Eigen::MatrixXd& X, int epsilon,
           std::optional<double> sigma) {
            WidthRule rule;
            rule.fixed_sigma = sigma;
            double used = 0.0;
            Eigen::MatrixXd W = build_knn_graph(X, epsilon, rule, &used);
            return py::make_tuple(W, used);
        },
        py::arg("X"), py::arg("epsilon"), py::arg("sigma") = std::nullopt,
        "returns (W, sigma_used)");
    mod.def("laplacian_sum", &laplacian_sum, py::arg("similarities"));
    mod.def("smoothness_penalty", &smoothness_penalty, py::arg("U"),
            py::arg("L"));

    mod.def("hsic_pair", &hsic_pair, py::arg("D1"), py::arg("D2"));
    mod.def("aggregated_kernels", &aggregated_kernels, py::arg("Ds"));
    mod.def(
        "diversity_penalty",
        [](const std::vector<Eigen::MatrixXd>& Ds) {
            return diversity_penalty(Ds).value;
        },
        py::arg("Ds"));

    mod.def("kmeans_labels", &kmeans_labels, py::arg("X"), py::arg("k"),
            py::arg("seed") = 0, py::arg("max_iters") = 100);
    mod.def(
        "semi_nmf",
        [](const Eigen::MatrixXd& M, int r, int iters, std::uint64_t seed) {
            auto pair = semi_nmf_init(M, r, seed);
            for (int i = 0; i < iters; ++i) semi_nmf_update(M, pair);
            return py::make_tuple(pair.B, pair.R);
        },
        py::arg("M"), py::arg("r"), py::arg("iters") = 100,
        py::arg("seed") = 0, "returns (B, R)");
    mod.def(
        "harden_assignments",
        [](const Eigen::MatrixXd& R) { return harden_assignments(R, nullptr); },
        py::arg("R"));

    mod.def("silhouette", &silhouette, py::arg("X"), py::arg("labels"));
    mod.def("dunn_index", &dunn_index, py::arg("X"), py::arg("labels"));
    mod.def("nmi", &nmi, py::arg("a"), py::arg("b"));
    mod.def("jaccard", &jaccard, py::arg("a"), py::arg("b"));
    mod.def("concat_standardized", &concat_standardized, py::arg("dataset"));

    py::class_<MvmcConfig>(mod, "MvmcConfig")
        .def(py::init<>())
        .def_readwrite("h", &MvmcConfig::h)
        .def_readwrite("r", &MvmcConfig::r)
        .def_readwrite("lambda1", &MvmcConfig::lambda1)
        .def_readwrite("lambda2", &MvmcConfig::lambda2)
        .def_readwrite("mu0", &MvmcConfig::mu0)
        .def_readwrite("rho", &MvmcConfig::rho)
        .def_readwrite("mu_max", &MvmcConfig::mu_max)
        .def_readwrite("max_outer_iters", &MvmcConfig::max_outer_iters)
        .def_readwrite("tol_obj", &MvmcConfig::tol_obj)
        .def_readwrite("tol_feas", &MvmcConfig::tol_feas)
        .def_readwrite("seed", &MvmcConfig::seed)
        .def_readwrite("use_shared", &MvmcConfig::use_shared)
        .def_readwrite("epsilon_knn", &MvmcConfig::epsilon_knn)
        .def("validate", &MvmcConfig::validate);

    py::class_<TraceRow>(mod, "TraceRow")
        .def_readonly("iter", &TraceRow::iter)
        .def_readonly("fit", &TraceRow::fit)
        .def_readonly("hsic", &TraceRow::hsic)
        .def_readonly("smooth", &TraceRow::smooth)
        .def_readonly("feasibility", &TraceRow::feasibility)
        .def_readonly("mu", &TraceRow::mu)
        .def_readonly("total", &TraceRow::total);

    py::class_<MvmcResult>(mod, "MvmcResult")
        .def_readonly("labelings", &MvmcResult::labelings)
        .def_readonly("zero_row_warnings", &MvmcResult::zero_row_warnings)
        .def_property_readonly(
            "U", [](const MvmcResult& r) { return r.state.U; })
        .def_property_readonly(
            "Ds", [](const MvmcResult& r) { return r.state.Ds; })
        .def_property_readonly(
            "converged", [](const MvmcResult& r) { return r.state.converged; })
        .def_property_readonly(
            "trace", [](const MvmcResult& r) { return r.state.trace; });

    mod.def(
        "solve",
        [](const MultiViewDataset& ds, const MvmcConfig& cfg) {
            return solve(ds, cfg);
        },
        py::arg("dataset"), py::arg("config"));

    py::class_<MvmccConfig>(mod, "MvmccConfig")
        .def(py::init<>())
        .def_readwrite("r", &MvmccConfig::r)
        .def_readwrite("c", &MvmccConfig::c)
        .def_readwrite("lambda1", &MvmccConfig::lambda1)
        .def_readwrite("lambda2", &MvmccConfig::lambda2)
        .def_readwrite("mu0", &MvmccConfig::mu0)
        .def_readwrite("rho", &MvmccConfig::rho)
        .def_readwrite("mu_max", &MvmccConfig::mu_max)
        .def_readwrite("max_outer_iters", &MvmccConfig::max_outer_iters)
        .def_readwrite("tol_obj", &MvmccConfig::tol_obj)
        .def_readwrite("tol_feas", &MvmccConfig::tol_feas)
        .def_readwrite("seed", &MvmccConfig::seed)
        .def_readwrite("epsilon_knn", &MvmccConfig::epsilon_knn)
        .def("validate", &MvmccConfig::validate);

    py::class_<MvmccResult>(mod, "MvmccResult")
        .def_readonly("row_labelings", &MvmccResult::row_labelings)
        .def_readonly("column_labelings", &MvmccResult::column_labelings)
        .def_readonly("zero_row_warnings", &MvmccResult::zero_row_warnings)
        .def_property_readonly(
            "converged",
            [](const MvmccResult& r) { return r.state.converged; })
        .def_property_readonly(
            "trace", [](const MvmccResult& r) { return r.state.trace; });

    mod.def(
        "solve_cc",
        [](const MultiViewDataset& ds, const MvmccConfig& cfg) {
            return solve_cc(ds, cfg);
        },
        py::arg("dataset"), py::arg("config"));

    py::class_<ClusteringReport>(mod, "ClusteringReport")
        .def_readonly("labelings", &ClusteringReport::labelings)
        .def_readonly("sc", &ClusteringReport::sc)
        .def_readonly("di", &ClusteringReport::di)
        .def_readonly("nmi_matrix", &ClusteringReport::nmi_matrix)
        .def_readonly("jc_matrix", &ClusteringReport::jc_matrix)
        .def_readonly("mean_sc", &ClusteringReport::mean_sc)
        .def_readonly("mean_di", &ClusteringReport::mean_di)
        .def_readonly("mean_nmi", &ClusteringReport::mean_nmi)
        .def_readonly("mean_jc", &ClusteringReport::mean_jc)
        .def("to_json", &ClusteringReport::to_json)
        .def("to_csv", &ClusteringReport::to_csv);

    mod.def("build_report", &build_report, py::arg("dataset"),
            py::arg("labelings"));
}
