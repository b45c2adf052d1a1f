#include "mvmc/mvmcc_solver.hpp"

#include <cmath>
#include <fstream>
#include <random>

#include <nlohmann/json.hpp>

#include "mvmc/hsic.hpp"
#include "mvmc/sylvester.hpp"

using json = nlohmann::json;

namespace mvmc {

void MvmccConfig::validate() const {
    if (r.empty()) throw ParameterError("mvmcc config: r must not be empty");
    if (c.size() != r.size())
        throw ParameterError("mvmcc config: r and c must have one entry per view");
    for (int rv : r)
        if (rv < 2) throw ParameterError("mvmcc config: every r_v must be >= 2");
    for (int cv : c)
        if (cv < 2) throw ParameterError("mvmcc config: every c_v must be >= 2");
    if (lambda1 < 0 || lambda2 < 0)
        throw ParameterError("mvmcc config: weights must be nonnegative");
    if (mu0 <= 0) throw ParameterError("mvmcc config: mu0 must be positive");
    if (rho <= 1) throw ParameterError("mvmcc config: rho must exceed 1");
    if (mu_max < mu0) throw ParameterError("mvmcc config: mu_max must be >= mu0");
    if (max_outer_iters < 1)
        throw ParameterError("mvmcc config: max_outer_iters must be >= 1");
    if (epsilon_knn < 1) throw ParameterError("mvmcc config: epsilon_knn must be >= 1");
}

MvmccConfig load_mvmcc_config(const std::filesystem::path& json_file) {
    std::ifstream in(json_file);
    if (!in) throw IngestionError("cannot open config file " + json_file.string());
    json j;
    try {
        in >> j;
    } catch (const json::exception& e) {
        throw IngestionError(std::string("bad config JSON: ") + e.what());
    }
    MvmccConfig cfg;
    try {
        if (j.contains("r")) cfg.r = j["r"].get<std::vector<int>>();
        if (j.contains("c")) cfg.c = j["c"].get<std::vector<int>>();
        cfg.lambda1 = j.value("lambda1", cfg.lambda1);
        cfg.lambda2 = j.value("lambda2", cfg.lambda2);
        cfg.mu0 = j.value("mu0", cfg.mu0);
        cfg.rho = j.value("rho", cfg.rho);
        cfg.mu_max = j.value("mu_max", cfg.mu_max);
        cfg.max_outer_iters = j.value("max_outer_iters", cfg.max_outer_iters);
        cfg.tol_obj = j.value("tol_obj", cfg.tol_obj);
        cfg.tol_feas = j.value("tol_feas", cfg.tol_feas);
        cfg.seed = j.value("seed", cfg.seed);
        cfg.epsilon_knn = j.value("epsilon_knn", cfg.epsilon_knn);
    } catch (const json::exception& e) {
        throw ParameterError(std::string("bad mvmcc config: ") + e.what());
    }
    if (cfg.r.empty()) throw ParameterError("mvmcc config: missing field 'r'");
    if (cfg.c.empty()) throw ParameterError("mvmcc config: missing field 'c'");
    cfg.validate();
    return cfg;
}

ObjectiveTerms objective_cc(const MvmccState& state, const MultiViewDataset& ds,
                            const GraphSet& graphs, const MvmccConfig& cfg,
                            const std::vector<Eigen::MatrixXd>* frozen_kernels) {
    const int m = ds.num_views();
    ObjectiveTerms terms;

    for (int v = 0; v < m; ++v) {
        const auto& t = state.triples[v];
        terms.fit += (ds.views[v] * (state.U + state.Ds[v]) -
                      t.C * t.S * t.R.transpose())
                         .squaredNorm();
    }
    terms.fit /= m;

    if (cfg.lambda1 > 0 && m > 1) {
        if (frozen_kernels) {
            for (int v = 0; v < m; ++v)
                terms.hsic += (state.Ds[v] * (*frozen_kernels)[v])
                                  .cwiseProduct(state.Ds[v])
                                  .sum();
        } else {
            terms.hsic = diversity_penalty(state.Ds).value;
        }
        terms.hsic *= cfg.lambda1;
    }

    if (cfg.lambda2 > 0)
        terms.smooth = cfg.lambda2 * smoothness_penalty(state.U, graphs.laplacian_sum);

    for (int v = 0; v < m; ++v) {
        const Eigen::MatrixXd residual =
            ds.views[v] - ds.views[v] * (state.U + state.Ds[v]);
        terms.penalty += state.multipliers[v].cwiseProduct(residual).sum() +
                         0.5 * state.mu * residual.squaredNorm();
    }
    terms.penalty /= m;

    terms.total = terms.fit + terms.hsic + terms.smooth + terms.penalty;
    return terms;
}

double feasibility_cc(const MvmccState& state, const MultiViewDataset& ds) {
    double worst = 0.0;
    for (int v = 0; v < ds.num_views(); ++v) {
        const double norm = ds.views[v].norm();
        const double res =
            (ds.views[v] - ds.views[v] * (state.U + state.Ds[v])).norm();
        worst = std::max(worst, norm > 0 ? res / norm : res);
    }
    return worst;
}

MvmccResult solve_cc(const MultiViewDataset& ds, const MvmccConfig& cfg,
                     const MvmccObserver& observer) {
    const GraphSet graphs = build_graph_set(ds, cfg.epsilon_knn);
    return solve_cc(ds, graphs, cfg, observer);
}

MvmccResult solve_cc(const MultiViewDataset& ds, const GraphSet& graphs,
                     const MvmccConfig& cfg, const MvmccObserver& observer) {
    cfg.validate();
    ds.validate();
    const Eigen::Index n = ds.n();
    const int m = ds.num_views();
    if (static_cast<int>(cfg.r.size()) != m)
        throw ParameterError("mvmcc config: r must have one entry per view");
    for (int v = 0; v < m; ++v) {
        if (cfg.r[v] > n)
            throw ParameterError("mvmcc config: r_v exceeds sample count");
        if (cfg.c[v] > ds.views[v].rows())
            throw ParameterError("mvmcc config: c_v exceeds feature count of view " +
                                 std::to_string(v));
    }

    std::vector<Eigen::MatrixXd> grams;
    Eigen::MatrixXd G = Eigen::MatrixXd::Zero(n, n);
    std::vector<SymEig> eig_grams;
    for (const auto& X : ds.views) {
        grams.push_back(X.transpose() * X);
        eig_grams.emplace_back(grams.back());
        G += grams.back();
    }
    const SymEig eigG(G);
    const SymEig eigL(graphs.laplacian_sum);

    MvmccState state;
    state.U = (1.0 / static_cast<double>(n)) * Eigen::MatrixXd::Identity(n, n);
    std::mt19937_64 rng(cfg.seed);
    std::uniform_real_distribution<double> noise(-1e-3, 1e-3);
    state.Ds.resize(m);
    for (int v = 0; v < m; ++v) {
        state.Ds[v].resize(n, n);
        for (Eigen::Index i = 0; i < n; ++i)
            for (Eigen::Index j = 0; j < n; ++j) state.Ds[v](i, j) = noise(rng);
    }
    for (int v = 0; v < m; ++v)
        state.triples.push_back(
            tri_factor_init(ds.views[v] * (state.U + state.Ds[v]), cfg.c[v],
                            cfg.r[v], cfg.seed + 1 + 2 * v));
    for (int v = 0; v < m; ++v)
        state.multipliers.push_back(Eigen::MatrixXd::Zero(ds.views[v].rows(), n));
    state.mu = cfg.mu0;

    // Ridge floor keeps the per-view Gram systems solvable when d_v << n.
    const double dm = static_cast<double>(m);
    double prev_total = 0.0;

    for (int iter = 0; iter < cfg.max_outer_iters; ++iter) {
        std::vector<Eigen::MatrixXd> kernels = aggregated_kernels(state.Ds);
        if (observer) observer(iter, 0, state);

        // (1) tri-factor heads on T^v = X^v (U + D^v)
        for (int v = 0; v < m; ++v)
            tri_factor_update(ds.views[v] * (state.U + state.Ds[v]),
                              state.triples[v]);
        if (observer) observer(iter, 1, state);

        // (2) D^v: exact quadratic minimization
        for (int v = 0; v < m; ++v) {
            const double ridge =
                1e-10 * (1.0 + grams[v].trace() / static_cast<double>(n));
            SymEig A;
            A.vectors = eig_grams[v].vectors;
            A.values = (((2.0 + state.mu) / dm) * eig_grams[v].values.array() + ridge)
                           .matrix();
            const SymEig B(2.0 * cfg.lambda1 * kernels[v]);
            const auto& t = state.triples[v];
            Eigen::MatrixXd rhs =
                (2.0 / dm) * (ds.views[v].transpose() *
                                  (t.C * t.S * t.R.transpose()) -
                              grams[v] * state.U);
            rhs += (1.0 / dm) * (ds.views[v].transpose() * state.multipliers[v]);
            rhs += (state.mu / dm) * (grams[v] - grams[v] * state.U);
            state.Ds[v] = solve_sylvester(A, B, rhs);
        }
        if (observer) observer(iter, 2, state);

        // (3) U
        {
            const double ridge = 1e-10 * (1.0 + G.trace() / static_cast<double>(n));
            SymEig A;
            A.vectors = eigG.vectors;
            A.values =
                (((2.0 + state.mu) / dm) * eigG.values.array() + ridge).matrix();
            SymEig B;
            B.vectors = eigL.vectors;
            B.values = (2.0 * cfg.lambda2 * eigL.values.array()).matrix();
            Eigen::MatrixXd rhs = Eigen::MatrixXd::Zero(n, n);
            for (int v = 0; v < m; ++v) {
                const auto& t = state.triples[v];
                rhs += (2.0 / dm) * (ds.views[v].transpose() *
                                         (t.C * t.S * t.R.transpose()) -
                                     grams[v] * state.Ds[v]);
                rhs += (1.0 / dm) * (ds.views[v].transpose() * state.multipliers[v]);
                rhs += (state.mu / dm) * (grams[v] - grams[v] * state.Ds[v]);
            }
            state.U = solve_sylvester(A, B, rhs);
        }
        if (observer) observer(iter, 3, state);

        const ObjectiveTerms terms = objective_cc(state, ds, graphs, cfg);
        const double feas = feasibility_cc(state, ds);
        state.trace.push_back({iter, terms.fit, terms.hsic, terms.smooth, feas,
                               state.mu, terms.total});
        if (!std::isfinite(terms.total) || !std::isfinite(feas))
            throw DivergenceError(
                "mvmcc solver diverged at iteration " + std::to_string(iter), iter);

        if (iter > 0) {
            const double rel_change =
                std::abs(terms.total - prev_total) / std::max(1.0, std::abs(prev_total));
            if (rel_change < cfg.tol_obj && feas < cfg.tol_feas) {
                state.converged = true;
                break;
            }
        }
        prev_total = terms.total;

        for (int v = 0; v < m; ++v)
            state.multipliers[v] +=
                state.mu * (ds.views[v] - ds.views[v] * (state.U + state.Ds[v]));
        state.mu = std::min(cfg.rho * state.mu, cfg.mu_max);
    }

    MvmccResult result;
    for (int v = 0; v < m; ++v) {
        result.row_labelings.push_back(
            harden_assignments(state.triples[v].C, &result.zero_row_warnings));
        result.column_labelings.push_back(
            harden_assignments(state.triples[v].R, &result.zero_row_warnings));
    }
    result.state = std::move(state);
    return result;
}

}  // namespace mvmc
