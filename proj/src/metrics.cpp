#include "mvmc/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <sstream>

#include <nlohmann/json.hpp>

#include "mvmc/errors.hpp"

using json = nlohmann::json;

namespace mvmc {

Eigen::MatrixXd concat_standardized(const MultiViewDataset& ds) {
    Eigen::Index total_rows = 0;
    for (const auto& X : ds.views) total_rows += X.rows();
    Eigen::MatrixXd F(total_rows, ds.n());
    Eigen::Index offset = 0;
    for (const auto& X : ds.views) {
        for (Eigen::Index i = 0; i < X.rows(); ++i) {
            const double mean = X.row(i).mean();
            const double var = (X.row(i).array() - mean).square().sum() / X.cols();
            if (var > 0.0)
                F.row(offset + i) = (X.row(i).array() - mean) / std::sqrt(var);
            else
                F.row(offset + i).setZero();
        }
        offset += X.rows();
    }
    return F;
}

namespace {

int num_clusters(const std::vector<int>& labels) {
    int k = 0;
    for (int l : labels) k = std::max(k, l + 1);
    return k;
}

Eigen::MatrixXd pairwise_distances(const Eigen::MatrixXd& X) {
    const Eigen::Index n = X.cols();
    Eigen::MatrixXd D(n, n);
    for (Eigen::Index i = 0; i < n; ++i) {
        D(i, i) = 0.0;
        for (Eigen::Index j = i + 1; j < n; ++j) {
            D(i, j) = (X.col(i) - X.col(j)).norm();
            D(j, i) = D(i, j);
        }
    }
    return D;
}

void check_labels(const Eigen::MatrixXd& X, const std::vector<int>& labels) {
    if (static_cast<Eigen::Index>(labels.size()) != X.cols())
        throw ShapeError("label vector length does not match sample count");
    for (int l : labels)
        if (l < 0) throw ValidationError("negative cluster label");
}

}  // namespace

double silhouette(const Eigen::MatrixXd& X, const std::vector<int>& labels) {
    check_labels(X, labels);
    const Eigen::Index n = X.cols();
    const int k = num_clusters(labels);
    if (k < 2) throw MetricError("silhouette undefined for a single cluster");

    std::vector<Eigen::Index> sizes(k, 0);
    for (int l : labels) ++sizes[l];

    const Eigen::MatrixXd D = pairwise_distances(X);
    double total = 0.0;
    for (Eigen::Index i = 0; i < n; ++i) {
        std::vector<double> sums(k, 0.0);
        for (Eigen::Index j = 0; j < n; ++j) sums[labels[j]] += D(i, j);
        const int own = labels[i];
        if (sizes[own] <= 1) continue;  // singleton contributes 0
        const double a = sums[own] / static_cast<double>(sizes[own] - 1);
        double b = std::numeric_limits<double>::infinity();
        for (int c = 0; c < k; ++c)
            if (c != own && sizes[c] > 0)
                b = std::min(b, sums[c] / static_cast<double>(sizes[c]));
        const double denom = std::max(a, b);
        total += denom > 0.0 ? (b - a) / denom : 0.0;
    }
    return total / static_cast<double>(n);
}

double dunn_index(const Eigen::MatrixXd& X, const std::vector<int>& labels) {
    check_labels(X, labels);
    const Eigen::Index n = X.cols();
    const int k = num_clusters(labels);
    if (k < 2) throw MetricError("dunn index undefined for a single cluster");

    const Eigen::MatrixXd D = pairwise_distances(X);
    double min_inter = std::numeric_limits<double>::infinity();
    double max_diam = 0.0;
    for (Eigen::Index i = 0; i < n; ++i)
        for (Eigen::Index j = i + 1; j < n; ++j) {
            if (labels[i] == labels[j])
                max_diam = std::max(max_diam, D(i, j));
            else
                min_inter = std::min(min_inter, D(i, j));
        }
    if (max_diam == 0.0)
        throw MetricError("dunn index undefined: zero intra-cluster diameter");
    return min_inter / max_diam;
}

double nmi(const std::vector<int>& a, const std::vector<int>& b) {
    if (a.size() != b.size()) throw ShapeError("nmi: label vectors differ in length");
    if (a.empty()) throw ParameterError("nmi: empty labelings");
    const double n = static_cast<double>(a.size());
    const int ka = num_clusters(a), kb = num_clusters(b);

    Eigen::MatrixXd cont = Eigen::MatrixXd::Zero(ka, kb);
    for (size_t i = 0; i < a.size(); ++i) cont(a[i], b[i]) += 1.0;
    const Eigen::VectorXd pa = cont.rowwise().sum() / n;
    const Eigen::VectorXd pb = cont.colwise().sum().transpose() / n;

    double ha = 0.0, hb = 0.0, mi = 0.0;
    for (int i = 0; i < ka; ++i)
        if (pa(i) > 0) ha -= pa(i) * std::log(pa(i));
    for (int j = 0; j < kb; ++j)
        if (pb(j) > 0) hb -= pb(j) * std::log(pb(j));
    for (int i = 0; i < ka; ++i)
        for (int j = 0; j < kb; ++j) {
            const double pij = cont(i, j) / n;
            if (pij > 0) mi += pij * std::log(pij / (pa(i) * pb(j)));
        }

    if (ha == 0.0 && hb == 0.0) return 1.0;  // both trivial -> identical partitions
    if (ha == 0.0 || hb == 0.0) return 0.0;
    return std::clamp(mi / std::sqrt(ha * hb), 0.0, 1.0);
}

double jaccard(const std::vector<int>& a, const std::vector<int>& b) {
    if (a.size() != b.size())
        throw ShapeError("jaccard: label vectors differ in length");
    if (a.size() < 2) throw ParameterError("jaccard: need at least 2 samples");
    long long n11 = 0, n10 = 0, n01 = 0;
    for (size_t i = 0; i < a.size(); ++i)
        for (size_t j = i + 1; j < a.size(); ++j) {
            const bool in_a = a[i] == a[j];
            const bool in_b = b[i] == b[j];
            if (in_a && in_b)
                ++n11;
            else if (in_a)
                ++n10;
            else if (in_b)
                ++n01;
        }
    const long long denom = n11 + n10 + n01;
    return denom == 0 ? 0.0 : static_cast<double>(n11) / static_cast<double>(denom);
}

ClusteringReport build_report(const MultiViewDataset& ds,
                              const std::vector<std::vector<int>>& labelings) {
    for (const auto& l : labelings)
        if (static_cast<Eigen::Index>(l.size()) != ds.n())
            throw ShapeError("labeling length does not match dataset sample count");

    ClusteringReport report;
    report.labelings = labelings;
    const Eigen::MatrixXd F = concat_standardized(ds);
    const int h = static_cast<int>(labelings.size());

    for (const auto& labels : labelings) {
        try {
            report.sc.push_back(silhouette(F, labels));
        } catch (const MetricError&) {
            report.sc.push_back(std::nullopt);
        }
        try {
            report.di.push_back(dunn_index(F, labels));
        } catch (const MetricError&) {
            report.di.push_back(std::nullopt);
        }
    }

    report.nmi_matrix = Eigen::MatrixXd::Identity(h, h);
    report.jc_matrix = Eigen::MatrixXd::Identity(h, h);
    for (int i = 0; i < h; ++i)
        for (int j = i + 1; j < h; ++j) {
            report.nmi_matrix(i, j) = report.nmi_matrix(j, i) =
                nmi(labelings[i], labelings[j]);
            report.jc_matrix(i, j) = report.jc_matrix(j, i) =
                jaccard(labelings[i], labelings[j]);
        }

    auto mean_opt = [](const std::vector<std::optional<double>>& vals)
        -> std::optional<double> {
        double sum = 0.0;
        int count = 0;
        for (const auto& v : vals)
            if (v) {
                sum += *v;
                ++count;
            }
        if (count == 0) return std::nullopt;
        return sum / count;
    };
    report.mean_sc = mean_opt(report.sc);
    report.mean_di = mean_opt(report.di);
    if (h >= 2) {
        double nmi_sum = 0.0, jc_sum = 0.0;
        int pairs = 0;
        for (int i = 0; i < h; ++i)
            for (int j = i + 1; j < h; ++j) {
                nmi_sum += report.nmi_matrix(i, j);
                jc_sum += report.jc_matrix(i, j);
                ++pairs;
            }
        report.mean_nmi = nmi_sum / pairs;
        report.mean_jc = jc_sum / pairs;
    }
    return report;
}

namespace {

json opt_to_json(const std::optional<double>& v) {
    if (!v) return nullptr;
    return *v;
}

json matrix_to_json(const Eigen::MatrixXd& M) {
    json rows = json::array();
    for (Eigen::Index i = 0; i < M.rows(); ++i) {
        json row = json::array();
        for (Eigen::Index j = 0; j < M.cols(); ++j) row.push_back(M(i, j));
        rows.push_back(row);
    }
    return rows;
}

}  // namespace

std::string ClusteringReport::to_json() const {
    json j;
    j["num_clusterings"] = labelings.size();
    j["labelings"] = labelings;
    json quality = json::array();
    for (size_t k = 0; k < labelings.size(); ++k) {
        json q;
        q["sc"] = opt_to_json(k < sc.size() ? sc[k] : std::optional<double>{});
        q["di"] = opt_to_json(k < di.size() ? di[k] : std::optional<double>{});
        quality.push_back(q);
    }
    j["quality"] = quality;
    if (labelings.size() >= 2) {
        j["diversity"]["nmi"] = matrix_to_json(nmi_matrix);
        j["diversity"]["jc"] = matrix_to_json(jc_matrix);
    }
    j["averages"]["sc"] = opt_to_json(mean_sc);
    j["averages"]["di"] = opt_to_json(mean_di);
    j["averages"]["nmi"] = opt_to_json(mean_nmi);
    j["averages"]["jc"] = opt_to_json(mean_jc);
    j["zero_row_warnings"] = zero_row_warnings;
    return j.dump(2);
}

std::string ClusteringReport::to_csv() const {
    std::ostringstream out;
    out << "clustering,sc,di\n";
    for (size_t k = 0; k < labelings.size(); ++k) {
        out << k << ',';
        if (k < sc.size() && sc[k]) out << *sc[k];
        out << ',';
        if (k < di.size() && di[k]) out << *di[k];
        out << '\n';
    }
    out << "pair,nmi,jc\n";
    for (size_t i = 0; i < labelings.size(); ++i)
        for (size_t j = i + 1; j < labelings.size(); ++j)
            out << i << '-' << j << ',' << nmi_matrix(i, j) << ','
                << jc_matrix(i, j) << '\n';
    return out.str();
}

}  // namespace mvmc
