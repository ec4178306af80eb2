#include "greedyid/observability.hpp"

#include <stdexcept>

namespace greedyid {

Eigen::MatrixXd observability_matrix(const Eigen::MatrixXd& A, const Eigen::MatrixXd& C) {
    const auto n = A.rows();
    if (n == 0 || A.cols() != n) throw std::invalid_argument("observability_matrix: A must be square");
    if (C.cols() != n || C.rows() < 1)
        throw std::invalid_argument("observability_matrix: C must have one column per state");
    const auto p = C.rows();
    Eigen::MatrixXd obs(p * n, n);
    Eigen::MatrixXd block = C;
    for (Eigen::Index j = 0; j < n; ++j) {
        obs.middleRows(j * p, p) = block;
        if (j + 1 < n) block = block * A;
    }
    return obs;
}

// flip so the first entry of significant size is positive
static void normalize_sign(Eigen::VectorXd& v) {
    const double scale = v.cwiseAbs().maxCoeff();
    if (scale == 0.0) return;
    for (Eigen::Index i = 0; i < v.size(); ++i) {
        if (std::abs(v[i]) > 1e-12 * scale) {
            if (v[i] < 0.0) v = -v;
            return;
        }
    }
}

ObservabilityReport analyze_observability(const Eigen::MatrixXd& A, const Eigen::MatrixXd& C,
                                          double rank_tolerance) {
    if (!(rank_tolerance > 0.0))
        throw std::invalid_argument("analyze_observability: rank_tolerance must be positive");
    ObservabilityReport report;
    report.obs_matrix = observability_matrix(A, C);
    report.rank_tolerance = rank_tolerance;

    Eigen::JacobiSVD<Eigen::MatrixXd> svd(report.obs_matrix, Eigen::ComputeFullV);
    const auto n = A.rows();
    report.singular_values = Eigen::VectorXd::Zero(n);
    const auto got = svd.singularValues().size();
    report.singular_values.head(got) = svd.singularValues();

    const double top = report.singular_values[0];
    report.rank = 0;
    if (top > 0.0)
        report.rank =
            static_cast<int>((report.singular_values.array() > rank_tolerance * top).count());

    report.right_vectors.reserve(n);
    for (Eigen::Index j = 0; j < n; ++j) {
        Eigen::VectorXd v = svd.matrixV().col(j);
        normalize_sign(v);
        report.right_vectors.push_back(std::move(v));
    }
    return report;
}

std::vector<Eigen::MatrixXd> build_observability_basis(const ObservabilityReport& report,
                                                       int m_channels) {
    if (m_channels < 1)
        throw std::invalid_argument("build_observability_basis: need at least one channel");
    const auto n = static_cast<Eigen::Index>(report.right_vectors.size());
    if (n == 0) throw std::invalid_argument("build_observability_basis: empty report");
    std::vector<Eigen::MatrixXd> basis;
    basis.reserve(static_cast<std::size_t>(n) * m_channels);
    for (Eigen::Index j = 0; j < n; ++j)
        for (int i = 0; i < m_channels; ++i) {
            Eigen::MatrixXd b = Eigen::MatrixXd::Zero(n, m_channels);
            b.col(i) = report.right_vectors[j];
            basis.push_back(std::move(b));
        }
    return basis;
}

int max_identifiable(const ObservabilityReport& report, int m_channels) {
    if (m_channels < 1) throw std::invalid_argument("max_identifiable: need at least one channel");
    return report.rank * m_channels;
}

}  // namespace greedyid
