#pragma once

#include <Eigen/Dense>

#include <vector>

namespace greedyid {

// Stacked observability matrix [C; CA; ...; CA^{N-1}], N = state dimension.
Eigen::MatrixXd observability_matrix(const Eigen::MatrixXd& A, const Eigen::MatrixXd& C);

struct ObservabilityReport {
    Eigen::MatrixXd obs_matrix;
    Eigen::VectorXd singular_values;          // descending
    std::vector<Eigen::VectorXd> right_vectors; // v_1..v_N, orthonormal
    int rank = 0;
    double rank_tolerance = 1e-10;            // relative to the largest singular value

    bool fully_observable() const { return rank == static_cast<int>(right_vectors.size()); }
};

// SVD analysis of the observability matrix. Right singular vectors are
// ordered by decreasing singular value (observable directions first) and
// sign-normalized so their first entry of significant magnitude is positive.
ObservabilityReport analyze_observability(const Eigen::MatrixXd& A, const Eigen::MatrixXd& C,
                                          double rank_tolerance = 1e-10);

// Rank-one basis of R^{N x M}: element (j-1)*M + i is v_j e_i^T, so all
// elements built from observable directions come first.
std::vector<Eigen::MatrixXd> build_observability_basis(const ObservabilityReport& report,
                                                       int m_channels);

// rank * M: upper bound on recoverable coefficients in any basis.
int max_identifiable(const ObservabilityReport& report, int m_channels);

}  // namespace greedyid
