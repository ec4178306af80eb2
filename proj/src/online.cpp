#include "greedyid/online.hpp"

#include <stdexcept>
#include <string>

namespace greedyid {

Measurements simulate_measurements(const LinearSystem& sys, const Eigen::MatrixXd& B_true,
                                   std::span<const Control> controls) {
    Measurements meas;
    meas.outputs.reserve(controls.size());
    for (const auto& eps : controls)
        meas.outputs.push_back(sys.C * propagate_linear(sys, B_true, eps));
    return meas;
}

IdentificationResult identify(const LinearSystem& sys, std::span<const int> selected,
                              std::span<const Control> controls, const Measurements& meas) {
    sys.validate();
    if (controls.size() != meas.outputs.size())
        throw std::invalid_argument("identify: one measurement per control");
    if (controls.empty()) throw std::invalid_argument("identify: needs at least one control");
    if (selected.empty()) throw std::invalid_argument("identify: empty candidate selection");
    for (int ell : selected)
        if (ell < 0 || ell >= sys.num_candidates())
            throw std::invalid_argument("identify: candidate index out of range");

    const int k = static_cast<int>(selected.size());

    // drift contribution of the known initial state
    StepPropagator p = StepPropagator::build(sys.A, sys.grid.dt());
    Eigen::VectorXd drift_state = sys.phi0;
    for (int step = 0; step < sys.grid.n_steps; ++step) drift_state = p.E * drift_state;
    const Eigen::VectorXd drift_output = sys.C * drift_state;

    // normal equations sum_m G_m^T G_m alpha = sum_m G_m^T r_m over the
    // selected candidate responses
    Eigen::MatrixXd normal = Eigen::MatrixXd::Zero(k, k);
    Eigen::VectorXd rhs = Eigen::VectorXd::Zero(k);
    for (std::size_t m = 0; m < controls.size(); ++m) {
        Eigen::MatrixXd gam_all = gamma_matrix(sys, controls[m]);
        Eigen::MatrixXd gam(gam_all.rows(), k);
        for (int j = 0; j < k; ++j) gam.col(j) = gam_all.col(selected[j]);
        if (meas.outputs[m].size() != gam.rows())
            throw std::invalid_argument("identify: measurement " + std::to_string(m) +
                                        " has wrong output dimension");
        normal += gam.transpose() * gam;
        rhs += gam.transpose() * (meas.outputs[m] - drift_output);
    }
    normal = 0.5 * (normal + normal.transpose()).eval();

    IdentificationResult result;
    WMatrix w{normal};
    result.w_min_eig = w.min_eigenvalue();
    result.w_rank = w.rank();

    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(normal);
    const bool definite = es.eigenvalues().minCoeff() > w.pd_tolerance();
    if (definite) {
        result.alpha = es.eigenvectors() * (es.eigenvalues().cwiseInverse().asDiagonal() *
                                            (es.eigenvectors().transpose() * rhs));
        result.certified_unique = true;
    } else {
        // least-norm solution on the excited subspace
        const double cutoff = 1e-12 * std::max(es.eigenvalues().cwiseAbs().maxCoeff(), 0.0);
        Eigen::VectorXd coeffs = es.eigenvectors().transpose() * rhs;
        int dropped = 0;
        for (Eigen::Index i = 0; i < coeffs.size(); ++i) {
            if (es.eigenvalues()[i] > cutoff) {
                coeffs[i] /= es.eigenvalues()[i];
            } else {
                coeffs[i] = 0.0;
                ++dropped;
            }
        }
        result.alpha = es.eigenvectors() * coeffs;
        result.certified_unique = false;
        result.note = "normal matrix is singular (" + std::to_string(dropped) +
                      " unexcited directions); returned the least-norm minimizer, and "
                      "coefficients along unexcited directions are not determined by the data";
    }

    double residual = 0.0;
    Eigen::MatrixXd b_alpha = basis_combination(sys, selected, result.alpha);
    for (std::size_t m = 0; m < controls.size(); ++m) {
        Eigen::VectorXd predicted = sys.C * propagate_linear(sys, b_alpha, controls[m]);
        residual += (meas.outputs[m] - predicted).squaredNorm();
    }
    result.residual = residual;
    return result;
}

bool certify_block_structure(const WMatrix& w, int rm, double rel_tol) {
    if (rm < 0 || rm > w.size())
        throw std::invalid_argument("certify_block_structure: block size out of range");
    const auto& v = w.values;
    const double scale = std::max(v.cwiseAbs().maxCoeff(), 0.0);
    if (scale == 0.0) return rm == 0;

    // tail rows/columns must vanish
    const auto n = w.size();
    if (rm < n) {
        if (v.bottomRows(n - rm).cwiseAbs().maxCoeff() > rel_tol * scale) return false;
        if (v.rightCols(n - rm).cwiseAbs().maxCoeff() > rel_tol * scale) return false;
    }
    if (rm == 0) return true;
    WMatrix lead{v.topLeftCorner(rm, rm)};
    return lead.min_eigenvalue() > lead.pd_tolerance();
}

}  // namespace greedyid
