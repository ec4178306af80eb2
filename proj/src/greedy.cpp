#include "greedyid/greedy.hpp"

#include <stdexcept>
#include <string>

#include "greedyid/detail/response_map.hpp"

namespace greedyid {

Eigen::MatrixXd control_to_output_map(const LinearSystem& sys, const Eigen::MatrixXd& B_tilde) {
    if (B_tilde.rows() != sys.state_dim() || B_tilde.cols() != sys.channel_dim())
        throw std::invalid_argument("control_to_output_map: direction shape mismatch");
    return detail::ResponseMapCache(sys).map(B_tilde);
}

DiscriminatoryResult solve_initialization(const LinearSystem& sys, int ell,
                                          const AdmissibleSet& adm) {
    if (ell < 0 || ell >= sys.num_candidates())
        throw std::invalid_argument("solve_initialization: candidate index out of range");
    return detail::ResponseMapCache(sys).maximize(sys.candidates[ell], adm);
}

static void check_fitting_args(const WMatrix& w_hat, int k) {
    if (k < 1) throw std::invalid_argument("solve_fitting: k must be >= 1");
    if (w_hat.size() < k + 1)
        throw std::invalid_argument("solve_fitting: matrix must cover candidates 0..k");
}

static FittingSolution finish_fit(const WMatrix& w_hat, int k, Eigen::VectorXd alpha) {
    FittingSolution fit;
    fit.kernel_vector = Eigen::VectorXd(k + 1);
    fit.kernel_vector.head(k) = alpha;
    fit.kernel_vector[k] = -1.0;
    // objective value at alpha: <v, W v> over the leading (k+1) block
    const auto& wv = w_hat.values;
    fit.residual = std::max(
        0.0, fit.kernel_vector.dot(wv.topLeftCorner(k + 1, k + 1) * fit.kernel_vector));
    fit.alpha = std::move(alpha);
    return fit;
}

FittingSolution solve_fitting(const WMatrix& w_hat, int k) {
    check_fitting_args(w_hat, k);
    const Eigen::MatrixXd block = w_hat.values.topLeftCorner(k, k);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(block);
    if (es.eigenvalues().minCoeff() <= w_hat.pd_tolerance())
        throw std::runtime_error("solve_fitting: leading block is not positive definite");
    const Eigen::VectorXd cross = w_hat.values.block(0, k, k, 1);
    Eigen::VectorXd alpha = es.eigenvectors() *
                            (es.eigenvalues().cwiseInverse().asDiagonal() *
                             (es.eigenvectors().transpose() * cross));
    return finish_fit(w_hat, k, std::move(alpha));
}

FittingSolution solve_fitting_min_norm(const WMatrix& w_hat, int k) {
    check_fitting_args(w_hat, k);
    const Eigen::MatrixXd block = w_hat.values.topLeftCorner(k, k);
    const Eigen::VectorXd cross = w_hat.values.block(0, k, k, 1);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(block);
    const double cutoff = 1e-12 * std::max(es.eigenvalues().cwiseAbs().maxCoeff(), 0.0);
    Eigen::VectorXd coeffs = es.eigenvectors().transpose() * cross;
    for (Eigen::Index i = 0; i < coeffs.size(); ++i) {
        const double lam = es.eigenvalues()[i];
        coeffs[i] = lam > cutoff ? coeffs[i] / lam : 0.0;
    }
    Eigen::VectorXd alpha = es.eigenvectors() * coeffs;
    // the normal equations must be consistent for a Gram-matrix input
    const double scale = cross.norm() + block.norm();
    if ((block * alpha - cross).norm() > 1e-8 * std::max(scale, 1.0))
        throw std::runtime_error("solve_fitting_min_norm: inconsistent normal equations");
    return finish_fit(w_hat, k, std::move(alpha));
}

DiscriminatoryResult solve_discriminatory(const LinearSystem& sys, int target,
                                          std::span<const int> selected,
                                          const Eigen::VectorXd& alpha,
                                          const AdmissibleSet& adm) {
    if (target < 0 || target >= sys.num_candidates())
        throw std::invalid_argument("solve_discriminatory: target index out of range");
    Eigen::MatrixXd b_tilde = sys.candidates[target] - basis_combination(sys, selected, alpha);
    return detail::ResponseMapCache(sys).maximize(b_tilde, adm);
}

GreedyResult gr_run(const LinearSystem& sys, const AdmissibleSet& adm) {
    sys.validate();
    const int big_k = sys.num_candidates();
    detail::ResponseMapCache cache(sys);

    GreedyResult result;
    result.controls.reserve(big_k);
    result.selected.reserve(big_k);
    result.discriminatory_values.reserve(big_k);

    DiscriminatoryResult init = cache.maximize(sys.candidates[0], adm);
    result.controls.push_back(init.control);
    result.selected.push_back(0);
    result.discriminatory_values.push_back(init.value);

    Eigen::MatrixXd w_hat = w_matrix(sys, init.control).values;

    for (int k = 1; k < big_k; ++k) {
        WMatrix w{w_hat};
        FittingSolution fit;
        try {
            // min-norm fit matches the definite closed form and also covers
            // degenerate candidate sets, which must complete with their
            // degeneracy on record rather than abort
            fit = solve_fitting_min_norm(w, k);
        } catch (const std::runtime_error& e) {
            throw std::runtime_error("gr_run: fitting failed at iteration " + std::to_string(k) +
                                     ": " + e.what());
        }

        Eigen::MatrixXd b_tilde = sys.candidates[k];
        for (int j = 0; j < k; ++j) b_tilde -= fit.alpha[j] * sys.candidates[j];
        DiscriminatoryResult disc = cache.maximize(b_tilde, adm);

        result.fitting_history.push_back(std::move(fit));
        result.controls.push_back(disc.control);
        result.selected.push_back(k);
        result.discriminatory_values.push_back(disc.value);

        w_hat += w_matrix(sys, disc.control).values;
    }
    result.stop_reason = StopReason::completed;
    return result;
}

}  // namespace greedyid
