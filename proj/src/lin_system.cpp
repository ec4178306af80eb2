#include "greedyid/lin_system.hpp"

#include <unsupported/Eigen/MatrixFunctions>

#include <stdexcept>
#include <string>

namespace greedyid {

void LinearSystem::validate() const {
    const auto n = A.rows();
    if (n == 0 || A.cols() != n)
        throw std::invalid_argument("LinearSystem: A must be square and nonempty");
    if (C.cols() != n || C.rows() < 1)
        throw std::invalid_argument("LinearSystem: C must have a row and one column per state");
    if (phi0.size() != n)
        throw std::invalid_argument("LinearSystem: phi0 length must match the state dimension");
    if (candidates.empty())
        throw std::invalid_argument("LinearSystem: needs at least one candidate");
    const auto m = candidates.front().cols();
    if (m < 1) throw std::invalid_argument("LinearSystem: candidates need at least one column");
    for (std::size_t i = 0; i < candidates.size(); ++i) {
        const auto& b = candidates[i];
        if (b.rows() != n || b.cols() != m)
            throw std::invalid_argument("LinearSystem: candidate " + std::to_string(i) +
                                        " has inconsistent shape");
        if (!b.allFinite())
            throw std::invalid_argument("LinearSystem: candidate " + std::to_string(i) +
                                        " has non-finite entries");
    }
    if (!A.allFinite() || !C.allFinite() || !phi0.allFinite())
        throw std::invalid_argument("LinearSystem: non-finite system data");
    (void)TimeGrid(grid.t_final, grid.n_steps);  // re-check grid invariants
}

StepPropagator StepPropagator::build(const Eigen::MatrixXd& A, double dt) {
    if (A.rows() != A.cols()) throw std::invalid_argument("StepPropagator: A must be square");
    if (!(dt > 0.0)) throw std::invalid_argument("StepPropagator: dt must be positive");
    const auto n = A.rows();
    // exp([[A, I], [0, 0]] dt) = [[exp(A dt), int_0^dt exp(A s) ds], [0, I]]
    Eigen::MatrixXd aug = Eigen::MatrixXd::Zero(2 * n, 2 * n);
    aug.topLeftCorner(n, n) = A * dt;
    aug.topRightCorner(n, n) = Eigen::MatrixXd::Identity(n, n) * dt;
    Eigen::MatrixXd aug_exp = aug.exp();
    StepPropagator p;
    p.E = aug_exp.topLeftCorner(n, n);
    p.F = aug_exp.topRightCorner(n, n);
    return p;
}

double WMatrix::min_eigenvalue() const {
    if (values.size() == 0) return 0.0;
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(values, Eigen::EigenvaluesOnly);
    return es.eigenvalues().minCoeff();
}

int WMatrix::rank(double rel_tol) const {
    if (values.size() == 0) return 0;
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(values, Eigen::EigenvaluesOnly);
    const double largest = es.eigenvalues().cwiseAbs().maxCoeff();
    if (largest <= 0.0) return 0;
    return static_cast<int>((es.eigenvalues().array() > rel_tol * largest).count());
}

Eigen::MatrixXd basis_combination(const LinearSystem& sys, std::span<const int> selected,
                                  const Eigen::VectorXd& coeffs) {
    if (static_cast<std::size_t>(coeffs.size()) != selected.size())
        throw std::invalid_argument("basis_combination: one coefficient per selected candidate");
    Eigen::MatrixXd out =
        Eigen::MatrixXd::Zero(sys.state_dim(), sys.channel_dim());
    for (std::size_t j = 0; j < selected.size(); ++j) {
        int ell = selected[j];
        if (ell < 0 || ell >= sys.num_candidates())
            throw std::invalid_argument("basis_combination: candidate index out of range");
        out += coeffs[static_cast<Eigen::Index>(j)] * sys.candidates[ell];
    }
    return out;
}

static void check_control(const LinearSystem& sys, const Control& eps, const char* fn) {
    if (!(eps.grid == sys.grid))
        throw std::invalid_argument(std::string(fn) + ": control grid must match the system grid");
    if (eps.channels() != sys.channel_dim())
        throw std::invalid_argument(std::string(fn) + ": control channel count mismatch");
}

Eigen::VectorXd propagate_linear(const LinearSystem& sys, const Eigen::MatrixXd& B,
                                 const Control& eps) {
    check_control(sys, eps, "propagate_linear");
    if (B.rows() != sys.state_dim() || B.cols() != sys.channel_dim())
        throw std::invalid_argument("propagate_linear: B shape mismatch");
    StepPropagator p = StepPropagator::build(sys.A, sys.grid.dt());
    Eigen::VectorXd phi = sys.phi0;
    for (int k = 0; k < sys.grid.n_steps; ++k)
        phi = p.E * phi + p.F * (B * eps.values.col(k));
    return phi;
}

Eigen::MatrixXd gamma_matrix(const LinearSystem& sys, const Control& eps) {
    check_control(sys, eps, "gamma_matrix");
    const int n = sys.state_dim();
    const int big_k = sys.num_candidates();
    StepPropagator p = StepPropagator::build(sys.A, sys.grid.dt());
    // one zero-state propagation per candidate, batched column-wise
    Eigen::MatrixXd states = Eigen::MatrixXd::Zero(n, big_k);
    Eigen::MatrixXd drive(n, big_k);
    for (int k = 0; k < sys.grid.n_steps; ++k) {
        for (int ell = 0; ell < big_k; ++ell)
            drive.col(ell) = sys.candidates[ell] * eps.values.col(k);
        states = p.E * states + p.F * drive;
    }
    return sys.C * states;
}

Eigen::VectorXd gamma_vector(const LinearSystem& sys, int ell, const Control& eps) {
    if (ell < 0 || ell >= sys.num_candidates())
        throw std::invalid_argument("gamma_vector: candidate index out of range");
    check_control(sys, eps, "gamma_vector");
    StepPropagator p = StepPropagator::build(sys.A, sys.grid.dt());
    Eigen::VectorXd state = Eigen::VectorXd::Zero(sys.state_dim());
    for (int k = 0; k < sys.grid.n_steps; ++k)
        state = p.E * state + p.F * (sys.candidates[ell] * eps.values.col(k));
    return sys.C * state;
}

WMatrix w_matrix(const LinearSystem& sys, const Control& eps) {
    Eigen::MatrixXd gam = gamma_matrix(sys, eps);
    Eigen::MatrixXd w = gam.transpose() * gam;
    w = 0.5 * (w + w.transpose()).eval();  // keep exact symmetry
    return WMatrix{std::move(w)};
}

WMatrix accumulate_w(std::span<const WMatrix> ws, int k) {
    if (ws.empty()) {
        if (k < 0) throw std::invalid_argument("accumulate_w: empty list needs a dimension");
        return WMatrix{Eigen::MatrixXd::Zero(k, k)};
    }
    const auto size = ws.front().values.rows();
    if (k >= 0 && k != size)
        throw std::invalid_argument("accumulate_w: dimension does not match the entries");
    Eigen::MatrixXd sum = Eigen::MatrixXd::Zero(size, size);
    for (const auto& w : ws) {
        if (w.values.rows() != size || w.values.cols() != size)
            throw std::invalid_argument("accumulate_w: mixed matrix sizes");
        sum += w.values;
    }
    return WMatrix{std::move(sum)};
}

}  // namespace greedyid
