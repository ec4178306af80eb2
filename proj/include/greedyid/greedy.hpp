#pragma once

#include <Eigen/Dense>

#include <span>
#include <vector>

#include "greedyid/lin_system.hpp"
#include "greedyid/time_grid.hpp"

namespace greedyid {

struct FittingSolution {
    Eigen::VectorXd alpha;
    double residual = 0.0;          // value of the fitting objective at alpha
    Eigen::VectorXd kernel_vector;  // (alpha, -1)
};

struct DiscriminatoryResult {
    Control control;
    double value = 0.0;          // radius^2 * sigma^2, the attained objective
    double singular_value = 0.0; // top singular value of the scaled response map
};

enum class StopReason { completed, below_tolerance };

struct GreedyResult {
    std::vector<Control> controls;
    std::vector<int> selected;                  // candidate indices, in selection order
    std::vector<FittingSolution> fitting_history;
    std::vector<double> discriminatory_values;  // one per computed control
    StopReason stop_reason = StopReason::completed;
};

// Discretized response map L of a direction matrix Bt: the terminal output
// of the zero-state system driven by eps is L vec(eps) dt, where block k of
// L is C exp((T - t_{k+1}) A) F Bt / dt. Singular values of sqrt(dt) L give
// the exact maxima of ||gamma(eps)|| over L2 balls.
Eigen::MatrixXd control_to_output_map(const LinearSystem& sys, const Eigen::MatrixXd& B_tilde);

// Best control for exciting candidate ell alone:
// argmax of ||gamma_ell(eps)||^2 over the ball.
DiscriminatoryResult solve_initialization(const LinearSystem& sys, int ell,
                                          const AdmissibleSet& adm);

// Closed-form fit of the first k candidates to candidate k+1 (0-based: the
// candidate at index k). Requires the leading k x k block of w_hat to be
// positive definite; throws std::runtime_error otherwise.
FittingSolution solve_fitting(const WMatrix& w_hat, int k);

// Minimum-norm fit for the positive semidefinite case. Agrees with
// solve_fitting when the leading block is definite; on singular blocks it
// returns the least-norm minimizer of the same objective.
FittingSolution solve_fitting_min_norm(const WMatrix& w_hat, int k);

// Control maximizing the mismatch between candidate `target` and the
// fitted combination over `selected`:
// argmax of ||gamma_target(eps) - sum_j alpha_j gamma_{selected[j]}(eps)||^2.
// A zero response map yields value 0 and a constant fallback control.
DiscriminatoryResult solve_discriminatory(const LinearSystem& sys, int target,
                                          std::span<const int> selected,
                                          const Eigen::VectorXd& alpha,
                                          const AdmissibleSet& adm);

// Fixed-order sweep over all candidates: initialization on candidate 0,
// then K-1 fitting/discriminatory rounds. Produces exactly K controls.
// Candidates whose fitted mismatch map vanishes get value 0 and a fallback
// control; the run never reorders or stops early. Fitting falls back to the
// minimum-norm solution when a leading block is singular, so inconclusive
// candidate sets still complete and their degeneracy shows up in the
// accumulated Gram matrix.
GreedyResult gr_run(const LinearSystem& sys, const AdmissibleSet& adm);

}  // namespace greedyid
