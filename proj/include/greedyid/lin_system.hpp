#pragma once

#include <Eigen/Dense>

#include <span>
#include <vector>

#include "greedyid/time_grid.hpp"

namespace greedyid {

// Observed linear system  phi' = A phi + B eps(t),  y = C phi,
// where B is unknown and sought as a combination of the given candidates.
struct LinearSystem {
    Eigen::MatrixXd A;                       // n x n drift
    Eigen::MatrixXd C;                       // p x n observation
    std::vector<Eigen::MatrixXd> candidates; // each n x m
    Eigen::VectorXd phi0;                    // initial state
    TimeGrid grid;

    int state_dim() const { return static_cast<int>(A.rows()); }
    int output_dim() const { return static_cast<int>(C.rows()); }
    int channel_dim() const {
        return candidates.empty() ? 0 : static_cast<int>(candidates.front().cols());
    }
    int num_candidates() const { return static_cast<int>(candidates.size()); }

    // throws std::invalid_argument on shape mismatch; candidates may be
    // linearly dependent or repeated (enriched sets are legitimate input
    // for the optimized sweep, which skips redundant elements on its own)
    void validate() const;
};

// Exact one-step update for piecewise-constant input:
//   phi_{k+1} = E phi_k + F B eps_k,   E = exp(A dt),  F = int_0^dt exp(A s) ds.
struct StepPropagator {
    Eigen::MatrixXd E;
    Eigen::MatrixXd F;

    static StepPropagator build(const Eigen::MatrixXd& A, double dt);
};

// Gram matrix of candidate responses for one control,
// [W]_{lj} = <gamma_l, gamma_j>; symmetric positive semidefinite.
struct WMatrix {
    Eigen::MatrixXd values;

    int size() const { return static_cast<int>(values.rows()); }
    double min_eigenvalue() const;
    // relative threshold against the largest eigenvalue
    int rank(double rel_tol = 1e-10) const;
    // min eigenvalue > pd_tolerance() counts as positive definite
    double pd_tolerance() const { return 1e-12 * values.trace(); }
    bool is_positive_definite() const { return min_eigenvalue() > pd_tolerance(); }
};

// sum_j coeffs[j] * candidates[selected[j]]
Eigen::MatrixXd basis_combination(const LinearSystem& sys, std::span<const int> selected,
                                  const Eigen::VectorXd& coeffs);

// State at t_final under candidate matrix B and control eps, from sys.phi0.
Eigen::VectorXd propagate_linear(const LinearSystem& sys, const Eigen::MatrixXd& B,
                                 const Control& eps);

// Output response of candidate ell alone: C (phi(T) - exp(T A) phi0)
// computed with B = candidates[ell] and zero initial state.
Eigen::VectorXd gamma_vector(const LinearSystem& sys, int ell, const Control& eps);

// Responses of all candidates, one column per candidate.
Eigen::MatrixXd gamma_matrix(const LinearSystem& sys, const Control& eps);

WMatrix w_matrix(const LinearSystem& sys, const Control& eps);

// Sum of per-control Gram matrices; with k >= 0 an empty list gives the
// k x k zero matrix.
WMatrix accumulate_w(std::span<const WMatrix> ws, int k = -1);

}  // namespace greedyid
