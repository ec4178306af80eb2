#pragma once

#include <Eigen/Dense>

#include <complex>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "greedyid/greedy.hpp"
#include "greedyid/time_grid.hpp"

namespace greedyid {

// Controlled Schrodinger system  i psi' = (H + eps(t) mu) psi  with real
// symmetric H and candidate operators mu; the scalar probe is the overlap
// of psi(T) with a fixed target state.
struct QuantumSystem {
    Eigen::MatrixXd hamiltonian;              // n x n, symmetric
    std::vector<Eigen::MatrixXd> candidates;  // each n x n, symmetric
    Eigen::VectorXcd psi0;                    // unit norm
    Eigen::VectorXcd psi1;                    // unit norm
    TimeGrid grid;

    int dim() const { return static_cast<int>(hamiltonian.rows()); }
    int num_candidates() const { return static_cast<int>(candidates.size()); }
    void validate() const;
};

// sum_j alpha_j * candidates[selected[j]]
Eigen::MatrixXd mu_combination(const QuantumSystem& qsys, std::span<const int> selected,
                               const Eigen::VectorXd& alpha);

// Exact step propagation: each step applies exp(-i dt (H + eps_k mu))
// through an eigendecomposition, so the flow is unitary to rounding.
Eigen::VectorXcd propagate_schrodinger(const QuantumSystem& qsys, const Eigen::MatrixXd& mu,
                                       const Control& eps);

// Terminal overlap <psi1, psi(T)> (conjugate-linear in the first slot).
std::complex<double> phi(const QuantumSystem& qsys, const Eigen::MatrixXd& mu,
                         const Control& eps);

// Overlap together with its exact derivative with respect to each control
// step value, from one forward/backward pass with the eigenbasis rule for
// differentiating the step exponentials.
struct PhiControlGradient {
    std::complex<double> value;
    Eigen::VectorXcd d_control;  // length n_steps
};
PhiControlGradient phi_control_gradient(const QuantumSystem& qsys, const Eigen::MatrixXd& mu,
                                        const Control& eps);

// Same for the overlap as a function of combination coefficients alpha at
// fixed control: mu = sum_j alpha_j candidates[selected[j]].
struct PhiCoeffGradient {
    std::complex<double> value;
    Eigen::VectorXcd d_alpha;  // length selected.size()
};
PhiCoeffGradient phi_coeff_gradient(const QuantumSystem& qsys, std::span<const int> selected,
                                    const Eigen::VectorXd& alpha, const Control& eps);

struct MonotonicConfig {
    Control initial_control;
    double penalty = -1.0;          // L2 penalty weight; < 0 picks it so the
                                    // penalty is ~1% of the initial mismatch
    int max_sweeps = 80;
    double ascent_tolerance = 1e-10;  // stop when a sweep gains less than this
};

struct MonotonicResult {
    Control control;
    double objective = 0.0;   // mismatch minus penalty at the final control
    double mismatch = 0.0;    // |phi(mu_a, eps) - phi(mu_b, eps)|^2
    int sweeps = 0;
    std::vector<double> sweep_objectives;  // nondecreasing by construction
};

// Maximizes |phi(mu_a, eps) - phi(mu_b, eps)|^2 - penalty * ||eps||^2 by
// forward/backward sweeps with an implicit field update. Sweeps run with an
// adaptive working penalty that is stiffened until the proposed field passes
// the true objective, with a backtracked ascent step along the exact
// gradient as the last resort, so sweep_objectives never decreases.
MonotonicResult monotonic_maximize(const QuantumSystem& qsys, const Eigen::MatrixXd& mu_a,
                                   const Eigen::MatrixXd& mu_b, const MonotonicConfig& cfg);

struct FitResult {
    Eigen::VectorXd alpha;
    double residual = 0.0;  // sum of squared overlap mismatches at alpha
};

struct MultistartConfig {
    int n_starts = 10;
    double box_radius = 1.0;     // starts are drawn uniformly in center +- radius
    Eigen::VectorXd center;      // empty means the origin
    std::uint64_t seed = 0;
    int max_iters = 200;
    double grad_tolerance = 1e-9;
};

// Fits coefficients over the selected candidates so the combined operator
// reproduces the overlaps of candidate `target` on the given controls.
// Quasi-Newton descent with backtracking from n_starts seeded points plus
// the operator-space projection of the target; the best local minimum wins.
// The projection start makes exactly reproducible targets land on zero
// mismatch, so dependent candidates are culled reliably.
FitResult fit_multistart(const QuantumSystem& qsys, int target, std::span<const int> selected,
                         std::span<const Control> controls, const MultistartConfig& cfg);

// Same descent, but against measured overlaps of an unknown operator.
FitResult identify_quantum(const QuantumSystem& qsys, std::span<const int> selected,
                           std::span<const Control> controls,
                           std::span<const std::complex<double>> measured,
                           const MultistartConfig& cfg);

struct QuantumGreedyConfig {
    double tol = -1.0;            // stop threshold on the mismatch value; < 0
                                  // resolves to 1e-8 * best initialization value
    double penalty = -1.0;        // forwarded to MonotonicConfig
    int monotonic_sweeps = 80;
    double ascent_tolerance = 1e-10;
    double init_amplitude = 0.1;  // seeded uniform initial control amplitude
    int fit_starts = 8;
    double fit_box_radius = 2.0;
    int fit_max_iters = 150;
    std::uint64_t seed = 0;
    bool parallel = false;
};

// Fixed-order sweep: initialization discriminates candidate 0 against the
// uncontrolled flow, then K-1 fit/discriminate rounds. Always K controls.
GreedyResult gr_quantum_run(const QuantumSystem& qsys, const QuantumGreedyConfig& cfg);

// Optimized sweep with candidate selection and early stop; operators whose
// overlaps are reproducible on the already-selected span reach mismatch ~0
// and are never selected.
GreedyResult ogr_quantum_run(const QuantumSystem& qsys, const QuantumGreedyConfig& cfg);

}  // namespace greedyid
