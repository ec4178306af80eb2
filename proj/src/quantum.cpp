#include "greedyid/quantum.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>
#include <tuple>
#include <vector>

#include "greedyid/parallel.hpp"
#include "greedyid/rng.hpp"

namespace greedyid {

namespace {

using cd = std::complex<double>;
constexpr cd kI{0.0, 1.0};

// eigenbasis of one step generator H + eps_k mu
struct StepBasis {
    Eigen::MatrixXd q;    // orthogonal
    Eigen::VectorXd lam;  // ascending
};

StepBasis decompose(const Eigen::MatrixXd& g) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(g);
    return {es.eigenvectors(), es.eigenvalues()};
}

// exp(-i dt G) v (or its adjoint exp(+i dt G) v) through the eigenbasis
Eigen::VectorXcd apply_step(const StepBasis& sb, double dt, const Eigen::VectorXcd& v,
                            bool adjoint) {
    Eigen::VectorXcd tilde = sb.q.transpose() * v.real() +
                             kI * (sb.q.transpose() * v.imag()).eval();
    const double sign = adjoint ? 1.0 : -1.0;
    for (Eigen::Index p = 0; p < tilde.size(); ++p)
        tilde[p] *= std::exp(cd(0.0, sign * dt * sb.lam[p]));
    return sb.q * tilde.real() + kI * (sb.q * tilde.imag()).eval();
}

struct Trajectory {
    std::vector<StepBasis> basis;        // one per step
    std::vector<Eigen::VectorXcd> states;  // n_steps + 1
};

Trajectory forward_pass(const Eigen::MatrixXd& h, const Eigen::MatrixXd& mu,
                        const Eigen::VectorXcd& psi0, const Eigen::RowVectorXd& eps,
                        double dt) {
    Trajectory traj;
    const int n_steps = static_cast<int>(eps.size());
    traj.basis.reserve(n_steps);
    traj.states.reserve(n_steps + 1);
    traj.states.push_back(psi0);
    // a zero operator leaves the generator constant, so one decomposition
    // serves every step (h + e*0 is h exactly, no tolerance involved)
    const bool constant = mu.isZero(0.0);
    const StepBasis fixed = constant ? decompose(h) : StepBasis{};
    for (int k = 0; k < n_steps; ++k) {
        traj.basis.push_back(constant ? fixed : decompose(h + eps[k] * mu));
        traj.states.push_back(apply_step(traj.basis.back(), dt, traj.states.back(), false));
    }
    return traj;
}

double sinc(double x) { return std::abs(x) < 1e-8 ? 1.0 - x * x / 6.0 : std::sin(x) / x; }

// divided differences of x -> exp(-i dt x) on the step spectrum:
// phi_{pq} = -i dt exp(-i dt (l_p + l_q)/2) sinc(dt (l_p - l_q)/2)
Eigen::MatrixXcd divided_differences(const Eigen::VectorXd& lam, double dt) {
    const auto n = lam.size();
    Eigen::MatrixXcd phi(n, n);
    for (Eigen::Index p = 0; p < n; ++p)
        for (Eigen::Index q = 0; q < n; ++q) {
            const double mid = 0.5 * (lam[p] + lam[q]);
            const double gap = 0.5 * (lam[p] - lam[q]);
            phi(p, q) = -kI * dt * std::exp(cd(0.0, -dt * mid)) * sinc(dt * gap);
        }
    return phi;
}

void check_quantum_control(const QuantumSystem& qsys, const Control& eps, const char* fn) {
    if (!(eps.grid == qsys.grid))
        throw std::invalid_argument(std::string(fn) + ": control grid must match the system grid");
    if (eps.channels() != 1)
        throw std::invalid_argument(std::string(fn) + ": expected a single-channel control");
}

void check_candidate_shape(const QuantumSystem& qsys, const Eigen::MatrixXd& mu, const char* fn) {
    if (mu.rows() != qsys.dim() || mu.cols() != qsys.dim())
        throw std::invalid_argument(std::string(fn) + ": operator shape mismatch");
}

// shared backward pass: phi value plus, per step, the matrix T in the step
// eigenbasis such that dphi = sum_{pq} (Q^T dG Q)_{pq} T_{pq} for any
// symmetric generator perturbation dG of that step
template <typename PerStep>
cd backward_pass(const Trajectory& traj, const Eigen::VectorXcd& psi1, double dt,
                 PerStep&& per_step) {
    const int n_steps = static_cast<int>(traj.basis.size());
    const cd value = psi1.dot(traj.states.back());
    Eigen::VectorXcd chi = psi1;
    for (int k = n_steps - 1; k >= 0; --k) {
        const StepBasis& sb = traj.basis[k];
        Eigen::VectorXcd chi_t = sb.q.transpose() * chi.real() +
                                 kI * (sb.q.transpose() * chi.imag()).eval();
        Eigen::VectorXcd psi_t = sb.q.transpose() * traj.states[k].real() +
                                 kI * (sb.q.transpose() * traj.states[k].imag()).eval();
        Eigen::MatrixXcd t_mat = divided_differences(sb.lam, dt);
        for (Eigen::Index p = 0; p < t_mat.rows(); ++p)
            for (Eigen::Index q = 0; q < t_mat.cols(); ++q)
                t_mat(p, q) *= std::conj(chi_t[p]) * psi_t[q];
        per_step(k, sb, t_mat);
        chi = apply_step(sb, dt, chi, true);
    }
    return value;
}

cd pair_against(const Eigen::MatrixXd& mu, const StepBasis& sb, const Eigen::MatrixXcd& t_mat) {
    const Eigen::MatrixXd x = sb.q.transpose() * mu * sb.q;
    cd out{0.0, 0.0};
    for (Eigen::Index p = 0; p < x.rows(); ++p)
        for (Eigen::Index q = 0; q < x.cols(); ++q) out += x(p, q) * t_mat(p, q);
    return out;
}

}  // namespace

void QuantumSystem::validate() const {
    const auto n = hamiltonian.rows();
    if (n == 0 || hamiltonian.cols() != n)
        throw std::invalid_argument("QuantumSystem: hamiltonian must be square and nonempty");
    if ((hamiltonian - hamiltonian.transpose()).cwiseAbs().maxCoeff() >
        1e-12 * std::max(1.0, hamiltonian.cwiseAbs().maxCoeff()))
        throw std::invalid_argument("QuantumSystem: hamiltonian must be symmetric");
    if (candidates.empty()) throw std::invalid_argument("QuantumSystem: needs at least one candidate");
    for (std::size_t i = 0; i < candidates.size(); ++i) {
        const auto& mu = candidates[i];
        if (mu.rows() != n || mu.cols() != n)
            throw std::invalid_argument("QuantumSystem: candidate " + std::to_string(i) +
                                        " has inconsistent shape");
        if ((mu - mu.transpose()).cwiseAbs().maxCoeff() >
            1e-12 * std::max(1.0, mu.cwiseAbs().maxCoeff()))
            throw std::invalid_argument("QuantumSystem: candidate " + std::to_string(i) +
                                        " must be symmetric");
    }
    if (psi0.size() != n || psi1.size() != n)
        throw std::invalid_argument("QuantumSystem: state dimensions must match the hamiltonian");
    if (std::abs(psi0.norm() - 1.0) > 1e-10 || std::abs(psi1.norm() - 1.0) > 1e-10)
        throw std::invalid_argument("QuantumSystem: psi0 and psi1 must have unit norm");
    (void)TimeGrid(grid.t_final, grid.n_steps);
}

Eigen::MatrixXd mu_combination(const QuantumSystem& qsys, std::span<const int> selected,
                               const Eigen::VectorXd& alpha) {
    if (static_cast<std::size_t>(alpha.size()) != selected.size())
        throw std::invalid_argument("mu_combination: one coefficient per selected candidate");
    Eigen::MatrixXd out = Eigen::MatrixXd::Zero(qsys.dim(), qsys.dim());
    for (std::size_t j = 0; j < selected.size(); ++j) {
        if (selected[j] < 0 || selected[j] >= qsys.num_candidates())
            throw std::invalid_argument("mu_combination: candidate index out of range");
        out += alpha[static_cast<Eigen::Index>(j)] * qsys.candidates[selected[j]];
    }
    return out;
}

Eigen::VectorXcd propagate_schrodinger(const QuantumSystem& qsys, const Eigen::MatrixXd& mu,
                                       const Control& eps) {
    check_quantum_control(qsys, eps, "propagate_schrodinger");
    check_candidate_shape(qsys, mu, "propagate_schrodinger");
    const double dt = qsys.grid.dt();
    Eigen::VectorXcd psi = qsys.psi0;
    if (mu.isZero(0.0)) {
        const StepBasis fixed = decompose(qsys.hamiltonian);
        for (int k = 0; k < qsys.grid.n_steps; ++k) psi = apply_step(fixed, dt, psi, false);
        return psi;
    }
    for (int k = 0; k < qsys.grid.n_steps; ++k)
        psi = apply_step(decompose(qsys.hamiltonian + eps.values(0, k) * mu), dt, psi, false);
    return psi;
}

std::complex<double> phi(const QuantumSystem& qsys, const Eigen::MatrixXd& mu,
                         const Control& eps) {
    return qsys.psi1.dot(propagate_schrodinger(qsys, mu, eps));
}

PhiControlGradient phi_control_gradient(const QuantumSystem& qsys, const Eigen::MatrixXd& mu,
                                        const Control& eps) {
    check_quantum_control(qsys, eps, "phi_control_gradient");
    check_candidate_shape(qsys, mu, "phi_control_gradient");
    const double dt = qsys.grid.dt();
    Trajectory traj = forward_pass(qsys.hamiltonian, mu, qsys.psi0, eps.values.row(0), dt);

    PhiControlGradient out;
    out.d_control.resize(qsys.grid.n_steps);
    out.value = backward_pass(traj, qsys.psi1, dt,
                              [&](int k, const StepBasis& sb, const Eigen::MatrixXcd& t_mat) {
                                  out.d_control[k] = pair_against(mu, sb, t_mat);
                              });
    return out;
}

PhiCoeffGradient phi_coeff_gradient(const QuantumSystem& qsys, std::span<const int> selected,
                                    const Eigen::VectorXd& alpha, const Control& eps) {
    check_quantum_control(qsys, eps, "phi_coeff_gradient");
    const Eigen::MatrixXd mu = mu_combination(qsys, selected, alpha);
    const double dt = qsys.grid.dt();
    Trajectory traj = forward_pass(qsys.hamiltonian, mu, qsys.psi0, eps.values.row(0), dt);

    PhiCoeffGradient out;
    out.d_alpha = Eigen::VectorXcd::Zero(static_cast<Eigen::Index>(selected.size()));
    out.value = backward_pass(
        traj, qsys.psi1, dt, [&](int k, const StepBasis& sb, const Eigen::MatrixXcd& t_mat) {
            const double e_k = eps.values(0, k);
            for (std::size_t j = 0; j < selected.size(); ++j)
                out.d_alpha[static_cast<Eigen::Index>(j)] +=
                    e_k * pair_against(qsys.candidates[selected[j]], sb, t_mat);
        });
    return out;
}

namespace {

// mismatch objective pieces for one control under two operators
struct PairEval {
    cd diff;                  // phi_a - phi_b
    double mismatch = 0.0;    // |diff|^2
    Eigen::VectorXd d_samples;  // d mismatch / d eps_k (set only when requested)
};

PairEval eval_pair(const QuantumSystem& qsys, const Eigen::MatrixXd& mu_a,
                   const Eigen::MatrixXd& mu_b, const Control& eps, bool with_gradient) {
    PairEval out;
    if (!with_gradient) {
        out.diff = phi(qsys, mu_a, eps) - phi(qsys, mu_b, eps);
        out.mismatch = std::norm(out.diff);
        return out;
    }
    // a zero operator contributes a control-independent overlap
    PhiControlGradient ga = phi_control_gradient(qsys, mu_a, eps);
    PhiControlGradient gb;
    if (mu_b.isZero(0.0)) {
        gb.value = phi(qsys, mu_b, eps);
        gb.d_control = Eigen::VectorXcd::Zero(qsys.grid.n_steps);
    } else {
        gb = phi_control_gradient(qsys, mu_b, eps);
    }
    out.diff = ga.value - gb.value;
    out.mismatch = std::norm(out.diff);
    out.d_samples.resize(qsys.grid.n_steps);
    for (int k = 0; k < qsys.grid.n_steps; ++k)
        out.d_samples[k] = 2.0 * std::real(std::conj(out.diff) * (ga.d_control[k] - gb.d_control[k]));
    return out;
}

// trajectories of both operators under one control, with the terminal
// mismatch; kept between sweeps so accepted fields are never re-propagated
struct PairState {
    Trajectory ta, tb;
    cd diff{0.0, 0.0};
    double mismatch = 0.0;
};

PairState propagate_pair(const QuantumSystem& qsys, const Eigen::MatrixXd& mu_a,
                         const Eigen::MatrixXd& mu_b, const Control& eps) {
    const double dt = qsys.grid.dt();
    PairState st;
    st.ta = forward_pass(qsys.hamiltonian, mu_a, qsys.psi0, eps.values.row(0), dt);
    st.tb = forward_pass(qsys.hamiltonian, mu_b, qsys.psi0, eps.values.row(0), dt);
    st.diff = qsys.psi1.dot(st.ta.states.back()) - qsys.psi1.dot(st.tb.states.back());
    st.mismatch = std::norm(st.diff);
    return st;
}

// one forward/backward round of the implicit-update scheme, returning the
// proposed field together with its propagated state
std::pair<Control, PairState> krotov_sweep(const QuantumSystem& qsys, const Eigen::MatrixXd& mu_a,
                                           const Eigen::MatrixXd& mu_b, double penalty,
                                           const PairState& cur) {
    const double dt = qsys.grid.dt();
    const int n_steps = qsys.grid.n_steps;

    // adjoint terminal condition from the rank-one terminal payoff
    std::vector<Eigen::VectorXcd> chi_a(n_steps + 1), chi_b(n_steps + 1);
    chi_a[n_steps] = cur.diff * qsys.psi1;
    chi_b[n_steps] = -cur.diff * qsys.psi1;
    for (int k = n_steps - 1; k >= 0; --k) {
        chi_a[k] = apply_step(cur.ta.basis[k], dt, chi_a[k + 1], true);
        chi_b[k] = apply_step(cur.tb.basis[k], dt, chi_b[k + 1], true);
    }

    const bool a_const = mu_a.isZero(0.0);
    const bool b_const = mu_b.isZero(0.0);
    const StepBasis h_basis = (a_const || b_const) ? decompose(qsys.hamiltonian) : StepBasis{};

    // forward re-propagation with the implicit field update
    Eigen::MatrixXd new_values(1, n_steps);
    PairState next;
    next.ta.basis.reserve(n_steps);
    next.ta.states.reserve(n_steps + 1);
    next.ta.states.push_back(qsys.psi0);
    next.tb.basis.reserve(n_steps);
    next.tb.states.reserve(n_steps + 1);
    next.tb.states.push_back(qsys.psi0);
    for (int k = 0; k < n_steps; ++k) {
        const cd pairing = chi_a[k].dot(mu_a * next.ta.states.back()) +
                           chi_b[k].dot(mu_b * next.tb.states.back());
        const double e_k = std::imag(pairing) / penalty;
        new_values(0, k) = e_k;
        next.ta.basis.push_back(a_const ? h_basis : decompose(qsys.hamiltonian + e_k * mu_a));
        next.ta.states.push_back(apply_step(next.ta.basis.back(), dt, next.ta.states.back(), false));
        next.tb.basis.push_back(b_const ? h_basis : decompose(qsys.hamiltonian + e_k * mu_b));
        next.tb.states.push_back(apply_step(next.tb.basis.back(), dt, next.tb.states.back(), false));
    }
    next.diff = qsys.psi1.dot(next.ta.states.back()) - qsys.psi1.dot(next.tb.states.back());
    next.mismatch = std::norm(next.diff);
    return {Control(qsys.grid, std::move(new_values)), std::move(next)};
}

}  // namespace

MonotonicResult monotonic_maximize(const QuantumSystem& qsys, const Eigen::MatrixXd& mu_a,
                                   const Eigen::MatrixXd& mu_b, const MonotonicConfig& cfg) {
    qsys.validate();
    check_candidate_shape(qsys, mu_a, "monotonic_maximize");
    check_candidate_shape(qsys, mu_b, "monotonic_maximize");
    check_quantum_control(qsys, cfg.initial_control, "monotonic_maximize");
    if (cfg.max_sweeps < 1)
        throw std::invalid_argument("monotonic_maximize: max_sweeps must be >= 1");

    const double dt = qsys.grid.dt();
    Control eps = cfg.initial_control;
    PairState cur = propagate_pair(qsys, mu_a, mu_b, eps);

    double penalty = cfg.penalty;
    if (penalty < 0.0) {
        const double norm_sq = std::max(eps.squared_norm(), 1e-12);
        penalty = std::max(0.01 * cur.mismatch, 1e-12) / norm_sq;
    }

    auto objective = [&](double mismatch, const Control& c) {
        return mismatch - penalty * c.squared_norm();
    };

    MonotonicResult result;
    double j_cur = objective(cur.mismatch, eps);
    result.sweep_objectives.push_back(j_cur);

    // the implicit update amplitude scales inversely with the penalty, so a
    // stiffer working penalty acts as a step-size control; the true objective
    // above always uses the requested penalty, the working one only shapes
    // the proposal
    double work_scale = 1.0;
    // hunt for the workable stiffness in coarse jumps at first, then track
    // it finely so accepted steps stay close to the rejection boundary
    double grow = 16.0;

    int small_streak = 0;

    for (int sweep = 0; sweep < cfg.max_sweeps; ++sweep) {
        bool accepted = false;
        bool first_try = false;
        double j_cand = j_cur;
        Control candidate;
        PairState cand_state;
        for (int attempt = 0; attempt < 12 && !accepted; ++attempt) {
            std::tie(candidate, cand_state) =
                krotov_sweep(qsys, mu_a, mu_b, penalty * work_scale, cur);
            j_cand = objective(cand_state.mismatch, candidate);
            if (j_cand >= j_cur) {
                accepted = true;
                first_try = attempt == 0;
                grow = 4.0;
                // relax toward bolder steps once the current scale holds
                work_scale = std::max(1.0, 0.5 * work_scale);
            } else {
                work_scale *= grow;
            }
        }

        if (!accepted) {
            // last resort: backtracked ascent step along the exact gradient
            PairEval grad_eval = eval_pair(qsys, mu_a, mu_b, eps, true);
            Eigen::VectorXd g = grad_eval.d_samples -
                                2.0 * penalty * dt * eps.values.row(0).transpose();
            const double g_sq = g.squaredNorm();
            if (g_sq > 0.0) {
                double step = (0.5 * std::max(eps.norm(), 1e-3)) /
                              std::max(std::sqrt(dt * g_sq), 1e-12);
                for (int bt = 0; bt < 30 && !accepted; ++bt, step *= 0.5) {
                    Control trial = eps;
                    trial.values.row(0) += step * g.transpose();
                    PairState trial_state = propagate_pair(qsys, mu_a, mu_b, trial);
                    double j_trial = objective(trial_state.mismatch, trial);
                    if (j_trial >= j_cur + 1e-4 * step * g_sq) {
                        candidate = std::move(trial);
                        cand_state = std::move(trial_state);
                        j_cand = j_trial;
                        accepted = true;
                    }
                }
            }
            if (!accepted) {
                result.sweeps = sweep;
                break;  // no ascent available: converged at the current field
            }
        }

        const double gain = j_cand - j_cur;
        eps = std::move(candidate);
        cur = std::move(cand_state);
        j_cur = j_cand;
        result.sweep_objectives.push_back(j_cur);
        result.sweeps = sweep + 1;
        // a small gain right after a scale hunt says little about the
        // landscape, so require it on a settled scale or several times over
        if (gain < cfg.ascent_tolerance) {
            ++small_streak;
            if (first_try || small_streak >= 3) break;
        } else {
            small_streak = 0;
        }
    }

    result.control = std::move(eps);
    result.mismatch = cur.mismatch;
    result.objective = j_cur;
    return result;
}

namespace {

// dense quasi-Newton minimizer with Armijo backtracking; fn fills the
// gradient and returns the value
template <typename Fn>
std::pair<Eigen::VectorXd, double> bfgs_minimize(Fn&& fn, Eigen::VectorXd x, int max_iters,
                                                 double grad_tolerance) {
    const auto n = x.size();
    Eigen::VectorXd g(n), g_new(n);
    double f = fn(x, &g);
    Eigen::MatrixXd h_inv = Eigen::MatrixXd::Identity(n, n);

    for (int iter = 0; iter < max_iters; ++iter) {
        if (g.cwiseAbs().maxCoeff() <= grad_tolerance) break;
        Eigen::VectorXd p = -(h_inv * g);
        double slope = g.dot(p);
        if (slope >= 0.0) {  // reset a spoiled approximation
            h_inv.setIdentity();
            p = -g;
            slope = -g.squaredNorm();
        }
        double step = 1.0;
        bool accepted = false;
        Eigen::VectorXd x_new;
        double f_new = f;
        for (int bt = 0; bt < 50; ++bt, step *= 0.5) {
            x_new = x + step * p;
            f_new = fn(x_new, &g_new);
            if (f_new <= f + 1e-4 * step * slope) {
                accepted = true;
                break;
            }
        }
        if (!accepted) break;

        Eigen::VectorXd s = x_new - x;
        Eigen::VectorXd y = g_new - g;
        const double sy = s.dot(y);
        if (sy > 1e-12 * s.norm() * y.norm()) {
            if (iter == 0) h_inv *= sy / y.squaredNorm();
            const double rho = 1.0 / sy;
            Eigen::MatrixXd outer = Eigen::MatrixXd::Identity(n, n) - rho * s * y.transpose();
            h_inv = outer * h_inv * outer.transpose() + rho * s * s.transpose();
        }
        x = std::move(x_new);
        g = g_new;
        const double decrease = f - f_new;
        f = f_new;
        if (decrease < 1e-16 * (std::abs(f) + 1e-16)) break;
    }
    return {std::move(x), f};
}

FitResult fit_to_targets(const QuantumSystem& qsys, std::span<const int> selected,
                         std::span<const Control> controls,
                         std::span<const std::complex<double>> targets,
                         const MultistartConfig& cfg, const char* fn,
                         const Eigen::VectorXd* extra_start = nullptr) {
    if (selected.empty()) throw std::invalid_argument(std::string(fn) + ": empty selection");
    if (controls.size() != targets.size())
        throw std::invalid_argument(std::string(fn) + ": one target per control");
    if (controls.empty()) throw std::invalid_argument(std::string(fn) + ": needs controls");
    if (cfg.n_starts < 1) throw std::invalid_argument(std::string(fn) + ": n_starts must be >= 1");
    for (int ell : selected)
        if (ell < 0 || ell >= qsys.num_candidates())
            throw std::invalid_argument(std::string(fn) + ": candidate index out of range");

    const auto k = static_cast<Eigen::Index>(selected.size());
    Eigen::VectorXd center = cfg.center.size() == 0 ? Eigen::VectorXd::Zero(k) : cfg.center;
    if (center.size() != k)
        throw std::invalid_argument(std::string(fn) + ": center size must match the selection");

    auto objective = [&](const Eigen::VectorXd& alpha, Eigen::VectorXd* grad) {
        double f = 0.0;
        grad->setZero(k);
        for (std::size_t m = 0; m < controls.size(); ++m) {
            PhiCoeffGradient pg = phi_coeff_gradient(qsys, selected, alpha, controls[m]);
            const cd r = pg.value - targets[m];
            f += std::norm(r);
            for (Eigen::Index j = 0; j < k; ++j)
                (*grad)[j] += 2.0 * std::real(std::conj(r) * pg.d_alpha[j]);
        }
        return f;
    };

    std::vector<Eigen::VectorXd> starts;
    starts.push_back(center);
    if (extra_start != nullptr) starts.push_back(*extra_start);
    SplitMix64 rng(cfg.seed, 0x0f17);
    const int total = std::max(cfg.n_starts, static_cast<int>(starts.size()));
    while (static_cast<int>(starts.size()) < total) {
        Eigen::VectorXd x0 = center;
        for (Eigen::Index j = 0; j < k; ++j)
            x0[j] += rng.uniform(-cfg.box_radius, cfg.box_radius);
        starts.push_back(std::move(x0));
    }

    FitResult best;
    best.residual = std::numeric_limits<double>::infinity();
    for (const Eigen::VectorXd& x0 : starts) {
        auto [x, f] = bfgs_minimize(objective, x0, cfg.max_iters, cfg.grad_tolerance);
        if (f < best.residual) {
            best.residual = f;
            best.alpha = std::move(x);
        }
    }
    return best;
}

}  // namespace

FitResult fit_multistart(const QuantumSystem& qsys, int target, std::span<const int> selected,
                         std::span<const Control> controls, const MultistartConfig& cfg) {
    qsys.validate();
    if (target < 0 || target >= qsys.num_candidates())
        throw std::invalid_argument("fit_multistart: target index out of range");
    std::vector<cd> targets;
    targets.reserve(controls.size());
    for (const auto& eps : controls) targets.push_back(phi(qsys, qsys.candidates[target], eps));

    // when the target operator is an exact combination of the selected ones,
    // its operator-space projection already zeroes the overlap mismatch, so
    // seed one descent from there
    Eigen::VectorXd projection;
    if (!selected.empty()) {
        const auto n2 = static_cast<Eigen::Index>(qsys.dim()) * qsys.dim();
        Eigen::MatrixXd stacked(n2, static_cast<Eigen::Index>(selected.size()));
        for (std::size_t j = 0; j < selected.size(); ++j) {
            if (selected[j] < 0 || selected[j] >= qsys.num_candidates())
                throw std::invalid_argument("fit_multistart: candidate index out of range");
            stacked.col(static_cast<Eigen::Index>(j)) =
                Eigen::Map<const Eigen::VectorXd>(qsys.candidates[selected[j]].data(), n2);
        }
        const Eigen::Map<const Eigen::VectorXd> rhs(qsys.candidates[target].data(), n2);
        projection = stacked.colPivHouseholderQr().solve(rhs);
    }
    return fit_to_targets(qsys, selected, controls, targets, cfg, "fit_multistart",
                          selected.empty() ? nullptr : &projection);
}

FitResult identify_quantum(const QuantumSystem& qsys, std::span<const int> selected,
                           std::span<const Control> controls,
                           std::span<const std::complex<double>> measured,
                           const MultistartConfig& cfg) {
    qsys.validate();
    // no operator-space hint here: the operator behind the measurements is
    // unknown
    return fit_to_targets(qsys, selected, controls, measured, cfg, "identify_quantum");
}

namespace {

Control seeded_initial_control(const TimeGrid& grid, double amplitude, SplitMix64& rng) {
    Eigen::MatrixXd values(1, grid.n_steps);
    for (int k = 0; k < grid.n_steps; ++k) values(0, k) = rng.uniform(-amplitude, amplitude);
    return Control(grid, std::move(values));
}

struct QuantumRunContext {
    const QuantumSystem& qsys;
    const QuantumGreedyConfig& cfg;
    Eigen::MatrixXd zero_op;

    MonotonicResult discriminate(const Eigen::MatrixXd& mu_a, const Eigen::MatrixXd& mu_b,
                                 std::uint64_t stream) const {
        SplitMix64 rng(cfg.seed, stream);
        MonotonicConfig mono;
        mono.penalty = cfg.penalty;
        mono.max_sweeps = cfg.monotonic_sweeps;
        mono.ascent_tolerance = cfg.ascent_tolerance;
        mono.initial_control = seeded_initial_control(qsys.grid, cfg.init_amplitude, rng);
        MonotonicResult best = monotonic_maximize(qsys, mu_a, mu_b, mono);
        // a vanishing result may just mean a stationary start; retry before
        // trusting it
        for (int retry = 0; retry < 2 && best.mismatch <= 1e-14; ++retry) {
            mono.initial_control = seeded_initial_control(qsys.grid, cfg.init_amplitude, rng);
            MonotonicResult again = monotonic_maximize(qsys, mu_a, mu_b, mono);
            if (again.mismatch > best.mismatch) best = std::move(again);
        }
        return best;
    }

    FitResult fit(int target, std::span<const int> selected, std::span<const Control> controls,
                  std::uint64_t stream) const {
        MultistartConfig ms;
        ms.n_starts = cfg.fit_starts;
        ms.box_radius = cfg.fit_box_radius;
        ms.seed = SplitMix64(cfg.seed, stream).next_u64();
        ms.max_iters = cfg.fit_max_iters;
        return fit_multistart(qsys, target, selected, controls, ms);
    }
};

constexpr std::uint64_t kInitStream = 1u << 20;
constexpr std::uint64_t kRescanOffset = 7919;

std::uint64_t step_stream(int iteration, int candidate, int purpose) {
    return (static_cast<std::uint64_t>(iteration + 1) << 32) ^
           (static_cast<std::uint64_t>(candidate) << 8) ^ static_cast<std::uint64_t>(purpose);
}

FittingSolution to_fitting_solution(const FitResult& fit) {
    FittingSolution sol;
    sol.alpha = fit.alpha;
    sol.residual = fit.residual;
    sol.kernel_vector.resize(fit.alpha.size() + 1);
    sol.kernel_vector.head(fit.alpha.size()) = fit.alpha;
    sol.kernel_vector[fit.alpha.size()] = -1.0;
    return sol;
}

}  // namespace

GreedyResult gr_quantum_run(const QuantumSystem& qsys, const QuantumGreedyConfig& cfg) {
    qsys.validate();
    QuantumRunContext ctx{qsys, cfg, Eigen::MatrixXd::Zero(qsys.dim(), qsys.dim())};
    const int big_k = qsys.num_candidates();

    GreedyResult result;
    MonotonicResult init = ctx.discriminate(qsys.candidates[0], ctx.zero_op, kInitStream);
    result.controls.push_back(init.control);
    result.selected.push_back(0);
    result.discriminatory_values.push_back(init.mismatch);

    std::vector<int> selected{0};
    for (int k = 1; k < big_k; ++k) {
        FitResult fit = ctx.fit(k, selected, result.controls, step_stream(k, k, 1));
        Eigen::MatrixXd mu_fit = mu_combination(qsys, selected, fit.alpha);
        MonotonicResult disc =
            ctx.discriminate(qsys.candidates[k], mu_fit, step_stream(k, k, 2));

        result.fitting_history.push_back(to_fitting_solution(fit));
        result.controls.push_back(disc.control);
        result.selected.push_back(k);
        result.discriminatory_values.push_back(disc.mismatch);
        selected.push_back(k);
    }
    result.stop_reason = StopReason::completed;
    return result;
}

GreedyResult ogr_quantum_run(const QuantumSystem& qsys, const QuantumGreedyConfig& cfg) {
    qsys.validate();
    QuantumRunContext ctx{qsys, cfg, Eigen::MatrixXd::Zero(qsys.dim(), qsys.dim())};
    const int big_k = qsys.num_candidates();

    // initialization scan over every candidate; the scan shares one seeded
    // initial control so identical operators get identical values and the
    // near-tie rule keeps the lowest index
    std::vector<MonotonicResult> init_rounds = parallel_map<MonotonicResult>(
        big_k,
        [&](std::size_t ell) {
            return ctx.discriminate(qsys.candidates[ell], ctx.zero_op, kInitStream);
        },
        cfg.parallel);

    // max value, settled on the smallest index among relative near-ties
    auto argmax_near_ties = [](auto&& value_at, std::size_t count) {
        double top = -std::numeric_limits<double>::infinity();
        for (std::size_t i = 0; i < count; ++i) top = std::max(top, value_at(i));
        for (std::size_t i = 0; i < count; ++i)
            if (value_at(i) >= top - 1e-12 * std::abs(top)) return static_cast<int>(i);
        return 0;
    };

    const int best_ell = argmax_near_ties(
        [&](std::size_t i) { return init_rounds[i].mismatch; }, init_rounds.size());
    const double best_init = init_rounds[best_ell].mismatch;
    const double tol = cfg.tol >= 0.0 ? cfg.tol : 1e-8 * best_init;

    GreedyResult result;
    if (best_init <= std::max(tol, 1e-14)) {
        result.stop_reason = StopReason::below_tolerance;
        return result;
    }

    std::vector<int> selected{best_ell};
    result.controls.push_back(init_rounds[best_ell].control);
    result.selected.push_back(best_ell);
    result.discriminatory_values.push_back(best_init);

    bool stopped = false;
    int iteration = 0;
    while (static_cast<int>(selected.size()) < big_k) {
        ++iteration;
        std::vector<int> remaining;
        for (int ell = 0; ell < big_k; ++ell)
            if (std::find(selected.begin(), selected.end(), ell) == selected.end())
                remaining.push_back(ell);

        struct Round {
            FitResult fit;
            MonotonicResult disc;
        };
        // per-round streams shared across candidates, again so duplicates tie
        // exactly
        auto scan = [&](int extra) {
            return parallel_map<Round>(
                remaining.size(),
                [&](std::size_t i) {
                    const int ell = remaining[i];
                    Round r;
                    r.fit = ctx.fit(ell, selected, result.controls,
                                    step_stream(iteration, 0, 1 + extra));
                    Eigen::MatrixXd mu_fit = mu_combination(qsys, selected, r.fit.alpha);
                    r.disc = ctx.discriminate(qsys.candidates[ell], mu_fit,
                                              step_stream(iteration, 0, 2 + extra));
                    return r;
                },
                cfg.parallel);
        };

        std::vector<Round> rounds = scan(0);
        auto pick_best = [&](const std::vector<Round>& rs) {
            return argmax_near_ties([&](std::size_t i) { return rs[i].disc.mismatch; },
                                    rs.size());
        };
        int pick = pick_best(rounds);

        if (rounds[pick].disc.mismatch < tol) {
            // confirm the stop with fresh optimizer seeds before accepting it
            std::vector<Round> rescan = scan(static_cast<int>(kRescanOffset));
            int pick2 = pick_best(rescan);
            if (rescan[pick2].disc.mismatch >= tol) {
                rounds = std::move(rescan);
                pick = pick2;
            } else {
                stopped = true;
                break;
            }
        }

        result.fitting_history.push_back(to_fitting_solution(rounds[pick].fit));
        result.controls.push_back(rounds[pick].disc.control);
        result.selected.push_back(remaining[pick]);
        result.discriminatory_values.push_back(rounds[pick].disc.mismatch);
        selected.push_back(remaining[pick]);
    }

    result.stop_reason = stopped ? StopReason::below_tolerance : StopReason::completed;
    return result;
}

}  // namespace greedyid
