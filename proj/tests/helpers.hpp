#pragma once

#include <Eigen/Dense>

#include "greedyid/lin_system.hpp"
#include "greedyid/rng.hpp"
#include "greedyid/time_grid.hpp"

namespace test_helpers {

// classic fixed-step RK4 on phi' = A phi + B eps(t); deliberately shares no
// code with the library propagation so it can serve as a reference
inline Eigen::VectorXd rk4_reference(const Eigen::MatrixXd& A, const Eigen::MatrixXd& B,
                                     const greedyid::Control& eps, Eigen::VectorXd phi,
                                     int substeps) {
    const double h = eps.grid.dt() / substeps;
    for (int k = 0; k < eps.grid.n_steps; ++k) {
        const Eigen::VectorXd u = B * eps.values.col(k);
        for (int s = 0; s < substeps; ++s) {
            const Eigen::VectorXd k1 = A * phi + u;
            const Eigen::VectorXd k2 = A * (phi + 0.5 * h * k1) + u;
            const Eigen::VectorXd k3 = A * (phi + 0.5 * h * k2) + u;
            const Eigen::VectorXd k4 = A * (phi + h * k3) + u;
            phi += h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
        }
    }
    return phi;
}

// two-state system observed in the first coordinate only; candidate pairs
// (1,2) and (3,4) produce identical outputs for every control
inline greedyid::LinearSystem ambiguous_pair_system(greedyid::TimeGrid grid) {
    greedyid::LinearSystem sys;
    sys.A = Eigen::Matrix2d::Identity();
    sys.C = Eigen::Matrix2d::Zero();
    sys.C(0, 0) = 1.0;
    Eigen::Matrix2d b1, b2, b3, b4;
    b1 << 1, 0, 0, 0;
    b2 << 1, 0, 1, 0;
    b3 << 0, 1, 0, 0;
    b4 << 0, 1, 0, 1;
    sys.candidates = {b1, b2, b3, b4};
    sys.phi0 = Eigen::Vector2d::Zero();
    sys.grid = grid;
    return sys;
}

// same dynamics with the rank-one singular-vector basis; only the first two
// elements are visible to the output
inline greedyid::LinearSystem visible_pair_system(greedyid::TimeGrid grid) {
    greedyid::LinearSystem sys = ambiguous_pair_system(grid);
    Eigen::Matrix2d b1, b2, b3, b4;
    b1 << 1, 0, 0, 0;
    b2 << 0, 1, 0, 0;
    b3 << 0, 0, 1, 0;
    b4 << 0, 0, 0, 1;
    sys.candidates = {b1, b2, b3, b4};
    return sys;
}

// mildly damped 3-state, 2-channel test system with dense coupling
inline greedyid::LinearSystem three_state_system(greedyid::TimeGrid grid) {
    greedyid::LinearSystem sys;
    sys.A.resize(3, 3);
    sys.A << -0.3, 0.8, 0.0,
             -0.8, -0.3, 0.5,
              0.2, -0.1, -0.6;
    sys.C.resize(2, 3);
    sys.C << 1.0, 0.0, 0.5,
             0.0, 1.0, -1.0;
    Eigen::MatrixXd b1(3, 2), b2(3, 2), b3(3, 2);
    b1 << 1.0, 0.2, -0.4, 0.9, 0.3, -0.5;
    b2 << 0.0, 1.1, 0.7, -0.2, -0.6, 0.4;
    b3 << 0.5, -0.3, 0.1, 0.8, 1.2, 0.0;
    sys.candidates = {b1, b2, b3};
    sys.phi0.resize(3);
    sys.phi0 << 0.4, -0.2, 0.1;
    sys.grid = grid;
    return sys;
}

inline greedyid::Control random_control(greedyid::TimeGrid grid, int channels,
                                        greedyid::SplitMix64& rng, double amp = 1.0) {
    Eigen::MatrixXd v(channels, grid.n_steps);
    for (Eigen::Index i = 0; i < v.rows(); ++i)
        for (Eigen::Index k = 0; k < v.cols(); ++k) v(i, k) = rng.uniform(-amp, amp);
    return greedyid::Control(grid, std::move(v));
}

// random control rescaled onto the sphere of the admissible ball
inline greedyid::Control random_boundary_control(greedyid::TimeGrid grid, int channels,
                                                 greedyid::SplitMix64& rng, double radius) {
    greedyid::Control c = random_control(grid, channels, rng);
    c.values *= radius / c.norm();
    return c;
}

}  // namespace test_helpers
