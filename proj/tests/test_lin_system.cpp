#include "doctest.h"

#include <Eigen/Dense>

#include <cmath>

#include "greedyid/lin_system.hpp"
#include "greedyid/rng.hpp"
#include "helpers.hpp"

using namespace greedyid;
using test_helpers::rk4_reference;

TEST_CASE("time grid and control invariants") {
    CHECK_THROWS_AS(TimeGrid(0.0, 10), std::invalid_argument);
    CHECK_THROWS_AS(TimeGrid(-1.0, 10), std::invalid_argument);
    CHECK_THROWS_AS(TimeGrid(1.0, 0), std::invalid_argument);

    TimeGrid grid(2.0, 8);
    CHECK(grid.dt() == doctest::Approx(0.25));
    CHECK(grid.node(8) == doctest::Approx(2.0));

    CHECK_THROWS_AS(Control(grid, Eigen::MatrixXd::Zero(2, 7)), std::invalid_argument);
    Eigen::MatrixXd bad = Eigen::MatrixXd::Zero(2, 8);
    bad(1, 3) = std::nan("");
    CHECK_THROWS_AS(Control(grid, bad), std::invalid_argument);

    // ||eps||_{L2}^2 = dt * sum of squared samples
    Eigen::MatrixXd v = Eigen::MatrixXd::Constant(2, 8, 3.0);
    Control c(grid, v);
    CHECK(c.squared_norm() == doctest::Approx(2.0 * 9.0 * 2.0));

    AdmissibleSet adm(2.0);
    CHECK(adm.contains(adm.project_to_boundary(c)));
    CHECK(adm.project_to_boundary(c).norm() == doctest::Approx(2.0));
    CHECK_THROWS_AS(AdmissibleSet(0.0), std::invalid_argument);
}

TEST_CASE("step propagator blocks match the exponential series") {
    Eigen::MatrixXd a(2, 2);
    a << 0.3, -1.1, 0.7, 0.2;
    const double dt = 0.05;
    StepPropagator p = StepPropagator::build(a, dt);

    // reference: truncated series for exp(A dt) and int_0^dt exp(A s) ds
    Eigen::MatrixXd e_ref = Eigen::MatrixXd::Identity(2, 2);
    Eigen::MatrixXd f_ref = Eigen::MatrixXd::Zero(2, 2);
    Eigen::MatrixXd term = Eigen::MatrixXd::Identity(2, 2);
    for (int j = 1; j <= 25; ++j) {
        f_ref += term * (dt / j);  // A^{j-1} dt^j / j!
        term = term * a * (dt / j);
        e_ref += term;
    }
    CHECK((p.E - e_ref).cwiseAbs().maxCoeff() < 1e-13);
    CHECK((p.F - f_ref).cwiseAbs().maxCoeff() < 1e-13);
}

TEST_CASE("propagation closed form on the decoupled system") {
    // A = I, B = ones, eps = (1,1): phi(T) = (e^{T} - 1) * B * eps evaluated at T = 1
    TimeGrid grid(1.0, 40);
    LinearSystem sys;
    sys.A = Eigen::Matrix2d::Identity();
    sys.C = Eigen::Matrix2d::Identity();
    sys.candidates = {Eigen::Matrix2d::Ones()};
    sys.phi0 = Eigen::Vector2d::Zero();
    sys.grid = grid;

    Control ones(grid, Eigen::MatrixXd::Ones(2, grid.n_steps));
    Eigen::VectorXd phi = propagate_linear(sys, sys.candidates[0], ones);
    const double expected = 2.0 * (std::exp(1.0) - 1.0);  // 3.43656365691809...
    CHECK(phi[0] == doctest::Approx(expected).epsilon(1e-12));
    CHECK(phi[1] == doctest::Approx(expected).epsilon(1e-12));
}

TEST_CASE("propagation agrees with an RK4 reference") {
    TimeGrid grid(1.5, 30);
    LinearSystem sys = test_helpers::three_state_system(grid);
    SplitMix64 rng(42, 0);
    Control eps = test_helpers::random_control(grid, 2, rng);

    for (int ell = 0; ell < sys.num_candidates(); ++ell) {
        Eigen::VectorXd lib = propagate_linear(sys, sys.candidates[ell], eps);
        Eigen::VectorXd ref = rk4_reference(sys.A, sys.candidates[ell], eps, sys.phi0, 200);
        CHECK((lib - ref).norm() / ref.norm() < 1e-8);
    }
}

TEST_CASE("gamma vectors are drift-free candidate responses") {
    TimeGrid grid(1.0, 25);
    LinearSystem sys = test_helpers::three_state_system(grid);
    SplitMix64 rng(7, 0);
    Control eps = test_helpers::random_control(grid, 2, rng);

    SUBCASE("zero-state propagation matches the RK4 reference") {
        Eigen::VectorXd zero = Eigen::VectorXd::Zero(3);
        for (int ell = 0; ell < 3; ++ell) {
            Eigen::VectorXd gam = gamma_vector(sys, ell, eps);
            Eigen::VectorXd ref = sys.C * rk4_reference(sys.A, sys.candidates[ell], eps, zero, 200);
            CHECK((gam - ref).norm() < 1e-8 * (1.0 + ref.norm()));
        }
    }

    SUBCASE("gamma_matrix stacks the same columns") {
        Eigen::MatrixXd gam = gamma_matrix(sys, eps);
        REQUIRE(gam.cols() == 3);
        for (int ell = 0; ell < 3; ++ell)
            CHECK((gam.col(ell) - gamma_vector(sys, ell, eps)).norm() < 1e-13);
    }

    SUBCASE("full propagation = drift + gamma by superposition") {
        // C phi(T) - C exp(TA) phi0 equals the gamma vector of that candidate
        StepPropagator p = StepPropagator::build(sys.A, grid.dt());
        Eigen::VectorXd drift = sys.phi0;
        for (int k = 0; k < grid.n_steps; ++k) drift = p.E * drift;
        Eigen::VectorXd full = sys.C * propagate_linear(sys, sys.candidates[1], eps);
        Eigen::VectorXd gam = gamma_vector(sys, 1, eps);
        CHECK((full - sys.C * drift - gam).norm() < 1e-10 * (1.0 + full.norm()));
    }

    SUBCASE("zero control gives zero response") {
        Control zero = Control::zero(grid, 2);
        CHECK(gamma_vector(sys, 0, zero).norm() == 0.0);
    }
}

TEST_CASE("gram matrix of responses") {
    TimeGrid grid(1.0, 20);
    LinearSystem sys = test_helpers::three_state_system(grid);
    SplitMix64 rng(11, 0);
    Control eps = test_helpers::random_control(grid, 2, rng);

    WMatrix w = w_matrix(sys, eps);
    REQUIRE(w.size() == 3);

    SUBCASE("entries are pairwise inner products") {
        for (int i = 0; i < 3; ++i)
            for (int j = 0; j < 3; ++j) {
                double expected = gamma_vector(sys, i, eps).dot(gamma_vector(sys, j, eps));
                CHECK(w.values(i, j) == doctest::Approx(expected).epsilon(1e-12));
            }
    }

    SUBCASE("symmetric positive semidefinite") {
        CHECK((w.values - w.values.transpose()).cwiseAbs().maxCoeff() == 0.0);
        CHECK(w.min_eigenvalue() > -1e-12 * w.values.trace());
    }

    SUBCASE("quadratic form equals the squared output of the combination") {
        Eigen::VectorXd beta(3);
        beta << 0.7, -1.3, 0.4;
        std::vector<int> all{0, 1, 2};
        Eigen::MatrixXd b_beta = basis_combination(sys, all, beta);
        LinearSystem zero_init = sys;
        zero_init.phi0.setZero();
        double direct = (sys.C * propagate_linear(zero_init, b_beta, eps)).squaredNorm();
        double through_w = beta.dot(w.values * beta);
        CHECK(through_w == doctest::Approx(direct).epsilon(1e-8));
    }
}

TEST_CASE("gram matrix accumulation") {
    TimeGrid grid(1.0, 15);
    LinearSystem sys = test_helpers::three_state_system(grid);
    SplitMix64 rng(3, 0);

    std::vector<WMatrix> ws;
    CHECK(accumulate_w(ws, 3).values.isZero(0.0));
    CHECK_THROWS_AS(accumulate_w(ws), std::invalid_argument);

    for (int m = 0; m < 4; ++m) ws.push_back(w_matrix(sys, test_helpers::random_control(grid, 2, rng)));
    WMatrix sum = accumulate_w(ws);
    Eigen::MatrixXd manual = ws[0].values + ws[1].values + ws[2].values + ws[3].values;
    CHECK((sum.values - manual).cwiseAbs().maxCoeff() == 0.0);
    CHECK(sum.min_eigenvalue() > -1e-12 * sum.values.trace());
}

TEST_CASE("rank counting uses a relative eigenvalue threshold") {
    Eigen::MatrixXd v(3, 3);
    v.setZero();
    v(0, 0) = 5.0;
    v(1, 1) = 5e-5;
    v(2, 2) = 1e-12;
    WMatrix w{v};
    CHECK(w.rank() == 2);
    CHECK(w.rank(1e-14) == 3);
    CHECK_FALSE(w.is_positive_definite());
}

TEST_CASE("system validation catches shape errors") {
    TimeGrid grid(1.0, 10);
    LinearSystem sys = test_helpers::three_state_system(grid);
    CHECK_NOTHROW(sys.validate());

    LinearSystem broken = sys;
    broken.candidates[1] = Eigen::MatrixXd::Zero(2, 2);
    CHECK_THROWS_AS(broken.validate(), std::invalid_argument);

    broken = sys;
    broken.phi0 = Eigen::VectorXd::Zero(2);
    CHECK_THROWS_AS(broken.validate(), std::invalid_argument);

    broken = sys;
    broken.candidates.clear();
    CHECK_THROWS_AS(broken.validate(), std::invalid_argument);

    SplitMix64 rng(1, 0);
    Control wrong_channels = test_helpers::random_control(grid, 3, rng);
    CHECK_THROWS_AS(propagate_linear(sys, sys.candidates[0], wrong_channels),
                    std::invalid_argument);
}
