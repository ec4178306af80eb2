#include "doctest.h"

#include <Eigen/Dense>

#include <vector>

#include "greedyid/greedy.hpp"
#include "greedyid/ogr.hpp"
#include "greedyid/online.hpp"
#include "helpers.hpp"

using namespace greedyid;

TEST_CASE("identification recovers coefficients from sweep controls") {
    TimeGrid grid(1.5, 40);
    LinearSystem sys = test_helpers::three_state_system(grid);
    Eigen::Vector3d alpha_true(0.8, -1.1, 0.5);
    std::vector<int> all{0, 1, 2};
    Eigen::MatrixXd b_true = basis_combination(sys, all, alpha_true);

    GreedyResult run = gr_run(sys, AdmissibleSet(1.0));
    Measurements meas = simulate_measurements(sys, b_true, run.controls);
    IdentificationResult result = identify(sys, all, run.controls, meas);

    CHECK(result.certified_unique);
    CHECK(result.w_min_eig > 0.0);
    CHECK(result.w_rank == 3);
    CHECK((result.alpha - alpha_true).cwiseAbs().maxCoeff() <
          1e-6 * alpha_true.cwiseAbs().maxCoeff());
    CHECK(result.residual < 1e-12);
    CHECK(result.note.empty());
}

TEST_CASE("nonzero initial state does not bias the recovery") {
    TimeGrid grid(1.0, 30);
    LinearSystem sys = test_helpers::three_state_system(grid);
    REQUIRE(sys.phi0.norm() > 0.0);
    Eigen::Vector3d alpha_true(-0.4, 0.9, 1.3);
    std::vector<int> all{0, 1, 2};
    Eigen::MatrixXd b_true = basis_combination(sys, all, alpha_true);

    GreedyResult run = gr_run(sys, AdmissibleSet(2.0));
    Measurements meas = simulate_measurements(sys, b_true, run.controls);
    IdentificationResult result = identify(sys, all, run.controls, meas);
    CHECK(result.certified_unique);
    CHECK((result.alpha - alpha_true).cwiseAbs().maxCoeff() < 1e-6);
}

TEST_CASE("ambiguous candidates yield an uncertified least-norm answer") {
    TimeGrid grid(1.0, 50);
    LinearSystem sys = test_helpers::ambiguous_pair_system(grid);
    Eigen::Vector4d alpha_true(0.0, 1.0, 0.0, 1.0);
    std::vector<int> all{0, 1, 2, 3};
    Eigen::MatrixXd b_true = basis_combination(sys, all, alpha_true);
    REQUIRE((b_true - Eigen::Matrix2d::Ones()).norm() == 0.0);

    GreedyResult run = gr_run(sys, AdmissibleSet(1.0));
    Measurements meas = simulate_measurements(sys, b_true, run.controls);
    IdentificationResult result = identify(sys, all, run.controls, meas);

    CHECK_FALSE(result.certified_unique);
    CHECK(result.w_rank == 2);
    CHECK_FALSE(result.note.empty());
    // only the pair sums are determined; the least-norm answer splits them evenly
    CHECK(result.alpha[0] + result.alpha[1] == doctest::Approx(1.0).epsilon(1e-8));
    CHECK(result.alpha[2] + result.alpha[3] == doctest::Approx(1.0).epsilon(1e-8));
    CHECK(result.alpha[0] == doctest::Approx(0.5).epsilon(1e-6));
    CHECK(result.residual < 1e-12);
}

TEST_CASE("identification restricted to the selected candidates") {
    TimeGrid grid(1.0, 50);
    LinearSystem sys = test_helpers::visible_pair_system(grid);
    Eigen::Vector4d alpha_true(1.0, 1.0, 1.0, 1.0);  // the all-ones operator
    std::vector<int> all{0, 1, 2, 3};
    Eigen::MatrixXd b_true = basis_combination(sys, all, alpha_true);

    OgrConfig cfg;
    cfg.adm = AdmissibleSet(1.0);
    GreedyResult run = ogr_run(sys, cfg);
    REQUIRE(run.selected == std::vector<int>{0, 1});

    Measurements meas = simulate_measurements(sys, b_true, run.controls);
    IdentificationResult result = identify(sys, run.selected, run.controls, meas);
    CHECK(result.certified_unique);
    REQUIRE(result.alpha.size() == 2);
    CHECK(result.alpha[0] == doctest::Approx(1.0).epsilon(1e-8));
    CHECK(result.alpha[1] == doctest::Approx(1.0).epsilon(1e-8));

    Eigen::MatrixXd rebuilt = basis_combination(sys, run.selected, result.alpha);
    Eigen::Matrix2d expected;
    expected << 1, 1, 0, 0;
    CHECK((rebuilt - expected).cwiseAbs().maxCoeff() < 1e-8);
}

TEST_CASE("block structure certificate") {
    SUBCASE("definite leading block with vanishing tail passes") {
        Eigen::Matrix4d w = Eigen::Matrix4d::Zero();
        w.topLeftCorner(2, 2) << 2.0, 0.3, 0.3, 1.5;
        CHECK(certify_block_structure(WMatrix{w}, 2));
        CHECK_FALSE(certify_block_structure(WMatrix{w}, 3));
    }

    SUBCASE("coupling into the tail fails") {
        Eigen::Matrix4d w = Eigen::Matrix4d::Zero();
        w.topLeftCorner(2, 2) << 2.0, 0.3, 0.3, 1.5;
        w(0, 3) = w(3, 0) = 0.2;
        CHECK_FALSE(certify_block_structure(WMatrix{w}, 2));
    }

    SUBCASE("singular leading block fails") {
        Eigen::Matrix4d w = Eigen::Matrix4d::Zero();
        w.topLeftCorner(2, 2) << 1.0, 1.0, 1.0, 1.0;
        CHECK_FALSE(certify_block_structure(WMatrix{w}, 2));
    }

    SUBCASE("degenerate sizes") {
        Eigen::Matrix2d w = Eigen::Matrix2d::Zero();
        CHECK(certify_block_structure(WMatrix{w}, 0));
        CHECK_THROWS_AS(certify_block_structure(WMatrix{w}, 3), std::invalid_argument);
    }
}

TEST_CASE("identify validates its inputs") {
    TimeGrid grid(1.0, 10);
    LinearSystem sys = test_helpers::three_state_system(grid);
    std::vector<int> all{0, 1, 2};
    std::vector<Control> controls{Control::zero(grid, 2)};
    Measurements meas;
    CHECK_THROWS_AS(identify(sys, all, controls, meas), std::invalid_argument);
    meas.outputs = {Eigen::Vector2d::Zero(), Eigen::Vector2d::Zero()};
    CHECK_THROWS_AS(identify(sys, all, controls, meas), std::invalid_argument);
    std::vector<int> bad{5};
    meas.outputs = {Eigen::Vector2d::Zero()};
    CHECK_THROWS_AS(identify(sys, bad, controls, meas), std::invalid_argument);
}
