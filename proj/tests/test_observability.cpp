#include "doctest.h"

#include <Eigen/Dense>

#include <cmath>

#include "greedyid/observability.hpp"
#include "greedyid/rng.hpp"
#include "helpers.hpp"

using namespace greedyid;

TEST_CASE("observability matrix stacks C A^j blocks") {
    Eigen::MatrixXd a(3, 3), c(2, 3);
    a << 0.1, 1.0, 0.0,
         0.0, 0.1, 1.0,
         0.3, 0.0, 0.1;
    c << 1.0, 0.0, 0.0,
         0.0, 1.0, 1.0;
    Eigen::MatrixXd obs = observability_matrix(a, c);
    REQUIRE(obs.rows() == 6);
    CHECK((obs.topRows(2) - c).cwiseAbs().maxCoeff() == 0.0);
    CHECK((obs.middleRows(2, 2) - c * a).cwiseAbs().maxCoeff() < 1e-15);
    CHECK((obs.bottomRows(2) - c * a * a).cwiseAbs().maxCoeff() < 1e-15);
}

TEST_CASE("rank-deficient pair analysis") {
    // observation sees only the first coordinate of a decoupled system
    Eigen::Matrix2d a = Eigen::Matrix2d::Identity();
    Eigen::Matrix2d c = Eigen::Matrix2d::Zero();
    c(0, 0) = 1.0;

    ObservabilityReport report = analyze_observability(a, c);
    CHECK(report.rank == 1);
    CHECK_FALSE(report.fully_observable());
    CHECK(report.singular_values[0] == doctest::Approx(std::sqrt(2.0)).epsilon(1e-12));
    CHECK(report.singular_values[1] == doctest::Approx(0.0));

    REQUIRE(report.right_vectors.size() == 2);
    CHECK((report.right_vectors[0] - Eigen::Vector2d(1, 0)).norm() < 1e-12);
    CHECK((report.right_vectors[1] - Eigen::Vector2d(0, 1)).norm() < 1e-12);

    SUBCASE("rank-one basis ordered by visibility") {
        auto basis = build_observability_basis(report, 2);
        REQUIRE(basis.size() == 4);
        Eigen::Matrix2d b1, b2, b3, b4;
        b1 << 1, 0, 0, 0;
        b2 << 0, 1, 0, 0;
        b3 << 0, 0, 1, 0;
        b4 << 0, 0, 0, 1;
        CHECK((basis[0] - b1).norm() < 1e-12);
        CHECK((basis[1] - b2).norm() < 1e-12);
        CHECK((basis[2] - b3).norm() < 1e-12);
        CHECK((basis[3] - b4).norm() < 1e-12);
        CHECK(max_identifiable(report, 2) == 2);
    }
}

TEST_CASE("full-rank analysis on a dense system") {
    greedyid::TimeGrid grid(1.0, 10);
    auto sys = test_helpers::three_state_system(grid);
    ObservabilityReport report = analyze_observability(sys.A, sys.C);
    CHECK(report.rank == 3);
    CHECK(report.fully_observable());
    CHECK(max_identifiable(report, 2) == 6);

    SUBCASE("right vectors are orthonormal and reproduce the singular values") {
        for (std::size_t i = 0; i < 3; ++i) {
            CHECK(report.right_vectors[i].norm() == doctest::Approx(1.0).epsilon(1e-12));
            CHECK((report.obs_matrix * report.right_vectors[i]).norm() ==
                  doctest::Approx(report.singular_values[static_cast<Eigen::Index>(i)])
                      .epsilon(1e-10));
            for (std::size_t j = i + 1; j < 3; ++j)
                CHECK(std::abs(report.right_vectors[i].dot(report.right_vectors[j])) < 1e-12);
        }
    }

    SUBCASE("sign convention: first significant entry positive") {
        for (const auto& v : report.right_vectors) {
            const double scale = v.cwiseAbs().maxCoeff();
            for (Eigen::Index i = 0; i < v.size(); ++i) {
                if (std::abs(v[i]) > 1e-12 * scale) {
                    CHECK(v[i] > 0.0);
                    break;
                }
            }
        }
    }

    SUBCASE("basis spans with unit Frobenius norm elements") {
        auto basis = build_observability_basis(report, 2);
        REQUIRE(basis.size() == 6);
        for (const auto& b : basis) CHECK(b.norm() == doctest::Approx(1.0).epsilon(1e-12));
        // vec'd elements are orthonormal, hence linearly independent
        Eigen::MatrixXd vecs(6, 6);
        for (int i = 0; i < 6; ++i)
            vecs.col(i) = Eigen::Map<const Eigen::VectorXd>(basis[i].data(), 6);
        Eigen::MatrixXd gram = vecs.transpose() * vecs;
        CHECK((gram - Eigen::MatrixXd::Identity(6, 6)).cwiseAbs().maxCoeff() < 1e-12);
    }
}

TEST_CASE("kernel vectors beyond the rank are invisible") {
    // second state feeds neither the output nor the first state
    Eigen::MatrixXd a(3, 3), c(1, 3);
    a << -0.5, 0.0, 0.2,
          0.0, -1.0, 0.0,
          0.1, 0.0, -0.3;
    c << 1.0, 0.0, 0.0;
    ObservabilityReport report = analyze_observability(a, c);
    CHECK(report.rank == 2);
    for (int j = report.rank; j < 3; ++j)
        CHECK((report.obs_matrix * report.right_vectors[j]).norm() <
              report.rank_tolerance * report.singular_values[0]);
}

TEST_CASE("analysis rejects bad arguments") {
    Eigen::MatrixXd a = Eigen::MatrixXd::Identity(2, 3);
    Eigen::MatrixXd c = Eigen::MatrixXd::Identity(2, 2);
    CHECK_THROWS_AS(observability_matrix(a, c), std::invalid_argument);
    CHECK_THROWS_AS(analyze_observability(Eigen::Matrix2d::Identity(), c, -1.0),
                    std::invalid_argument);
    ObservabilityReport report = analyze_observability(Eigen::Matrix2d::Identity(), c);
    CHECK_THROWS_AS(build_observability_basis(report, 0), std::invalid_argument);
}
