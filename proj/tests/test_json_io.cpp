#include <cstdio>
#include <filesystem>
#include <fstream>

#include "doctest.h"
#include "greedyid/json_io.hpp"
#include "greedyid/ogr.hpp"
#include "greedyid/rng.hpp"
#include "helpers.hpp"

using namespace greedyid;
namespace io = greedyid::io;

namespace {

std::filesystem::path temp_file(const char* name) {
    return std::filesystem::temp_directory_path() / name;
}

}  // namespace

TEST_CASE("matrices, vectors and complex vectors round-trip bitwise") {
    SplitMix64 rng(31, 0);
    Eigen::MatrixXd m(3, 2);
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 2; ++j) m(i, j) = rng.uniform(-5.0, 5.0);
    CHECK(io::matrix_from_json(io::matrix_to_json(m), "m") == m);

    Eigen::VectorXd v(5);
    for (int i = 0; i < 5; ++i) v[i] = rng.normal();
    CHECK(io::vector_from_json(io::vector_to_json(v), "v") == v);

    Eigen::VectorXcd c(4);
    for (int i = 0; i < 4; ++i) c[i] = {rng.normal(), rng.normal()};
    CHECK(io::cvector_from_json(io::cvector_to_json(c), "c") == c);
}

TEST_CASE("controls round-trip including the grid") {
    SplitMix64 rng(32, 0);
    Control c = test_helpers::random_control(TimeGrid(2.5, 12), 3, rng);
    Control back = io::control_from_json(io::control_to_json(c), "control");
    CHECK(back.grid == c.grid);
    CHECK(back.values == c.values);

    std::vector<Control> cs{c, Control::zero(c.grid, 3)};
    auto parsed = io::controls_from_json(io::controls_to_json(cs), "controls");
    REQUIRE(parsed.size() == 2);
    CHECK(parsed[1].values.isZero(0.0));
}

TEST_CASE("linear systems round-trip and validate on load") {
    LinearSystem sys = test_helpers::three_state_system(TimeGrid(1.5, 20));
    LinearSystem back = io::linear_system_from_json(io::linear_system_to_json(sys));
    CHECK(back.A == sys.A);
    CHECK(back.C == sys.C);
    CHECK(back.phi0 == sys.phi0);
    CHECK(back.grid == sys.grid);
    REQUIRE(back.candidates.size() == sys.candidates.size());
    for (std::size_t i = 0; i < sys.candidates.size(); ++i)
        CHECK(back.candidates[i] == sys.candidates[i]);

    io::json j = io::linear_system_to_json(sys);
    j["candidates"][0] = io::matrix_to_json(Eigen::MatrixXd::Zero(2, 2));  // wrong shape
    CHECK_THROWS_AS(io::linear_system_from_json(j), std::runtime_error);
}

TEST_CASE("quantum systems round-trip with complex states") {
    QuantumSystem qsys;
    qsys.hamiltonian = Eigen::Vector2d(0.1, 0.7).asDiagonal();
    Eigen::Matrix2d sx;
    sx << 0, 1, 1, 0;
    qsys.candidates = {sx};
    qsys.psi0 = Eigen::Vector2cd(std::complex<double>(0.6, 0.0),
                                 std::complex<double>(0.0, 0.8));
    qsys.psi1 = Eigen::Vector2cd(1.0, 0.0);
    qsys.grid = TimeGrid(3.0, 10);

    QuantumSystem back = io::quantum_system_from_json(io::quantum_system_to_json(qsys));
    CHECK(back.hamiltonian == qsys.hamiltonian);
    CHECK(back.psi0 == qsys.psi0);
    CHECK(back.psi1 == qsys.psi1);
    CHECK(back.grid == qsys.grid);

    io::json j = io::quantum_system_to_json(qsys);
    j["H"][0][1] = 0.5;  // breaks symmetry
    CHECK_THROWS_AS(io::quantum_system_from_json(j), std::runtime_error);
}

TEST_CASE("greedy and identification results serialize with all fields") {
    LinearSystem sys = test_helpers::visible_pair_system(TimeGrid(2.0, 16));
    OgrConfig cfg;
    GreedyResult run = ogr_run(sys, cfg);
    io::json j = io::greedy_result_to_json(run);
    CHECK(j["stop_reason"] == "below_tolerance");
    CHECK(j["selected"].size() == run.selected.size());
    CHECK(j["controls"].size() == run.controls.size());
    CHECK(j["fitting"].size() == run.fitting_history.size());

    Measurements meas = simulate_measurements(sys, Eigen::Matrix2d::Ones(), run.controls);
    IdentificationResult ident = identify(sys, run.selected, run.controls, meas);
    io::json ij = io::identification_result_to_json(ident);
    CHECK(ij["certified_unique"] == true);
    CHECK(ij["alpha"].size() == 2);

    Measurements meas_back = io::measurements_from_json(io::measurements_to_json(meas));
    REQUIRE(meas_back.outputs.size() == meas.outputs.size());
    for (std::size_t i = 0; i < meas.outputs.size(); ++i)
        CHECK(meas_back.outputs[i] == meas.outputs[i]);
}

TEST_CASE("observability report serializes rank and vectors") {
    LinearSystem sys = test_helpers::ambiguous_pair_system(TimeGrid(1.0, 4));
    ObservabilityReport rep = analyze_observability(sys.A, sys.C);
    io::json j = io::observability_report_to_json(rep);
    CHECK(j["rank"] == 1);
    CHECK(j["singular_values"].size() == 2);
    CHECK(j["right_vectors"].size() == 2);
}

TEST_CASE("malformed documents are rejected with context") {
    CHECK_THROWS_AS(io::matrix_from_json(io::json::array(), "m"), std::runtime_error);
    CHECK_THROWS_AS(io::matrix_from_json(io::json::parse("[[1,2],[3]]"), "m"),
                    std::runtime_error);
    CHECK_THROWS_AS(io::matrix_from_json(io::json::parse("[[1,\"x\"]]"), "m"),
                    std::runtime_error);
    CHECK_THROWS_AS(io::cvector_from_json(io::json::parse("[[1,2,3]]"), "c"),
                    std::runtime_error);
    CHECK_THROWS_AS(io::control_from_json(io::json::parse("{\"t_final\": 1.0}"), "ctl"),
                    std::runtime_error);
    CHECK_THROWS_AS(
        io::control_from_json(
            io::json::parse("{\"t_final\": 1.0, \"n_steps\": 2.5, \"values\": [[1,2]]}"), "ctl"),
        std::runtime_error);
    CHECK_THROWS_AS(
        io::control_from_json(
            io::json::parse("{\"t_final\": -1.0, \"n_steps\": 2, \"values\": [[1,2]]}"), "ctl"),
        std::runtime_error);
}

TEST_CASE("files round-trip through disk") {
    const auto path = temp_file("greedyid_io_test.json");
    io::json j{{"k", 1}, {"arr", {1.5, 2.5}}};
    io::write_json_file(path, j);
    CHECK(io::load_json_file(path) == j);
    std::filesystem::remove(path);

    CHECK_THROWS_AS(io::load_json_file(temp_file("greedyid_absent.json")), std::runtime_error);

    const auto bad = temp_file("greedyid_bad.json");
    std::ofstream(bad) << "{not json";
    CHECK_THROWS_AS(io::load_json_file(bad), std::runtime_error);
    std::filesystem::remove(bad);
}
