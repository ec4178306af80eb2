#pragma once

#include <Eigen/Dense>

#include <complex>
#include <filesystem>
#include <string>
#include <vector>

#include "json.hpp"

#include "greedyid/greedy.hpp"
#include "greedyid/lin_system.hpp"
#include "greedyid/observability.hpp"
#include "greedyid/online.hpp"
#include "greedyid/quantum.hpp"
#include "greedyid/time_grid.hpp"

// JSON conventions used by the command line tool and experiment harness:
// real matrices are arrays of row arrays, vectors are flat arrays, complex
// numbers are [re, im] pairs, and controls are objects
// {"t_final": T, "n_steps": n, "values": [[channel 0 ...], ...]}.
namespace greedyid::io {

using nlohmann::json;

json matrix_to_json(const Eigen::MatrixXd& m);
Eigen::MatrixXd matrix_from_json(const json& j, const std::string& what);

json vector_to_json(const Eigen::VectorXd& v);
Eigen::VectorXd vector_from_json(const json& j, const std::string& what);

json cvector_to_json(const Eigen::VectorXcd& v);
Eigen::VectorXcd cvector_from_json(const json& j, const std::string& what);

json control_to_json(const Control& c);
Control control_from_json(const json& j, const std::string& what);

json controls_to_json(std::span<const Control> cs);
std::vector<Control> controls_from_json(const json& j, const std::string& what);

// {"A", "C", "candidates", "phi0", "t_final", "n_steps"}
LinearSystem linear_system_from_json(const json& j);
json linear_system_to_json(const LinearSystem& sys);

// {"H", "candidates", "psi0", "psi1", "t_final", "n_steps"}
QuantumSystem quantum_system_from_json(const json& j);
json quantum_system_to_json(const QuantumSystem& qsys);

json greedy_result_to_json(const GreedyResult& r);
json observability_report_to_json(const ObservabilityReport& r);
json identification_result_to_json(const IdentificationResult& r);

Measurements measurements_from_json(const json& j);
json measurements_to_json(const Measurements& m);

json load_json_file(const std::filesystem::path& path);
void write_json_file(const std::filesystem::path& path, const json& j);

}  // namespace greedyid::io
