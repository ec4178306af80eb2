#include "greedyid/json_io.hpp"

#include <fstream>
#include <stdexcept>

namespace greedyid::io {

namespace {

[[noreturn]] void fail(const std::string& what, const std::string& why) {
    throw std::runtime_error(what + ": " + why);
}

const json& require_field(const json& j, const char* key, const std::string& what) {
    if (!j.is_object()) fail(what, "expected an object");
    auto it = j.find(key);
    if (it == j.end()) fail(what, std::string("missing field \"") + key + "\"");
    return *it;
}

double number_at(const json& j, const std::string& what) {
    if (!j.is_number()) fail(what, "expected a number");
    return j.get<double>();
}

}  // namespace

json matrix_to_json(const Eigen::MatrixXd& m) {
    json rows = json::array();
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
        json row = json::array();
        for (Eigen::Index k = 0; k < m.cols(); ++k) row.push_back(m(i, k));
        rows.push_back(std::move(row));
    }
    return rows;
}

Eigen::MatrixXd matrix_from_json(const json& j, const std::string& what) {
    if (!j.is_array() || j.empty()) fail(what, "expected a nonempty array of rows");
    const std::size_t cols = j[0].is_array() ? j[0].size() : 0;
    if (cols == 0) fail(what, "rows must be nonempty arrays");
    Eigen::MatrixXd m(static_cast<Eigen::Index>(j.size()), static_cast<Eigen::Index>(cols));
    for (std::size_t i = 0; i < j.size(); ++i) {
        if (!j[i].is_array() || j[i].size() != cols) fail(what, "rows must have equal length");
        for (std::size_t k = 0; k < cols; ++k)
            m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(k)) =
                number_at(j[i][k], what);
    }
    return m;
}

json vector_to_json(const Eigen::VectorXd& v) {
    json out = json::array();
    for (Eigen::Index i = 0; i < v.size(); ++i) out.push_back(v[i]);
    return out;
}

Eigen::VectorXd vector_from_json(const json& j, const std::string& what) {
    if (!j.is_array()) fail(what, "expected an array");
    Eigen::VectorXd v(static_cast<Eigen::Index>(j.size()));
    for (std::size_t i = 0; i < j.size(); ++i)
        v[static_cast<Eigen::Index>(i)] = number_at(j[i], what);
    return v;
}

json cvector_to_json(const Eigen::VectorXcd& v) {
    json out = json::array();
    for (Eigen::Index i = 0; i < v.size(); ++i)
        out.push_back(json::array({v[i].real(), v[i].imag()}));
    return out;
}

Eigen::VectorXcd cvector_from_json(const json& j, const std::string& what) {
    if (!j.is_array()) fail(what, "expected an array of [re, im] pairs");
    Eigen::VectorXcd v(static_cast<Eigen::Index>(j.size()));
    for (std::size_t i = 0; i < j.size(); ++i) {
        if (!j[i].is_array() || j[i].size() != 2) fail(what, "entries must be [re, im] pairs");
        v[static_cast<Eigen::Index>(i)] =
            std::complex<double>(number_at(j[i][0], what), number_at(j[i][1], what));
    }
    return v;
}

json control_to_json(const Control& c) {
    return json{{"t_final", c.grid.t_final},
                {"n_steps", c.grid.n_steps},
                {"values", matrix_to_json(c.values)}};
}

Control control_from_json(const json& j, const std::string& what) {
    const double t_final = number_at(require_field(j, "t_final", what), what);
    const json& steps = require_field(j, "n_steps", what);
    if (!steps.is_number_integer()) fail(what, "n_steps must be an integer");
    Eigen::MatrixXd values = matrix_from_json(require_field(j, "values", what), what);
    try {
        return Control(TimeGrid(t_final, steps.get<int>()), std::move(values));
    } catch (const std::invalid_argument& e) {
        fail(what, e.what());
    }
}

json controls_to_json(std::span<const Control> cs) {
    json out = json::array();
    for (const Control& c : cs) out.push_back(control_to_json(c));
    return out;
}

std::vector<Control> controls_from_json(const json& j, const std::string& what) {
    if (!j.is_array()) fail(what, "expected an array of controls");
    std::vector<Control> out;
    out.reserve(j.size());
    for (std::size_t i = 0; i < j.size(); ++i)
        out.push_back(control_from_json(j[i], what + "[" + std::to_string(i) + "]"));
    return out;
}

namespace {

std::vector<Eigen::MatrixXd> candidates_from_json(const json& j, const std::string& what) {
    if (!j.is_array() || j.empty()) fail(what, "expected a nonempty array of matrices");
    std::vector<Eigen::MatrixXd> out;
    out.reserve(j.size());
    for (std::size_t i = 0; i < j.size(); ++i)
        out.push_back(matrix_from_json(j[i], what + "[" + std::to_string(i) + "]"));
    return out;
}

json candidates_to_json(const std::vector<Eigen::MatrixXd>& cands) {
    json out = json::array();
    for (const auto& b : cands) out.push_back(matrix_to_json(b));
    return out;
}

TimeGrid grid_from_json(const json& j, const std::string& what) {
    const double t_final = number_at(require_field(j, "t_final", what), what);
    const json& steps = require_field(j, "n_steps", what);
    if (!steps.is_number_integer()) fail(what, "n_steps must be an integer");
    try {
        return TimeGrid(t_final, steps.get<int>());
    } catch (const std::invalid_argument& e) {
        fail(what, e.what());
    }
}

}  // namespace

LinearSystem linear_system_from_json(const json& j) {
    const std::string what = "linear system";
    LinearSystem sys;
    sys.A = matrix_from_json(require_field(j, "A", what), what + " A");
    sys.C = matrix_from_json(require_field(j, "C", what), what + " C");
    sys.candidates = candidates_from_json(require_field(j, "candidates", what),
                                          what + " candidates");
    sys.phi0 = vector_from_json(require_field(j, "phi0", what), what + " phi0");
    sys.grid = grid_from_json(j, what);
    try {
        sys.validate();
    } catch (const std::invalid_argument& e) {
        fail(what, e.what());
    }
    return sys;
}

json linear_system_to_json(const LinearSystem& sys) {
    return json{{"A", matrix_to_json(sys.A)},
                {"C", matrix_to_json(sys.C)},
                {"candidates", candidates_to_json(sys.candidates)},
                {"phi0", vector_to_json(sys.phi0)},
                {"t_final", sys.grid.t_final},
                {"n_steps", sys.grid.n_steps}};
}

QuantumSystem quantum_system_from_json(const json& j) {
    const std::string what = "quantum system";
    QuantumSystem qsys;
    qsys.hamiltonian = matrix_from_json(require_field(j, "H", what), what + " H");
    qsys.candidates = candidates_from_json(require_field(j, "candidates", what),
                                           what + " candidates");
    qsys.psi0 = cvector_from_json(require_field(j, "psi0", what), what + " psi0");
    qsys.psi1 = cvector_from_json(require_field(j, "psi1", what), what + " psi1");
    qsys.grid = grid_from_json(j, what);
    try {
        qsys.validate();
    } catch (const std::invalid_argument& e) {
        fail(what, e.what());
    }
    return qsys;
}

json quantum_system_to_json(const QuantumSystem& qsys) {
    return json{{"H", matrix_to_json(qsys.hamiltonian)},
                {"candidates", candidates_to_json(qsys.candidates)},
                {"psi0", cvector_to_json(qsys.psi0)},
                {"psi1", cvector_to_json(qsys.psi1)},
                {"t_final", qsys.grid.t_final},
                {"n_steps", qsys.grid.n_steps}};
}

json greedy_result_to_json(const GreedyResult& r) {
    json fits = json::array();
    for (const FittingSolution& f : r.fitting_history)
        fits.push_back(json{{"alpha", vector_to_json(f.alpha)}, {"residual", f.residual}});
    return json{{"selected", r.selected},
                {"discriminatory_values", r.discriminatory_values},
                {"controls", controls_to_json(r.controls)},
                {"fitting", std::move(fits)},
                {"stop_reason",
                 r.stop_reason == StopReason::completed ? "completed" : "below_tolerance"}};
}

json observability_report_to_json(const ObservabilityReport& r) {
    json vecs = json::array();
    for (const auto& v : r.right_vectors) vecs.push_back(vector_to_json(v));
    return json{{"rank", r.rank},
                {"rank_tolerance", r.rank_tolerance},
                {"singular_values", vector_to_json(r.singular_values)},
                {"right_vectors", std::move(vecs)},
                {"obs_matrix", matrix_to_json(r.obs_matrix)}};
}

json identification_result_to_json(const IdentificationResult& r) {
    return json{{"alpha", vector_to_json(r.alpha)},
                {"residual", r.residual},
                {"w_min_eig", r.w_min_eig},
                {"w_rank", r.w_rank},
                {"certified_unique", r.certified_unique},
                {"note", r.note}};
}

Measurements measurements_from_json(const json& j) {
    const std::string what = "measurements";
    const json& outs = require_field(j, "outputs", what);
    if (!outs.is_array()) fail(what, "outputs must be an array of vectors");
    Measurements m;
    m.outputs.reserve(outs.size());
    for (std::size_t i = 0; i < outs.size(); ++i)
        m.outputs.push_back(vector_from_json(outs[i], what + "[" + std::to_string(i) + "]"));
    return m;
}

json measurements_to_json(const Measurements& m) {
    json outs = json::array();
    for (const auto& y : m.outputs) outs.push_back(vector_to_json(y));
    return json{{"outputs", std::move(outs)}};
}

json load_json_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open " + path.string());
    try {
        return json::parse(in);
    } catch (const json::parse_error& e) {
        throw std::runtime_error("cannot parse " + path.string() + ": " + e.what());
    }
}

void write_json_file(const std::filesystem::path& path, const json& j) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open " + path.string() + " for writing");
    out << j.dump(2) << '\n';
    if (!out) throw std::runtime_error("failed writing " + path.string());
}

}  // namespace greedyid::io
