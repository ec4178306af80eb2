// command line front end. Algorithm subcommands read JSON problem files and
// write JSON results; experiment subcommands run the built-in studies and
// write their tables. Exit codes: 0 success, 1 I/O or configuration error,
// 2 experiment check failure.

#include <CLI11.hpp>

#include <cstdint>
#include <filesystem>
#include <iostream>
#include <numeric>
#include <string>
#include <vector>

#include "greedyid/greedy.hpp"
#include "greedyid/harness.hpp"
#include "greedyid/json_io.hpp"
#include "greedyid/observability.hpp"
#include "greedyid/ogr.hpp"
#include "greedyid/online.hpp"
#include "greedyid/quantum.hpp"

namespace fs = std::filesystem;
using greedyid::io::json;

namespace {

void emit(const json& j, const std::string& out_path) {
    if (out_path.empty())
        std::cout << j.dump(2) << '\n';
    else
        greedyid::io::write_json_file(out_path, j);
}

// accepts either a bare array of control objects or any result document
// carrying a "controls" field, so a greedy result file can be reused directly
std::vector<greedyid::Control> load_controls(const std::string& path) {
    const json doc = greedyid::io::load_json_file(path);
    if (doc.is_object() && doc.contains("controls"))
        return greedyid::io::controls_from_json(doc["controls"], "controls");
    return greedyid::io::controls_from_json(doc, "controls");
}

std::vector<int> all_indices_if_empty(std::vector<int> selected, int count) {
    if (selected.empty()) {
        selected.resize(static_cast<std::size_t>(count));
        std::iota(selected.begin(), selected.end(), 0);
    }
    return selected;
}

struct ObsrankArgs {
    std::string system, out;
    int channels = 1;
    double rank_tol = 1e-10;
};

int run_obsrank(const ObsrankArgs& a) {
    const json doc = greedyid::io::load_json_file(a.system);
    const Eigen::MatrixXd A = greedyid::io::matrix_from_json(doc.at("A"), "A");
    const Eigen::MatrixXd C = greedyid::io::matrix_from_json(doc.at("C"), "C");
    const greedyid::ObservabilityReport report =
        greedyid::analyze_observability(A, C, a.rank_tol);

    json j = greedyid::io::observability_report_to_json(report);
    json basis = json::array();
    for (const Eigen::MatrixXd& b : greedyid::build_observability_basis(report, a.channels))
        basis.push_back(greedyid::io::matrix_to_json(b));
    j["basis"] = std::move(basis);
    j["max_identifiable"] = greedyid::max_identifiable(report, a.channels);
    emit(j, a.out);
    return 0;
}

struct LinearGreedyArgs {
    std::string system, out;
    double radius = 1.0;
    double tol = 0.0;
    bool parallel = false;
};

int run_gr_linear(const LinearGreedyArgs& a) {
    const greedyid::LinearSystem sys =
        greedyid::io::linear_system_from_json(greedyid::io::load_json_file(a.system));
    emit(greedyid::io::greedy_result_to_json(
             greedyid::gr_run(sys, greedyid::AdmissibleSet(a.radius))),
         a.out);
    return 0;
}

int run_ogr_linear(const LinearGreedyArgs& a) {
    const greedyid::LinearSystem sys =
        greedyid::io::linear_system_from_json(greedyid::io::load_json_file(a.system));
    greedyid::OgrConfig cfg;
    cfg.adm = greedyid::AdmissibleSet(a.radius);
    cfg.tol = a.tol;
    cfg.parallel = a.parallel;
    emit(greedyid::io::greedy_result_to_json(greedyid::ogr_run(sys, cfg)), a.out);
    return 0;
}

struct IdentifyArgs {
    std::string system, controls, measurements, out;
    std::vector<int> selected;
};

int run_identify(const IdentifyArgs& a) {
    const greedyid::LinearSystem sys =
        greedyid::io::linear_system_from_json(greedyid::io::load_json_file(a.system));
    const std::vector<greedyid::Control> controls = load_controls(a.controls);
    const greedyid::Measurements meas =
        greedyid::io::measurements_from_json(greedyid::io::load_json_file(a.measurements));
    const std::vector<int> selected =
        all_indices_if_empty(a.selected, sys.num_candidates());
    emit(greedyid::io::identification_result_to_json(
             greedyid::identify(sys, selected, controls, meas)),
         a.out);
    return 0;
}

struct SimulateArgs {
    std::string system, op, controls, out;
};

// measurement files for the identify subcommands, produced from a known
// operator so recovery can be exercised end to end from the shell
int run_simulate(const SimulateArgs& a) {
    const greedyid::LinearSystem sys =
        greedyid::io::linear_system_from_json(greedyid::io::load_json_file(a.system));
    const json bdoc = greedyid::io::load_json_file(a.op);
    const Eigen::MatrixXd b_true = greedyid::io::matrix_from_json(
        bdoc.is_object() && bdoc.contains("B") ? bdoc["B"] : bdoc, "B");
    const std::vector<greedyid::Control> controls = load_controls(a.controls);
    emit(greedyid::io::measurements_to_json(
             greedyid::simulate_measurements(sys, b_true, controls)),
         a.out);
    return 0;
}

int run_simulate_quantum(const SimulateArgs& a) {
    const greedyid::QuantumSystem qsys =
        greedyid::io::quantum_system_from_json(greedyid::io::load_json_file(a.system));
    const json mdoc = greedyid::io::load_json_file(a.op);
    const Eigen::MatrixXd mu_true = greedyid::io::matrix_from_json(
        mdoc.is_object() && mdoc.contains("mu") ? mdoc["mu"] : mdoc, "mu");
    const std::vector<greedyid::Control> controls = load_controls(a.controls);
    Eigen::VectorXcd overlaps(static_cast<Eigen::Index>(controls.size()));
    for (std::size_t m = 0; m < controls.size(); ++m)
        overlaps[static_cast<Eigen::Index>(m)] = greedyid::phi(qsys, mu_true, controls[m]);
    json j;
    j["overlaps"] = greedyid::io::cvector_to_json(overlaps);
    emit(j, a.out);
    return 0;
}

struct QuantumGreedyArgs {
    std::string system, out;
    greedyid::QuantumGreedyConfig cfg;
};

int run_gr_quantum(const QuantumGreedyArgs& a) {
    const greedyid::QuantumSystem qsys =
        greedyid::io::quantum_system_from_json(greedyid::io::load_json_file(a.system));
    emit(greedyid::io::greedy_result_to_json(greedyid::gr_quantum_run(qsys, a.cfg)), a.out);
    return 0;
}

int run_ogr_quantum(const QuantumGreedyArgs& a) {
    const greedyid::QuantumSystem qsys =
        greedyid::io::quantum_system_from_json(greedyid::io::load_json_file(a.system));
    emit(greedyid::io::greedy_result_to_json(greedyid::ogr_quantum_run(qsys, a.cfg)), a.out);
    return 0;
}

struct IdentifyQuantumArgs {
    std::string system, controls, measurements, out;
    std::vector<int> selected;
    greedyid::MultistartConfig cfg;
};

int run_identify_quantum(const IdentifyQuantumArgs& a) {
    const greedyid::QuantumSystem qsys =
        greedyid::io::quantum_system_from_json(greedyid::io::load_json_file(a.system));
    const std::vector<greedyid::Control> controls = load_controls(a.controls);
    const json mdoc = greedyid::io::load_json_file(a.measurements);
    const Eigen::VectorXcd overlaps = greedyid::io::cvector_from_json(
        mdoc.is_object() && mdoc.contains("overlaps") ? mdoc["overlaps"] : mdoc, "overlaps");
    const std::vector<int> selected =
        all_indices_if_empty(a.selected, static_cast<int>(qsys.candidates.size()));

    const std::vector<std::complex<double>> measured(overlaps.begin(), overlaps.end());
    const greedyid::FitResult fit =
        greedyid::identify_quantum(qsys, selected, controls, measured, a.cfg);

    Eigen::MatrixXd rebuilt = Eigen::MatrixXd::Zero(qsys.dim(), qsys.dim());
    for (std::size_t j = 0; j < selected.size(); ++j)
        rebuilt += fit.alpha[static_cast<Eigen::Index>(j)] *
                   qsys.candidates[static_cast<std::size_t>(selected[j])];
    json j;
    j["alpha"] = greedyid::io::vector_to_json(fit.alpha);
    j["residual"] = fit.residual;
    j["operator"] = greedyid::io::matrix_to_json(rebuilt);
    emit(j, a.out);
    return 0;
}

struct ExperimentArgs {
    std::string config, out;
    std::int64_t seed = -1;
    bool parallel = false;
};

greedyid::ExperimentConfig resolve_experiment(const ExperimentArgs& a,
                                              greedyid::ExperimentKind kind) {
    greedyid::ExperimentConfig cfg;
    if (!a.config.empty()) cfg = greedyid::experiment_config_from_json_file(a.config);
    cfg.kind = kind;
    if (a.seed >= 0) cfg.seed = static_cast<std::uint64_t>(a.seed);
    if (!a.out.empty()) cfg.out_dir = a.out;
    if (a.parallel) cfg.parallel = true;
    if (!cfg.out_dir.empty()) fs::create_directories(cfg.out_dir);
    return cfg;
}

int finish_experiment(const greedyid::ExperimentReport& report,
                      const greedyid::ExperimentConfig& cfg, json results) {
    for (const std::string& line : report.lines) std::cout << line << '\n';
    if (!cfg.out_dir.empty()) {
        results["passed"] = report.passed;
        results["lines"] = report.lines;
        greedyid::io::write_json_file(cfg.out_dir / "report.json", results);
    }
    return report.passed ? 0 : 2;
}

int run_example_experiment(const ExperimentArgs& a, greedyid::ExperimentKind kind) {
    const greedyid::ExperimentConfig cfg = resolve_experiment(a, kind);
    const greedyid::ExperimentReport report = kind == greedyid::ExperimentKind::bad_example
                                                  ? greedyid::run_bad_example(cfg)
                                                  : greedyid::run_good_example(cfg);
    return finish_experiment(report, cfg, json::object());
}

int run_rank_curve_experiment(const ExperimentArgs& a) {
    const greedyid::ExperimentConfig cfg =
        resolve_experiment(a, greedyid::ExperimentKind::rank_curve);
    greedyid::ExperimentReport report;
    const greedyid::RankCurve curve = greedyid::run_rank_curve(cfg, &report);
    json results;
    results["gr_ranks"] = curve.gr_ranks;
    results["ogr_ranks"] = curve.ogr_ranks;
    if (!cfg.out_dir.empty())
        greedyid::write_rank_curve_csv(cfg.out_dir / "rank_curve.csv", curve);
    return finish_experiment(report, cfg, std::move(results));
}

int run_basin_experiment(const ExperimentArgs& a) {
    const greedyid::ExperimentConfig cfg = resolve_experiment(a, greedyid::ExperimentKind::basin);
    greedyid::ExperimentReport report;
    const greedyid::BasinResult basin = greedyid::run_basin(cfg, &report);
    json results;
    results["radii"] = basin.radii;
    results["gr_converged"] = basin.gr_converged;
    results["ogr_converged"] = basin.ogr_converged;
    results["n_runs"] = basin.n_runs;
    results["ogr_selected"] = basin.ogr_selected;
    if (!cfg.out_dir.empty()) greedyid::write_basin_csv(cfg.out_dir / "basin.csv", basin);
    return finish_experiment(report, cfg, std::move(results));
}

void add_quantum_options(CLI::App* sub, QuantumGreedyArgs& a, bool with_tol) {
    sub->add_option("--system", a.system, "problem JSON file")->required();
    sub->add_option("--out", a.out, "result JSON file (stdout when omitted)");
    if (with_tol) sub->add_option("--tol", a.cfg.tol, "stop threshold (< 0: relative default)");
    sub->add_option("--seed", a.cfg.seed, "rng seed");
    sub->add_option("--penalty", a.cfg.penalty, "control energy penalty (< 0: auto)");
    sub->add_option("--sweeps", a.cfg.monotonic_sweeps, "monotonic sweeps per subproblem");
    sub->add_option("--fit-starts", a.cfg.fit_starts, "multistart count for fitting");
    sub->add_flag("--parallel", a.cfg.parallel, "scan candidates in parallel");
}

void add_experiment_options(CLI::App* sub, ExperimentArgs& a) {
    sub->add_option("--config", a.config, "experiment config JSON file");
    sub->add_option("--seed", a.seed, "rng seed (overrides config)");
    sub->add_option("--out", a.out, "output directory for tables and report");
    sub->add_flag("--parallel", a.parallel, "run independent work in parallel");
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"greedy reconstruction of control operators"};
    app.require_subcommand(1);

    ObsrankArgs obsrank;
    CLI::App* sub = app.add_subcommand("obsrank", "observability analysis of (A, C)");
    sub->add_option("--system", obsrank.system, "JSON file with fields A and C")->required();
    sub->add_option("--out", obsrank.out, "report JSON file (stdout when omitted)");
    sub->add_option("--channels", obsrank.channels, "input channel count for the basis")
        ->check(CLI::PositiveNumber);
    sub->add_option("--rank-tol", obsrank.rank_tol, "relative rank tolerance")
        ->check(CLI::PositiveNumber);

    LinearGreedyArgs gr_linear;
    sub = app.add_subcommand("gr-linear", "plain sweep on a linear problem");
    sub->add_option("--system", gr_linear.system, "problem JSON file")->required();
    sub->add_option("--out", gr_linear.out, "result JSON file (stdout when omitted)");
    sub->add_option("--radius", gr_linear.radius, "admissible control norm")
        ->check(CLI::PositiveNumber);

    LinearGreedyArgs ogr_linear;
    sub = app.add_subcommand("ogr-linear", "optimized sweep on a linear problem");
    sub->add_option("--system", ogr_linear.system, "problem JSON file")->required();
    sub->add_option("--out", ogr_linear.out, "result JSON file (stdout when omitted)");
    sub->add_option("--radius", ogr_linear.radius, "admissible control norm")
        ->check(CLI::PositiveNumber);
    sub->add_option("--tol", ogr_linear.tol, "stop threshold (<= 0: relative default)");
    sub->add_flag("--parallel", ogr_linear.parallel, "scan candidates in parallel");

    SimulateArgs simulate;
    sub = app.add_subcommand("simulate", "measurements of a known linear operator");
    sub->add_option("--system", simulate.system, "problem JSON file")->required();
    sub->add_option("--operator", simulate.op, "JSON matrix (or object with field B)")
        ->required();
    sub->add_option("--controls", simulate.controls, "controls JSON (array or greedy result)")
        ->required();
    sub->add_option("--out", simulate.out, "measurements JSON file (stdout when omitted)");

    SimulateArgs simulate_quantum;
    sub = app.add_subcommand("simulate-quantum", "overlaps of a known coupling operator");
    sub->add_option("--system", simulate_quantum.system, "problem JSON file")->required();
    sub->add_option("--operator", simulate_quantum.op, "JSON matrix (or object with field mu)")
        ->required();
    sub->add_option("--controls", simulate_quantum.controls,
                    "controls JSON (array or greedy result)")
        ->required();
    sub->add_option("--out", simulate_quantum.out, "overlaps JSON file (stdout when omitted)");

    IdentifyArgs identify;
    sub = app.add_subcommand("identify", "least-squares recovery from linear measurements");
    sub->add_option("--system", identify.system, "problem JSON file")->required();
    sub->add_option("--controls", identify.controls, "controls JSON (array or greedy result)")
        ->required();
    sub->add_option("--measurements", identify.measurements, "measurements JSON file")
        ->required();
    sub->add_option("--out", identify.out, "result JSON file (stdout when omitted)");
    sub->add_option("--selected", identify.selected, "candidate indices (default: all)");

    QuantumGreedyArgs gr_quantum;
    sub = app.add_subcommand("gr-quantum", "plain sweep on a bilinear quantum problem");
    add_quantum_options(sub, gr_quantum, false);

    QuantumGreedyArgs ogr_quantum;
    sub = app.add_subcommand("ogr-quantum", "optimized sweep on a bilinear quantum problem");
    add_quantum_options(sub, ogr_quantum, true);

    IdentifyQuantumArgs identify_quantum;
    sub = app.add_subcommand("identify-quantum", "coefficient recovery from measured overlaps");
    sub->add_option("--system", identify_quantum.system, "problem JSON file")->required();
    sub->add_option("--controls", identify_quantum.controls,
                    "controls JSON (array or greedy result)")
        ->required();
    sub->add_option("--measurements", identify_quantum.measurements,
                    "JSON file with field overlaps ([re, im] pairs)")
        ->required();
    sub->add_option("--out", identify_quantum.out, "result JSON file (stdout when omitted)");
    sub->add_option("--selected", identify_quantum.selected, "candidate indices (default: all)");
    sub->add_option("--starts", identify_quantum.cfg.n_starts, "multistart count");
    sub->add_option("--box", identify_quantum.cfg.box_radius, "start box radius");
    sub->add_option("--seed", identify_quantum.cfg.seed, "rng seed");
    sub->add_option("--grad-tol", identify_quantum.cfg.grad_tolerance, "gradient stop");

    ExperimentArgs bad_example, good_example, rank_curve, basin;
    add_experiment_options(app.add_subcommand("bad-example", "ambiguous-basis benchmark"),
                           bad_example);
    add_experiment_options(app.add_subcommand("good-example", "certified-basis benchmark"),
                           good_example);
    add_experiment_options(
        app.add_subcommand("rank-curve", "rank growth of both sweeps on a random instance"),
        rank_curve);
    add_experiment_options(
        app.add_subcommand("basin", "convergence-basin comparison on the three-level system"),
        basin);

    try {
        app.parse(argc, argv);
        if (app.got_subcommand("obsrank")) return run_obsrank(obsrank);
        if (app.got_subcommand("gr-linear")) return run_gr_linear(gr_linear);
        if (app.got_subcommand("ogr-linear")) return run_ogr_linear(ogr_linear);
        if (app.got_subcommand("simulate")) return run_simulate(simulate);
        if (app.got_subcommand("simulate-quantum"))
            return run_simulate_quantum(simulate_quantum);
        if (app.got_subcommand("identify")) return run_identify(identify);
        if (app.got_subcommand("gr-quantum")) return run_gr_quantum(gr_quantum);
        if (app.got_subcommand("ogr-quantum")) return run_ogr_quantum(ogr_quantum);
        if (app.got_subcommand("identify-quantum")) return run_identify_quantum(identify_quantum);
        if (app.got_subcommand("bad-example"))
            return run_example_experiment(bad_example, greedyid::ExperimentKind::bad_example);
        if (app.got_subcommand("good-example"))
            return run_example_experiment(good_example, greedyid::ExperimentKind::good_example);
        if (app.got_subcommand("rank-curve")) return run_rank_curve_experiment(rank_curve);
        if (app.got_subcommand("basin")) return run_basin_experiment(basin);
    } catch (const CLI::ParseError& e) {
        return app.exit(e);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 0;
}
