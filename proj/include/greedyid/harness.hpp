#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "greedyid/lin_system.hpp"
#include "greedyid/quantum.hpp"
#include "greedyid/rng.hpp"

namespace greedyid {

// ---- fixed benchmark instances ----

// Two-state system whose observation sees only the first coordinate, with a
// basis containing pairwise indistinguishable elements. Recovery from its
// outputs is provably ambiguous: coefficient sums 1+2 and 3+4 are all that
// any experiment determines.
struct InconclusiveBenchmark {
    LinearSystem sys;
    Eigen::MatrixXd b_true;       // all-ones target
    Eigen::VectorXd alpha_true;   // (0, 1, 0, 1)
};
InconclusiveBenchmark make_inconclusive_benchmark(TimeGrid grid);

// Same dynamics with the rank-ordered singular-vector basis; the first
// rank*M = 2 coefficients are recoverable and certified.
struct CertifiedBenchmark {
    LinearSystem sys;
    Eigen::MatrixXd b_true;
    Eigen::VectorXd alpha_true;        // (1, 1, 1, 1)
    Eigen::VectorXd alpha_recoverable; // (1, 1)
};
CertifiedBenchmark make_certified_benchmark(TimeGrid grid);

// Three-level ladder with nondegenerate transition frequencies and a dense
// symmetric coupling operator, probed by the 1 -> 3 transition amplitude.
struct ThreeLevelBenchmark {
    QuantumSystem sys;               // candidates: canonical Sym(3) basis
    Eigen::MatrixXd mu_true;
    Eigen::VectorXd alpha_true;      // coordinates of mu_true in the canonical basis
};
ThreeLevelBenchmark make_three_level_benchmark(TimeGrid grid);

// Canonical basis of Sym(n): unit diagonals first, then symmetric pairs
// (0,1), (0,2), ..., in row-major order of the upper triangle.
std::vector<Eigen::MatrixXd> canonical_symmetric_basis(int n);

// k random dense symmetric matrices with entries of unit scale.
std::vector<Eigen::MatrixXd> random_symmetric_matrices(int n, int k, SplitMix64& rng);

// Random instance with a prescribed observability rank: returns a system
// whose observability matrix has rank exactly `rank`, built by conjugating
// a block-triangular normal form with a random orthogonal matrix.
struct RandomInstance {
    LinearSystem sys;
    Eigen::MatrixXd b_true;
    Eigen::VectorXd alpha_true;
    int obs_rank = 0;
};
RandomInstance make_random_instance(int n, int m, int rank, TimeGrid grid, SplitMix64& rng);

// ---- experiments ----

enum class ExperimentKind { bad_example, good_example, rank_curve, basin };

struct ExperimentConfig {
    ExperimentKind kind = ExperimentKind::bad_example;
    std::uint64_t seed = 0;
    std::filesystem::path out_dir;

    // rank curve
    int n = 10;
    int m = 10;
    double t_final = 2.0;
    int n_steps = 64;
    double radius = 1.0;

    // basin
    int n_runs = 50;
    std::vector<double> radii = {0.01, 0.10, 0.25};
    double convergence_tol = 0.005;  // max-abs entry error of the rebuilt operator
    double quantum_t_final = 40.0 * 3.14159265358979323846;
    int quantum_n_steps = 4000;
    // solver budgets sized for hundreds of runs on one core; the stock
    // QuantumGreedyConfig defaults aim at single solves instead
    QuantumGreedyConfig greedy = [] {
        QuantumGreedyConfig g;
        g.monotonic_sweeps = 30;
        g.ascent_tolerance = 1e-4;
        g.fit_starts = 2;
        g.fit_max_iters = 60;
        return g;
    }();

    bool parallel = false;
};

ExperimentConfig experiment_config_from_json_file(const std::filesystem::path& path);

struct ExperimentReport {
    bool passed = true;
    std::vector<std::string> lines;  // printed one per line by the CLI
};

// End-to-end run of the two fixed two-state benchmarks with hard checks on
// kernel directions, certification flags, and recovered coefficients.
ExperimentReport run_bad_example(const ExperimentConfig& cfg);
ExperimentReport run_good_example(const ExperimentConfig& cfg);

// Rank of the accumulated Gram matrix after each control, for the plain and
// the optimized sweep on a fully observable random instance with the
// shuffled rank-one singular-vector basis.
struct RankCurve {
    std::vector<int> gr_ranks;
    std::vector<int> ogr_ranks;
};
RankCurve run_rank_curve(const ExperimentConfig& cfg, ExperimentReport* report = nullptr);

// Convergence-basin comparison on the three-level benchmark: counts of
// identification runs (started in a hypercube of each radius around the
// true coefficients) that converge back to the true operator, once with
// plain-sweep controls on the canonical basis and once with optimized-sweep
// controls on the canonical basis enriched by random symmetric matrices.
struct BasinResult {
    std::vector<double> radii;
    std::vector<int> gr_converged;
    std::vector<int> ogr_converged;
    int n_runs = 0;
    int ogr_selected = 0;
};
BasinResult run_basin(const ExperimentConfig& cfg, ExperimentReport* report = nullptr);

void write_rank_curve_csv(const std::filesystem::path& path, const RankCurve& curve);
void write_basin_csv(const std::filesystem::path& path, const BasinResult& basin);

}  // namespace greedyid
