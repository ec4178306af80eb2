#pragma once

#include <Eigen/Dense>

#include <optional>
#include <vector>

#include "greedyid/greedy.hpp"
#include "greedyid/lin_system.hpp"

namespace greedyid {

struct OgrConfig {
    double tol = 0.0;  // <= 0 means use default_ogr_tol
    AdmissibleSet adm;
    bool parallel = false;
};

// 1e-8 * radius^2 * ||C||_2^2, the scale of an initialization value.
double default_ogr_tol(const LinearSystem& sys, const AdmissibleSet& adm);

struct OgrSelection {
    int index = 0;  // candidate index in the original ordering
    Control control;
    double value = 0.0;
    FittingSolution fit;  // over previously selected candidates (empty at init)
};

// Incremental state of an optimized sweep. `selected` are original candidate
// indices; w_full accumulates the K x K Gram matrix over all candidates so
// blocks for any selection order can be read off without re-propagating.
struct OgrState {
    std::vector<int> selected;
    std::vector<Control> controls;
    std::vector<double> values;
    std::vector<FittingSolution> fits;
    Eigen::MatrixXd w_full;  // K x K, sum over controls so far
};

// Best initialization over all candidates; near-ties (relative 1e-12) go to
// the smallest candidate index. Returns nullopt when every candidate has a
// vanishing response map (nothing to excite).
std::optional<OgrSelection> ogr_initialize(const LinearSystem& sys, const OgrConfig& cfg);

// One enrichment round: fit every remaining candidate on the selected ones,
// maximize each mismatch, and select the best candidate if its value clears
// the tolerance. Returns nullopt when the round stops the sweep.
std::optional<OgrSelection> ogr_step(const LinearSystem& sys, const OgrState& state,
                                     const OgrConfig& cfg);

// Full optimized sweep. Stops as soon as the best remaining mismatch falls
// below tol, so linearly dependent or duplicated candidates are never
// selected. Results list controls and selected indices in selection order.
GreedyResult ogr_run(const LinearSystem& sys, const OgrConfig& cfg);

}  // namespace greedyid
