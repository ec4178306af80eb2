#pragma once

#include <Eigen/Dense>

#include <span>
#include <string>
#include <vector>

#include "greedyid/lin_system.hpp"

namespace greedyid {

struct Measurements {
    std::vector<Eigen::VectorXd> outputs;  // terminal output per control
};

struct IdentificationResult {
    Eigen::VectorXd alpha;
    double residual = 0.0;   // sum of squared output mismatches at alpha
    double w_min_eig = 0.0;
    int w_rank = 0;
    bool certified_unique = false;
    std::string note;  // set when uniqueness cannot be certified
};

// Terminal outputs of the true system B_true under each control.
Measurements simulate_measurements(const LinearSystem& sys, const Eigen::MatrixXd& B_true,
                                   std::span<const Control> controls);

// Least-squares recovery of the coefficients of B on candidates[selected]
// from terminal output measurements. The normal matrix is the accumulated
// Gram matrix of the selected candidates; a definite matrix certifies the
// minimizer as unique, otherwise the minimum-norm solution is returned and
// certified_unique stays false.
IdentificationResult identify(const LinearSystem& sys, std::span<const int> selected,
                              std::span<const Control> controls, const Measurements& meas);

// True when w splits as a definite leading rm x rm block with (numerically)
// zero coupling and tail, the shape forced by a rank-deficient observability
// matrix with the rank-ordered basis.
bool certify_block_structure(const WMatrix& w, int rm, double rel_tol = 1e-10);

}  // namespace greedyid
