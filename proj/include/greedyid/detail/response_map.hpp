#pragma once

#include <Eigen/Dense>

#include <vector>

#include "greedyid/greedy.hpp"
#include "greedyid/lin_system.hpp"

namespace greedyid::detail {

// Precomputed pieces of the terminal response of the zero-state system.
// For a direction matrix Bt the terminal output under a piecewise-constant
// control is sum_k blocks[k] * Bt * eps_k with blocks[k] = C exp((T - t_{k+1}) A) F,
// so the map for every candidate combination reuses one pass of exponentials.
class ResponseMapCache {
  public:
    explicit ResponseMapCache(const LinearSystem& sys);

    double dt() const { return dt_; }

    // the map L with gamma(eps) = L vec(eps) dt, shape p x (m * n_steps)
    Eigen::MatrixXd map(const Eigen::MatrixXd& b_tilde) const;

    // exact maximizer of ||gamma(eps)||^2 over the admissible ball via the
    // top singular pair of sqrt(dt) L; zero maps fall back to a constant
    // admissible control with value 0
    DiscriminatoryResult maximize(const Eigen::MatrixXd& b_tilde, const AdmissibleSet& adm) const;

  private:
    std::vector<Eigen::MatrixXd> blocks_;  // p x n each
    TimeGrid grid_;
    int channels_ = 0;
    double dt_ = 0.0;
};

}  // namespace greedyid::detail
