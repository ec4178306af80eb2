#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <stdexcept>

namespace greedyid {

// Uniform partition of [0, t_final] into n_steps intervals.
struct TimeGrid {
    double t_final = 0.0;
    int n_steps = 0;

    TimeGrid() = default;
    TimeGrid(double t_final_, int n_steps_) : t_final(t_final_), n_steps(n_steps_) {
        if (!(t_final > 0.0) || !std::isfinite(t_final))
            throw std::invalid_argument("TimeGrid: t_final must be finite and positive");
        if (n_steps < 1)
            throw std::invalid_argument("TimeGrid: n_steps must be >= 1");
    }

    double dt() const { return t_final / n_steps; }
    double node(int k) const { return t_final * k / n_steps; }

    bool operator==(const TimeGrid& o) const {
        return t_final == o.t_final && n_steps == o.n_steps;
    }
};

// Piecewise-constant control: values(i, k) is channel i on [t_k, t_{k+1}).
struct Control {
    TimeGrid grid;
    Eigen::MatrixXd values;  // channels x n_steps

    Control() = default;
    Control(TimeGrid grid_, Eigen::MatrixXd values_) : grid(grid_), values(std::move(values_)) {
        if (values.cols() != grid.n_steps)
            throw std::invalid_argument("Control: values must have one column per step");
        if (values.rows() < 1)
            throw std::invalid_argument("Control: needs at least one channel");
        if (!values.allFinite())
            throw std::invalid_argument("Control: values must be finite");
    }

    static Control zero(TimeGrid grid, int channels) {
        return Control(grid, Eigen::MatrixXd::Zero(channels, grid.n_steps));
    }

    // constant value c on channel 0, zero elsewhere
    static Control constant(TimeGrid grid, int channels, double c) {
        Eigen::MatrixXd v = Eigen::MatrixXd::Zero(channels, grid.n_steps);
        v.row(0).setConstant(c);
        return Control(grid, v);
    }

    int channels() const { return static_cast<int>(values.rows()); }

    // squared L2(0,T) norm of the step function
    double squared_norm() const { return grid.dt() * values.squaredNorm(); }
    double norm() const { return std::sqrt(squared_norm()); }
};

// Closed L2 ball of admissible controls.
struct AdmissibleSet {
    double radius = 1.0;

    AdmissibleSet() = default;
    explicit AdmissibleSet(double radius_) : radius(radius_) {
        if (!(radius > 0.0) || !std::isfinite(radius))
            throw std::invalid_argument("AdmissibleSet: radius must be finite and positive");
    }

    bool contains(const Control& eps, double slack = 1e-12) const {
        return eps.norm() <= radius * (1.0 + slack);
    }

    // rescale onto the sphere of this ball; zero controls stay zero
    Control project_to_boundary(const Control& eps) const {
        double n = eps.norm();
        if (n == 0.0) return eps;
        Control out = eps;
        out.values *= radius / n;
        return out;
    }
};

}  // namespace greedyid
