#include "greedyid/detail/response_map.hpp"

#include <cmath>
#include <stdexcept>

namespace greedyid::detail {

ResponseMapCache::ResponseMapCache(const LinearSystem& sys)
    : grid_(sys.grid), channels_(sys.channel_dim()), dt_(sys.grid.dt()) {
    StepPropagator p = StepPropagator::build(sys.A, dt_);
    const int n_steps = grid_.n_steps;
    blocks_.resize(n_steps);
    // walk backwards: block k = C E^{n_steps-1-k} F
    Eigen::MatrixXd lead = sys.C;  // C E^{n_steps-1-k} as k decreases
    for (int k = n_steps - 1; k >= 0; --k) {
        blocks_[k] = lead * p.F;
        if (k > 0) lead = lead * p.E;
    }
}

Eigen::MatrixXd ResponseMapCache::map(const Eigen::MatrixXd& b_tilde) const {
    const auto p_dim = blocks_.front().rows();
    Eigen::MatrixXd map_l(p_dim, static_cast<Eigen::Index>(channels_) * grid_.n_steps);
    for (int k = 0; k < grid_.n_steps; ++k)
        map_l.middleCols(static_cast<Eigen::Index>(k) * channels_, channels_) =
            blocks_[k] * b_tilde / dt_;
    return map_l;
}

// flip sign so the first significant sample of channel 0, scanning forward
// in time, is positive; falls back to the first significant entry anywhere
static void normalize_control_sign(Eigen::VectorXd& vec, int channels) {
    const double scale = vec.cwiseAbs().maxCoeff();
    if (scale == 0.0) return;
    const auto n_steps = vec.size() / channels;
    for (Eigen::Index k = 0; k < n_steps; ++k) {
        const double x = vec[k * channels];
        if (std::abs(x) > 1e-12 * scale) {
            if (x < 0.0) vec = -vec;
            return;
        }
    }
    for (Eigen::Index i = 0; i < vec.size(); ++i) {
        if (std::abs(vec[i]) > 1e-12 * scale) {
            if (vec[i] < 0.0) vec = -vec;
            return;
        }
    }
}

DiscriminatoryResult ResponseMapCache::maximize(const Eigen::MatrixXd& b_tilde,
                                                const AdmissibleSet& adm) const {
    Eigen::MatrixXd scaled = std::sqrt(dt_) * map(b_tilde);
    // top singular pair through the small Gram matrix scaled scaled^T
    Eigen::MatrixXd gram = scaled * scaled.transpose();
    gram = 0.5 * (gram + gram.transpose()).eval();
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(gram);
    const auto p_dim = gram.rows();
    const double top = std::max(es.eigenvalues()[p_dim - 1], 0.0);
    const double sigma = std::sqrt(top);

    DiscriminatoryResult out;
    const double floor = 1e-15 * std::max(1.0, scaled.cwiseAbs().maxCoeff());
    if (sigma <= floor) {
        // nothing to excite; return an arbitrary admissible control
        double c = adm.radius / std::sqrt(grid_.t_final);
        out.control = Control::constant(grid_, channels_, c);
        out.value = 0.0;
        out.singular_value = 0.0;
        return out;
    }

    Eigen::VectorXd u = es.eigenvectors().col(p_dim - 1);
    Eigen::VectorXd v = scaled.transpose() * u / sigma;
    v.normalize();
    normalize_control_sign(v, channels_);

    Eigen::MatrixXd values =
        Eigen::Map<const Eigen::MatrixXd>(v.data(), channels_, grid_.n_steps) *
        (adm.radius / std::sqrt(dt_));
    out.control = Control(grid_, std::move(values));
    out.singular_value = sigma;
    out.value = adm.radius * adm.radius * sigma * sigma;
    return out;
}

}  // namespace greedyid::detail
