#include "greedyid/ogr.hpp"

#include <algorithm>
#include <stdexcept>
#include <string>

#include "greedyid/detail/response_map.hpp"
#include "greedyid/parallel.hpp"

namespace greedyid {

double default_ogr_tol(const LinearSystem& sys, const AdmissibleSet& adm) {
    const double c_norm = sys.C.jacobiSvd().singularValues()[0];
    return 1e-8 * adm.radius * adm.radius * c_norm * c_norm;
}

static double resolve_tol(const LinearSystem& sys, const OgrConfig& cfg) {
    return cfg.tol > 0.0 ? cfg.tol : default_ogr_tol(sys, cfg.adm);
}

// smallest index whose value is within relative slack of the maximum, so
// symmetric candidates resolve deterministically
static int argmax_with_ties(const std::vector<double>& values, const std::vector<int>& indices) {
    double best = *std::max_element(values.begin(), values.end());
    const double cut = best - 1e-12 * std::abs(best);
    int pick = -1;
    for (std::size_t i = 0; i < values.size(); ++i) {
        if (values[i] >= cut && (pick < 0 || indices[i] < indices[pick])) pick = static_cast<int>(i);
    }
    return pick;
}

std::optional<OgrSelection> ogr_initialize(const LinearSystem& sys, const OgrConfig& cfg) {
    sys.validate();
    detail::ResponseMapCache cache(sys);
    const int big_k = sys.num_candidates();

    std::vector<DiscriminatoryResult> results = parallel_map<DiscriminatoryResult>(
        big_k, [&](std::size_t ell) { return cache.maximize(sys.candidates[ell], cfg.adm); },
        cfg.parallel);

    std::vector<double> values(big_k);
    std::vector<int> indices(big_k);
    for (int ell = 0; ell < big_k; ++ell) {
        values[ell] = results[ell].value;
        indices[ell] = ell;
    }
    int pick = argmax_with_ties(values, indices);
    if (values[pick] < resolve_tol(sys, cfg)) return std::nullopt;

    OgrSelection sel;
    sel.index = pick;
    sel.control = std::move(results[pick].control);
    sel.value = values[pick];
    return sel;
}

// fit + mismatch maximization for one remaining candidate against the
// current selection; w_full indexes candidates in the original order
static std::pair<FittingSolution, DiscriminatoryResult> fit_and_discriminate(
    const LinearSystem& sys, const detail::ResponseMapCache& cache, const OgrState& state,
    int target, const AdmissibleSet& adm) {
    const int k = static_cast<int>(state.selected.size());
    Eigen::MatrixXd w_small(k + 1, k + 1);
    for (int i = 0; i < k; ++i) {
        for (int j = 0; j < k; ++j) w_small(i, j) = state.w_full(state.selected[i], state.selected[j]);
        w_small(i, k) = w_small(k, i) = state.w_full(state.selected[i], target);
    }
    w_small(k, k) = state.w_full(target, target);

    FittingSolution fit = solve_fitting(WMatrix{std::move(w_small)}, k);

    Eigen::MatrixXd b_tilde =
        sys.candidates[target] - basis_combination(sys, state.selected, fit.alpha);
    DiscriminatoryResult disc = cache.maximize(b_tilde, adm);
    return {std::move(fit), std::move(disc)};
}

std::optional<OgrSelection> ogr_step(const LinearSystem& sys, const OgrState& state,
                                     const OgrConfig& cfg) {
    if (state.selected.empty()) throw std::invalid_argument("ogr_step: nothing selected yet");
    detail::ResponseMapCache cache(sys);

    std::vector<int> remaining;
    for (int ell = 0; ell < sys.num_candidates(); ++ell)
        if (std::find(state.selected.begin(), state.selected.end(), ell) == state.selected.end())
            remaining.push_back(ell);
    if (remaining.empty()) return std::nullopt;

    std::vector<std::pair<FittingSolution, DiscriminatoryResult>> rounds;
    try {
        rounds = parallel_map<std::pair<FittingSolution, DiscriminatoryResult>>(
            remaining.size(),
            [&](std::size_t i) {
                return fit_and_discriminate(sys, cache, state, remaining[i], cfg.adm);
            },
            cfg.parallel);
    } catch (const std::runtime_error& e) {
        throw std::runtime_error(
            "ogr_step: fitting over the selected block failed after " +
            std::to_string(state.selected.size()) +
            " selections; the selected Gram block should stay definite: " + e.what());
    }

    std::vector<double> values(remaining.size());
    for (std::size_t i = 0; i < remaining.size(); ++i) values[i] = rounds[i].second.value;
    int pick = argmax_with_ties(values, remaining);
    if (values[pick] < resolve_tol(sys, cfg)) return std::nullopt;

    OgrSelection sel;
    sel.index = remaining[pick];
    sel.control = std::move(rounds[pick].second.control);
    sel.value = values[pick];
    sel.fit = std::move(rounds[pick].first);
    return sel;
}

GreedyResult ogr_run(const LinearSystem& sys, const OgrConfig& cfg) {
    GreedyResult result;
    auto init = ogr_initialize(sys, cfg);
    if (!init) {
        result.stop_reason = StopReason::below_tolerance;
        return result;
    }

    OgrState state;
    state.selected.push_back(init->index);
    state.controls.push_back(init->control);
    state.values.push_back(init->value);
    state.w_full = w_matrix(sys, init->control).values;

    bool stopped = false;
    while (static_cast<int>(state.selected.size()) < sys.num_candidates()) {
        auto sel = ogr_step(sys, state, cfg);
        if (!sel) {
            stopped = true;
            break;
        }
        state.fits.push_back(std::move(sel->fit));
        state.selected.push_back(sel->index);
        state.controls.push_back(sel->control);
        state.values.push_back(sel->value);
        state.w_full += w_matrix(sys, sel->control).values;
    }

    result.controls = std::move(state.controls);
    result.selected = std::move(state.selected);
    result.fitting_history = std::move(state.fits);
    result.discriminatory_values = std::move(state.values);
    result.stop_reason = stopped ? StopReason::below_tolerance : StopReason::completed;
    return result;
}

}  // namespace greedyid
