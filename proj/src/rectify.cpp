#include "dickeflow/rectify.hpp"

#include <cmath>
#include <stdexcept>

namespace dickeflow::rect {

void BiasSpec::validate() const {
    if (!(t0 > 0.0)) {
        throw std::invalid_argument("BiasSpec: t0 must be > 0");
    }
    if (!(delta_t >= 0.0) || !(delta_t < 2.0 * t0)) {
        throw std::invalid_argument(
            "BiasSpec: delta_t must satisfy 0 <= delta_t < 2*t0 (both temperatures positive)");
    }
}

RectResult rectification_factor(const dme::DressedSystem& ds, const BiasSpec& bias,
                                const dme::ReservoirParams& res_q_template,
                                const dme::ReservoirParams& res_r_template) {
    bias.validate();
    dme::ReservoirParams rq = res_q_template;
    dme::ReservoirParams rr = res_r_template;
    rq.label = dme::Bath::q;
    rr.label = dme::Bath::r;

    rq.temperature = bias.t0 - 0.5 * bias.delta_t;
    rr.temperature = bias.t0 + 0.5 * bias.delta_t;
    const double forward = dme::solve_flow(ds, rq, rr).current_q;

    rq.temperature = bias.t0 + 0.5 * bias.delta_t;
    rr.temperature = bias.t0 - 0.5 * bias.delta_t;
    const double backward = dme::solve_flow(ds, rq, rr).current_q;

    RectResult out;
    out.forward = forward;
    out.backward = backward;
    const double largest = std::max(std::abs(forward), std::abs(backward));
    if (largest < flow_floor) {
        out.degenerate = true;
        out.factor = 0.0;
        return out;
    }
    out.factor = std::abs(forward + backward) / largest;
    return out;
}

RectResult rectification_factor(const spectra::SystemParams& p, const BiasSpec& bias,
                                const dme::ReservoirParams& res_q_template,
                                const dme::ReservoirParams& res_r_template) {
    bias.validate();
    return rectification_factor(dme::dress_dicke(p), bias, res_q_template, res_r_template);
}

MaxRectResult max_rectification(const dme::DressedSystem& ds, double t0,
                                std::span<const double> delta_grid,
                                const dme::ReservoirParams& res_q_template,
                                const dme::ReservoirParams& res_r_template) {
    if (delta_grid.empty()) {
        throw std::invalid_argument("max_rectification: delta_t grid must be non-empty");
    }
    for (double dt : delta_grid) {
        BiasSpec{t0, dt}.validate();
    }
    MaxRectResult best;
    bool first = true;
    for (double dt : delta_grid) {
        const auto r = rectification_factor(ds, BiasSpec{t0, dt}, res_q_template, res_r_template);
        if (first || r.factor > best.factor_max ||
            (r.factor == best.factor_max && dt < best.argmax_delta_t)) {
            best.factor_max = r.factor;
            best.argmax_delta_t = dt;
            first = false;
        }
    }
    return best;
}

MaxRectResult max_rectification(const spectra::SystemParams& p, double t0,
                                std::span<const double> delta_grid,
                                const dme::ReservoirParams& res_q_template,
                                const dme::ReservoirParams& res_r_template) {
    if (delta_grid.empty()) {
        throw std::invalid_argument("max_rectification: delta_t grid must be non-empty");
    }
    return max_rectification(dme::dress_dicke(p), t0, delta_grid, res_q_template, res_r_template);
}

std::vector<double> default_bias_grid(double omega_a) {
    std::vector<double> grid(40);
    for (int i = 1; i <= 40; ++i) {
        grid[i - 1] = 1.9 * omega_a * static_cast<double>(i) / 40.0;
    }
    return grid;
}

} // namespace dickeflow::rect
