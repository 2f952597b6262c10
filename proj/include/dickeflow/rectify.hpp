// rectify.hpp - thermal rectification factor and its maximum over temperature bias
#pragma once

#include <span>
#include <vector>

#include "dickeflow/dissipation.hpp"

namespace dickeflow::rect {

// Bias around a mean temperature: T_r = t0 + delta_t/2, T_q = t0 - delta_t/2.
struct BiasSpec {
    double t0 = 1.0;
    double delta_t = 0.0;

    void validate() const;  // requires 0 <= delta_t < 2*t0
};

// Flows below this are treated as zero when forming the rectification ratio.
inline constexpr double flow_floor = 1e-15;

struct RectResult {
    double forward = 0.0;   // J_q at (T_r, T_q) = (t0 + dT/2, t0 - dT/2)
    double backward = 0.0;  // J_q with the two temperatures exchanged
    double factor = 0.0;    // |forward + backward| / max(|forward|, |backward|)
    bool degenerate = false;
};

RectResult rectification_factor(const dme::DressedSystem& ds, const BiasSpec& bias,
                                const dme::ReservoirParams& res_q_template,
                                const dme::ReservoirParams& res_r_template);
RectResult rectification_factor(const spectra::SystemParams& p, const BiasSpec& bias,
                                const dme::ReservoirParams& res_q_template,
                                const dme::ReservoirParams& res_r_template);

struct MaxRectResult {
    double factor_max = 0.0;
    double argmax_delta_t = 0.0;
};

// Grid search over the bias values; ties resolve to the smaller delta_t.
MaxRectResult max_rectification(const dme::DressedSystem& ds, double t0,
                                std::span<const double> delta_grid,
                                const dme::ReservoirParams& res_q_template,
                                const dme::ReservoirParams& res_r_template);
MaxRectResult max_rectification(const spectra::SystemParams& p, double t0,
                                std::span<const double> delta_grid,
                                const dme::ReservoirParams& res_q_template,
                                const dme::ReservoirParams& res_r_template);

// 40 uniform points on (0, 1.9*omega_a]; keeps the cold bath above 0.05*omega_a
// when t0 = omega_a.
std::vector<double> default_bias_grid(double omega_a);

} // namespace dickeflow::rect
