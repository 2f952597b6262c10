// thermolimit.hpp - closed-form thermodynamic-limit solvers at gamma = 0 and gamma = 1
//
// Bogoliubov normal modes of the two-coupled-oscillator model, the per-mode
// weighted reservoir rates, the effective mode temperatures defined by the
// up/down total-rate ratio, and the analytic cotunneling heat currents. No
// closed forms exist for intermediate gamma; use the numeric oscillator DME.
#pragma once

#include "dickeflow/dissipation.hpp"
#include "dickeflow/spectra.hpp"

namespace dickeflow::limit {

enum class LimitKind { gamma0, gamma1 };

struct LimitModes {
    LimitKind which = LimitKind::gamma0;
    double freq_high = 0.0;  // Lambda_c (gamma0) or Lambda_A (gamma1)
    double freq_low = 0.0;   // Lambda_d or Lambda_B
    double angle = 0.0;      // theta or theta', branch [0, pi]
    // Source frequencies, kept for the gamma=1 quadrature weights.
    double omega_a = 1.0;
    double epsilon = 1.0;
};

// Lambda_c,d = (omega_a + eps)/2 +- sqrt((omega_a - eps)^2/4 + lambda^2),
// tan(theta) = 2 lambda / (omega_a - eps). Throws InstabilityError when
// lambda^2 >= omega_a * eps (Lambda_d <= 0).
LimitModes limit_modes_gamma0(const spectra::SystemParams& p);

// Lambda_A,B = sqrt([omega_a^2 + eps^2 +- sqrt((eps^2 - omega_a^2)^2
// + 16 lambda^2 omega_a eps)]/2). The mixing angle is taken on the branch
// with tan(theta') = 4 lambda sqrt(omega_a eps) / (omega_a^2 - eps^2), which
// pairs each bath with the correct mode as lambda -> 0. Throws
// InstabilityError when lambda >= sqrt(omega_a eps)/2.
LimitModes limit_modes_gamma1(const spectra::SystemParams& p);

// Per-mode weighted rates: rate = gamma_x(Lambda) n_x(Lambda) * weight going
// up, gamma_x(Lambda)[1 + n_x(Lambda)] * weight going down.
struct ModeRates {
    double freq = 0.0;
    double weight_q = 0.0;
    double weight_r = 0.0;
    double up_q = 0.0, down_q = 0.0;
    double up_r = 0.0, down_r = 0.0;
};

struct LimitRates {
    ModeRates high;
    ModeRates low;
};

LimitRates limit_rates(const LimitModes& modes, const dme::ReservoirParams& res_q,
                       const dme::ReservoirParams& res_r);

struct EffectiveThermalState {
    double beta_eff_high = 0.0;
    double beta_eff_low = 0.0;
    double occ_high = 0.0;
    double occ_low = 0.0;
};

// exp(-beta_eff Lambda) = (total up-rate) / (total down-rate) per mode; the
// steady state is the product of two geometric distributions with these
// occupations.
EffectiveThermalState effective_temperatures(const LimitModes& modes,
                                             const dme::ReservoirParams& res_q,
                                             const dme::ReservoirParams& res_r);

// Analytic steady-state heat flow into reservoir q; the sum of two
// single-mode cotunneling channels, each vanishing when the mode occupation
// equals the q-bath occupation.
double analytic_current_gamma0(const spectra::SystemParams& p, const dme::ReservoirParams& res_q,
                               const dme::ReservoirParams& res_r);
double analytic_current_gamma1(const spectra::SystemParams& p, const dme::ReservoirParams& res_q,
                               const dme::ReservoirParams& res_r);

} // namespace dickeflow::limit
