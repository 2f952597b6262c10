#include "dickeflow/thermolimit.hpp"

#include <cmath>
#include <sstream>

#include "dickeflow/errors.hpp"

namespace dickeflow::limit {

LimitModes limit_modes_gamma0(const spectra::SystemParams& p) {
    p.validate_frequencies();
    const double w = p.omega_a, e = p.epsilon, l = p.lambda;
    if (l * l >= w * e) {
        std::ostringstream msg;
        msg << "limit_modes_gamma0: lambda=" << l << " at or beyond the critical coupling sqrt(omega_a*epsilon)="
            << std::sqrt(w * e) << " (low mode frequency not positive)";
        throw InstabilityError(msg.str());
    }
    const double s = std::sqrt(0.25 * (w - e) * (w - e) + l * l);
    const double freq_high = 0.5 * (w + e) + s;
    const double freq_low = (w * e - l * l) / freq_high;  // cancellation-free form of (w+e)/2 - s
    return {LimitKind::gamma0, freq_high, freq_low, std::atan2(2.0 * l, w - e), w, e};
}

LimitModes limit_modes_gamma1(const spectra::SystemParams& p) {
    p.validate_frequencies();
    const double w = p.omega_a, e = p.epsilon, l = p.lambda;
    if (4.0 * l * l >= w * e) {
        std::ostringstream msg;
        msg << "limit_modes_gamma1: lambda=" << l << " at or beyond the critical coupling sqrt(omega_a*epsilon)/2="
            << 0.5 * std::sqrt(w * e) << " (low mode frequency not real)";
        throw InstabilityError(msg.str());
    }
    const double diff = e * e - w * w;
    const double rad = std::sqrt(diff * diff + 16.0 * l * l * w * e);
    const double freq_high = std::sqrt(0.5 * (w * w + e * e + rad));
    const double freq_low = std::sqrt(w * e * (w * e - 4.0 * l * l)) / freq_high;
    return {LimitKind::gamma1, freq_high, freq_low, std::atan2(4.0 * l * std::sqrt(w * e), w * w - e * e),
            w, e};
}

namespace {

struct ChannelWeights {
    double high_q, high_r, low_q, low_r;
};

ChannelWeights channel_weights(const LimitModes& m) {
    const double c2 = std::cos(0.5 * m.angle) * std::cos(0.5 * m.angle);
    const double s2 = std::sin(0.5 * m.angle) * std::sin(0.5 * m.angle);
    if (m.which == LimitKind::gamma0) {
        return {s2, c2, c2, s2};
    }
    // gamma1 carries the quadrature factors omega_a/Lambda (photon side) and
    // epsilon/Lambda (matter side).
    return {s2 * m.epsilon / m.freq_high, c2 * m.omega_a / m.freq_high,
            c2 * m.epsilon / m.freq_low, s2 * m.omega_a / m.freq_low};
}

ModeRates mode_rates(double freq, double weight_q, double weight_r,
                     const dme::ReservoirParams& res_q, const dme::ReservoirParams& res_r) {
    ModeRates mr;
    mr.freq = freq;
    mr.weight_q = weight_q;
    mr.weight_r = weight_r;
    const double gq = dme::spectral_density(res_q, freq) * weight_q;
    const double gr = dme::spectral_density(res_r, freq) * weight_r;
    const double nq = dme::bose_occupation(res_q, freq);
    const double nr = dme::bose_occupation(res_r, freq);
    mr.up_q = gq * nq;
    mr.down_q = gq * (1.0 + nq);
    mr.up_r = gr * nr;
    mr.down_r = gr * (1.0 + nr);
    return mr;
}

double mode_occupation(const ModeRates& mr) {
    const double up = mr.up_q + mr.up_r;
    const double down = mr.down_q + mr.down_r;
    return up / (down - up);
}

// Cotunneling channel current into reservoir q. Algebraically equal to
// Lambda * w_q * gamma_q * [(1+n_q) n_mode - n_q (1+n_mode)] with n_mode the
// rate-ratio occupation; this form vanishes identically at equal bath
// occupations.
double channel_current(double freq, double weight_q, double weight_r,
                       const dme::ReservoirParams& res_q, const dme::ReservoirParams& res_r) {
    const double gq = dme::spectral_density(res_q, freq) * weight_q;
    const double gr = dme::spectral_density(res_r, freq) * weight_r;
    const double denom = gq + gr;
    if (!(denom > 0.0)) return 0.0;
    const double nq = dme::bose_occupation(res_q, freq);
    const double nr = dme::bose_occupation(res_r, freq);
    return freq * gq * gr * (nr - nq) / denom;
}

} // namespace

LimitRates limit_rates(const LimitModes& modes, const dme::ReservoirParams& res_q,
                       const dme::ReservoirParams& res_r) {
    res_q.validate();
    res_r.validate();
    const auto w = channel_weights(modes);
    return {mode_rates(modes.freq_high, w.high_q, w.high_r, res_q, res_r),
            mode_rates(modes.freq_low, w.low_q, w.low_r, res_q, res_r)};
}

EffectiveThermalState effective_temperatures(const LimitModes& modes,
                                             const dme::ReservoirParams& res_q,
                                             const dme::ReservoirParams& res_r) {
    const auto rates = limit_rates(modes, res_q, res_r);
    EffectiveThermalState st;
    st.occ_high = mode_occupation(rates.high);
    st.occ_low = mode_occupation(rates.low);
    st.beta_eff_high =
        std::log((rates.high.down_q + rates.high.down_r) / (rates.high.up_q + rates.high.up_r)) /
        modes.freq_high;
    st.beta_eff_low =
        std::log((rates.low.down_q + rates.low.down_r) / (rates.low.up_q + rates.low.up_r)) /
        modes.freq_low;
    return st;
}

double analytic_current_gamma0(const spectra::SystemParams& p, const dme::ReservoirParams& res_q,
                               const dme::ReservoirParams& res_r) {
    res_q.validate();
    res_r.validate();
    const auto modes = limit_modes_gamma0(p);
    const auto w = channel_weights(modes);
    return channel_current(modes.freq_high, w.high_q, w.high_r, res_q, res_r) +
           channel_current(modes.freq_low, w.low_q, w.low_r, res_q, res_r);
}

double analytic_current_gamma1(const spectra::SystemParams& p, const dme::ReservoirParams& res_q,
                               const dme::ReservoirParams& res_r) {
    res_q.validate();
    res_r.validate();
    const auto modes = limit_modes_gamma1(p);
    const auto w = channel_weights(modes);
    return channel_current(modes.freq_high, w.high_q, w.high_r, res_q, res_r) +
           channel_current(modes.freq_low, w.low_q, w.low_r, res_q, res_r);
}

} // namespace dickeflow::limit
