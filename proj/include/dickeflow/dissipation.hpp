// dissipation.hpp - dressed-state rates, stationary populations, heat currents
//
// Population sector of the dressed-state master equation: for a nondegenerate
// spectrum the dissipator couples populations among themselves, so the steady
// state follows from a classical rate equation over the eigenlevels.
// Quasi-degenerate pairs (gap <= degeneracy_tol) use the finite omega -> 0
// rate limit alpha * T * |M|^2 in both directions.
#pragma once

#include <limits>
#include <span>
#include <string>
#include <vector>

#include "dickeflow/spectra.hpp"

namespace dickeflow::dme {

enum class Bath { q, r };
const char* to_string(Bath b);

struct ReservoirParams {
    Bath label = Bath::q;
    double alpha = 1e-3;       // dissipation strength
    double omega_c = 20.0;     // Ohmic cutoff
    double temperature = 1.0;  // > 0

    void validate() const;
};

// Ohmic spectral function alpha * |omega| * exp(-|omega|/omega_c); 0 at omega = 0.
double spectral_density(const ReservoirParams& res, double omega);

// Bose-Einstein occupation at the reservoir temperature; gap must be > 0.
double bose_occupation(const ReservoirParams& res, double gap);

inline constexpr double matrix_element_cutoff = 1e-14;  // on |<k|A|j>|^2
inline constexpr double default_degeneracy_tol = 1e-9;  // units of omega_a
inline constexpr double tail_mass_warning = 1e-6;

struct Transition {
    int upper = 0;  // level k
    int lower = 0;  // level j, k > j
    Bath bath = Bath::q;
    double gap = 0.0;       // E_k - E_j
    double rate_up = 0.0;   // Gamma^{kj}_{mu,+}, j -> k
    double rate_down = 0.0; // Gamma^{kj}_{mu,-}, k -> j
    double matrix_element_sq = 0.0;
};

struct TransitionTable {
    Bath bath = Bath::q;
    std::vector<Transition> entries;
};

// All nonzero rates Gamma^{kj}_{mu,+-} for one reservoir. coupling must be
// expressed in the basis that was diagonalized.
TransitionTable build_rates(const spectra::EigenSolution& eig,
                            const ops::OperatorMatrix& coupling,
                            const ReservoirParams& res,
                            double degeneracy_tol = default_degeneracy_tol);

struct FlowResult {
    Eigen::VectorXd populations;
    double current_q = 0.0;
    double current_r = 0.0;
    double residual = 0.0;   // max-norm of the rate-equation residual
    double tail_mass = std::numeric_limits<double>::quiet_NaN();
    double mean_photon = std::numeric_limits<double>::quiet_NaN();
    double mean_spin_excitation = std::numeric_limits<double>::quiet_NaN();
    std::vector<std::string> warnings;
};

// Stationary distribution of the classical rate matrix built from the tables
// (levels indexed by ascending energy). Throws NonUniqueSteadyStateError when
// the transition graph is disconnected.
FlowResult steady_state(std::span<const TransitionTable> tables, int n_levels);

// J_mu = sum_{k>n} Delta_kn (Gamma-_kn P_k - Gamma+_kn P_n); positive values
// mean energy flowing from the system into the reservoir.
double heat_current(const TransitionTable& table, const Eigen::VectorXd& populations);

// Temperature-independent part of a reservoir's transition set; lets sweeps
// over temperatures reuse one eigendecomposition.
struct RateSkeleton {
    Bath bath = Bath::q;
    struct Entry {
        int upper = 0;
        int lower = 0;
        double gap = 0.0;
        double me_sq = 0.0;
        bool degenerate = false;
    };
    std::vector<Entry> entries;
};

RateSkeleton build_rate_skeleton(const Eigen::VectorXd& energies,
                                 const Eigen::MatrixXcd& coupling_in_eigenbasis,
                                 Bath bath, double degeneracy_tol);
TransitionTable materialize_rates(const RateSkeleton& skeleton, const ReservoirParams& res);

struct DressedSystem {
    spectra::EigenSolution eig;
    RateSkeleton skeleton_q;
    RateSkeleton skeleton_r;
    Eigen::VectorXd photon_diag;      // <phi_k| a^dag a |phi_k>
    Eigen::VectorXd excitation_diag;  // <phi_k| Jz + N_s/2 |phi_k> (or b^dag b)
    Eigen::VectorXd tail_diag;        // population weight on the top two truncation levels
};

DressedSystem dress_dicke(const spectra::SystemParams& p);
// Throws InstabilityError when dynamical_eigenmodes(p) is unstable.
DressedSystem dress_oscillator(const spectra::SystemParams& p);

FlowResult solve_flow(const DressedSystem& ds, const ReservoirParams& res_q,
                      const ReservoirParams& res_r);

// Full pipelines: build -> eigendecompose -> rates -> steady state -> currents.
FlowResult solve_dicke_flow(const spectra::SystemParams& p, const ReservoirParams& res_q,
                            const ReservoirParams& res_r);
FlowResult solve_oscillator_flow(const spectra::SystemParams& p, const ReservoirParams& res_q,
                                 const ReservoirParams& res_r);

} // namespace dickeflow::dme
