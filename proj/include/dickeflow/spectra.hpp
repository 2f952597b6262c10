// spectra.hpp - Hamiltonian assembly, eigendecomposition, dynamical eigenmodes
#pragma once

#include <Eigen/Dense>

#include <limits>

#include "dickeflow/operators.hpp"

namespace dickeflow::spectra {

// Model constants in units of omega_a (hbar = k_B = 1). The constant energy
// offset -eps*N_s/2 of the two-oscillator model is dropped; only gaps enter
// any observable.
struct SystemParams {
    double omega_a = 1.0;  // photon frequency
    double epsilon = 0.8;  // qubit splitting
    double lambda = 0.0;   // qubit-photon coupling, >= 0
    double gamma = 0.0;    // anisotropy (weight of the counter-rotating term), >= 0
    int n_qubits = 1;      // N_s
    int n_fock = 30;       // photon truncation
    int n_fock_b = 30;     // matter-boson truncation (two-oscillator model only)

    // Throws std::invalid_argument naming the first offending field.
    void validate() const;
    // Same, but ignores n_qubits and the truncations (for the 4x4 eigenmode problem).
    void validate_frequencies() const;
};

struct EigenSolution {
    Eigen::VectorXd energies;  // ascending
    Eigen::MatrixXcd vectors;  // orthonormal columns, deterministic phase
    Eigen::Index source_dim = 0;
};

// H = eps*Jz + omega_a*a^dag a + (lambda/sqrt(N_s)) [(a^dag J- + a J+) + gamma (a^dag J+ + a J-)]
// on the photon-major product basis of dimension (n_fock+1)(N_s+1).
ops::OperatorMatrix build_dicke_hamiltonian(const SystemParams& p);

// H = eps*b^dag b + omega_a*a^dag a + lambda [(a^dag b + a b^dag) + gamma (a^dag b^dag + a b)]
// on the (n_fock+1)(n_fock_b+1)-dimensional product basis (a outer, b inner).
ops::OperatorMatrix build_two_oscillator_hamiltonian(const SystemParams& p);

// Dense Hermitian eigendecomposition with deterministic column phases:
// in each column the first largest-magnitude entry is made real positive.
EigenSolution eigendecompose(const Eigen::MatrixXcd& h);
EigenSolution eigendecompose(const ops::OperatorMatrix& h);

// Eigenvalue reality threshold for the dynamical eigenmode problem; imaginary
// parts below it are treated as round-off.
inline constexpr double mode_reality_tol = 1e-10;

struct NormalModes {
    double lambda_plus = std::numeric_limits<double>::quiet_NaN();
    double lambda_minus = std::numeric_limits<double>::quiet_NaN();
    bool stable = false;
    // Rows [u+, v+] and [u-, v-] of the 4x4 eigenproblem in the ordering
    // O = [a^dag; b^dag; a; b]; meaningful only when stable.
    Eigen::Matrix<double, 2, 4> mode_vectors = Eigen::Matrix<double, 2, 4>::Constant(
        std::numeric_limits<double>::quiet_NaN());
};

// Eigenmodes of the quadratic model from the 4x4 block matrix
// H = [A, B; -B, -A], A = [[omega_a, lambda], [lambda, eps]],
// B = [[0, lambda*gamma], [lambda*gamma, 0]]. Eigenvalues come in +/- pairs;
// the two positive real ones are (lambda_plus, lambda_minus). Instability is
// a data outcome (stable = false), never an exception.
NormalModes dynamical_eigenmodes(const SystemParams& p);

} // namespace dickeflow::spectra
