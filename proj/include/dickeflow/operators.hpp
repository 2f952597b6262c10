// operators.hpp - truncated bosonic and collective-spin operator matrices
//
// Conventions: the collective spin lives in the maximal (symmetric) sector
// j = N_s/2, which is closed under all collective couplings used here, so
// the spin factor has dimension N_s + 1. Product bases are photon-major:
// flattened index = photon_number * (N_s + 1) + (m + N_s/2).
// Units: hbar = k_B = 1.
#pragma once

#include <Eigen/Dense>

namespace dickeflow::ops {

enum class Basis { Fock, Spin, Product };
enum class Slot { photon, spin };

struct OperatorMatrix {
    Eigen::MatrixXcd data;
    Basis basis = Basis::Fock;
    int levels_outer = 1; // photon-factor dimension (or full dimension for single-factor bases)
    int levels_inner = 1; // spin-factor dimension; 1 unless Product

    Eigen::Index dim() const { return data.rows(); }
};

struct SpinOperators {
    OperatorMatrix jz, jp, jm, jx;
};

// Position of a product-basis vector |photon_number> x |m = spin_index - N_s/2>.
struct BasisIndex {
    int photon_number = 0;
    int spin_index = 0;

    double spin_projection(int n_qubits) const { return spin_index - 0.5 * n_qubits; }
};

constexpr int flatten(int photon_number, int spin_index, int n_qubits) {
    return photon_number * (n_qubits + 1) + spin_index;
}
constexpr BasisIndex unflatten(int index, int n_qubits) {
    return {index / (n_qubits + 1), index % (n_qubits + 1)};
}

Eigen::MatrixXcd kron(const Eigen::MatrixXcd& a, const Eigen::MatrixXcd& b);

// Photon annihilation operator on the truncated Fock space {|0>, ..., |n_fock>}:
// a[n-1, n] = sqrt(n).
OperatorMatrix fock_annihilation(int n_fock);

// Collective spin operators in the j = N_s/2 multiplet, dimension N_s + 1,
// with Jz diagonal ascending from -j to +j.
SpinOperators collective_spin(int n_qubits);

// Kronecker lift into the product basis, identity on the other factor.
OperatorMatrix embed(const OperatorMatrix& op, Slot slot, int other_dim);

} // namespace dickeflow::ops
