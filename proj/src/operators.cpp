#include "dickeflow/operators.hpp"

#include <cmath>
#include <stdexcept>

namespace dickeflow::ops {

Eigen::MatrixXcd kron(const Eigen::MatrixXcd& a, const Eigen::MatrixXcd& b) {
    Eigen::MatrixXcd out(a.rows() * b.rows(), a.cols() * b.cols());
    for (Eigen::Index i = 0; i < a.rows(); ++i) {
        for (Eigen::Index j = 0; j < a.cols(); ++j) {
            out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
        }
    }
    return out;
}

OperatorMatrix fock_annihilation(int n_fock) {
    if (n_fock < 1) {
        throw std::invalid_argument("fock_annihilation: truncation n_fock must be >= 1");
    }
    const Eigen::Index d = n_fock + 1;
    Eigen::MatrixXcd a = Eigen::MatrixXcd::Zero(d, d);
    for (int n = 1; n <= n_fock; ++n) {
        a(n - 1, n) = std::sqrt(static_cast<double>(n));
    }
    return {std::move(a), Basis::Fock, n_fock + 1, 1};
}

SpinOperators collective_spin(int n_qubits) {
    if (n_qubits < 1) {
        throw std::invalid_argument("collective_spin: n_qubits must be >= 1");
    }
    const int d = n_qubits + 1;
    const double j = 0.5 * n_qubits;

    Eigen::MatrixXcd jz = Eigen::MatrixXcd::Zero(d, d);
    Eigen::MatrixXcd jp = Eigen::MatrixXcd::Zero(d, d);
    for (int s = 0; s < d; ++s) {
        jz(s, s) = -j + s;
    }
    for (int s = 0; s + 1 < d; ++s) {
        const double m = -j + s;
        jp(s + 1, s) = std::sqrt(j * (j + 1) - m * (m + 1));
    }
    Eigen::MatrixXcd jm = jp.adjoint();
    Eigen::MatrixXcd jx = 0.5 * (jp + jm);

    SpinOperators out;
    out.jz = {std::move(jz), Basis::Spin, d, 1};
    out.jp = {std::move(jp), Basis::Spin, d, 1};
    out.jm = {std::move(jm), Basis::Spin, d, 1};
    out.jx = {std::move(jx), Basis::Spin, d, 1};
    return out;
}

OperatorMatrix embed(const OperatorMatrix& op, Slot slot, int other_dim) {
    if (op.basis == Basis::Product) {
        throw std::invalid_argument("embed: operator is already in a product basis");
    }
    if (other_dim < 1) {
        throw std::invalid_argument("embed: other factor dimension must be >= 1");
    }
    if (op.dim() < 1 || op.data.rows() != op.data.cols()) {
        throw std::invalid_argument("embed: operator matrix must be square and nonempty");
    }
    const Eigen::MatrixXcd id = Eigen::MatrixXcd::Identity(other_dim, other_dim);
    if (slot == Slot::photon) {
        return {kron(op.data, id), Basis::Product, static_cast<int>(op.dim()), other_dim};
    }
    return {kron(id, op.data), Basis::Product, other_dim, static_cast<int>(op.dim())};
}

} // namespace dickeflow::ops
