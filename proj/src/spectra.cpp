#include "dickeflow/spectra.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <stdexcept>

namespace dickeflow::spectra {

void SystemParams::validate_frequencies() const {
    if (!(omega_a > 0.0)) throw std::invalid_argument("SystemParams: omega_a must be > 0");
    if (!(epsilon > 0.0)) throw std::invalid_argument("SystemParams: epsilon must be > 0");
    if (!(lambda >= 0.0)) throw std::invalid_argument("SystemParams: lambda must be >= 0");
    if (!(gamma >= 0.0)) throw std::invalid_argument("SystemParams: gamma must be >= 0");
}

void SystemParams::validate() const {
    validate_frequencies();
    if (n_qubits < 1) throw std::invalid_argument("SystemParams: n_qubits must be >= 1");
    if (n_fock < 1) throw std::invalid_argument("SystemParams: n_fock must be >= 1");
}

ops::OperatorMatrix build_dicke_hamiltonian(const SystemParams& p) {
    p.validate();
    const int spin_dim = p.n_qubits + 1;
    const double ns = static_cast<double>(p.n_qubits);

    // Every term is a product of single-factor operators, so the full matrix
    // is a sum of small Kronecker products.
    const Eigen::MatrixXcd a = ops::fock_annihilation(p.n_fock).data;
    const Eigen::MatrixXcd ad = a.adjoint();
    const Eigen::MatrixXcd id_f = Eigen::MatrixXcd::Identity(p.n_fock + 1, p.n_fock + 1);
    const auto spin = ops::collective_spin(p.n_qubits);

    Eigen::MatrixXcd h = p.epsilon * ops::kron(id_f, spin.jz.data);
    h += p.omega_a * ops::kron(ad * a, Eigen::MatrixXcd::Identity(spin_dim, spin_dim));
    const double pref = p.lambda / std::sqrt(ns);
    h += pref * (ops::kron(ad, spin.jm.data) + ops::kron(a, spin.jp.data));
    h += pref * p.gamma * (ops::kron(ad, spin.jp.data) + ops::kron(a, spin.jm.data));

    return {std::move(h), ops::Basis::Product, p.n_fock + 1, spin_dim};
}

ops::OperatorMatrix build_two_oscillator_hamiltonian(const SystemParams& p) {
    p.validate();
    if (p.n_fock_b < 1) {
        throw std::invalid_argument("SystemParams: n_fock_b must be >= 1");
    }
    const Eigen::MatrixXcd a = ops::fock_annihilation(p.n_fock).data;
    const Eigen::MatrixXcd b = ops::fock_annihilation(p.n_fock_b).data;
    const Eigen::MatrixXcd ad = a.adjoint();
    const Eigen::MatrixXcd bd = b.adjoint();
    const Eigen::MatrixXcd id_a = Eigen::MatrixXcd::Identity(p.n_fock + 1, p.n_fock + 1);
    const Eigen::MatrixXcd id_b = Eigen::MatrixXcd::Identity(p.n_fock_b + 1, p.n_fock_b + 1);

    Eigen::MatrixXcd h = p.epsilon * ops::kron(id_a, bd * b) + p.omega_a * ops::kron(ad * a, id_b);
    h += p.lambda * (ops::kron(ad, b) + ops::kron(a, bd));
    h += p.lambda * p.gamma * (ops::kron(ad, bd) + ops::kron(a, b));

    return {std::move(h), ops::Basis::Product, p.n_fock + 1, p.n_fock_b + 1};
}

namespace {

// Deterministic phase: the first largest-magnitude entry of each column is
// rotated to be real positive.
void fix_phases(Eigen::MatrixXcd& v) {
    for (Eigen::Index c = 0; c < v.cols(); ++c) {
        Eigen::Index imax = 0;
        double amax = -1.0;
        for (Eigen::Index i = 0; i < v.rows(); ++i) {
            const double a = std::abs(v(i, c));
            if (a > amax) {
                amax = a;
                imax = i;
            }
        }
        if (amax <= 0.0) continue;
        const std::complex<double> z = v(imax, c);
        v.col(c) *= std::conj(z) / std::abs(z);
    }
}

void fix_signs(Eigen::MatrixXd& v) {
    for (Eigen::Index c = 0; c < v.cols(); ++c) {
        Eigen::Index imax = 0;
        double amax = -1.0;
        for (Eigen::Index i = 0; i < v.rows(); ++i) {
            const double a = std::abs(v(i, c));
            if (a > amax) {
                amax = a;
                imax = i;
            }
        }
        if (v(imax, c) < 0.0) v.col(c) = -v.col(c);
    }
}

} // namespace

EigenSolution eigendecompose(const Eigen::MatrixXcd& h) {
    if (h.rows() != h.cols() || h.rows() == 0) {
        throw std::invalid_argument("eigendecompose: matrix must be square and nonempty");
    }
    const double scale = h.cwiseAbs().maxCoeff();
    const double herm_dev = (h - h.adjoint()).cwiseAbs().maxCoeff();
    if (herm_dev > 1e-12 * std::max(1.0, scale)) {
        throw std::invalid_argument("eigendecompose: input is not Hermitian within 1e-12");
    }

    EigenSolution out;
    out.source_dim = h.rows();

    // Real-symmetric fast path; all model Hamiltonians land here.
    if (h.imag().cwiseAbs().maxCoeff() == 0.0) {
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(h.real());
        if (solver.info() != Eigen::Success) {
            throw std::runtime_error("eigendecompose: real solver failed to converge");
        }
        out.energies = solver.eigenvalues();
        Eigen::MatrixXd v = solver.eigenvectors();
        fix_signs(v);
        out.vectors = v.cast<std::complex<double>>();
        return out;
    }

    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> solver(h);
    if (solver.info() != Eigen::Success) {
        throw std::runtime_error("eigendecompose: solver failed to converge");
    }
    out.energies = solver.eigenvalues();
    Eigen::MatrixXcd v = solver.eigenvectors();
    fix_phases(v);
    out.vectors = std::move(v);
    return out;
}

EigenSolution eigendecompose(const ops::OperatorMatrix& h) {
    return eigendecompose(h.data);
}

NormalModes dynamical_eigenmodes(const SystemParams& p) {
    p.validate_frequencies();
    const double w = p.omega_a, e = p.epsilon, l = p.lambda, g = p.lambda * p.gamma;

    Eigen::Matrix4d h;
    h << w, l, 0.0, g,
         l, e, g, 0.0,
         0.0, -g, -w, -l,
         -g, 0.0, -l, -e;

    Eigen::EigenSolver<Eigen::Matrix4d> solver(h);
    if (solver.info() != Eigen::Success) {
        throw std::runtime_error("dynamical_eigenmodes: eigensolver failed to converge");
    }
    const Eigen::Vector4cd vals = solver.eigenvalues();

    NormalModes modes;
    for (int i = 0; i < 4; ++i) {
        if (std::abs(vals(i).imag()) > mode_reality_tol) return modes;
    }

    std::array<double, 4> re{vals(0).real(), vals(1).real(), vals(2).real(), vals(3).real()};
    std::array<int, 4> order{0, 1, 2, 3};
    std::sort(order.begin(), order.end(), [&](int a, int b) { return re[a] < re[b]; });

    const double v0 = re[order[0]], v1 = re[order[1]], v2 = re[order[2]], v3 = re[order[3]];
    // +/- pair structure: {v0, v1} = {-v3, -v2}, two strictly positive.
    if (std::abs(v0 + v3) > mode_reality_tol || std::abs(v1 + v2) > mode_reality_tol) return modes;
    if (!(v3 > mode_reality_tol && v2 > mode_reality_tol)) return modes;
    if (!(v0 < -mode_reality_tol && v1 < -mode_reality_tol)) return modes;

    modes.lambda_plus = 0.5 * (v3 - v0);
    modes.lambda_minus = 0.5 * (v2 - v1);
    modes.stable = true;

    const std::array<int, 2> plus_minus{order[3], order[2]};
    for (int row = 0; row < 2; ++row) {
        Eigen::Vector4cd col = solver.eigenvectors().col(plus_minus[row]);
        Eigen::Index imax = 0;
        col.cwiseAbs().maxCoeff(&imax);
        const std::complex<double> z = col(imax);
        if (std::abs(z) > 0.0) col *= std::conj(z) / std::abs(z);
        Eigen::Vector4d real_col = col.real();
        real_col.normalize();
        modes.mode_vectors.row(row) = real_col.transpose();
    }
    return modes;
}

} // namespace dickeflow::spectra
