#include "dickeflow/dissipation.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>
#include <stdexcept>

#include "dickeflow/errors.hpp"
#include "dickeflow/numeric.hpp"

namespace dickeflow::dme {

const char* to_string(Bath b) {
    return b == Bath::q ? "q" : "r";
}

void ReservoirParams::validate() const {
    if (!(alpha > 0.0)) throw std::invalid_argument("ReservoirParams: alpha must be > 0");
    if (!(omega_c > 0.0)) throw std::invalid_argument("ReservoirParams: omega_c must be > 0");
    if (!(temperature > 0.0)) throw std::invalid_argument("ReservoirParams: temperature must be > 0");
}

namespace {

// V^dag A V, through real GEMM when both factors are real.
Eigen::MatrixXcd to_eigenbasis(const Eigen::MatrixXcd& vectors, const Eigen::MatrixXcd& op) {
    if (vectors.imag().cwiseAbs().maxCoeff() == 0.0 && op.imag().cwiseAbs().maxCoeff() == 0.0) {
        const Eigen::MatrixXd v = vectors.real();
        const Eigen::MatrixXd result = v.transpose() * (op.real() * v);
        return result.cast<std::complex<double>>();
    }
    return vectors.adjoint() * op * vectors;
}

} // namespace

double spectral_density(const ReservoirParams& res, double omega) {
    const double w = std::abs(omega);
    return res.alpha * w * std::exp(-w / res.omega_c);
}

double bose_occupation(const ReservoirParams& res, double gap) {
    if (!(gap > 0.0)) {
        throw std::domain_error("bose_occupation: gap must be > 0");
    }
    return 1.0 / std::expm1(gap / res.temperature);
}

RateSkeleton build_rate_skeleton(const Eigen::VectorXd& energies,
                                 const Eigen::MatrixXcd& coupling_in_eigenbasis,
                                 Bath bath, double degeneracy_tol) {
    const Eigen::Index n = energies.size();
    if (coupling_in_eigenbasis.rows() != n || coupling_in_eigenbasis.cols() != n) {
        throw std::invalid_argument("build_rate_skeleton: coupling dimension does not match spectrum");
    }
    RateSkeleton skel;
    skel.bath = bath;
    skel.entries.reserve(static_cast<std::size_t>(n));
    for (Eigen::Index k = 1; k < n; ++k) {
        for (Eigen::Index j = 0; j < k; ++j) {
            const double me_sq = std::norm(coupling_in_eigenbasis(k, j));
            if (me_sq < matrix_element_cutoff) continue;
            const double gap = std::max(energies(k) - energies(j), 0.0);
            skel.entries.push_back({static_cast<int>(k), static_cast<int>(j), gap, me_sq,
                                    gap <= degeneracy_tol});
        }
    }
    return skel;
}

TransitionTable materialize_rates(const RateSkeleton& skeleton, const ReservoirParams& res) {
    res.validate();
    TransitionTable table;
    table.bath = skeleton.bath;
    table.entries.reserve(skeleton.entries.size());
    for (const auto& e : skeleton.entries) {
        Transition t;
        t.upper = e.upper;
        t.lower = e.lower;
        t.bath = skeleton.bath;
        t.gap = e.gap;
        t.matrix_element_sq = e.me_sq;
        if (e.degenerate) {
            // omega -> 0 limit of gamma(w) n(w): alpha * T, same both directions.
            const double r0 = res.alpha * res.temperature * e.me_sq;
            t.rate_up = r0;
            t.rate_down = r0;
        } else {
            const double g = spectral_density(res, e.gap);
            const double nb = bose_occupation(res, e.gap);
            t.rate_up = g * nb * e.me_sq;
            t.rate_down = g * (1.0 + nb) * e.me_sq;
        }
        table.entries.push_back(t);
    }
    return table;
}

TransitionTable build_rates(const spectra::EigenSolution& eig,
                            const ops::OperatorMatrix& coupling,
                            const ReservoirParams& res,
                            double degeneracy_tol) {
    if (coupling.dim() != eig.source_dim) {
        throw std::invalid_argument("build_rates: coupling operator dimension does not match eigenbasis");
    }
    const Eigen::MatrixXcd a_eig = to_eigenbasis(eig.vectors, coupling.data);
    const auto skel = build_rate_skeleton(eig.energies, a_eig, res.label, degeneracy_tol);
    return materialize_rates(skel, res);
}

namespace {

// Connected components of the level graph under the pooled transitions.
std::vector<int> component_labels(std::span<const TransitionTable> tables, int n) {
    std::vector<int> parent(n);
    std::iota(parent.begin(), parent.end(), 0);
    auto find = [&](int x) {
        while (parent[x] != x) {
            parent[x] = parent[parent[x]];
            x = parent[x];
        }
        return x;
    };
    for (const auto& table : tables) {
        for (const auto& e : table.entries) {
            if (e.rate_up + e.rate_down <= 0.0) continue;
            const int a = find(e.upper), b = find(e.lower);
            if (a != b) parent[a] = b;
        }
    }
    std::vector<int> labels(n);
    for (int i = 0; i < n; ++i) labels[i] = find(i);
    return labels;
}

std::string describe_components(const std::vector<int>& labels) {
    std::vector<int> roots;
    for (int i = 0; i < static_cast<int>(labels.size()); ++i) {
        if (labels[i] == i) roots.push_back(i);
    }
    std::ostringstream msg;
    msg << "steady_state: transition graph splits into " << roots.size()
        << " disconnected level groups:";
    for (int r : roots) {
        msg << " {";
        int shown = 0;
        for (int i = 0; i < static_cast<int>(labels.size()); ++i) {
            if (labels[i] != r) continue;
            if (shown == 8) {
                msg << ",...";
                break;
            }
            if (shown++) msg << ",";
            msg << i;
        }
        msg << "}";
    }
    return msg.str();
}

// One residual vector b - W x accumulated in extended precision.
Eigen::VectorXd refined_residual(const Eigen::MatrixXd& w, const Eigen::VectorXd& x,
                                 const Eigen::VectorXd& b) {
    const Eigen::Index n = w.rows();
    Eigen::VectorXd r(n);
    for (Eigen::Index i = 0; i < n; ++i) {
        long double acc = b(i);
        for (Eigen::Index j = 0; j < n; ++j) {
            acc -= static_cast<long double>(w(i, j)) * static_cast<long double>(x(j));
        }
        r(i) = static_cast<double>(acc);
    }
    return r;
}

} // namespace

FlowResult steady_state(std::span<const TransitionTable> tables, int n_levels) {
    if (tables.empty()) {
        throw std::invalid_argument("steady_state: at least one transition table required");
    }
    if (n_levels < 1) {
        throw std::invalid_argument("steady_state: n_levels must be >= 1");
    }
    const int n = n_levels;
    for (const auto& table : tables) {
        for (const auto& e : table.entries) {
            if (e.upper <= e.lower || e.upper >= n || e.lower < 0) {
                throw std::invalid_argument("steady_state: transition indices out of range");
            }
        }
    }

    const auto labels = component_labels(tables, n);
    if (n > 1) {
        const int root0 = labels[0];
        for (int i = 1; i < n; ++i) {
            if (labels[i] != root0) {
                throw NonUniqueSteadyStateError(describe_components(labels));
            }
        }
    }

    Eigen::MatrixXd w = Eigen::MatrixXd::Zero(n, n);
    for (const auto& table : tables) {
        for (const auto& e : table.entries) {
            w(e.lower, e.upper) += e.rate_down;
            w(e.upper, e.lower) += e.rate_up;
        }
    }
    for (int c = 0; c < n; ++c) {
        w(c, c) = -(w.col(c).sum() - w(c, c));
    }

    FlowResult flow;
    if (n == 1) {
        flow.populations = Eigen::VectorXd::Ones(1);
        flow.residual = 0.0;
        return flow;
    }

    // Scale-normalize, replace the balance row of the highest level with the
    // normalization constraint, and polish with extended-precision refinement.
    const double scale = w.cwiseAbs().maxCoeff();
    Eigen::MatrixXd ws = w / scale;
    Eigen::VectorXd b = Eigen::VectorXd::Zero(n);
    ws.row(n - 1).setOnes();
    b(n - 1) = 1.0;

    Eigen::PartialPivLU<Eigen::MatrixXd> lu(ws);
    Eigen::VectorXd p = lu.solve(b);
    for (int iter = 0; iter < 2; ++iter) {
        p += lu.solve(refined_residual(ws, p, b));
    }

    const double min_p = p.minCoeff();
    if (min_p < -1e-12) {
        std::ostringstream msg;
        msg << "steady_state: population " << min_p << " below the -1e-12 floor";
        throw std::runtime_error(msg.str());
    }
    p = p.cwiseMax(0.0);
    p /= p.sum();

    // Residual of the original (unreplaced, unscaled) rate equation.
    double resid = 0.0;
    for (int i = 0; i < n; ++i) {
        long double acc = 0.0L;
        for (int j = 0; j < n; ++j) {
            acc += static_cast<long double>(w(i, j)) * static_cast<long double>(p(j));
        }
        resid = std::max(resid, static_cast<double>(std::abs(acc)));
    }

    flow.populations = std::move(p);
    flow.residual = resid;
    for (const auto& table : tables) {
        const double j = heat_current(table, flow.populations);
        if (table.bath == Bath::q) {
            flow.current_q += j;
        } else {
            flow.current_r += j;
        }
    }
    return flow;
}

double heat_current(const TransitionTable& table, const Eigen::VectorXd& populations) {
    CompensatedSum sum;
    for (const auto& e : table.entries) {
        sum.add(e.gap * (e.rate_down * populations(e.upper) - e.rate_up * populations(e.lower)));
    }
    return sum.value();
}

namespace {

Eigen::VectorXd diagonal_expectation(const Eigen::MatrixXcd& vectors,
                                     const Eigen::VectorXd& weights) {
    // <phi_k| diag(weights) |phi_k> for every column k.
    return (vectors.cwiseAbs2().transpose() * weights);
}

DressedSystem finish_dressing(spectra::EigenSolution eig, const Eigen::MatrixXcd& a_q,
                              const Eigen::MatrixXcd& a_r, Eigen::VectorXd photon_weights,
                              Eigen::VectorXd excitation_weights, Eigen::VectorXd tail_weights,
                              double degeneracy_tol) {
    DressedSystem ds;
    ds.photon_diag = diagonal_expectation(eig.vectors, photon_weights);
    ds.excitation_diag = diagonal_expectation(eig.vectors, excitation_weights);
    ds.tail_diag = diagonal_expectation(eig.vectors, tail_weights);
    const Eigen::MatrixXcd aq_eig = to_eigenbasis(eig.vectors, a_q);
    const Eigen::MatrixXcd ar_eig = to_eigenbasis(eig.vectors, a_r);
    ds.skeleton_q = build_rate_skeleton(eig.energies, aq_eig, Bath::q, degeneracy_tol);
    ds.skeleton_r = build_rate_skeleton(eig.energies, ar_eig, Bath::r, degeneracy_tol);
    ds.eig = std::move(eig);
    return ds;
}

} // namespace

DressedSystem dress_dicke(const spectra::SystemParams& p) {
    p.validate();
    const int fock_dim = p.n_fock + 1;
    const int spin_dim = p.n_qubits + 1;
    const int dim = fock_dim * spin_dim;

    auto eig = spectra::eigendecompose(spectra::build_dicke_hamiltonian(p));

    const auto a_op = ops::fock_annihilation(p.n_fock);
    const auto spin = ops::collective_spin(p.n_qubits);
    const Eigen::MatrixXcd a = ops::embed(a_op, ops::Slot::photon, spin_dim).data;
    const Eigen::MatrixXcd a_r = a + a.adjoint();
    const Eigen::MatrixXcd a_q =
        (2.0 / std::sqrt(static_cast<double>(p.n_qubits))) *
        ops::embed(spin.jx, ops::Slot::spin, fock_dim).data;

    Eigen::VectorXd photon_w(dim), excitation_w(dim), tail_w(dim);
    for (int i = 0; i < dim; ++i) {
        const auto idx = ops::unflatten(i, p.n_qubits);
        photon_w(i) = idx.photon_number;
        excitation_w(i) = idx.spin_projection(p.n_qubits) + 0.5 * p.n_qubits;
        tail_w(i) = (idx.photon_number >= p.n_fock - 1) ? 1.0 : 0.0;
    }
    return finish_dressing(std::move(eig), a_q, a_r, photon_w, excitation_w, tail_w,
                           default_degeneracy_tol * p.omega_a);
}

DressedSystem dress_oscillator(const spectra::SystemParams& p) {
    p.validate();
    if (p.n_fock_b < 1) {
        throw std::invalid_argument("SystemParams: n_fock_b must be >= 1");
    }
    const auto modes = spectra::dynamical_eigenmodes(p);
    if (!modes.stable) {
        std::ostringstream msg;
        msg << "dress_oscillator: spectrum unbounded below at lambda=" << p.lambda
            << ", gamma=" << p.gamma << " (dynamical eigenmodes not real positive)";
        throw InstabilityError(msg.str());
    }

    const int dim_a = p.n_fock + 1;
    const int dim_b = p.n_fock_b + 1;
    const int dim = dim_a * dim_b;

    auto eig = spectra::eigendecompose(spectra::build_two_oscillator_hamiltonian(p));

    const Eigen::MatrixXcd a =
        ops::embed(ops::fock_annihilation(p.n_fock), ops::Slot::photon, dim_b).data;
    const Eigen::MatrixXcd b =
        ops::embed(ops::fock_annihilation(p.n_fock_b), ops::Slot::spin, dim_a).data;
    const Eigen::MatrixXcd a_r = a + a.adjoint();
    const Eigen::MatrixXcd a_q = b + b.adjoint();

    Eigen::VectorXd photon_w(dim), excitation_w(dim), tail_w(dim);
    for (int i = 0; i < dim; ++i) {
        const int na = i / dim_b;
        const int nb = i % dim_b;
        photon_w(i) = na;
        excitation_w(i) = nb;
        tail_w(i) = (na >= p.n_fock - 1 || nb >= p.n_fock_b - 1) ? 1.0 : 0.0;
    }
    return finish_dressing(std::move(eig), a_q, a_r, photon_w, excitation_w, tail_w,
                           default_degeneracy_tol * p.omega_a);
}

FlowResult solve_flow(const DressedSystem& ds, const ReservoirParams& res_q,
                      const ReservoirParams& res_r) {
    if (res_q.label != Bath::q || res_r.label != Bath::r) {
        throw std::invalid_argument("solve_flow: reservoir labels must be (q, r)");
    }
    const TransitionTable tables[2] = {materialize_rates(ds.skeleton_q, res_q),
                                       materialize_rates(ds.skeleton_r, res_r)};
    auto flow = steady_state(tables, static_cast<int>(ds.eig.source_dim));
    flow.tail_mass = ds.tail_diag.dot(flow.populations);
    flow.mean_photon = ds.photon_diag.dot(flow.populations);
    flow.mean_spin_excitation = ds.excitation_diag.dot(flow.populations);
    if (flow.tail_mass > tail_mass_warning) {
        std::ostringstream msg;
        msg << "truncation: tail_mass=" << flow.tail_mass << " exceeds " << tail_mass_warning;
        flow.warnings.push_back(msg.str());
    }
    return flow;
}

FlowResult solve_dicke_flow(const spectra::SystemParams& p, const ReservoirParams& res_q,
                            const ReservoirParams& res_r) {
    return solve_flow(dress_dicke(p), res_q, res_r);
}

FlowResult solve_oscillator_flow(const spectra::SystemParams& p, const ReservoirParams& res_q,
                                 const ReservoirParams& res_r) {
    return solve_flow(dress_oscillator(p), res_q, res_r);
}

} // namespace dickeflow::dme
