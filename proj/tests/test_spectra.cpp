#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <complex>
#include <fstream>
#include <random>
#include <vector>

#include "dickeflow/spectra.hpp"
#include "oracles.hpp"

using namespace dickeflow;
using Eigen::MatrixXcd;
using Eigen::MatrixXd;

namespace {

// Closed-form normal modes of the gamma = 0 quadratic model.
std::pair<double, double> closed_form_gamma0(double w, double e, double l) {
    const double s = std::sqrt(0.25 * (w - e) * (w - e) + l * l);
    return {0.5 * (w + e) + s, 0.5 * (w + e) - s};
}

// Closed-form normal modes of the gamma = 1 quadratic model.
std::pair<double, double> closed_form_gamma1(double w, double e, double l) {
    const double rad = std::sqrt(std::pow(e * e - w * w, 2) + 16.0 * l * l * w * e);
    return {std::sqrt(0.5 * (w * w + e * e + rad)), std::sqrt(0.5 * (w * w + e * e - rad))};
}

spectra::SystemParams params(double lambda, double gamma, int n_qubits, int n_fock) {
    spectra::SystemParams p;
    p.lambda = lambda;
    p.gamma = gamma;
    p.n_qubits = n_qubits;
    p.n_fock = n_fock;
    return p;
}

} // namespace

TEST_CASE("decoupled Dicke spectrum is the sum of free levels") {
    auto p = params(0.0, 0.7, 2, 4);
    const auto eig = spectra::eigendecompose(spectra::build_dicke_hamiltonian(p));

    std::vector<double> expected;
    for (int n = 0; n <= p.n_fock; ++n) {
        for (int s = 0; s <= p.n_qubits; ++s) {
            expected.push_back(p.omega_a * n + p.epsilon * (s - 0.5 * p.n_qubits));
        }
    }
    std::sort(expected.begin(), expected.end());
    for (std::size_t i = 0; i < expected.size(); ++i) {
        CHECK(eig.energies(i) == doctest::Approx(expected[i]).epsilon(1e-13));
    }
}

TEST_CASE("gamma=0 single-qubit ground energy is the bare vacuum") {
    // |0, m=-1/2> is an exact eigenstate of the rotating-term model.
    auto p = params(0.1, 0.0, 1, 30);
    const auto eig = spectra::eigendecompose(spectra::build_dicke_hamiltonian(p));
    CHECK(eig.energies(0) == doctest::Approx(-0.5 * p.epsilon).epsilon(1e-13));
}

TEST_CASE("Dicke spectrum at the committed parameter point matches the brute-force solver") {
    auto p = params(0.1, 1.0, 1, 30);
    const auto h = spectra::build_dicke_hamiltonian(p);
    CHECK(h.dim() == 62);
    CHECK((h.data - h.data.adjoint()).cwiseAbs().maxCoeff() <= 1e-14);

    const auto eig = spectra::eigendecompose(h);
    // Frozen from the independent dense eigensolve of the 62x62 matrix.
    CHECK(eig.energies(0) == doctest::Approx(-0.40556930054733681).epsilon(1e-12));
    CHECK(eig.energies(1) - eig.energies(0) ==
          doctest::Approx(0.76266074939762785).epsilon(1e-12));
    CHECK(eig.energies(2) - eig.energies(0) ==
          doctest::Approx(1.0373112901181356).epsilon(1e-12));

    // Cross-check the full spectrum against the in-test Jacobi route.
    const auto oracle_h = oracle::dicke_hamiltonian(p.omega_a, p.epsilon, p.lambda, p.gamma,
                                                    p.n_qubits, p.n_fock);
    CHECK((h.data.real() - oracle_h).cwiseAbs().maxCoeff() <= 1e-14);
    const auto ref = oracle::jacobi_eigensolve(oracle_h);
    for (int k = 0; k < 62; ++k) {
        CHECK(eig.energies(k) == doctest::Approx(ref.values(k)).epsilon(1e-11));
    }

    // and against the committed spectrum golden
    std::ifstream golden(std::string(DICKEFLOW_SOURCE_DIR) +
                         "/tests/golden/dicke_spectrum_ns1_l0.1_g1.csv");
    REQUIRE(golden.good());
    std::string line;
    std::getline(golden, line);
    int k = 0;
    while (std::getline(golden, line)) {
        const double value = std::stod(line.substr(line.find(',') + 1));
        CHECK(std::abs(eig.energies(k) - value) <= 1e-10 * std::max(1.0, std::abs(value)));
        ++k;
    }
    CHECK(k == 62);
}

TEST_CASE("Dicke ground energy is non-increasing in the coupling") {
    for (double g : {0.0, 0.5, 1.0}) {
        double prev = std::numeric_limits<double>::infinity();
        for (double l : {0.0, 0.2, 0.4, 0.6, 0.8, 1.0}) {
            const auto eig = spectra::eigendecompose(
                spectra::build_dicke_hamiltonian(params(l, g, 3, 20)));
            CHECK(eig.energies(0) <= prev + 1e-12);
            prev = eig.energies(0);
        }
    }
}

TEST_CASE("decoupled two-oscillator spectrum") {
    auto p = params(0.0, 0.3, 1, 4);
    p.n_fock_b = 3;
    const auto eig = spectra::eigendecompose(spectra::build_two_oscillator_hamiltonian(p));
    std::vector<double> expected;
    for (int na = 0; na <= p.n_fock; ++na) {
        for (int nb = 0; nb <= p.n_fock_b; ++nb) {
            expected.push_back(p.omega_a * na + p.epsilon * nb);
        }
    }
    std::sort(expected.begin(), expected.end());
    for (std::size_t i = 0; i < expected.size(); ++i) {
        CHECK(eig.energies(i) == doctest::Approx(expected[i]).epsilon(1e-13));
    }
}

TEST_CASE("two-oscillator gaps at gamma=0 match the Bogoliubov closed form") {
    auto p = params(0.1, 0.0, 1, 30);
    p.n_fock_b = 30;
    const auto h = spectra::build_two_oscillator_hamiltonian(p);
    const auto oracle_h = oracle::two_oscillator_hamiltonian(p.omega_a, p.epsilon, p.lambda,
                                                             p.gamma, p.n_fock, p.n_fock_b);
    CHECK((h.data.real() - oracle_h).cwiseAbs().maxCoeff() <= 1e-13);

    const auto eig = spectra::eigendecompose(h);
    const auto [lc, ld] = closed_form_gamma0(p.omega_a, p.epsilon, p.lambda);
    // The rotating-term model conserves total excitation, so the one-quantum
    // sector is unaffected by truncation.
    CHECK(std::abs((eig.energies(1) - eig.energies(0)) - ld) <= 1e-10);
    CHECK(std::abs((eig.energies(2) - eig.energies(0)) - lc) <= 1e-10);
}

TEST_CASE("unstable two-oscillator parameters are flagged before any solve") {
    auto p = params(0.5, 1.0, 1, 10);
    CHECK_FALSE(spectra::dynamical_eigenmodes(p).stable);
}

TEST_CASE("eigendecompose sorts and fixes phases deterministically") {
    MatrixXcd d = MatrixXcd::Zero(3, 3);
    d.diagonal() << 3.0, 1.0, 2.0;
    const auto eig = spectra::eigendecompose(d);
    CHECK(eig.energies(0) == doctest::Approx(1.0));
    CHECK(eig.energies(1) == doctest::Approx(2.0));
    CHECK(eig.energies(2) == doctest::Approx(3.0));

    MatrixXcd sx = MatrixXcd::Zero(2, 2);
    sx(0, 1) = 1.0;
    sx(1, 0) = 1.0;
    const auto pauli = spectra::eigendecompose(sx);
    CHECK(pauli.energies(0) == doctest::Approx(-1.0));
    CHECK(pauli.energies(1) == doctest::Approx(1.0));
    const double inv = 1.0 / std::sqrt(2.0);
    CHECK(std::abs(pauli.vectors(0, 0) - inv) <= 1e-14);
    CHECK(std::abs(pauli.vectors(1, 0) + inv) <= 1e-14);
    CHECK(std::abs(pauli.vectors(0, 1) - inv) <= 1e-14);
    CHECK(std::abs(pauli.vectors(1, 1) - inv) <= 1e-14);
}

TEST_CASE("eigendecompose rejects non-Hermitian input") {
    MatrixXcd m = MatrixXcd::Zero(2, 2);
    m(0, 1) = 1.0;
    CHECK_THROWS_AS(spectra::eigendecompose(m), std::invalid_argument);
}

TEST_CASE("eigendecompose invariants on random Hermitian matrices") {
    std::mt19937 rng(1234);
    std::normal_distribution<double> dist;
    for (int trial = 0; trial < 4; ++trial) {
        const int n = 24;
        MatrixXcd m(n, n);
        for (int i = 0; i < n; ++i) {
            for (int j = 0; j < n; ++j) m(i, j) = {dist(rng), dist(rng)};
        }
        MatrixXcd h = 0.5 * (m + m.adjoint());
        const auto eig = spectra::eigendecompose(h);

        for (int k = 1; k < n; ++k) CHECK(eig.energies(k) >= eig.energies(k - 1));
        const MatrixXcd gram = eig.vectors.adjoint() * eig.vectors;
        CHECK((gram - MatrixXcd::Identity(n, n)).cwiseAbs().maxCoeff() <= 1e-12);
        const MatrixXcd rebuilt =
            eig.vectors * eig.energies.asDiagonal() * eig.vectors.adjoint();
        CHECK((h - rebuilt).cwiseAbs().maxCoeff() <=
              1e-10 * h.cwiseAbs().maxCoeff());
    }
}

TEST_CASE("dynamical eigenmodes reproduce both closed-form limits") {
    for (double l = 0.0; l <= 0.44 + 1e-12; l += 0.02) {
        const auto m0 = spectra::dynamical_eigenmodes(params(l, 0.0, 1, 1));
        REQUIRE(m0.stable);
        const auto [c0, d0] = closed_form_gamma0(1.0, 0.8, l);
        CHECK(std::abs(m0.lambda_plus - c0) <= 1e-10);
        CHECK(std::abs(m0.lambda_minus - d0) <= 1e-10);

        const auto m1 = spectra::dynamical_eigenmodes(params(l, 1.0, 1, 1));
        REQUIRE(m1.stable);
        const auto [a1, b1] = closed_form_gamma1(1.0, 0.8, l);
        CHECK(std::abs(m1.lambda_plus - a1) <= 1e-10);
        CHECK(std::abs(m1.lambda_minus - b1) <= 1e-10);
    }
    // Frozen spot values at lambda = 0.1 (direct evaluation of the closed forms).
    const auto m0 = spectra::dynamical_eigenmodes(params(0.1, 0.0, 1, 1));
    CHECK(m0.lambda_plus == doctest::Approx(1.0414213562373095).epsilon(1e-12));
    CHECK(m0.lambda_minus == doctest::Approx(0.7585786437626905).epsilon(1e-12));
    const auto m1 = spectra::dynamical_eigenmodes(params(0.1, 1.0, 1, 1));
    CHECK(m1.lambda_plus == doctest::Approx(1.0362294875214613).epsilon(1e-12));
    CHECK(m1.lambda_minus == doctest::Approx(0.75248152747493383).epsilon(1e-12));
}

TEST_CASE("mode vectors satisfy the +/- pairing identity") {
    const double w = 1.0, e = 0.8;
    for (double l : {0.1, 0.25, 0.4}) {
        for (double g : {0.0, 0.5, 1.0}) {
            auto p = params(l, g, 1, 1);
            const auto modes = spectra::dynamical_eigenmodes(p);
            if (!modes.stable) continue;
            const double lg = l * g;
            Eigen::Matrix4d h;
            h << w, l, 0, lg, l, e, lg, 0, 0, -lg, -w, -l, -lg, 0, -l, -e;
            const Eigen::Vector2d freqs(modes.lambda_plus, modes.lambda_minus);
            for (int row = 0; row < 2; ++row) {
                const Eigen::Vector4d uv = modes.mode_vectors.row(row).transpose();
                CHECK((h * uv - freqs(row) * uv).cwiseAbs().maxCoeff() <= 1e-9);
                // swapped blocks give the mirrored eigenvalue
                Eigen::Vector4d vu;
                vu << uv(2), uv(3), uv(0), uv(1);
                CHECK((h * vu + freqs(row) * vu).cwiseAbs().maxCoeff() <= 1e-9);
            }
        }
    }
}

TEST_CASE("eigenvalue multiset of the mode matrix is symmetric under negation") {
    const double w = 1.0, e = 0.8;
    std::mt19937 rng(77);
    std::uniform_real_distribution<double> lam(0.0, 0.42), gam(0.0, 1.0);
    for (int trial = 0; trial < 25; ++trial) {
        const double l = lam(rng), g = gam(rng) * l;
        Eigen::Matrix4d h;
        h << w, l, 0, g, l, e, g, 0, 0, -g, -w, -l, -g, 0, -l, -e;
        Eigen::EigenSolver<Eigen::Matrix4d> solver(h);
        std::vector<double> plus, minus;
        for (int i = 0; i < 4; ++i) {
            const auto v = solver.eigenvalues()(i);
            REQUIRE(std::abs(v.imag()) <= 1e-10);
            (v.real() >= 0 ? plus : minus).push_back(std::abs(v.real()));
        }
        REQUIRE(plus.size() == 2);
        std::sort(plus.begin(), plus.end());
        std::sort(minus.begin(), minus.end());
        CHECK(std::abs(plus[0] - minus[0]) <= 1e-10);
        CHECK(std::abs(plus[1] - minus[1]) <= 1e-10);
    }
}

TEST_CASE("branch trends and stability boundary versus anisotropy") {
    // High branch non-decreasing, low branch non-increasing in lambda.
    for (double g : {0.0, 0.5, 1.0}) {
        double prev_high = 0.0, prev_low = std::numeric_limits<double>::infinity();
        for (double l = 0.0; l <= 0.42; l += 0.03) {
            const auto m = spectra::dynamical_eigenmodes(params(l, g, 1, 1));
            REQUIRE(m.stable);
            CHECK(m.lambda_plus >= prev_high - 1e-12);
            CHECK(m.lambda_minus <= prev_low + 1e-12);
            prev_high = m.lambda_plus;
            prev_low = m.lambda_minus;
        }
    }

    // Largest stable lambda shrinks as gamma grows.
    auto largest_stable = [](double g) {
        double last = 0.0;
        for (double l = 0.0; l <= 1.0; l += 0.005) {
            if (spectra::dynamical_eigenmodes(params(l, g, 1, 1)).stable) last = l;
        }
        return last;
    };
    const double edge_half = largest_stable(0.5);
    const double edge_full = largest_stable(1.0);
    CHECK(edge_full <= edge_half);
    CHECK(edge_full == doctest::Approx(0.445).epsilon(0.02));

    // gamma=1, lambda=0.5 sits beyond the critical coupling sqrt(0.8)/2.
    CHECK_FALSE(spectra::dynamical_eigenmodes(params(0.5, 1.0, 1, 1)).stable);
}

TEST_CASE("parameter validation names the offending field") {
    auto p = params(0.1, 0.0, 1, 30);
    p.omega_a = 0.0;
    CHECK_THROWS_WITH_AS(spectra::build_dicke_hamiltonian(p),
                         doctest::Contains("omega_a"), std::invalid_argument);
    p = params(-0.1, 0.0, 1, 30);
    CHECK_THROWS_WITH_AS(spectra::build_dicke_hamiltonian(p),
                         doctest::Contains("lambda"), std::invalid_argument);
    p = params(0.1, 0.0, 1, 30);
    p.n_fock_b = 0;
    CHECK_THROWS_WITH_AS(spectra::build_two_oscillator_hamiltonian(p),
                         doctest::Contains("n_fock_b"), std::invalid_argument);
}
