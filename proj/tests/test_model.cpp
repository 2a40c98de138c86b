#include <doctest.h>

#include <cmath>
#include <limits>

#include <Eigen/Eigenvalues>

#include "readout/model.hpp"
#include "support.hpp"

using namespace readout;
using readout::testing::deep_params;
using readout::testing::figure_params;

namespace {

// Restriction of a Fock operator to the one-excitation states over labels (1, 2, D).
Eigen::Matrix3cd one_excitation_block(const Matrix& h, const FockBasis& basis) {
    Eigen::Matrix3cd out;
    for (int a = 0; a < 3; ++a) {
        for (int b = 0; b < 3; ++b) {
            const auto sa = basis.create(0, a);
            const auto sb = basis.create(0, b);
            out(a, b) = sa->sign * sb->sign *
                        h(static_cast<Eigen::Index>(sa->state), static_cast<Eigen::Index>(sb->state));
        }
    }
    return out;
}

} // namespace

TEST_CASE("stationary states at the figure parameters") {
    const auto st = stationary_states(figure_params());
    CHECK(st.mu == doctest::Approx(-0.0622577).epsilon(1e-6).scale(0.0));
    CHECK(st.c == doctest::Approx(0.9980676).epsilon(1e-7).scale(0.0));
    CHECK(st.delta_eps1 == doctest::Approx(-0.0155644371).epsilon(1e-8).scale(0.0));
    CHECK(st.c == doctest::Approx(1.0 / std::sqrt(1.0 + st.mu * st.mu)));
    CHECK(std::abs(st.psi1.dot(st.psi2)) < 1e-15);
    CHECK(st.psi1.norm() == doctest::Approx(1.0).epsilon(1e-15).scale(0.0));
    CHECK(st.psi2.norm() == doctest::Approx(1.0).epsilon(1e-15).scale(0.0));
}

TEST_CASE("stationary states agree with a direct eigen-solve") {
    for (const auto& p : {figure_params(), deep_params(), ModelParams{3.0, 1.7, 0.1, 1.0}}) {
        Eigen::Matrix2d h2;
        h2 << 0.0, p.j / 2.0, p.j / 2.0, p.omega21;
        const auto st = stationary_states(p);
        CHECK((h2 * st.psi1 - st.delta_eps1 * st.psi1).norm() < 1e-12);
        CHECK((h2 * st.psi2 - (p.omega21 + st.delta_eps2) * st.psi2).norm() < 1e-12);
        Eigen::SelfAdjointEigenSolver<Eigen::Matrix2d> es(h2);
        CHECK(es.eigenvalues()(0) == doctest::Approx(st.delta_eps1).epsilon(1e-12).scale(0.0));
        CHECK(std::abs(std::abs(es.eigenvectors().col(0).dot(st.psi1)) - 1.0) < 1e-12);
    }
}

TEST_CASE("stationary states in the decoupled limit") {
    ModelParams p = figure_params();
    p.j = 0.0;
    const auto st = stationary_states(p);
    CHECK(st.mu == 0.0);
    CHECK(st.psi1(0) == doctest::Approx(1.0));
    CHECK(st.psi1(1) == doctest::Approx(0.0));
    CHECK(st.psi2(1) == doctest::Approx(1.0));
}

TEST_CASE("mu approaches -J / 2 omega21 for weak hopping") {
    ModelParams p = figure_params();
    p.j = 1e-4;
    CHECK(stationary_states(p).mu == doctest::Approx(-p.j / (2.0 * p.omega21)).epsilon(1e-8).scale(0.0));
}

TEST_CASE("one-excitation Hamiltonian") {
    const Eigen::Matrix3d h = one_excitation_hamiltonian(figure_params());
    Eigen::Matrix3d expected;
    expected << 0.0, 0.25, 0.25, 0.25, 4.0, 0.0, 0.25, 0.0, 0.0;
    CHECK((h - expected).norm() == 0.0);

    ModelParams p = figure_params();
    p.j = p.jd = 0.0;
    p.eps_d_detuning = 0.7;
    const Eigen::Matrix3d d = one_excitation_hamiltonian(p);
    CHECK((d - Eigen::Vector3d(0.0, 4.0, 0.7).asDiagonal().toDenseMatrix()).norm() == 0.0);
    CHECK((h - h.transpose()).norm() == 0.0);
}

TEST_CASE("full Hamiltonian structure") {
    ModelParams p = figure_params();
    p.delta = 0.3;
    p.eps_d_detuning = 0.2;
    const auto basis = FockBasis::two_qubit();
    const Matrix h = full_hamiltonian(p, basis);
    const Matrix n = total_number_operator(basis);

    CHECK((h - h.adjoint()).norm() < 1e-15);
    CHECK((h * n - n * h).norm() < 1e-12);
    CHECK((one_excitation_block(h, basis) - one_excitation_hamiltonian(p).cast<complex>()).norm() < 1e-15);
    CHECK(std::abs(h(0, 0)) == 0.0);

    const std::uint64_t both = basis.mask(mode::q1) | basis.mask(mode::q2);
    const auto b = static_cast<Eigen::Index>(both);
    CHECK(h(b, b).real() == doctest::Approx(p.omega21 + p.j * p.delta));
}

TEST_CASE("lab frame adds eps1 per excitation") {
    ModelParams p = figure_params();
    p.eps1 = 2.5;
    const auto basis = FockBasis::two_qubit();
    const Matrix diff = full_hamiltonian(p, basis, Frame::lab) - full_hamiltonian(p, basis, Frame::rotating);
    CHECK((diff - 2.5 * total_number_operator(basis)).norm() < 1e-14);
}

TEST_CASE("two-site chain reduces to the two-qubit Hamiltonian") {
    ModelParams p = figure_params();
    p.delta = 0.4;
    p.eps_d_detuning = -0.3;
    ChainParams c;
    c.site_energies = {0.0, p.omega21};
    c.j = p.j;
    c.delta = p.delta;
    c.measured_site = 0;
    c.jd = p.jd;
    c.gamma = p.gamma;
    c.eps_d_detuning = p.eps_d_detuning;
    const auto basis = chain_basis(c);
    REQUIRE(basis.ordering() == FockBasis::two_qubit().ordering());
    CHECK((chain_hamiltonian(c, basis) - full_hamiltonian(p)).norm() < 1e-14);
}

TEST_CASE("three-site chain one-excitation block") {
    ChainParams c;
    c.site_energies = {0.0, 4.0, 8.0};
    c.j = 0.5;
    c.jd = 0.3;
    c.measured_site = 1;
    const auto basis = chain_basis(c);
    const Matrix h = chain_hamiltonian(c, basis);
    const int det = chain_detector_label(c);
    auto element = [&](int a, int b) {
        const auto sa = basis.create(0, a);
        const auto sb = basis.create(0, b);
        return sa->sign * sb->sign * h(static_cast<Eigen::Index>(sa->state), static_cast<Eigen::Index>(sb->state));
    };
    CHECK(element(0, 0).real() == doctest::Approx(-4.0));
    CHECK(element(1, 1).real() == doctest::Approx(0.0));
    CHECK(element(2, 2).real() == doctest::Approx(4.0));
    CHECK(element(0, 1).real() == doctest::Approx(0.25).scale(0.0));
    CHECK(element(1, 2).real() == doctest::Approx(0.25).scale(0.0));
    CHECK(std::abs(element(0, 2)) == 0.0);
    CHECK(element(1, det).real() == doctest::Approx(0.15).scale(0.0));
    CHECK(std::abs(element(0, det)) == 0.0);
    CHECK(std::abs(element(2, det)) == 0.0);
    CHECK((h - h.adjoint()).norm() < 1e-15);

    const Eigen::MatrixXd single = chain_single_particle(c);
    CHECK(single(0, 1) == doctest::Approx(0.25).scale(0.0));
    CHECK(single(1, 1) == doctest::Approx(0.0));
}

TEST_CASE("chain diagonal sums occupied energies and neighbour interactions") {
    ChainParams c;
    c.site_energies = {0.0, 4.0, 8.0};
    c.j = 0.5;
    c.delta = 0.6;
    c.jd = 0.3;
    c.measured_site = 1;
    const auto basis = chain_basis(c);
    const Matrix h = chain_hamiltonian(c, basis);
    for (std::uint64_t s = 0; s < basis.dim(); ++s) {
        double expected = 0.0;
        for (int n = 0; n < 3; ++n) {
            if (basis.occupied(s, n)) {
                expected += c.site_energies[static_cast<std::size_t>(n)] - 4.0;
                if (n + 1 < 3 && basis.occupied(s, n + 1)) {
                    expected += c.j * c.delta;
                }
            }
        }
        const auto i = static_cast<Eigen::Index>(s);
        CHECK(h(i, i).real() == doctest::Approx(expected));
    }
}

TEST_CASE("chain size cap") {
    ChainParams c;
    c.site_energies = std::vector<double>(12, 0.0);
    c.j = 0.5;
    c.jd = 0.5;
    CHECK_THROWS_AS(chain_hamiltonian(c), std::length_error);
    c.site_energies.resize(11);
    CHECK_NOTHROW(check_chain(c));
}

TEST_CASE("regime report at the figure parameters") {
    const auto r = validate_regime(figure_params());
    REQUIRE(r.ratios.size() == 5);
    CHECK(r.ratios[0].value == doctest::Approx(4.0));
    CHECK(r.ratios[1].value == doctest::Approx(2.0));
    CHECK(r.ratios[2].value == doctest::Approx(2.0));
    CHECK(std::isinf(r.ratios[3].value));
    CHECK(std::isinf(r.ratios[4].value));
    CHECK(r.warnings.empty());
    CHECK_FALSE(r.deep);
    CHECK(validate_regime(deep_params()).deep);
}

TEST_CASE("regime warnings") {
    ModelParams p = figure_params();
    p.j = 2.0;
    auto r = validate_regime(p);
    REQUIRE(r.warnings.size() == 1);
    CHECK(r.warnings[0].find("Gamma >> J violated") != std::string::npos);

    p = figure_params();
    p.eps_d_detuning = p.omega21;
    r = validate_regime(p);
    REQUIRE(r.warnings.size() == 1);
    CHECK(r.warnings[0].find("spectral selectivity") != std::string::npos);

    p = figure_params();
    CHECK_FALSE(validate_regime(p, 2.5).warnings.empty());
}

TEST_CASE("parameter checks") {
    ModelParams p = figure_params();
    p.gamma = 0.0;
    CHECK_THROWS_AS(check_params(p), std::domain_error);
    p = figure_params();
    p.omega21 = -1.0;
    CHECK_THROWS_AS(check_params(p), std::domain_error);
}
