#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

#include <Eigen/Eigenvalues>

#include "readout/asymptotics.hpp"
#include "readout/correlators.hpp"
#include "readout/lindblad.hpp"
#include "readout/scenario.hpp"
#include "support.hpp"

using namespace readout;
using readout::testing::deep_params;
using readout::testing::figure_params;
using readout::testing::grid;
using readout::testing::max_abs_diff;

namespace {

const int kLabels[] = {mode::q1, mode::q2, mode::ds};
const complex I(0.0, 1.0);

// Correlator vector read off a full-space density matrix.
StateVector correlators_of(const DensityMatrix& rho, const FockBasis& basis, Sector sector) {
    TwoExcState s;
    s.rho = one_body_correlators(rho, basis, kLabels);
    if (sector == Sector::one_excitation) {
        return flatten(OneExcState{s.rho});
    }
    const int pairs[3][2] = {{0, 1}, {0, 2}, {1, 2}};
    for (int p = 0; p < 3; ++p) {
        for (int q = 0; q < 3; ++q) {
            // <p|rho|q> = <a_{q0}^dagger a_{q1}^dagger ... > = rho_{p0 p1 q1 q0}
            s.pairs(p, q) = two_body_correlator(rho, basis, pairs[p][0], pairs[p][1], pairs[q][1], pairs[q][0]);
        }
    }
    return flatten(s);
}

std::vector<InitialStateSpec> one_excitation_specs() {
    return {init::Ground{},      init::SiteExcited{1}, init::SiteExcited{2}, init::Stationary{1},
            init::Stationary{2}, init::Superposition{std::numbers::pi / 4.0, 0.0},
            init::Superposition{1.0, 2.0}, init::DSExcited{}};
}

double log_slope(const std::vector<double>& t, const std::vector<double>& y, double a, double b) {
    double n = 0, sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < t.size(); ++i) {
        if (t[i] < a || t[i] > b) {
            continue;
        }
        const double l = std::log(y[i]);
        n += 1;
        sx += t[i];
        sy += l;
        sxx += t[i] * t[i];
        sxy += t[i] * l;
    }
    return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

} // namespace

TEST_CASE("decoupled spectrum") {
    ModelParams p = figure_params();
    p.j = p.jd = 0.0;
    auto values = one_excitation_generator(p).eigenvalues();
    std::vector<complex> got(values.data(), values.data() + values.size());
    std::vector<complex> expected = {0.0, 0.0, -2.0, -1.0, -1.0, complex(-1.0, 4.0), complex(-1.0, -4.0),
                                     complex(0.0, 4.0), complex(0.0, -4.0)};
    for (const auto& e : expected) {
        const auto it = std::min_element(got.begin(), got.end(),
                                         [&](complex a, complex b) { return std::abs(a - e) < std::abs(b - e); });
        CHECK(std::abs(*it - e) < 1e-12);
        got.erase(it);
    }
}

TEST_CASE("generators reproduce the master equation on random states") {
    std::mt19937_64 rng(5);
    const auto basis = FockBasis::two_qubit();
    ModelParams p = figure_params();
    p.delta = 0.4;
    p.eps_d_detuning = 0.3;
    const Matrix h = full_hamiltonian(p, basis);
    const Generator g1 = one_excitation_generator(p);
    const Generator g2 = two_excitation_generator(p);
    for (int k = 0; k < 5; ++k) {
        // At most two excitations keeps the four-point equations closed.
        const auto rho = readout::testing::random_state(basis, 2, rng);
        const DensityMatrix drho{lindblad_rhs(rho, h, p.gamma, basis, mode::ds)};
        const StateVector x2 = correlators_of(rho, basis, Sector::two_excitation);
        CHECK((g2.matrix() * x2 - correlators_of(drho, basis, Sector::two_excitation)).norm() < 1e-12);
        if (k < 2) {
            // Without interaction the one-body block closes for any state.
            ModelParams free = p;
            free.delta = 0.0;
            const DensityMatrix d0{lindblad_rhs(rho, full_hamiltonian(free, basis), p.gamma, basis, mode::ds)};
            const StateVector x1 = correlators_of(rho, basis, Sector::one_excitation);
            CHECK((g1.matrix() * x1 - correlators_of(d0, basis, Sector::one_excitation)).norm() < 1e-12);
        }
    }
}

TEST_CASE("one-excitation equations for rho12 and rho22") {
    const auto p = figure_params();
    const Generator g = one_excitation_generator(p);
    std::mt19937_64 rng(2);
    std::normal_distribution<double> normal;
    Eigen::Matrix3cd a;
    for (int i = 0; i < 9; ++i) {
        a(i / 3, i % 3) = complex(normal(rng), normal(rng));
    }
    const Eigen::Matrix3cd rho = a * a.adjoint();
    const auto d = unflatten_one(g.matrix() * flatten(OneExcState{rho})).rho;
    const complex d12 = I * p.omega21 * rho(0, 1) + 0.5 * I * p.j * (rho(0, 0) - rho(1, 1)) - 0.5 * I * p.jd * rho(2, 1);
    const complex d22 = -0.5 * I * p.j * (rho(0, 1) - rho(1, 0));
    CHECK(std::abs(d(0, 1) - d12) < 1e-13);
    CHECK(std::abs(d(1, 1) - d22) < 1e-13);
    // Hermitian in, Hermitian out.
    CHECK((d - d.adjoint()).norm() < 1e-13);
}

TEST_CASE("generator spectrum is stable") {
    for (const auto& p : {figure_params(), deep_params()}) {
        for (const Generator& g : {one_excitation_generator(p), two_excitation_generator(p)}) {
            CHECK(g.eigenvalues().real().maxCoeff() <= 1e-12);
            CHECK(g.spectral());
        }
    }
}

TEST_CASE("slow spectrum at the figure parameters") {
    const auto p = figure_params();
    const auto g = one_excitation_generator(p);
    const auto spectrum = slow_spectrum(g);
    REQUIRE(spectrum.size() == 9);
    CHECK(std::abs(spectrum.front().value.real()) == doctest::Approx(3.0517578e-5).epsilon(0.15).scale(0.0));
    CHECK(slowest_decay_rate(spectrum) == doctest::Approx(3.0517578e-5).epsilon(0.15).scale(0.0));
    const auto rates = slow_rates(g);
    CHECK(rates.resonant == doctest::Approx(0.125).epsilon(0.10).scale(0.0));
    CHECK(rates.detuned == doctest::Approx(3.0517578e-5).epsilon(0.15).scale(0.0));
    int slow = 0, fast = 0, oscillating = 0;
    for (const auto& e : spectrum) {
        slow += e.kind == EigenClass::slow;
        fast += e.kind == EigenClass::ds_fast;
        oscillating += e.kind == EigenClass::fast_oscillating;
    }
    CHECK(slow == 2);
    CHECK(fast == 3);
    CHECK(oscillating == 4);
}

TEST_CASE("slow spectrum at deep parameters") {
    const auto rates = slow_rates(one_excitation_generator(deep_params()));
    CHECK(rates.detuned == doctest::Approx(2e-8).epsilon(0.03).scale(0.0));
    CHECK(rates.resonant == doctest::Approx(0.02).epsilon(0.03).scale(0.0));
}

TEST_CASE("four-point block") {
    const auto p = figure_params();
    const Generator g = two_excitation_generator(p);
    const Eigen::MatrixXcd block = four_point_block(g);
    // The four-point rows never reference the two-point block.
    CHECK(g.matrix().block(n_two_point, 0, n_four_point, n_two_point).norm() == 0.0);
    Eigen::ComplexEigenSolver<Eigen::MatrixXcd> es(block);
    double slowest = 1e300;
    for (Eigen::Index k = 0; k < es.eigenvalues().size(); ++k) {
        slowest = std::min(slowest, std::abs(es.eigenvalues()(k).real()));
    }
    CHECK(slowest == doctest::Approx(0.125).epsilon(0.10).scale(0.0));
    CHECK_THROWS_AS(four_point_block(one_excitation_generator(p)), std::invalid_argument);
}

TEST_CASE("detector-pair correlator slaved to the qubit pair") {
    const auto p = figure_params();
    const Generator g = two_excitation_generator(p);
    const auto x0 = correlator_initial_state(init::BothExcited{}, p, Sector::two_excitation);
    const auto s = unflatten_two(g.propagate(x0, 8.0));
    const complex ratio = s.four_point(2, 1, 1, 0) / s.four_point(0, 1, 1, 0);
    const complex expected(0.0, -p.jd / (2.0 * p.gamma));
    CHECK(std::abs(ratio - expected) < 0.1 * std::abs(expected));
}

TEST_CASE("four-point symmetries under the flow") {
    ModelParams p = figure_params();
    p.delta = 0.2;
    const Generator g = two_excitation_generator(p);
    const auto x0 = correlator_initial_state(init::BothExcited{}, p, Sector::two_excitation);
    for (double t : {0.5, 3.0, 20.0}) {
        const auto s = unflatten_two(g.propagate(x0, t));
        double worst = 0.0;
        for (int a = 0; a < 3; ++a) {
            for (int b = 0; b < 3; ++b) {
                for (int c = 0; c < 3; ++c) {
                    for (int d = 0; d < 3; ++d) {
                        const complex v = s.four_point(a, b, c, d);
                        worst = std::max(worst, std::abs(v + s.four_point(b, a, c, d)));
                        worst = std::max(worst, std::abs(v + s.four_point(a, b, d, c)));
                        worst = std::max(worst, std::abs(v - std::conj(s.four_point(d, c, b, a))));
                    }
                }
            }
        }
        CHECK(worst < 1e-12);
    }
}

TEST_CASE("four-point correlators match the full space") {
    ModelParams p = figure_params();
    p.delta = 0.3;
    const auto basis = FockBasis::two_qubit();
    const auto times = grid(20.0, 5);
    const auto traj = evolve(initial_state(init::BothExcited{}, p, basis), full_hamiltonian(p, basis), p.gamma, basis,
                             mode::ds, times, 1e-12);
    const Generator g = two_excitation_generator(p);
    const auto run = evolve_correlators(g, correlator_initial_state(init::BothExcited{}, p, Sector::two_excitation), times);
    for (std::size_t i = 0; i < times.size(); ++i) {
        const StateVector full = correlators_of(traj.states[i], basis, Sector::two_excitation);
        CHECK((full - run.states[i]).norm() < 1e-9);
    }
}

TEST_CASE("oracle equivalence over t in [0, 100]") {
    const auto times = grid(100.0, 401);
    for (double delta : {0.0, 0.2}) {
        ModelParams p = figure_params();
        p.delta = delta;
        auto specs = one_excitation_specs();
        specs.push_back(init::BothExcited{});
        for (const auto& spec : specs) {
            CAPTURE(describe(spec));
            CAPTURE(delta);
            const auto full = simulate_full(spec, p, times);
            const auto corr = simulate_correlators(spec, p, times);
            CHECK(max_abs_diff(full.r, corr.r) < 1e-8);
            CHECK(max_abs_diff(full.rho11, corr.rho11) < 1e-8);
            CHECK(max_abs_diff(full.rho22, corr.rho22) < 1e-8);
            CHECK(max_abs_diff(full.rho_dd, corr.rho_dd) < 1e-8);
        }
    }
}

TEST_CASE("propagation basics") {
    const auto p = figure_params();
    const Generator g = one_excitation_generator(p);
    const auto x0 = correlator_initial_state(init::Stationary{1}, p, Sector::one_excitation);
    CHECK((g.propagate(x0, 0.0) - x0).norm() == 0.0);
    CHECK_THROWS_AS(g.propagate(x0, -1.0), std::invalid_argument);
    const auto run = evolve_correlators(g, x0, std::vector<double>{0.0, 1.0});
    const auto s = signal_from_correlators(g, run);
    CHECK(s.r.front() == 0.0);
    CHECK(g.component_name(two_point_index(2, 1)) == "rho_D2");
    CHECK(two_excitation_generator(p).component_name(four_point_index(2, 0)) == "rho_2D21");
    CHECK_THROWS_AS(correlator_initial_state(init::BothExcited{}, p, Sector::one_excitation), std::domain_error);
    CHECK_THROWS_AS(pair_ref(1, 1), std::invalid_argument);
}

TEST_CASE("defective generators fall back to the matrix exponential") {
    Eigen::MatrixXcd jordan = Eigen::MatrixXcd::Zero(2, 2);
    jordan(0, 0) = -0.5;
    jordan(1, 1) = -0.5;
    jordan(0, 1) = 1.0;
    const Generator g(jordan, Sector::one_excitation, figure_params());
    CHECK_FALSE(g.spectral());
    CHECK(g.eigenbasis_condition() > Generator::max_condition);
    StateVector x0(2);
    x0 << 0.0, 1.0;
    const double t = 3.0;
    const StateVector x = g.propagate(x0, t);
    CHECK(std::abs(x(0) - t * std::exp(-0.5 * t)) < 1e-13);
    CHECK(std::abs(x(1) - std::exp(-0.5 * t)) < 1e-13);
    // int_0^t s e^{-s/2} ds = 4 - (2t + 4) e^{-t/2}
    CHECK(std::abs(g.integrate_component(x0, 0, t) - (4.0 - (2.0 * t + 4.0) * std::exp(-0.5 * t))) < 1e-12);
}

TEST_CASE("exact integral agrees with the counting identity") {
    const auto p = figure_params();
    for (const auto& spec : one_excitation_specs()) {
        const auto s = simulate_correlators(spec, p, grid(100.0, 201));
        CHECK(check_trace(s).identity_error < 1e-9);
    }
    const auto fine = simulate_correlators(init::Stationary{1}, p, grid(100.0, 20001));
    CHECK(max_abs_diff(fine.r, fine.r_quadrature) < 1e-5);
}

TEST_CASE("detuned state reaches 1 - 1/e at t = 1/W2") {
    const auto p = figure_params();
    const double t = 1.0 / decay_rates(p).w2;
    const auto s = simulate_correlators(init::Stationary{2}, p, std::vector<double>{0.0, t});
    CHECK(s.r.back() == doctest::Approx(1.0 - std::exp(-1.0)).epsilon(0.15).scale(0.0));
}

TEST_CASE("one excitation is eventually always detected") {
    for (const auto& p : {figure_params(), ModelParams{6.0, 0.3, 0.4, 1.0}}) {
        const double t = 25.0 / decay_rates(p).w2;
        const auto s = simulate_correlators(init::SiteExcited{2}, p, std::vector<double>{0.0, t});
        CHECK(s.r.back() == doctest::Approx(1.0).epsilon(1e-6).scale(0.0));
    }
}

TEST_CASE("two-excitation signal law") {
    const auto p = figure_params();
    const auto rates = decay_rates(p);
    const auto times = grid(100.0, 901);
    const auto s = simulate_correlators(init::BothExcited{}, p, times);
    double worst = 0.0;
    for (std::size_t i = 0; i < times.size(); ++i) {
        if (times[i] >= 10.0) {
            worst = std::max(worst, std::abs(s.r[i] - asymptotic_signal({1.0, 1.0, true}, rates, times[i])));
        }
    }
    MESSAGE("max deviation from the two-excitation law on [10, 100]: " << worst);
    CHECK(worst < 0.03);
}

TEST_CASE("interaction robustness of the two-excitation signal") {
    ModelParams p = figure_params();
    const auto times = grid(100.0, 1001);
    const auto base = simulate_correlators(init::BothExcited{}, p, times);
    p.delta = 0.2;
    const auto shifted = simulate_correlators(init::BothExcited{}, p, times);
    CHECK(max_abs_diff(base.r, shifted.r) < 3.9e-3);
}

TEST_CASE("detector population is quasi-stationary after the transient") {
    const auto p = figure_params();
    const Generator g = one_excitation_generator(p);
    const auto x0 = correlator_initial_state(init::Stationary{1}, p, Sector::one_excitation);
    for (double t = 5.5; t <= 60.0; t += 0.5) {
        const StateVector x = g.propagate(x0, t);
        const StateVector dx = g.matrix() * x;
        const double dd = x(8).real();
        CHECK(std::abs(dd + (dx(0).real() + dx(4).real()) / (2.0 * p.gamma)) / dd < 0.2);
    }
}

TEST_CASE("resonant state keeps its population ratio") {
    const auto p = figure_params();
    const double target = std::pow(p.j / (2.0 * p.omega21), 2);
    const auto times = grid(3.0 / decay_rates(p).w1, 241);
    const auto s = simulate_correlators(init::Stationary{1}, p, times);
    for (std::size_t i = 0; i < times.size(); ++i) {
        if (times[i] >= 5.0) {
            CHECK(s.rho22[i] / s.rho11[i] == doctest::Approx(target).epsilon(0.25).scale(0.0));
        }
    }
}

TEST_CASE("detuned state settles into its population ratio") {
    const auto p = figure_params();
    const double target = std::pow(p.j / (2.0 * p.omega21), 2);
    const std::vector<double> times = {0.0, 100.0, 1e3, 1e4, 1e5};
    const auto s = simulate_correlators(init::Stationary{2}, p, times);
    for (std::size_t i = 1; i < times.size(); ++i) {
        CHECK(s.rho11[i] / s.rho22[i] == doctest::Approx(target).epsilon(0.25).scale(0.0));
    }
}

TEST_CASE("coherence between the qubits decays at (J_D / 2 omega21)^2 gamma") {
    const auto p = figure_params();
    const double claimed = std::pow(p.jd / (2.0 * p.omega21), 2) * p.gamma;
    const Generator g = one_excitation_generator(p);
    const auto x0 = correlator_initial_state(init::Stationary{2}, p, Sector::one_excitation);
    const auto times = grid(3.0 / claimed, 1537);
    std::vector<double> magnitude;
    for (double t : times) {
        magnitude.push_back(std::abs(g.propagate(x0, t)(1)));
    }
    const double rate = -log_slope(times, magnitude, 5.0, times.back());
    MESSAGE("fitted |rho12| decay rate " << rate << " vs " << claimed);
    CHECK(rate == doctest::Approx(claimed).epsilon(0.25).scale(0.0));
}

TEST_CASE("oscillating terms stay below the fast-term bound") {
    // Superposition signal minus the population-weighted stationary signals.
    const auto p = figure_params();
    const double bound = p.j * p.jd * p.jd / (2.0 * std::pow(p.omega21, 3));
    const auto times = grid(200.0, 2001);
    const auto sup = simulate_correlators(init::Superposition{std::numbers::pi / 4.0, 0.0}, p, times);
    const auto s1 = simulate_correlators(init::Stationary{1}, p, times);
    const auto s2 = simulate_correlators(init::Stationary{2}, p, times);
    for (std::size_t i = 0; i < times.size(); ++i) {
        if (times[i] > 5.0) {
            CHECK(std::abs(sup.r[i] - 0.5 * s1.r[i] - 0.5 * s2.r[i]) < bound);
        }
    }
}
