#include <doctest.h>

#include <cmath>
#include <numbers>

#include "readout/errors.hpp"
#include "readout/integrator.hpp"
#include "support.hpp"

using namespace readout;

TEST_CASE("exponential decay") {
    const RhsFunction f = [](double, const StateVector& y, StateVector& dy) { dy = -0.7 * y; };
    StateVector y0(1);
    y0(0) = 1.0;
    const auto times = readout::testing::grid(20.0, 41);
    IntegrationStats stats;
    const auto ys = integrate(f, y0, times, {}, &stats);
    REQUIRE(ys.size() == times.size());
    for (std::size_t i = 0; i < times.size(); ++i) {
        CHECK(std::abs(ys[i](0) - std::exp(-0.7 * times[i])) < 1e-9);
    }
    CHECK(stats.accepted > 0);
    CHECK(stats.rhs_evaluations >= 6 * stats.accepted);
}

TEST_CASE("complex rotation over many periods") {
    const double w = 2.0 * std::numbers::pi;
    const RhsFunction f = [w](double, const StateVector& y, StateVector& dy) { dy = complex(0.0, w) * y; };
    StateVector y0(2);
    y0 << 1.0, complex(0.0, 1.0);
    const std::vector<double> times = {0.0, 0.25, 50.0, 100.0};
    IntegratorOptions opts;
    opts.rel_tol = 1e-11;
    const auto ys = integrate(f, y0, times, opts);
    for (std::size_t i = 0; i < times.size(); ++i) {
        const complex phase = std::exp(complex(0.0, w * times[i]));
        CHECK(std::abs(ys[i](0) - phase) < 1e-8);
        CHECK(std::abs(ys[i](1) - complex(0.0, 1.0) * phase) < 1e-8);
    }
}

TEST_CASE("time-dependent right-hand side") {
    // y' = cos(t) y, y = exp(sin t)
    const RhsFunction f = [](double t, const StateVector& y, StateVector& dy) { dy = std::cos(t) * y; };
    StateVector y0(1);
    y0(0) = 1.0;
    const auto times = readout::testing::grid(10.0, 11);
    const auto ys = integrate(f, y0, times);
    for (std::size_t i = 0; i < times.size(); ++i) {
        CHECK(std::abs(ys[i](0) - std::exp(std::sin(times[i]))) < 1e-8);
    }
}

TEST_CASE("outputs at the initial time reproduce the input") {
    const RhsFunction f = [](double, const StateVector& y, StateVector& dy) { dy = -y; };
    StateVector y0(3);
    y0 << 1.0, 2.0, complex(0.5, -1.0);
    const std::vector<double> times = {0.0, 1.0};
    const auto ys = integrate(f, y0, times);
    CHECK((ys[0] - y0).norm() == 0.0);
}

TEST_CASE("times must increase") {
    const RhsFunction f = [](double, const StateVector& y, StateVector& dy) { dy = y; };
    StateVector y0 = StateVector::Ones(1);
    const std::vector<double> times = {0.0, 2.0, 1.0};
    CHECK_THROWS_AS(integrate(f, y0, times), std::invalid_argument);
}

TEST_CASE("finite-time blow-up ends in a numerical failure") {
    // y' = y^2, y(0) = 1 diverges at t = 1.
    const RhsFunction f = [](double, const StateVector& y, StateVector& dy) { dy = y.cwiseProduct(y); };
    StateVector y0 = StateVector::Ones(1);
    const std::vector<double> times = {0.0, 2.0};
    try {
        integrate(f, y0, times);
        FAIL("expected a numerical failure");
    } catch (const NumericalFailure& e) {
        CHECK(e.time_reached() == doctest::Approx(1.0).epsilon(1e-2).scale(0.0));
    }
}

TEST_CASE("step budget") {
    const RhsFunction f = [](double, const StateVector& y, StateVector& dy) { dy = complex(0.0, 50.0) * y; };
    StateVector y0 = StateVector::Ones(1);
    const std::vector<double> times = {0.0, 100.0};
    IntegratorOptions opts;
    opts.max_steps = 10;
    CHECK_THROWS_AS(integrate(f, y0, times, opts), NumericalFailure);
}

TEST_CASE("fifth-order convergence") {
    // Error ratio between two fixed-tolerance runs follows the tolerance.
    const RhsFunction f = [](double t, const StateVector& y, StateVector& dy) {
        dy.resize(2);
        dy(0) = y(1);
        dy(1) = -y(0) + 0.1 * std::sin(t);
    };
    StateVector y0(2);
    y0 << 1.0, 0.0;
    const std::vector<double> times = {0.0, 30.0};
    auto error_at = [&](double tol) {
        IntegratorOptions opts;
        opts.rel_tol = tol;
        const auto ys = integrate(f, y0, times, opts);
        // x'' + x = 0.1 sin t, x(0) = 1, x'(0) = 0: x = cos t + 0.05 (sin t - t cos t)
        const double t = 30.0;
        const double exact = std::cos(t) + 0.05 * (std::sin(t) - t * std::cos(t));
        return std::abs(ys[1](0) - exact);
    };
    const double loose = error_at(1e-6);
    const double tight = error_at(1e-10);
    CHECK(tight < loose);
    CHECK(tight < 1e-7);
}
