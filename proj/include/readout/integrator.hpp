// integrator.hpp: adaptive Dormand-Prince 5(4) for complex linear/nonlinear ODEs

#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <vector>

#include <Eigen/Dense>

namespace readout {

using StateVector = Eigen::VectorXcd;
using RhsFunction = std::function<void(double t, const StateVector& y, StateVector& dydt)>;

struct IntegratorOptions {
    double rel_tol{1e-9};
    double abs_tol{-1.0};        // negative: same as rel_tol
    double initial_step{0.0};    // 0: estimated from the rhs
    std::size_t max_steps{20'000'000};
};

struct IntegrationStats {
    std::size_t accepted{0};
    std::size_t rejected{0};
    std::size_t rhs_evaluations{0};
};

// Integrates y' = f(t, y) with y(times[0]) = y0 and returns y at every entry
// of `times` (strictly increasing). Steps are clipped to land on each output
// time, so outputs carry the full fifth-order accuracy.
//
// Throws NumericalFailure on step-size underflow or when max_steps is hit.
std::vector<StateVector> integrate(const RhsFunction& f, const StateVector& y0, std::span<const double> times,
                                   const IntegratorOptions& options = {}, IntegrationStats* stats = nullptr);

} // namespace readout
