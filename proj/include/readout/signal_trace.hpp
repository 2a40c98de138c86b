// signal_trace.hpp: accumulated detection probability on a time grid

#pragma once

#include <cstddef>
#include <vector>

namespace readout {

// R(t) plus the diagnostic populations exported alongside it.
//
// `r` is the authoritative value: the lost excitation number N(0) - N(t).
// `r_integrated` integrates 2*gamma*rho_DD together with the state, and
// `r_quadrature` applies the trapezoidal rule to rho_DD on the output grid.
struct SignalTrace {
    std::vector<double> times;
    std::vector<double> r;
    std::vector<double> r_integrated;
    std::vector<double> r_quadrature;
    std::vector<double> rho11;
    std::vector<double> rho22;
    std::vector<double> rho_dd;
    std::vector<double> r_asymptotic; // empty unless filled by the caller

    std::size_t size() const { return times.size(); }

    // R at an arbitrary time inside the grid (linear interpolation).
    double r_at(double t) const;
};

struct TraceCheck {
    double r0{0.0};              // |R(0)|
    double worst_decrease{0.0};  // largest R(t_{i}) - R(t_{i+1}), 0 if monotone
    double max_value{0.0};
    double identity_error{0.0};  // max |r - r_integrated|
};

TraceCheck check_trace(const SignalTrace& trace);

// Trapezoidal cumulative integral of `rate * values` on `times`.
std::vector<double> cumulative_trapezoid(const std::vector<double>& times, const std::vector<double>& values,
                                         double rate);

} // namespace readout
