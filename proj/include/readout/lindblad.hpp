// lindblad.hpp: exact master-equation evolution on the full Fock space
//
//   drho/dt = i[rho, H] - gamma (n rho - 2 a rho a^dagger + rho n),   n = a^dagger a
//
// where a annihilates the decaying mode. With this convention the population
// of the decaying mode relaxes at 2*gamma and R(t) = 2 gamma int <n> dt.

#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <vector>

#include "readout/fock.hpp"
#include "readout/initial_state.hpp"
#include "readout/model.hpp"
#include "readout/signal_trace.hpp"

namespace readout {

Matrix lindblad_rhs(const Matrix& rho, const Matrix& h, double gamma, const Matrix& jump);
Matrix lindblad_rhs(const DensityMatrix& rho, const Matrix& h, double gamma, const FockBasis& basis, int jump_mode);

struct Trajectory {
    std::vector<double> times;
    std::vector<DensityMatrix> states;
    std::vector<std::vector<double>> populations; // [time][mode label]
    std::vector<double> total_number;             // <N>(t)
    std::vector<double> jump_population;          // <a^dagger a>(t) of the decaying mode
    std::vector<double> integrated_signal;        // 2 gamma int <a^dagger a>, integrated with the state
    int jump_mode{mode::ds};
};

// Time-dependent detuning term: H(t) = H0 + shape(t) * perturbation.
struct DrivenTerm {
    Matrix perturbation;
    std::function<double(double)> shape;
};

// Adaptive Dormand-Prince integration at relative tolerance `tol` in [1e-12, 1e-4].
// Throws NumericalFailure (carrying the time reached) on step-size underflow.
Trajectory evolve(const DensityMatrix& rho0, const Matrix& h, double gamma, const FockBasis& basis, int jump_mode,
                  std::span<const double> times, double tol = 1e-9);
Trajectory evolve(const DensityMatrix& rho0, const Matrix& h, const DrivenTerm& drive, double gamma,
                  const FockBasis& basis, int jump_mode, std::span<const double> times, double tol = 1e-9);

// Signal from a trajectory. rho11/rho22 columns report labels q1/q2 (or the
// first two chain sites), rho_dd the decaying mode.
SignalTrace signal(const Trajectory& traj, double gamma);

struct DriftReport {
    double max_trace_error{0.0};
    double max_hermiticity_error{0.0};
    double min_eigenvalue{0.0};
};

DriftReport drift(const Trajectory& traj);

// Two-qubit system with a detector: full_hamiltonian + initial_state + evolve + signal.
SignalTrace simulate_full(const InitialStateSpec& spec, const ModelParams& p, std::span<const double> times,
                          double tol = 1e-9, const FockBasis& basis = FockBasis::two_qubit());

// Alternative scheme: qubit 1 itself decays at gamma, no detector.
SignalTrace direct_damping_evolve(const DensityMatrix& rho0, const ModelParams& p, std::span<const double> times,
                                  double tol = 1e-9);
SignalTrace direct_damping_evolve(const InitialStateSpec& spec, const ModelParams& p, std::span<const double> times,
                                  double tol = 1e-9);

// Linear detector-detuning ramp from `detuning_start` to `detuning_end` over
// `duration`, held at `detuning_end` afterwards.
struct Sweep {
    double detuning_start{0.0};
    double detuning_end{0.0};
    double duration{1.0};

    double detuning(double t) const;
    bool operator==(const Sweep&) const = default;
};

// The detuning in `p` is ignored; the sweep sets it.
SignalTrace evolve_with_sweep(const DensityMatrix& rho0, const ModelParams& p, const Sweep& sweep,
                              std::span<const double> times, double tol = 1e-9);

// Chain with a detector on `measured_site`.
SignalTrace simulate_chain(const InitialStateSpec& spec, const ChainParams& c, std::span<const double> times,
                           double tol = 1e-9);

} // namespace readout
