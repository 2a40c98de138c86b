// correlators.hpp: closed linear systems for the correlators of the
// two-qubit + detector model, solved exactly through the generator spectrum.
//
// Indices 0, 1, 2 stand for qubit 1, qubit 2 and the detector (the same
// numbering as readout::mode).
//
//   rho_{ab}     = <a_b^dagger a_a>
//   rho_{abcd}   = <a_d^dagger a_c^dagger a_b a_a>
//
// The one-body block obeys drho/dt = i(rho K^dagger - K rho), where K is the
// single-excitation Hamiltonian with -i*gamma on the detector diagonal. With
// at most two excitations, rho_{abcd} is the two-particle block of the
// density matrix in the pair basis |ab> = a_a^dagger a_b^dagger |0>, pairs
// ordered (12, 1D, 2D); it evolves under the pair-space image of K plus the
// interaction J*Delta on |12>, independently of the one-body block.

#pragma once

#include <array>
#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "readout/initial_state.hpp"
#include "readout/integrator.hpp"
#include "readout/model.hpp"
#include "readout/signal_trace.hpp"

namespace readout {

enum class Sector { one_excitation, two_excitation };

inline constexpr std::size_t n_two_point = 9;
inline constexpr std::size_t n_four_point = 9;

constexpr std::size_t two_point_index(int a, int b) { return static_cast<std::size_t>(3 * a + b); }

// Pair index of {a, b} (a != b) and the sign of (a, b) relative to the
// ordered pair: pairs are 12 -> 0, 1D -> 1, 2D -> 2.
struct PairRef {
    std::size_t index;
    double sign;
};
PairRef pair_ref(int a, int b);

constexpr std::size_t four_point_index(std::size_t p, std::size_t q) { return n_two_point + 3 * p + q; }

struct OneExcState {
    Eigen::Matrix3cd rho{Eigen::Matrix3cd::Zero()};
};

struct TwoExcState {
    Eigen::Matrix3cd rho{Eigen::Matrix3cd::Zero()};
    Eigen::Matrix3cd pairs{Eigen::Matrix3cd::Zero()}; // <p| rho |q> over (12, 1D, 2D)

    // <a_d^dagger a_c^dagger a_b a_a>, zero when a == b or c == d.
    complex four_point(int a, int b, int c, int d) const;
};

StateVector flatten(const OneExcState& s);
StateVector flatten(const TwoExcState& s);
OneExcState unflatten_one(const StateVector& x);
TwoExcState unflatten_two(const StateVector& x);

// Linear generator dx/dt = G x over the flattened correlators, with its
// eigen-decomposition computed once at construction.
class Generator {
public:
    Generator(Eigen::MatrixXcd matrix, Sector sector, const ModelParams& params);

    const Eigen::MatrixXcd& matrix() const { return matrix_; }
    Sector sector() const { return sector_; }
    std::size_t size() const { return static_cast<std::size_t>(matrix_.rows()); }
    const ModelParams& params() const { return params_; }

    const Eigen::VectorXcd& eigenvalues() const { return eigenvalues_; }
    double eigenbasis_condition() const { return condition_; }
    // False when the eigenbasis is too ill-conditioned and the matrix
    // exponential is used instead.
    bool spectral() const { return spectral_; }

    std::string component_name(std::size_t k) const;

    StateVector propagate(const StateVector& x0, double t) const;
    // Exact int_0^t x_k(s) ds.
    complex integrate_component(const StateVector& x0, std::size_t k, double t) const;

    static constexpr double max_condition = 1e12;

private:
    Eigen::MatrixXcd matrix_;
    Sector sector_;
    ModelParams params_;
    Eigen::VectorXcd eigenvalues_;
    Eigen::MatrixXcd vectors_;
    Eigen::MatrixXcd inverse_;
    double condition_{1.0};
    bool spectral_{true};
};

// Single-excitation effective Hamiltonian K = h - i gamma |D><D|.
Eigen::Matrix3cd effective_one_body(const ModelParams& p);
// Pair-space image of K plus J*Delta on |12>.
Eigen::Matrix3cd effective_pair(const ModelParams& p);

Generator one_excitation_generator(const ModelParams& p);
Generator two_excitation_generator(const ModelParams& p);

// The autonomous four-point block of a two-excitation generator.
Eigen::MatrixXcd four_point_block(const Generator& gen);

// Correlators of a number-block-diagonal pure initial state.
StateVector correlator_initial_state(const InitialStateSpec& spec, const ModelParams& p, Sector sector);
Sector natural_sector(const InitialStateSpec& spec);

struct CorrelatorRun {
    std::vector<double> times;
    std::vector<StateVector> states;
    StateVector initial;
    bool fallback_used{false};
    double condition{1.0};
};

CorrelatorRun evolve_correlators(const Generator& gen, const StateVector& x0, std::span<const double> times);
StateVector evolve_correlators(const Generator& gen, const StateVector& x0, double t);

// R = sum_a rho_aa(0) - sum_a rho_aa(t); r_integrated is the exact time
// integral of 2 gamma rho_DD, r_quadrature its trapezoid on the grid.
SignalTrace signal_from_correlators(const Generator& gen, const CorrelatorRun& run);

// Picks the sector from the initial state and runs the spectral solver.
SignalTrace simulate_correlators(const InitialStateSpec& spec, const ModelParams& p, std::span<const double> times);

enum class EigenClass { slow, ds_fast, fast_oscillating };

struct SpectrumEntry {
    complex value;
    EigenClass kind;
};

// All eigenvalues sorted by |Re| ascending and classified:
// |Im| > omega21/2 -> fast_oscillating, else |Re| > gamma/2 -> ds_fast, else slow.
std::vector<SpectrumEntry> slow_spectrum(const Generator& gen);

// Smallest |Re| among eigenvalues with |Re| above `floor`.
double slowest_decay_rate(std::span<const SpectrumEntry> spectrum, double floor = 1e-300);

// The two slow real eigenvalues of the one-excitation generator: the
// resonant (W1-like) and detuned (W2-like) decay rates.
struct SlowRates {
    double resonant{0.0};
    double detuned{0.0};
};
SlowRates slow_rates(const Generator& one_excitation);

} // namespace readout
