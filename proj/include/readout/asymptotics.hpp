// asymptotics.hpp: closed-form rates and signal laws in the weak-coupling regime

#pragma once

#include "readout/initial_state.hpp"
#include "readout/lindblad.hpp"
#include "readout/model.hpp"

namespace readout {

struct DecayRates {
    double w1{0.0}; // resonant qubit into the detector, J_D^2 / 2 gamma
    double w2{0.0}; // detuned qubit, J^2 J_D^2 gamma / 8 omega21^4
    double mu{0.0}; // admixture amplitude of the exact stationary states
};

// Throws std::domain_error when gamma == 0.
DecayRates decay_rates(const ModelParams& p);

// Weights of the two stationary states in a one-excitation state, or the
// doubly excited state when `two_excitation` is set.
struct Populations {
    double p1{0.0};
    double p2{0.0};
    bool two_excitation{false};
};

// p1 (1 - e^{-w1 t}) + p2 (1 - e^{-w2 t}); 2 - e^{-w1 t} - e^{-w2 t} for two excitations.
double asymptotic_signal(const Populations& pops, const DecayRates& rates, double t);

// |<psi(0)|psi_n>|^2 for n = 1, 2. BothExcited throws std::domain_error.
Populations overlap_populations(const InitialStateSpec& spec, const ModelParams& p);

// Probability that a fast projective measurement finds qubit 1 excited, for a
// normalized superposition with weights p1, p2 and relative phase phi.
// Throws std::domain_error unless |p1 + p2 - 1| <= 1e-9.
double projective_reference(double p1, double p2, double phi, const ModelParams& p);

struct Window {
    double t_min{0.0};
    double t_max{0.0};
    double epsilon0{0.0}; // J^2 / 4 omega21^2
    bool resolvable{false};
};

// 2 ln(2 omega21 / J) / w1 < t < (omega21 / gamma)^2 / w1.
Window discrimination_window(const ModelParams& p);

// Qubit 1 damped directly at gamma, no detector. Order-of-magnitude numbers only.
struct DirectScheme {
    double fast_rate{0.0};          // 2 gamma
    double slow_rate_estimate{0.0}; // J^2 gamma / omega21^2
    double false_click_floor{0.0};  // (J / omega21)^2
    bool order_of_magnitude{true};
};

DirectScheme direct_scheme_estimates(const ModelParams& p);

// p1 (1 - e^{-fast t}) + p2 (1 - e^{-slow t}) with the direct-scheme estimates.
double direct_scheme_signal(const Populations& pops, const ModelParams& p, double t);

// Detector decay alone: 1 - e^{-2 gamma t}.
double detector_decay_signal(const ModelParams& p, double t);

// Resonant rate with the detector detuned by `detuning`: w1 gamma^2 / (gamma^2 + detuning^2).
double detuned_resonant_rate(const ModelParams& p, double detuning);

// Signal under a linear detuning sweep. The resonant exponent is the time
// integral of detuned_resonant_rate along the ramp; the detuned state keeps w2.
double sweep_signal(const Populations& pops, const ModelParams& p, const Sweep& sweep, double t);

struct AsymptoticReport {
    DecayRates rates;
    double epsilon0{0.0};
    Window window;
    DirectScheme direct_scheme;
};

AsymptoticReport asymptotic_report(const ModelParams& p);

} // namespace readout
