// initial_state.hpp: supported initial states and their Fock-space embedding

#pragma once

#include <string>
#include <variant>

#include <Eigen/Dense>

#include "readout/fock.hpp"
#include "readout/model.hpp"

namespace readout {

namespace init {
struct Ground {
    bool operator==(const Ground&) const = default;
};
struct SiteExcited {
    int site{1}; // 1-based
    bool operator==(const SiteExcited&) const = default;
};
struct Stationary {
    int index{1}; // 1-based
    bool operator==(const Stationary&) const = default;
};
// cos(theta)|psi_1> + e^{i phi} sin(theta)|psi_2>
struct Superposition {
    double theta{0.0};
    double phi{0.0};
    bool operator==(const Superposition&) const = default;
};
struct BothExcited {
    bool operator==(const BothExcited&) const = default;
};
// Diagnostic only: the detector starts excited.
struct DSExcited {
    bool operator==(const DSExcited&) const = default;
};
} // namespace init

using InitialStateSpec = std::variant<init::Ground, init::SiteExcited, init::Stationary, init::Superposition,
                                      init::BothExcited, init::DSExcited>;

std::string describe(const InitialStateSpec& spec);

// Pure state with a fixed excitation number, written sector by sector:
// vacuum amplitude, one-excitation amplitudes over (1, 2, D), and the
// amplitude of a_1^dagger a_2^dagger |0>.
struct SectorAmplitudes {
    complex vacuum{0.0};
    Eigen::Vector3cd one{Eigen::Vector3cd::Zero()};
    complex both{0.0};
};

SectorAmplitudes amplitudes(const InitialStateSpec& spec, const ModelParams& p);

// Embeds the amplitudes in `basis` (three-mode or qubits-only). Throws
// std::domain_error if a detector amplitude is requested on a basis without one.
Eigen::VectorXcd embed(const SectorAmplitudes& amps, const FockBasis& basis);

DensityMatrix initial_state(const InitialStateSpec& spec, const ModelParams& p, const FockBasis& basis);
DensityMatrix initial_state(const InitialStateSpec& spec, const ModelParams& p);

// Chain states: Ground, SiteExcited(n) and Stationary(n) (the single-particle
// eigenstate with the largest weight on site n). Other specs are rejected.
Eigen::VectorXd chain_stationary_amplitudes(const ChainParams& c, int site);
DensityMatrix chain_initial_state(const InitialStateSpec& spec, const ChainParams& c, const FockBasis& basis);

} // namespace readout
