// model.hpp: physical parameters, regime checks and Hamiltonian builders

#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "readout/fock.hpp"

namespace readout {

// Two qubits plus a detector resonant with qubit 1 (hbar = 1, one energy unit).
struct ModelParams {
    double omega21{0.0};        // eps2 - eps1, > 0
    double j{0.0};              // qubit-qubit hopping J
    double jd{0.0};             // qubit 1 - detector hopping J_D
    double gamma{1.0};          // detector decay rate
    double delta{0.0};          // interaction J*delta between excitations
    double eps_d_detuning{0.0}; // eps_D - eps1
    double eps1{0.0};           // absolute energy, only used for lab-frame operators

    bool operator==(const ModelParams&) const = default;
};

// Validates gamma > 0 and omega21 > 0.
void check_params(const ModelParams& p);

// Nearest-neighbour chain of qubits with a detector on one site.
struct ChainParams {
    std::vector<double> site_energies;
    double j{0.0};
    double delta{0.0};
    std::size_t measured_site{0}; // 0-based
    double jd{0.0};
    double gamma{1.0};
    double eps_d_detuning{0.0}; // relative to the measured site

    std::size_t n_sites() const { return site_energies.size(); }

    bool operator==(const ChainParams&) const = default;
};

inline constexpr std::size_t max_chain_modes = 12;

void check_chain(const ChainParams& c);

// Exact one-excitation eigenstates of the two-qubit block [[0, J/2], [J/2, omega21]].
struct StationaryPair {
    double mu{0.0};
    double c{1.0};
    Eigen::Vector2d psi1;
    Eigen::Vector2d psi2;
    double delta_eps1{0.0};
    double delta_eps2{0.0};
};

StationaryPair stationary_states(const ModelParams& p);

// Rotating-frame single-excitation Hamiltonian over (1, 2, D).
Eigen::Matrix3d one_excitation_hamiltonian(const ModelParams& p);

enum class Frame { rotating, lab };

// Full Hamiltonian on the 8-dimensional Fock space of (1, 2, D). The lab
// frame adds eps1 times the total number operator.
Matrix full_hamiltonian(const ModelParams& p, const FockBasis& basis, Frame frame = Frame::rotating);
Matrix full_hamiltonian(const ModelParams& p);

// Qubits-only Hamiltonian (no detector mode), for the direct-damping scheme.
Matrix qubit_hamiltonian(const ModelParams& p, const FockBasis& basis);

// Default chain basis: detector label = n_sites, placed first in JW order.
FockBasis chain_basis(const ChainParams& c);
int chain_detector_label(const ChainParams& c);

// Throws std::length_error when n_sites + 1 exceeds max_chain_modes.
Matrix chain_hamiltonian(const ChainParams& c, const FockBasis& basis);
Matrix chain_hamiltonian(const ChainParams& c);

// Single-particle hopping block of the chain in the rotating frame (no detector).
Eigen::MatrixXd chain_single_particle(const ChainParams& c);

struct RegimeRatio {
    std::string name;
    double value{0.0};
    std::string condition;
};

struct RegimeReport {
    std::vector<RegimeRatio> ratios;
    std::vector<std::string> warnings;
    bool deep{false}; // every ratio >= deep_threshold
};

inline constexpr double default_regime_threshold = 2.0;
inline constexpr double deep_regime_threshold = 5.0;

RegimeReport validate_regime(const ModelParams& p, double threshold = default_regime_threshold);

} // namespace readout
