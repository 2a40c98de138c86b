// fock.hpp: fermionic Fock space bookkeeping with Jordan-Wigner strings

#pragma once

#include <complex>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include <Eigen/Dense>

namespace readout {

using complex = std::complex<double>;
using Matrix = Eigen::MatrixXcd;

// Mode labels of the two-qubit + detector system.
namespace mode {
inline constexpr int q1 = 0;
inline constexpr int q2 = 1;
inline constexpr int ds = 2;
} // namespace mode

// A Fock basis over n modes. Mode labels are 0..n-1; `ordering[p]` is the
// label sitting at Jordan-Wigner position p, and that position owns bit p of
// the basis-state index.
class FockBasis {
public:
    explicit FockBasis(std::vector<int> ordering);

    // Detector first, so its annihilator carries no string.
    static FockBasis two_qubit();
    static FockBasis two_qubit(std::vector<int> ordering);
    // Qubits only (no detector), used by the direct-damping scheme.
    static FockBasis qubits_only();

    std::size_t n_modes() const { return ordering_.size(); }
    std::size_t dim() const { return std::size_t{1} << ordering_.size(); }
    const std::vector<int>& ordering() const { return ordering_; }
    bool has_mode(int label) const;
    int position(int label) const;

    std::uint64_t mask(int label) const { return std::uint64_t{1} << position(label); }
    bool occupied(std::uint64_t state, int label) const { return (state & mask(label)) != 0; }
    int occupation_count(std::uint64_t state) const;

    struct Action {
        std::uint64_t state;
        double sign;
    };
    // a_label |state>, or nothing if the mode is empty.
    std::optional<Action> annihilate(std::uint64_t state, int label) const;
    // a_label^dagger |state>, or nothing if the mode is full.
    std::optional<Action> create(std::uint64_t state, int label) const;

private:
    double string_sign(std::uint64_t state, int label) const;

    std::vector<int> ordering_;
    std::vector<int> position_;
};

// Annihilation matrices a_label, indexed by label.
std::vector<Matrix> mode_operators(const FockBasis& basis);

Matrix number_operator(const FockBasis& basis, int label);
Matrix total_number_operator(const FockBasis& basis);

// Accumulators for number-conserving Hamiltonians built directly on the basis.
void add_onsite(Matrix& h, const FockBasis& basis, int label, double energy);
// amplitude * (a_to^dagger a_from + h.c.)
void add_hopping(Matrix& h, const FockBasis& basis, int from, int to, double amplitude);
// strength * n_a n_b
void add_density_density(Matrix& h, const FockBasis& basis, int a, int b, double strength);

// Hermitian, unit-trace, positive matrix over a FockBasis. Not validated on
// construction: evolved states drift within integration tolerance and the
// drift must stay observable.
struct DensityMatrix {
    Matrix values;

    std::size_t dim() const { return static_cast<std::size_t>(values.rows()); }
};

struct StateDiagnostics {
    double hermiticity_error{0.0};
    double trace_error{0.0};
    double min_eigenvalue{0.0};

    bool valid(double herm_tol = 1e-12, double trace_tol = 1e-12, double eig_tol = 1e-10) const {
        return hermiticity_error < herm_tol && trace_error < trace_tol && min_eigenvalue >= -eig_tol;
    }
};

StateDiagnostics diagnose(const DensityMatrix& rho);

DensityMatrix pure_state(const Eigen::VectorXcd& psi);

complex expectation(const DensityMatrix& rho, const Matrix& op);

// rho_{ab} = <a_b^dagger a_a> for the listed labels.
Matrix one_body_correlators(const DensityMatrix& rho, const FockBasis& basis, std::span<const int> labels);

// <a_d^dagger a_c^dagger a_b a_a> for labels (a, b, c, d).
complex two_body_correlator(const DensityMatrix& rho, const FockBasis& basis, int a, int b, int c, int d);

} // namespace readout
