#include "readout/fock.hpp"

#include <algorithm>
#include <bit>
#include <numeric>
#include <stdexcept>
#include <string>

namespace readout {

FockBasis::FockBasis(std::vector<int> ordering) : ordering_(std::move(ordering)) {
    const auto n = ordering_.size();
    if (n == 0 || n > 20) {
        throw std::invalid_argument("FockBasis: mode count must be in [1, 20]");
    }
    position_.assign(n, -1);
    for (std::size_t p = 0; p < n; ++p) {
        const int label = ordering_[p];
        if (label < 0 || static_cast<std::size_t>(label) >= n || position_[label] != -1) {
            throw std::invalid_argument("FockBasis: ordering must be a permutation of 0.." +
                                        std::to_string(n - 1));
        }
        position_[label] = static_cast<int>(p);
    }
}

FockBasis FockBasis::two_qubit() { return FockBasis({mode::ds, mode::q1, mode::q2}); }

FockBasis FockBasis::two_qubit(std::vector<int> ordering) {
    if (ordering.size() != 3) {
        throw std::invalid_argument("two_qubit basis needs an ordering of the three modes");
    }
    return FockBasis(std::move(ordering));
}

FockBasis FockBasis::qubits_only() { return FockBasis({mode::q1, mode::q2}); }

bool FockBasis::has_mode(int label) const {
    return label >= 0 && static_cast<std::size_t>(label) < position_.size();
}

int FockBasis::position(int label) const {
    if (!has_mode(label)) {
        throw std::out_of_range("FockBasis: unknown mode label " + std::to_string(label));
    }
    return position_[label];
}

int FockBasis::occupation_count(std::uint64_t state) const { return std::popcount(state); }

double FockBasis::string_sign(std::uint64_t state, int label) const {
    const std::uint64_t below = mask(label) - 1;
    return (std::popcount(state & below) % 2 == 0) ? 1.0 : -1.0;
}

std::optional<FockBasis::Action> FockBasis::annihilate(std::uint64_t state, int label) const {
    if (!occupied(state, label)) {
        return std::nullopt;
    }
    return Action{state & ~mask(label), string_sign(state, label)};
}

std::optional<FockBasis::Action> FockBasis::create(std::uint64_t state, int label) const {
    if (occupied(state, label)) {
        return std::nullopt;
    }
    return Action{state | mask(label), string_sign(state, label)};
}

std::vector<Matrix> mode_operators(const FockBasis& basis) {
    const auto dim = static_cast<Eigen::Index>(basis.dim());
    std::vector<Matrix> ops;
    ops.reserve(basis.n_modes());
    for (std::size_t label = 0; label < basis.n_modes(); ++label) {
        Matrix a = Matrix::Zero(dim, dim);
        for (std::uint64_t s = 0; s < basis.dim(); ++s) {
            if (auto act = basis.annihilate(s, static_cast<int>(label))) {
                a(static_cast<Eigen::Index>(act->state), static_cast<Eigen::Index>(s)) = act->sign;
            }
        }
        ops.push_back(std::move(a));
    }
    return ops;
}

Matrix number_operator(const FockBasis& basis, int label) {
    const auto dim = static_cast<Eigen::Index>(basis.dim());
    Matrix n = Matrix::Zero(dim, dim);
    for (std::uint64_t s = 0; s < basis.dim(); ++s) {
        if (basis.occupied(s, label)) {
            n(static_cast<Eigen::Index>(s), static_cast<Eigen::Index>(s)) = 1.0;
        }
    }
    return n;
}

Matrix total_number_operator(const FockBasis& basis) {
    const auto dim = static_cast<Eigen::Index>(basis.dim());
    Matrix n = Matrix::Zero(dim, dim);
    for (std::uint64_t s = 0; s < basis.dim(); ++s) {
        n(static_cast<Eigen::Index>(s), static_cast<Eigen::Index>(s)) = basis.occupation_count(s);
    }
    return n;
}

void add_onsite(Matrix& h, const FockBasis& basis, int label, double energy) {
    for (std::uint64_t s = 0; s < basis.dim(); ++s) {
        if (basis.occupied(s, label)) {
            h(static_cast<Eigen::Index>(s), static_cast<Eigen::Index>(s)) += energy;
        }
    }
}

void add_hopping(Matrix& h, const FockBasis& basis, int from, int to, double amplitude) {
    for (std::uint64_t s = 0; s < basis.dim(); ++s) {
        auto removed = basis.annihilate(s, from);
        if (!removed) {
            continue;
        }
        auto added = basis.create(removed->state, to);
        if (!added) {
            continue;
        }
        const double value = amplitude * removed->sign * added->sign;
        const auto row = static_cast<Eigen::Index>(added->state);
        const auto col = static_cast<Eigen::Index>(s);
        h(row, col) += value;
        h(col, row) += value;
    }
}

void add_density_density(Matrix& h, const FockBasis& basis, int a, int b, double strength) {
    for (std::uint64_t s = 0; s < basis.dim(); ++s) {
        if (basis.occupied(s, a) && basis.occupied(s, b)) {
            h(static_cast<Eigen::Index>(s), static_cast<Eigen::Index>(s)) += strength;
        }
    }
}

StateDiagnostics diagnose(const DensityMatrix& rho) {
    StateDiagnostics d;
    const Matrix& m = rho.values;
    d.hermiticity_error = (m - m.adjoint()).cwiseAbs().maxCoeff();
    d.trace_error = std::abs(m.trace() - 1.0);
    const Matrix herm = 0.5 * (m + m.adjoint());
    Eigen::SelfAdjointEigenSolver<Matrix> solver(herm, Eigen::EigenvaluesOnly);
    d.min_eigenvalue = solver.eigenvalues().minCoeff();
    return d;
}

DensityMatrix pure_state(const Eigen::VectorXcd& psi) {
    const Eigen::VectorXcd normalized = psi / psi.norm();
    return DensityMatrix{normalized * normalized.adjoint()};
}

complex expectation(const DensityMatrix& rho, const Matrix& op) {
    // Tr(rho op) without forming the product.
    return (rho.values.transpose().cwiseProduct(op)).sum();
}

Matrix one_body_correlators(const DensityMatrix& rho, const FockBasis& basis, std::span<const int> labels) {
    const auto ops = mode_operators(basis);
    const auto n = static_cast<Eigen::Index>(labels.size());
    Matrix out(n, n);
    for (Eigen::Index a = 0; a < n; ++a) {
        for (Eigen::Index b = 0; b < n; ++b) {
            const Matrix& ann = ops[labels[a]];
            const Matrix& cre_src = ops[labels[b]];
            out(a, b) = expectation(rho, cre_src.adjoint() * ann);
        }
    }
    return out;
}

complex two_body_correlator(const DensityMatrix& rho, const FockBasis& basis, int a, int b, int c, int d) {
    const auto ops = mode_operators(basis);
    const Matrix op = ops[d].adjoint() * ops[c].adjoint() * ops[b] * ops[a];
    return expectation(rho, op);
}

} // namespace readout
