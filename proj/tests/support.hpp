// Shared fixtures for the unit tests.

#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <random>
#include <vector>

#include "readout/fock.hpp"
#include "readout/model.hpp"

namespace readout::testing {

// omega21 = 4, J = J_D = 0.5, gamma = 1.
inline ModelParams figure_params() { return ModelParams{4.0, 0.5, 0.5, 1.0}; }
// omega21 = 10, J = J_D = 0.2, gamma = 1.
inline ModelParams deep_params() { return ModelParams{10.0, 0.2, 0.2, 1.0}; }

inline std::vector<double> grid(double t_max, std::size_t n) {
    std::vector<double> t(n);
    for (std::size_t i = 0; i < n; ++i) {
        t[i] = t_max * static_cast<double>(i) / static_cast<double>(n - 1);
    }
    return t;
}

inline double max_abs_diff(const std::vector<double>& a, const std::vector<double>& b) {
    double m = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        m = std::max(m, std::abs(a[i] - b[i]));
    }
    return m;
}

// Random density matrix supported on basis states with at most `max_n` excitations.
inline DensityMatrix random_state(const FockBasis& basis, int max_n, std::mt19937_64& rng) {
    std::normal_distribution<double> normal;
    const auto dim = static_cast<Eigen::Index>(basis.dim());
    Matrix a = Matrix::Zero(dim, dim);
    for (Eigen::Index i = 0; i < dim; ++i) {
        if (basis.occupation_count(static_cast<std::uint64_t>(i)) > max_n) {
            continue;
        }
        for (Eigen::Index k = 0; k < dim; ++k) {
            a(i, k) = complex(normal(rng), normal(rng));
        }
    }
    Matrix rho = a * a.adjoint();
    rho /= rho.trace().real();
    return DensityMatrix{rho};
}

} // namespace readout::testing
