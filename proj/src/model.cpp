#include "readout/model.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

namespace readout {

void check_params(const ModelParams& p) {
    if (!(p.gamma > 0.0)) {
        throw std::domain_error("gamma must be positive");
    }
    if (!(p.omega21 > 0.0)) {
        throw std::domain_error("omega21 must be positive");
    }
}

void check_chain(const ChainParams& c) {
    if (c.n_sites() < 2) {
        throw std::domain_error("chain needs at least 2 sites");
    }
    if (c.measured_site >= c.n_sites()) {
        throw std::domain_error("measured_site out of range");
    }
    if (!(c.gamma > 0.0)) {
        throw std::domain_error("gamma must be positive");
    }
    if (c.n_sites() + 1 > max_chain_modes) {
        throw std::length_error("chain has " + std::to_string(c.n_sites() + 1) + " modes, cap is " +
                                std::to_string(max_chain_modes));
    }
}

StationaryPair stationary_states(const ModelParams& p) {
    StationaryPair s;
    const double root = std::hypot(p.omega21, p.j);
    // omega21 - root loses digits when J << omega21; use the product form.
    s.delta_eps1 = -0.5 * p.j * p.j / (p.omega21 + root);
    s.delta_eps2 = -s.delta_eps1;
    s.mu = (p.j == 0.0) ? 0.0 : 2.0 * s.delta_eps1 / p.j;
    s.c = 1.0 / std::sqrt(1.0 + s.mu * s.mu);
    s.psi1 = Eigen::Vector2d(s.c, s.c * s.mu);
    s.psi2 = Eigen::Vector2d(-s.c * s.mu, s.c);
    return s;
}

Eigen::Matrix3d one_excitation_hamiltonian(const ModelParams& p) {
    Eigen::Matrix3d h = Eigen::Matrix3d::Zero();
    h(1, 1) = p.omega21;
    h(2, 2) = p.eps_d_detuning;
    h(0, 1) = h(1, 0) = 0.5 * p.j;
    h(0, 2) = h(2, 0) = 0.5 * p.jd;
    return h;
}

Matrix full_hamiltonian(const ModelParams& p, const FockBasis& basis, Frame frame) {
    if (basis.n_modes() != 3) {
        throw std::invalid_argument("full_hamiltonian needs the three-mode basis");
    }
    const auto dim = static_cast<Eigen::Index>(basis.dim());
    Matrix h = Matrix::Zero(dim, dim);
    add_onsite(h, basis, mode::q2, p.omega21);
    add_onsite(h, basis, mode::ds, p.eps_d_detuning);
    add_hopping(h, basis, mode::q2, mode::q1, 0.5 * p.j);
    add_hopping(h, basis, mode::ds, mode::q1, 0.5 * p.jd);
    add_density_density(h, basis, mode::q1, mode::q2, p.j * p.delta);
    if (frame == Frame::lab) {
        h += p.eps1 * total_number_operator(basis);
    }
    return h;
}

Matrix full_hamiltonian(const ModelParams& p) { return full_hamiltonian(p, FockBasis::two_qubit()); }

Matrix qubit_hamiltonian(const ModelParams& p, const FockBasis& basis) {
    if (basis.n_modes() != 2) {
        throw std::invalid_argument("qubit_hamiltonian needs the two-mode basis");
    }
    const auto dim = static_cast<Eigen::Index>(basis.dim());
    Matrix h = Matrix::Zero(dim, dim);
    add_onsite(h, basis, mode::q2, p.omega21);
    add_hopping(h, basis, mode::q2, mode::q1, 0.5 * p.j);
    add_density_density(h, basis, mode::q1, mode::q2, p.j * p.delta);
    return h;
}

int chain_detector_label(const ChainParams& c) { return static_cast<int>(c.n_sites()); }

FockBasis chain_basis(const ChainParams& c) {
    check_chain(c);
    std::vector<int> ordering;
    ordering.push_back(chain_detector_label(c));
    for (std::size_t n = 0; n < c.n_sites(); ++n) {
        ordering.push_back(static_cast<int>(n));
    }
    return FockBasis(std::move(ordering));
}

Matrix chain_hamiltonian(const ChainParams& c, const FockBasis& basis) {
    check_chain(c);
    if (basis.n_modes() != c.n_sites() + 1) {
        throw std::invalid_argument("chain basis size does not match the chain");
    }
    const double reference = c.site_energies[c.measured_site];
    const int detector = chain_detector_label(c);
    const auto dim = static_cast<Eigen::Index>(basis.dim());
    Matrix h = Matrix::Zero(dim, dim);
    for (std::size_t n = 0; n < c.n_sites(); ++n) {
        add_onsite(h, basis, static_cast<int>(n), c.site_energies[n] - reference);
    }
    add_onsite(h, basis, detector, c.eps_d_detuning);
    for (std::size_t n = 0; n + 1 < c.n_sites(); ++n) {
        const int a = static_cast<int>(n);
        add_hopping(h, basis, a + 1, a, 0.5 * c.j);
        add_density_density(h, basis, a, a + 1, c.j * c.delta);
    }
    add_hopping(h, basis, detector, static_cast<int>(c.measured_site), 0.5 * c.jd);
    return h;
}

Matrix chain_hamiltonian(const ChainParams& c) { return chain_hamiltonian(c, chain_basis(c)); }

Eigen::MatrixXd chain_single_particle(const ChainParams& c) {
    check_chain(c);
    const auto n = static_cast<Eigen::Index>(c.n_sites());
    const double reference = c.site_energies[c.measured_site];
    Eigen::MatrixXd h = Eigen::MatrixXd::Zero(n, n);
    for (Eigen::Index k = 0; k < n; ++k) {
        h(k, k) = c.site_energies[static_cast<std::size_t>(k)] - reference;
        if (k + 1 < n) {
            h(k, k + 1) = h(k + 1, k) = 0.5 * c.j;
        }
    }
    return h;
}

namespace {

double safe_ratio(double num, double den) {
    return den == 0.0 ? std::numeric_limits<double>::infinity() : num / std::abs(den);
}

} // namespace

RegimeReport validate_regime(const ModelParams& p, double threshold) {
    RegimeReport r;
    r.ratios = {
        {"omega21_over_gamma", safe_ratio(p.omega21, p.gamma), "omega21 >> Gamma"},
        {"gamma_over_j", safe_ratio(p.gamma, p.j), "Gamma >> J"},
        {"gamma_over_jd", safe_ratio(p.gamma, p.jd), "Gamma >> J_D"},
        {"gamma_over_detuning", safe_ratio(p.gamma, p.eps_d_detuning), "Gamma >> |eps_D - eps1|"},
        {"gamma_over_interaction", safe_ratio(p.gamma, p.j * p.delta), "Gamma >> |J Delta|"},
    };
    r.deep = true;
    for (const auto& ratio : r.ratios) {
        if (ratio.value < threshold) {
            std::string msg = ratio.condition + " violated (ratio " + std::to_string(ratio.value) + ")";
            if (ratio.name == "gamma_over_detuning") {
                msg += ": detector detuning spoils spectral selectivity";
            }
            r.warnings.push_back(std::move(msg));
        }
        if (ratio.value < deep_regime_threshold) {
            r.deep = false;
        }
    }
    return r;
}

} // namespace readout
