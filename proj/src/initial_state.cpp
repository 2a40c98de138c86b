#include "readout/initial_state.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace readout {

namespace {

template <class... Ts>
struct overloaded : Ts... {
    using Ts::operator()...;
};

void check_qubit_index(int n, const char* what) {
    if (n != 1 && n != 2) {
        throw std::domain_error(std::string(what) + " index must be 1 or 2");
    }
}

} // namespace

std::string describe(const InitialStateSpec& spec) {
    return std::visit(overloaded{
                          [](const init::Ground&) { return std::string("ground"); },
                          [](const init::SiteExcited& s) { return "site" + std::to_string(s.site); },
                          [](const init::Stationary& s) { return "stationary" + std::to_string(s.index); },
                          [](const init::Superposition&) { return std::string("superposition"); },
                          [](const init::BothExcited&) { return std::string("both"); },
                          [](const init::DSExcited&) { return std::string("ds"); },
                      },
                      spec);
}

SectorAmplitudes amplitudes(const InitialStateSpec& spec, const ModelParams& p) {
    const auto st = stationary_states(p);
    SectorAmplitudes a;
    std::visit(overloaded{
                   [&](const init::Ground&) { a.vacuum = 1.0; },
                   [&](const init::SiteExcited& s) {
                       check_qubit_index(s.site, "site");
                       a.one(s.site - 1) = 1.0;
                   },
                   [&](const init::Stationary& s) {
                       check_qubit_index(s.index, "stationary state");
                       const Eigen::Vector2d& v = (s.index == 1) ? st.psi1 : st.psi2;
                       a.one(0) = v(0);
                       a.one(1) = v(1);
                   },
                   [&](const init::Superposition& s) {
                       const complex w2 = std::polar(std::sin(s.theta), s.phi);
                       const double w1 = std::cos(s.theta);
                       a.one(0) = w1 * st.psi1(0) + w2 * st.psi2(0);
                       a.one(1) = w1 * st.psi1(1) + w2 * st.psi2(1);
                   },
                   [&](const init::BothExcited&) { a.both = 1.0; },
                   [&](const init::DSExcited&) { a.one(2) = 1.0; },
               },
               spec);
    return a;
}

Eigen::VectorXcd embed(const SectorAmplitudes& amps, const FockBasis& basis) {
    const bool with_detector = basis.n_modes() == 3;
    if (basis.n_modes() != 2 && !with_detector) {
        throw std::invalid_argument("embed: basis must be the qubits-only or three-mode basis");
    }
    if (!with_detector && amps.one(2) != 0.0) {
        throw std::domain_error("initial state occupies the detector, which this basis lacks");
    }
    Eigen::VectorXcd psi = Eigen::VectorXcd::Zero(static_cast<Eigen::Index>(basis.dim()));
    psi(0) = amps.vacuum;
    const int labels[3] = {mode::q1, mode::q2, mode::ds};
    for (int k = 0; k < (with_detector ? 3 : 2); ++k) {
        auto act = basis.create(0, labels[k]);
        psi(static_cast<Eigen::Index>(act->state)) += act->sign * amps.one(k);
    }
    if (amps.both != 0.0) {
        // a_1^dagger a_2^dagger |0>
        auto first = basis.create(0, mode::q2);
        auto second = basis.create(first->state, mode::q1);
        psi(static_cast<Eigen::Index>(second->state)) += first->sign * second->sign * amps.both;
    }
    return psi;
}

DensityMatrix initial_state(const InitialStateSpec& spec, const ModelParams& p, const FockBasis& basis) {
    return pure_state(embed(amplitudes(spec, p), basis));
}

DensityMatrix initial_state(const InitialStateSpec& spec, const ModelParams& p) {
    return initial_state(spec, p, FockBasis::two_qubit());
}

Eigen::VectorXd chain_stationary_amplitudes(const ChainParams& c, int site) {
    check_chain(c);
    if (site < 1 || static_cast<std::size_t>(site) > c.n_sites()) {
        throw std::domain_error("chain site out of range");
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(chain_single_particle(c));
    const Eigen::MatrixXd& vecs = solver.eigenvectors();
    Eigen::Index best = 0;
    vecs.row(site - 1).cwiseAbs().maxCoeff(&best);
    Eigen::VectorXd v = vecs.col(best);
    if (v(site - 1) < 0.0) {
        v = -v;
    }
    return v;
}

DensityMatrix chain_initial_state(const InitialStateSpec& spec, const ChainParams& c, const FockBasis& basis) {
    check_chain(c);
    Eigen::VectorXcd psi = Eigen::VectorXcd::Zero(static_cast<Eigen::Index>(basis.dim()));
    auto put_one = [&](const Eigen::VectorXd& amps) {
        for (Eigen::Index n = 0; n < amps.size(); ++n) {
            auto act = basis.create(0, static_cast<int>(n));
            psi(static_cast<Eigen::Index>(act->state)) += act->sign * amps(n);
        }
    };
    std::visit(overloaded{
                   [&](const init::Ground&) { psi(0) = 1.0; },
                   [&](const init::SiteExcited& s) {
                       if (s.site < 1 || static_cast<std::size_t>(s.site) > c.n_sites()) {
                           throw std::domain_error("chain site out of range");
                       }
                       Eigen::VectorXd amps = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(c.n_sites()));
                       amps(s.site - 1) = 1.0;
                       put_one(amps);
                   },
                   [&](const init::Stationary& s) { put_one(chain_stationary_amplitudes(c, s.index)); },
                   [&](const auto&) {
                       throw std::domain_error("chain runs support ground, site and stationary initial states");
                   },
               },
               spec);
    return pure_state(psi);
}

} // namespace readout
