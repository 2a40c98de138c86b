#include "readout/lindblad.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

#include "readout/integrator.hpp"

namespace readout {

Matrix lindblad_rhs(const Matrix& rho, const Matrix& h, double gamma, const Matrix& jump) {
    const complex i1(0.0, 1.0);
    const Matrix n = jump.adjoint() * jump;
    Matrix out = i1 * (rho * h - h * rho);
    out -= gamma * (n * rho + rho * n - 2.0 * jump * rho * jump.adjoint());
    return out;
}

Matrix lindblad_rhs(const DensityMatrix& rho, const Matrix& h, double gamma, const FockBasis& basis, int jump_mode) {
    const auto ops = mode_operators(basis);
    return lindblad_rhs(rho.values, h, gamma, ops.at(static_cast<std::size_t>(jump_mode)));
}

namespace {

void check_tolerance(double tol) {
    if (!(tol >= 1e-12 && tol <= 1e-4)) {
        throw std::invalid_argument("tolerance must lie in [1e-12, 1e-4], got " + std::to_string(tol));
    }
}

// State layout: column-major rho (dim^2 entries) followed by the integrated signal.
Trajectory evolve_impl(const DensityMatrix& rho0, const Matrix& h0, const DrivenTerm* drive, double gamma,
                       const FockBasis& basis, int jump_mode, std::span<const double> times, double tol) {
    check_tolerance(tol);
    if (times.empty() || times.front() != 0.0) {
        throw std::invalid_argument("evolve: time grid must start at 0");
    }
    const auto dim = static_cast<Eigen::Index>(basis.dim());
    if (rho0.values.rows() != dim || rho0.values.cols() != dim || h0.rows() != dim || h0.cols() != dim) {
        throw std::invalid_argument("evolve: operator shapes do not match the basis");
    }
    const auto ops = mode_operators(basis);
    const Matrix& a = ops.at(static_cast<std::size_t>(jump_mode));
    const Matrix a_dag = a.adjoint();
    const Matrix n_jump = a_dag * a;
    const complex i1(0.0, 1.0);
    const Eigen::Index block = dim * dim;

    Matrix h_t = h0;
    Matrix work(dim, dim);
    RhsFunction rhs = [&](double t, const StateVector& y, StateVector& dydt) {
        dydt.resize(block + 1);
        Eigen::Map<const Matrix> rho(y.data(), dim, dim);
        Eigen::Map<Matrix> drho(dydt.data(), dim, dim);
        const Matrix* h = &h0;
        if (drive) {
            h_t = h0 + drive->shape(t) * drive->perturbation;
            h = &h_t;
        }
        drho.noalias() = i1 * (rho * *h);
        drho.noalias() -= i1 * (*h * rho);
        drho.noalias() -= gamma * (n_jump * rho);
        drho.noalias() -= gamma * (rho * n_jump);
        work.noalias() = a * rho;
        drho.noalias() += (2.0 * gamma) * (work * a_dag);
        // 2 gamma <n_jump>, with n_jump diagonal in the occupation basis.
        double pop = 0.0;
        for (Eigen::Index s = 0; s < dim; ++s) {
            pop += n_jump(s, s).real() * rho(s, s).real();
        }
        dydt(block) = 2.0 * gamma * pop;
    };

    StateVector y0(block + 1);
    std::copy(rho0.values.data(), rho0.values.data() + block, y0.data());
    y0(block) = 0.0;

    IntegratorOptions opts;
    opts.rel_tol = tol;
    const auto states = integrate(rhs, y0, times, opts);

    Trajectory traj;
    traj.jump_mode = jump_mode;
    traj.times.assign(times.begin(), times.end());
    traj.states.reserve(states.size());
    for (const auto& y : states) {
        DensityMatrix rho{Eigen::Map<const Matrix>(y.data(), dim, dim)};
        std::vector<double> pops(basis.n_modes(), 0.0);
        double total = 0.0;
        for (std::uint64_t s = 0; s < basis.dim(); ++s) {
            const double p = rho.values(static_cast<Eigen::Index>(s), static_cast<Eigen::Index>(s)).real();
            for (std::size_t label = 0; label < basis.n_modes(); ++label) {
                if (basis.occupied(s, static_cast<int>(label))) {
                    pops[label] += p;
                    total += p;
                }
            }
        }
        traj.jump_population.push_back(pops[static_cast<std::size_t>(jump_mode)]);
        traj.total_number.push_back(total);
        traj.populations.push_back(std::move(pops));
        traj.integrated_signal.push_back(y(block).real());
        traj.states.push_back(std::move(rho));
    }
    return traj;
}

} // namespace

Trajectory evolve(const DensityMatrix& rho0, const Matrix& h, double gamma, const FockBasis& basis, int jump_mode,
                  std::span<const double> times, double tol) {
    return evolve_impl(rho0, h, nullptr, gamma, basis, jump_mode, times, tol);
}

Trajectory evolve(const DensityMatrix& rho0, const Matrix& h, const DrivenTerm& drive, double gamma,
                  const FockBasis& basis, int jump_mode, std::span<const double> times, double tol) {
    return evolve_impl(rho0, h, &drive, gamma, basis, jump_mode, times, tol);
}

SignalTrace signal(const Trajectory& traj, double gamma) {
    SignalTrace s;
    s.times = traj.times;
    const double n0 = traj.total_number.empty() ? 0.0 : traj.total_number.front();
    for (std::size_t i = 0; i < traj.times.size(); ++i) {
        s.r.push_back(n0 - traj.total_number[i]);
        s.r_integrated.push_back(traj.integrated_signal[i]);
        const auto& pops = traj.populations[i];
        s.rho11.push_back(pops.size() > 0 ? pops[0] : 0.0);
        s.rho22.push_back(pops.size() > 1 ? pops[1] : 0.0);
        s.rho_dd.push_back(traj.jump_population[i]);
    }
    s.r_quadrature = cumulative_trapezoid(s.times, s.rho_dd, 2.0 * gamma);
    return s;
}

DriftReport drift(const Trajectory& traj) {
    DriftReport d;
    d.min_eigenvalue = 1.0;
    const double trace0 = traj.states.empty() ? 1.0 : traj.states.front().values.trace().real();
    for (const auto& rho : traj.states) {
        const auto diag = diagnose(rho);
        d.max_trace_error = std::max(d.max_trace_error, std::abs(rho.values.trace().real() - trace0));
        d.max_hermiticity_error = std::max(d.max_hermiticity_error, diag.hermiticity_error);
        d.min_eigenvalue = std::min(d.min_eigenvalue, diag.min_eigenvalue);
    }
    return d;
}

SignalTrace simulate_full(const InitialStateSpec& spec, const ModelParams& p, std::span<const double> times,
                          double tol, const FockBasis& basis) {
    check_params(p);
    const auto rho0 = initial_state(spec, p, basis);
    const auto traj = evolve(rho0, full_hamiltonian(p, basis), p.gamma, basis, mode::ds, times, tol);
    return signal(traj, p.gamma);
}

SignalTrace direct_damping_evolve(const DensityMatrix& rho0, const ModelParams& p, std::span<const double> times,
                                  double tol) {
    check_params(p);
    const auto basis = FockBasis::qubits_only();
    const auto traj = evolve(rho0, qubit_hamiltonian(p, basis), p.gamma, basis, mode::q1, times, tol);
    auto s = signal(traj, p.gamma);
    std::fill(s.rho_dd.begin(), s.rho_dd.end(), 0.0);
    return s;
}

SignalTrace direct_damping_evolve(const InitialStateSpec& spec, const ModelParams& p, std::span<const double> times,
                                  double tol) {
    return direct_damping_evolve(initial_state(spec, p, FockBasis::qubits_only()), p, times, tol);
}

double Sweep::detuning(double t) const {
    if (t >= duration) {
        return detuning_end;
    }
    return detuning_start + (detuning_end - detuning_start) * (t / duration);
}

SignalTrace evolve_with_sweep(const DensityMatrix& rho0, const ModelParams& p, const Sweep& sweep,
                              std::span<const double> times, double tol) {
    check_params(p);
    if (!(sweep.duration > 0.0)) {
        throw std::invalid_argument("sweep duration must be positive");
    }
    ModelParams base = p;
    base.eps_d_detuning = 0.0;
    const auto basis = FockBasis::two_qubit();
    DrivenTerm drive{number_operator(basis, mode::ds), [sweep](double t) { return sweep.detuning(t); }};
    const auto traj = evolve(rho0, full_hamiltonian(base, basis), drive, p.gamma, basis, mode::ds, times, tol);
    return signal(traj, p.gamma);
}

SignalTrace simulate_chain(const InitialStateSpec& spec, const ChainParams& c, std::span<const double> times,
                           double tol) {
    const auto basis = chain_basis(c);
    const auto rho0 = chain_initial_state(spec, c, basis);
    const auto traj = evolve(rho0, chain_hamiltonian(c, basis), c.gamma, basis, chain_detector_label(c), times, tol);
    return signal(traj, c.gamma);
}

} // namespace readout
