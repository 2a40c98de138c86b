#include "readout/correlators.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>
#include <variant>

#include <unsupported/Eigen/MatrixFunctions>

namespace readout {

namespace {

const complex I(0.0, 1.0);
constexpr int kQ1 = 0;
constexpr int kQ2 = 1;
constexpr int kDs = 2;
constexpr std::array<std::array<int, 2>, 3> kPairs{{{kQ1, kQ2}, {kQ1, kDs}, {kQ2, kDs}}};

const char* mode_name(int a) {
    switch (a) {
    case kQ1:
        return "1";
    case kQ2:
        return "2";
    default:
        return "D";
    }
}

// (e^z - 1) / z
complex phi1(complex z) {
    if (std::abs(z) < 1e-4) {
        return 1.0 + z / 2.0 + z * z / 6.0 + z * z * z / 24.0;
    }
    return (std::exp(z) - 1.0) / z;
}

double delta(int a, int b) { return a == b ? 1.0 : 0.0; }

// Adds the one-body flow drho/dt = i(rho K^dagger - K rho) on the two-point block.
void add_one_body_flow(Eigen::MatrixXcd& g, const Eigen::Matrix3cd& k) {
    for (int a = 0; a < 3; ++a) {
        for (int b = 0; b < 3; ++b) {
            const auto row = static_cast<Eigen::Index>(two_point_index(a, b));
            for (int m = 0; m < 3; ++m) {
                g(row, static_cast<Eigen::Index>(two_point_index(a, m))) += I * std::conj(k(b, m));
                g(row, static_cast<Eigen::Index>(two_point_index(m, b))) -= I * k(a, m);
            }
        }
    }
}

} // namespace

PairRef pair_ref(int a, int b) {
    if (a == b || a < 0 || b < 0 || a > 2 || b > 2) {
        throw std::invalid_argument("pair_ref: need two distinct mode indices");
    }
    const int lo = std::min(a, b);
    const int hi = std::max(a, b);
    const std::size_t index = (lo == kQ1) ? (hi == kQ2 ? 0 : 1) : 2;
    return {index, a < b ? 1.0 : -1.0};
}

complex TwoExcState::four_point(int a, int b, int c, int d) const {
    if (a == b || c == d) {
        return 0.0;
    }
    const auto left = pair_ref(a, b);
    const auto right = pair_ref(d, c);
    return left.sign * right.sign *
           pairs(static_cast<Eigen::Index>(left.index), static_cast<Eigen::Index>(right.index));
}

StateVector flatten(const OneExcState& s) {
    StateVector x(n_two_point);
    for (int a = 0; a < 3; ++a) {
        for (int b = 0; b < 3; ++b) {
            x(static_cast<Eigen::Index>(two_point_index(a, b))) = s.rho(a, b);
        }
    }
    return x;
}

StateVector flatten(const TwoExcState& s) {
    StateVector x(n_two_point + n_four_point);
    x.head(n_two_point) = flatten(OneExcState{s.rho});
    for (std::size_t p = 0; p < 3; ++p) {
        for (std::size_t q = 0; q < 3; ++q) {
            x(static_cast<Eigen::Index>(four_point_index(p, q))) =
                s.pairs(static_cast<Eigen::Index>(p), static_cast<Eigen::Index>(q));
        }
    }
    return x;
}

OneExcState unflatten_one(const StateVector& x) {
    OneExcState s;
    for (int a = 0; a < 3; ++a) {
        for (int b = 0; b < 3; ++b) {
            s.rho(a, b) = x(static_cast<Eigen::Index>(two_point_index(a, b)));
        }
    }
    return s;
}

TwoExcState unflatten_two(const StateVector& x) {
    if (x.size() != static_cast<Eigen::Index>(n_two_point + n_four_point)) {
        throw std::invalid_argument("unflatten_two: expected 18 components");
    }
    TwoExcState s;
    s.rho = unflatten_one(x).rho;
    for (std::size_t p = 0; p < 3; ++p) {
        for (std::size_t q = 0; q < 3; ++q) {
            s.pairs(static_cast<Eigen::Index>(p), static_cast<Eigen::Index>(q)) =
                x(static_cast<Eigen::Index>(four_point_index(p, q)));
        }
    }
    return s;
}

Generator::Generator(Eigen::MatrixXcd matrix, Sector sector, const ModelParams& params)
    : matrix_(std::move(matrix)), sector_(sector), params_(params) {
    Eigen::ComplexEigenSolver<Eigen::MatrixXcd> solver(matrix_, true);
    if (solver.info() != Eigen::Success) {
        spectral_ = false;
        condition_ = std::numeric_limits<double>::infinity();
        return;
    }
    eigenvalues_ = solver.eigenvalues();
    vectors_ = solver.eigenvectors();
    Eigen::JacobiSVD<Eigen::MatrixXcd> svd(vectors_);
    const auto& sv = svd.singularValues();
    const double smallest = sv(sv.size() - 1);
    condition_ = smallest > 0.0 ? sv(0) / smallest : std::numeric_limits<double>::infinity();
    if (!(condition_ <= max_condition)) {
        spectral_ = false;
        return;
    }
    inverse_ = vectors_.partialPivLu().inverse();
}

std::string Generator::component_name(std::size_t k) const {
    if (k < n_two_point) {
        const int a = static_cast<int>(k / 3);
        const int b = static_cast<int>(k % 3);
        return std::string("rho_") + mode_name(a) + mode_name(b);
    }
    const std::size_t r = k - n_two_point;
    const auto& p = kPairs[r / 3];
    const auto& q = kPairs[r % 3];
    // <p|rho|q> = rho_{p0 p1 q1 q0}
    return std::string("rho_") + mode_name(p[0]) + mode_name(p[1]) + mode_name(q[1]) + mode_name(q[0]);
}

StateVector Generator::propagate(const StateVector& x0, double t) const {
    if (t < 0.0) {
        throw std::invalid_argument("propagate: negative time");
    }
    if (t == 0.0) {
        return x0;
    }
    if (spectral_) {
        const Eigen::VectorXcd c = inverse_ * x0;
        const Eigen::VectorXcd decayed = c.cwiseProduct((eigenvalues_ * t).array().exp().matrix());
        return vectors_ * decayed;
    }
    const Eigen::MatrixXcd scaled = matrix_ * t;
    return scaled.exp() * x0;
}

complex Generator::integrate_component(const StateVector& x0, std::size_t k, double t) const {
    if (t <= 0.0) {
        return 0.0;
    }
    const auto row = static_cast<Eigen::Index>(k);
    if (spectral_) {
        const Eigen::VectorXcd c = inverse_ * x0;
        complex sum = 0.0;
        for (Eigen::Index j = 0; j < c.size(); ++j) {
            sum += vectors_(row, j) * c(j) * t * phi1(eigenvalues_(j) * t);
        }
        return sum;
    }
    // exp([[G, 0], [e_k^T, 0]] t) [x0; 0] carries the integral in its last entry.
    const Eigen::Index n = matrix_.rows();
    Eigen::MatrixXcd aug = Eigen::MatrixXcd::Zero(n + 1, n + 1);
    aug.topLeftCorner(n, n) = matrix_;
    aug(n, row) = 1.0;
    Eigen::VectorXcd y = Eigen::VectorXcd::Zero(n + 1);
    y.head(n) = x0;
    const Eigen::MatrixXcd scaled = aug * t;
    return (scaled.exp() * y)(n);
}

Eigen::Matrix3cd effective_one_body(const ModelParams& p) {
    Eigen::Matrix3cd k = one_excitation_hamiltonian(p).cast<complex>();
    k(kDs, kDs) -= I * p.gamma;
    return k;
}

Eigen::Matrix3cd effective_pair(const ModelParams& p) {
    const Eigen::Matrix3cd k = effective_one_body(p);
    Eigen::Matrix3cd h2;
    for (std::size_t i = 0; i < 3; ++i) {
        const int a = kPairs[i][0];
        const int b = kPairs[i][1];
        for (std::size_t j = 0; j < 3; ++j) {
            const int c = kPairs[j][0];
            const int d = kPairs[j][1];
            h2(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) =
                k(a, c) * delta(b, d) - k(a, d) * delta(b, c) - k(b, c) * delta(a, d) + k(b, d) * delta(a, c);
        }
    }
    h2(0, 0) += p.j * p.delta;
    return h2;
}

Generator one_excitation_generator(const ModelParams& p) {
    check_params(p);
    Eigen::MatrixXcd g = Eigen::MatrixXcd::Zero(n_two_point, n_two_point);
    add_one_body_flow(g, effective_one_body(p));
    return Generator(std::move(g), Sector::one_excitation, p);
}

Generator two_excitation_generator(const ModelParams& p) {
    check_params(p);
    const auto n = static_cast<Eigen::Index>(n_two_point + n_four_point);
    Eigen::MatrixXcd g = Eigen::MatrixXcd::Zero(n, n);
    add_one_body_flow(g, effective_one_body(p));

    // Interaction U n1 n2 in the two-point equations:
    //   i <[n1 n2, a_b^dagger a_a]> = i U [ f2 <n1 a_b^dagger a_a> + f1 <a_b^dagger a_a n2> ]
    // with f_k = delta_{kb} - delta_{ka}, normal ordered into two- and four-point terms.
    const double u = p.j * p.delta;
    auto add_four = [&](Eigen::Index row, complex coeff, int a, int b, int c, int d) {
        if (a == b || c == d) {
            return;
        }
        const auto left = pair_ref(a, b);
        const auto right = pair_ref(d, c);
        g(row, static_cast<Eigen::Index>(four_point_index(left.index, right.index))) += coeff * left.sign * right.sign;
    };
    if (u != 0.0) {
        for (int a = 0; a < 3; ++a) {
            for (int b = 0; b < 3; ++b) {
                const auto row = static_cast<Eigen::Index>(two_point_index(a, b));
                const double f1 = delta(kQ1, b) - delta(kQ1, a);
                const double f2 = delta(kQ2, b) - delta(kQ2, a);
                // n1 a_b^dagger a_a = delta_{1b} a_1^dagger a_a - a_1^dagger a_b^dagger a_1 a_a
                if (f2 != 0.0) {
                    g(row, static_cast<Eigen::Index>(two_point_index(a, kQ1))) += I * u * f2 * delta(kQ1, b);
                    add_four(row, -I * u * f2, a, kQ1, b, kQ1);
                }
                // a_b^dagger a_a n2 = delta_{a2} a_b^dagger a_2 - a_b^dagger a_2^dagger a_a a_2
                if (f1 != 0.0) {
                    g(row, static_cast<Eigen::Index>(two_point_index(kQ2, b))) += I * u * f1 * delta(kQ2, a);
                    add_four(row, -I * u * f1, kQ2, a, kQ2, b);
                }
            }
        }
    }

    // Four-point block: dM/dt = i(M H2^dagger - H2 M) on M_{pq} = <p|rho|q>.
    const Eigen::Matrix3cd h2 = effective_pair(p);
    for (std::size_t pp = 0; pp < 3; ++pp) {
        for (std::size_t qq = 0; qq < 3; ++qq) {
            const auto row = static_cast<Eigen::Index>(four_point_index(pp, qq));
            for (std::size_t r = 0; r < 3; ++r) {
                g(row, static_cast<Eigen::Index>(four_point_index(pp, r))) +=
                    I * std::conj(h2(static_cast<Eigen::Index>(qq), static_cast<Eigen::Index>(r)));
                g(row, static_cast<Eigen::Index>(four_point_index(r, qq))) -=
                    I * h2(static_cast<Eigen::Index>(pp), static_cast<Eigen::Index>(r));
            }
        }
    }
    return Generator(std::move(g), Sector::two_excitation, p);
}

Eigen::MatrixXcd four_point_block(const Generator& gen) {
    if (gen.sector() != Sector::two_excitation) {
        throw std::invalid_argument("four_point_block: needs a two-excitation generator");
    }
    return gen.matrix().bottomRightCorner(n_four_point, n_four_point);
}

Sector natural_sector(const InitialStateSpec& spec) {
    return std::holds_alternative<init::BothExcited>(spec) ? Sector::two_excitation : Sector::one_excitation;
}

StateVector correlator_initial_state(const InitialStateSpec& spec, const ModelParams& p, Sector sector) {
    const auto amps = amplitudes(spec, p);
    if (sector == Sector::one_excitation && amps.both != 0.0) {
        throw std::domain_error("two-excitation initial state needs the two-excitation generator");
    }
    TwoExcState s;
    s.rho = amps.one * amps.one.adjoint();
    const double both = std::norm(amps.both);
    s.rho(kQ1, kQ1) += both;
    s.rho(kQ2, kQ2) += both;
    s.pairs(0, 0) = both;
    if (sector == Sector::one_excitation) {
        return flatten(OneExcState{s.rho});
    }
    return flatten(s);
}

CorrelatorRun evolve_correlators(const Generator& gen, const StateVector& x0, std::span<const double> times) {
    if (x0.size() != static_cast<Eigen::Index>(gen.size())) {
        throw std::invalid_argument("evolve_correlators: state size does not match the generator");
    }
    CorrelatorRun run;
    run.initial = x0;
    run.fallback_used = !gen.spectral();
    run.condition = gen.eigenbasis_condition();
    run.times.assign(times.begin(), times.end());
    run.states.reserve(times.size());
    for (double t : times) {
        run.states.push_back(gen.propagate(x0, t));
    }
    return run;
}

StateVector evolve_correlators(const Generator& gen, const StateVector& x0, double t) { return gen.propagate(x0, t); }

SignalTrace signal_from_correlators(const Generator& gen, const CorrelatorRun& run) {
    const double gamma = gen.params().gamma;
    auto number = [](const StateVector& x) {
        return (x(0) + x(static_cast<Eigen::Index>(two_point_index(1, 1))) +
                x(static_cast<Eigen::Index>(two_point_index(2, 2))))
            .real();
    };
    const auto dd = two_point_index(kDs, kDs);
    const double n0 = number(run.initial);
    SignalTrace s;
    s.times = run.times;
    for (std::size_t i = 0; i < run.times.size(); ++i) {
        const auto& x = run.states[i];
        s.r.push_back(n0 - number(x));
        s.r_integrated.push_back(2.0 * gamma * gen.integrate_component(run.initial, dd, run.times[i]).real());
        s.rho11.push_back(x(0).real());
        s.rho22.push_back(x(static_cast<Eigen::Index>(two_point_index(kQ2, kQ2))).real());
        s.rho_dd.push_back(x(static_cast<Eigen::Index>(dd)).real());
    }
    s.r_quadrature = cumulative_trapezoid(s.times, s.rho_dd, 2.0 * gamma);
    return s;
}

SignalTrace simulate_correlators(const InitialStateSpec& spec, const ModelParams& p, std::span<const double> times) {
    const Sector sector = natural_sector(spec);
    const Generator gen = sector == Sector::one_excitation ? one_excitation_generator(p) : two_excitation_generator(p);
    const auto run = evolve_correlators(gen, correlator_initial_state(spec, p, sector), times);
    return signal_from_correlators(gen, run);
}

std::vector<SpectrumEntry> slow_spectrum(const Generator& gen) {
    const auto& p = gen.params();
    Eigen::VectorXcd values = gen.eigenvalues();
    if (values.size() == 0) {
        values = Eigen::ComplexEigenSolver<Eigen::MatrixXcd>(gen.matrix(), false).eigenvalues();
    }
    std::vector<SpectrumEntry> out;
    for (Eigen::Index k = 0; k < values.size(); ++k) {
        const complex v = values(k);
        EigenClass kind = EigenClass::slow;
        if (std::abs(v.imag()) > 0.5 * p.omega21) {
            kind = EigenClass::fast_oscillating;
        } else if (std::abs(v.real()) > 0.5 * p.gamma) {
            kind = EigenClass::ds_fast;
        }
        out.push_back({v, kind});
    }
    std::stable_sort(out.begin(), out.end(), [](const SpectrumEntry& a, const SpectrumEntry& b) {
        return std::abs(a.value.real()) < std::abs(b.value.real());
    });
    return out;
}

double slowest_decay_rate(std::span<const SpectrumEntry> spectrum, double floor) {
    double best = std::numeric_limits<double>::infinity();
    for (const auto& e : spectrum) {
        const double r = std::abs(e.value.real());
        if (r > floor) {
            best = std::min(best, r);
        }
    }
    return best;
}

SlowRates slow_rates(const Generator& one_excitation) {
    if (one_excitation.sector() != Sector::one_excitation) {
        throw std::invalid_argument("slow_rates: needs the one-excitation generator");
    }
    std::vector<double> slow;
    for (const auto& e : slow_spectrum(one_excitation)) {
        if (e.kind == EigenClass::slow) {
            slow.push_back(std::abs(e.value.real()));
        }
    }
    SlowRates r;
    if (slow.size() >= 2) {
        r.detuned = slow[0];
        r.resonant = slow[1];
    } else if (slow.size() == 1) {
        r.detuned = slow[0];
        r.resonant = std::numeric_limits<double>::quiet_NaN();
    } else {
        r.detuned = r.resonant = std::numeric_limits<double>::quiet_NaN();
    }
    return r;
}

} // namespace readout
