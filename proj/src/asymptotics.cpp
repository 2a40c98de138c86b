#include "readout/asymptotics.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <variant>

namespace readout {

DecayRates decay_rates(const ModelParams& p) {
    if (p.gamma == 0.0) {
        throw std::domain_error("decay rates need gamma != 0");
    }
    const double w = p.omega21;
    DecayRates r;
    r.w1 = p.jd * p.jd / (2.0 * p.gamma);
    r.w2 = p.j * p.j * p.jd * p.jd * p.gamma / (8.0 * w * w * w * w);
    r.mu = stationary_states(p).mu;
    return r;
}

double asymptotic_signal(const Populations& pops, const DecayRates& rates, double t) {
    if (pops.two_excitation) {
        return 2.0 - std::exp(-rates.w1 * t) - std::exp(-rates.w2 * t);
    }
    return pops.p1 * -std::expm1(-rates.w1 * t) + pops.p2 * -std::expm1(-rates.w2 * t);
}

Populations overlap_populations(const InitialStateSpec& spec, const ModelParams& p) {
    if (std::holds_alternative<init::BothExcited>(spec)) {
        throw std::domain_error("overlap_populations: the doubly excited state is not in the one-excitation sector");
    }
    const auto amps = amplitudes(spec, p);
    const auto st = stationary_states(p);
    const complex o1 = amps.one(0) * st.psi1(0) + amps.one(1) * st.psi1(1);
    const complex o2 = amps.one(0) * st.psi2(0) + amps.one(1) * st.psi2(1);
    return {std::norm(o1), std::norm(o2), false};
}

double projective_reference(double p1, double p2, double phi, const ModelParams& p) {
    if (p1 < 0.0 || p2 < 0.0 || std::abs(p1 + p2 - 1.0) > 1e-9) {
        throw std::domain_error("projective_reference: p1 + p2 must equal 1");
    }
    const double x = p.j / (2.0 * p.omega21);
    const complex amp = std::sqrt(p1) + std::sqrt(p2) * std::polar(1.0, phi) * x;
    return (1.0 - x * x) * std::norm(amp);
}

Window discrimination_window(const ModelParams& p) {
    const auto r = decay_rates(p);
    Window w;
    w.epsilon0 = p.j * p.j / (4.0 * p.omega21 * p.omega21);
    w.t_min = 2.0 * std::log(2.0 * p.omega21 / p.j) / r.w1;
    const double ratio = p.omega21 / p.gamma;
    w.t_max = ratio * ratio / r.w1;
    w.resolvable = w.t_min < w.t_max;
    return w;
}

DirectScheme direct_scheme_estimates(const ModelParams& p) {
    DirectScheme d;
    const double x = p.j / p.omega21;
    d.fast_rate = 2.0 * p.gamma;
    d.slow_rate_estimate = x * x * p.gamma;
    d.false_click_floor = x * x;
    return d;
}

double direct_scheme_signal(const Populations& pops, const ModelParams& p, double t) {
    const auto d = direct_scheme_estimates(p);
    if (pops.two_excitation) {
        return 2.0 - std::exp(-d.fast_rate * t) - std::exp(-d.slow_rate_estimate * t);
    }
    return pops.p1 * -std::expm1(-d.fast_rate * t) + pops.p2 * -std::expm1(-d.slow_rate_estimate * t);
}

double detector_decay_signal(const ModelParams& p, double t) { return -std::expm1(-2.0 * p.gamma * t); }

double detuned_resonant_rate(const ModelParams& p, double detuning) {
    const double g2 = p.gamma * p.gamma;
    return decay_rates(p).w1 * g2 / (g2 + detuning * detuning);
}

double sweep_signal(const Populations& pops, const ModelParams& p, const Sweep& sweep, double t) {
    const auto r = decay_rates(p);
    const double g = p.gamma;
    const double ramp_end = std::min(t, sweep.duration);
    const double slope = (sweep.detuning_end - sweep.detuning_start) / sweep.duration;
    double exponent = 0.0;
    if (slope == 0.0) {
        exponent = detuned_resonant_rate(p, sweep.detuning_start) * ramp_end;
    } else {
        // int w1 g^2 / (g^2 + d(s)^2) ds with d linear in s.
        exponent = r.w1 * g / slope * (std::atan(sweep.detuning(ramp_end) / g) - std::atan(sweep.detuning_start / g));
    }
    if (t > sweep.duration) {
        exponent += detuned_resonant_rate(p, sweep.detuning_end) * (t - sweep.duration);
    }
    const double resonant = -std::expm1(-exponent);
    const double detuned = -std::expm1(-r.w2 * t);
    if (pops.two_excitation) {
        return resonant + detuned;
    }
    return pops.p1 * resonant + pops.p2 * detuned;
}

AsymptoticReport asymptotic_report(const ModelParams& p) {
    AsymptoticReport a;
    a.rates = decay_rates(p);
    a.window = discrimination_window(p);
    a.epsilon0 = a.window.epsilon0;
    a.direct_scheme = direct_scheme_estimates(p);
    return a;
}

} // namespace readout
