#include "readout/integrator.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "readout/errors.hpp"

namespace readout {

namespace {

// Dormand-Prince 5(4) tableau.
constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
constexpr double a21 = 1.0 / 5;
constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561, a54 = -212.0 / 729;
constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247, a64 = 49.0 / 176,
                 a65 = -5103.0 / 18656;
constexpr double a71 = 35.0 / 384, a73 = 500.0 / 1113, a74 = 125.0 / 192, a75 = -2187.0 / 6784,
                 a76 = 11.0 / 84;
constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920, e5 = -17253.0 / 339200,
                 e6 = 22.0 / 525, e7 = -1.0 / 40;

constexpr double safety = 0.9;
constexpr double min_factor = 0.2;
constexpr double max_factor = 10.0;

double error_norm(const StateVector& err, const StateVector& y0, const StateVector& y1, double atol, double rtol) {
    double sum = 0.0;
    for (Eigen::Index i = 0; i < err.size(); ++i) {
        const double scale = atol + rtol * std::max(std::abs(y0(i)), std::abs(y1(i)));
        const double r = std::abs(err(i)) / scale;
        sum += r * r;
    }
    return std::sqrt(sum / static_cast<double>(std::max<Eigen::Index>(err.size(), 1)));
}

double rms_scaled(const StateVector& v, const StateVector& y, double atol, double rtol) {
    double sum = 0.0;
    for (Eigen::Index i = 0; i < v.size(); ++i) {
        const double r = std::abs(v(i)) / (atol + rtol * std::abs(y(i)));
        sum += r * r;
    }
    return std::sqrt(sum / static_cast<double>(std::max<Eigen::Index>(v.size(), 1)));
}

} // namespace

std::vector<StateVector> integrate(const RhsFunction& f, const StateVector& y0, std::span<const double> times,
                                   const IntegratorOptions& options, IntegrationStats* stats) {
    if (times.empty()) {
        return {};
    }
    for (std::size_t i = 1; i < times.size(); ++i) {
        if (!(times[i] > times[i - 1])) {
            throw std::invalid_argument("integrate: output times must be strictly increasing");
        }
    }
    const double rtol = options.rel_tol;
    const double atol = options.abs_tol < 0.0 ? options.rel_tol : options.abs_tol;

    IntegrationStats local;
    IntegrationStats& st = stats ? *stats : local;

    std::vector<StateVector> out;
    out.reserve(times.size());
    out.push_back(y0);

    const Eigen::Index n = y0.size();
    StateVector y = y0;
    StateVector k1(n), k2(n), k3(n), k4(n), k5(n), k6(n), k7(n), tmp(n), y_new(n), err(n);

    double t = times.front();
    f(t, y, k1);
    ++st.rhs_evaluations;

    double h = options.initial_step;
    if (h <= 0.0) {
        // Hairer & Wanner's starting-step heuristic.
        const double d0 = rms_scaled(y, y, atol, rtol);
        const double d1 = rms_scaled(k1, y, atol, rtol);
        double h0 = (d0 < 1e-5 || d1 < 1e-5) ? 1e-6 : 0.01 * d0 / d1;
        tmp = y + h0 * k1;
        f(t + h0, tmp, k2);
        ++st.rhs_evaluations;
        const double d2 = rms_scaled(k2 - k1, y, atol, rtol) / h0;
        const double dmax = std::max(d1, d2);
        const double h1 = dmax <= 1e-15 ? std::max(1e-6, h0 * 1e-3) : std::pow(0.01 / dmax, 1.0 / 5.0);
        h = std::min(100.0 * h0, h1);
    }

    std::size_t steps = 0;
    for (std::size_t target_index = 1; target_index < times.size(); ++target_index) {
        const double target = times[target_index];
        while (t < target) {
            if (++steps > options.max_steps) {
                throw NumericalFailure("integrate: step budget exhausted", t);
            }
            const double min_step = 1e-14 * std::max(1.0, std::abs(t));
            if (h < min_step) {
                throw NumericalFailure("integrate: step size underflow", t);
            }
            // Clip to the output time; stretch slightly to avoid a sliver step.
            double step = h;
            bool lands = false;
            if (t + 1.01 * step >= target) {
                step = target - t;
                lands = true;
            }

            tmp = y + step * (a21 * k1);
            f(t + c2 * step, tmp, k2);
            tmp = y + step * (a31 * k1 + a32 * k2);
            f(t + c3 * step, tmp, k3);
            tmp = y + step * (a41 * k1 + a42 * k2 + a43 * k3);
            f(t + c4 * step, tmp, k4);
            tmp = y + step * (a51 * k1 + a52 * k2 + a53 * k3 + a54 * k4);
            f(t + c5 * step, tmp, k5);
            tmp = y + step * (a61 * k1 + a62 * k2 + a63 * k3 + a64 * k4 + a65 * k5);
            f(t + step, tmp, k6);
            y_new = y + step * (a71 * k1 + a73 * k3 + a74 * k4 + a75 * k5 + a76 * k6);
            const double t_new = lands ? target : t + step;
            f(t_new, y_new, k7);
            st.rhs_evaluations += 6;

            err = step * (e1 * k1 + e3 * k3 + e4 * k4 + e5 * k5 + e6 * k6 + e7 * k7);
            const double en = error_norm(err, y, y_new, atol, rtol);
            if (!std::isfinite(en)) {
                ++st.rejected;
                h = 0.1 * step;
                continue;
            }
            const double factor =
                en == 0.0 ? max_factor : std::clamp(safety * std::pow(en, -0.2), min_factor, max_factor);
            if (en <= 1.0) {
                ++st.accepted;
                t = t_new;
                y.swap(y_new);
                k1.swap(k7);
                // A clipped step says nothing about the natural step length.
                if (!lands || factor < 1.0) {
                    h = step * factor;
                }
            } else {
                ++st.rejected;
                h = step * std::min(1.0, factor);
            }
        }
        out.push_back(y);
    }
    return out;
}

} // namespace readout
