#include "readout/signal_trace.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace readout {

double SignalTrace::r_at(double t) const {
    if (times.empty()) {
        throw std::out_of_range("r_at: empty trace");
    }
    if (t <= times.front()) {
        return r.front();
    }
    if (t >= times.back()) {
        if (t > times.back() * (1.0 + 1e-12)) {
            throw std::out_of_range("r_at: time beyond the trace");
        }
        return r.back();
    }
    const auto it = std::upper_bound(times.begin(), times.end(), t);
    const auto i = static_cast<std::size_t>(it - times.begin());
    const double w = (t - times[i - 1]) / (times[i] - times[i - 1]);
    return (1.0 - w) * r[i - 1] + w * r[i];
}

TraceCheck check_trace(const SignalTrace& trace) {
    TraceCheck c;
    if (trace.r.empty()) {
        return c;
    }
    c.r0 = std::abs(trace.r.front());
    for (std::size_t i = 1; i < trace.r.size(); ++i) {
        c.worst_decrease = std::max(c.worst_decrease, trace.r[i - 1] - trace.r[i]);
    }
    c.max_value = *std::max_element(trace.r.begin(), trace.r.end());
    if (trace.r_integrated.size() == trace.r.size()) {
        for (std::size_t i = 0; i < trace.r.size(); ++i) {
            c.identity_error = std::max(c.identity_error, std::abs(trace.r[i] - trace.r_integrated[i]));
        }
    }
    return c;
}

std::vector<double> cumulative_trapezoid(const std::vector<double>& times, const std::vector<double>& values,
                                         double rate) {
    std::vector<double> out(times.size(), 0.0);
    for (std::size_t i = 1; i < times.size(); ++i) {
        out[i] = out[i - 1] + 0.5 * rate * (values[i] + values[i - 1]) * (times[i] - times[i - 1]);
    }
    return out;
}

} // namespace readout
