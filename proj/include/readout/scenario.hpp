// scenario.hpp: configured runs, figure presets, rate fits and scheme comparison

#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "readout/asymptotics.hpp"
#include "readout/initial_state.hpp"
#include "readout/lindblad.hpp"
#include "readout/model.hpp"
#include "readout/signal_trace.hpp"

namespace readout {

enum class Engine { full, correlators, direct, sweep, chain };
enum class Spacing { linear, log };

const char* engine_name(Engine e);

struct TimeGrid {
    double t_max{0.0};
    std::size_t n_points{0};
    Spacing spacing{Spacing::linear};

    // Linear: n_points from 0 to t_max. Log: 0 followed by n_points - 1
    // geometric points from t_max * 1e-7 to t_max.
    std::vector<double> points() const;

    bool operator==(const TimeGrid&) const = default;
};

struct Scenario {
    Engine engine{Engine::full};
    ModelParams model;
    ChainParams chain;
    InitialStateSpec initial{init::Ground{}};
    double theta_deg{0.0};
    double phi_deg{0.0};
    TimeGrid grid;
    double rel_tol{1e-9};
    std::optional<Sweep> sweep;
    std::string out;

    bool operator==(const Scenario&) const = default;
};

// `key = value` lines, `#` comments. Throws ConfigError naming the key and line.
Scenario parse_config(const std::string& text);
// Inverse of parse_config: parse_config(render(s)) == s for every valid scenario.
std::string render(const Scenario& s);

Scenario preset(const std::string& name); // fig2a, fig2b, fig3 (theta = 45 deg)
std::vector<Scenario> preset_runs(const std::string& name);
bool is_preset(const std::string& name);

struct FitResult {
    double rate{0.0};
    double shift{0.0};     // time offset: gap ~ gap0 exp(-rate (t - shift))
    double residual{0.0};  // max relative deviation of the fitted gap inside the window
    double log_shift{0.0}; // rate * shift, the offset of ln(gap)
    std::size_t points{0};
};

// Least squares through ln(plateau - R) on [t_a, t_b]. Throws FitError when
// the window leaves the trace, holds fewer than two points, or the gap is
// not positive.
FitResult fit_decay_rate(const SignalTrace& trace, std::pair<double, double> window, double plateau);

// One JSON field of a flat summary object. Non-finite numbers are written as null.
struct SummaryField {
    std::string key;
    std::variant<double, long long, bool, std::string> value;
};
using Summary = std::vector<SummaryField>;

struct FitWindows {
    std::pair<double, double> w1{10.0, 40.0};
    std::optional<std::pair<double, double>> w2; // defaults to [0.3/W2, 3/W2]
};

FitWindows preset_fit_windows(double gamma);

struct RunResult {
    SignalTrace trace;
    Summary summary;
    std::vector<std::string> warnings;
};

// Runs the configured engine, fills the asymptotic column and the summary.
// Propagates NumericalFailure; engine/initial-state mismatches raise ConfigError.
RunResult run_scenario(const Scenario& s, const FitWindows& windows = {});

struct Comparison {
    Summary summary;
    std::vector<std::string> warnings;
    double oracle_discrepancy{0.0};
    double plateau_time{0.0};
    double plateau_error{0.0};
    double projective_error{0.0};
    double improvement_ratio{0.0};
    double direct_detection_time{0.0};
    double direct_false_click{0.0};
};

// Detection confidence at which the direct scheme's false clicks are read.
inline constexpr double direct_confidence = 0.99;

// Full-space vs correlators, fitted vs analytic rates, plateau vs projective
// error and the direct-damping false-click probability. One-excitation only.
Comparison compare(const Scenario& s);

// Summary of a rates-only request: analytic rates, spectral rates, window, regime.
Summary rates_summary(const ModelParams& p);

std::string to_json(const Summary& summary);
std::string to_csv(const SignalTrace& trace);

} // namespace readout
