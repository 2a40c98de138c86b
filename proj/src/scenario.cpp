#include "readout/scenario.hpp"

#include <algorithm>
#include <cerrno>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <limits>
#include <map>
#include <numbers>
#include <set>
#include <sstream>
#include <stdexcept>

#include "readout/correlators.hpp"
#include "readout/errors.hpp"

namespace readout {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();
constexpr double kDegree = std::numbers::pi / 180.0;

const std::vector<std::string> kAllKeys = {
    "engine",    "omega21",       "j",          "jd",          "gamma",       "delta",          "eps_d_detuning",
    "initial",   "theta_deg",     "phi_deg",    "t_max",       "n_points",    "spacing",        "rel_tol",
    "site_energies", "measured_site", "sweep_start", "sweep_end", "sweep_duration", "out"};

const std::set<std::string> kCommonKeys = {"engine",  "initial", "theta_deg", "phi_deg", "t_max",
                                           "n_points", "spacing", "rel_tol",   "out"};

std::set<std::string> engine_keys(Engine e) {
    std::set<std::string> keys = kCommonKeys;
    auto add = [&](std::initializer_list<const char*> list) {
        for (const char* k : list) {
            keys.insert(k);
        }
    };
    switch (e) {
    case Engine::full:
    case Engine::correlators:
        add({"omega21", "j", "jd", "gamma", "delta", "eps_d_detuning"});
        break;
    case Engine::direct:
        add({"omega21", "j", "jd", "gamma", "delta"});
        break;
    case Engine::sweep:
        add({"omega21", "j", "jd", "gamma", "delta", "sweep_start", "sweep_end", "sweep_duration"});
        break;
    case Engine::chain:
        add({"site_energies", "j", "jd", "gamma", "delta", "measured_site", "eps_d_detuning"});
        break;
    }
    return keys;
}

std::vector<std::string> required_keys(Engine e) {
    std::vector<std::string> keys = {"initial", "t_max", "n_points"};
    switch (e) {
    case Engine::full:
    case Engine::correlators:
        keys.insert(keys.end(), {"omega21", "j", "jd"});
        break;
    case Engine::direct:
        keys.insert(keys.end(), {"omega21", "j"});
        break;
    case Engine::sweep:
        keys.insert(keys.end(), {"omega21", "j", "jd", "sweep_start", "sweep_end", "sweep_duration"});
        break;
    case Engine::chain:
        keys.insert(keys.end(), {"site_energies", "j", "jd", "measured_site"});
        break;
    }
    return keys;
}

std::string trim(const std::string& s) {
    const auto first = s.find_first_not_of(" \t\r");
    if (first == std::string::npos) {
        return {};
    }
    const auto last = s.find_last_not_of(" \t\r");
    return s.substr(first, last - first + 1);
}

struct Entry {
    std::string value;
    std::size_t line{0};
};

double parse_double(const std::string& key, const Entry& e) {
    const char* begin = e.value.c_str();
    char* end = nullptr;
    errno = 0;
    const double v = std::strtod(begin, &end);
    if (end == begin || *end != '\0' || errno == ERANGE || !std::isfinite(v)) {
        throw ConfigError("malformed number '" + e.value + "'", key, e.line);
    }
    return v;
}

std::size_t parse_count(const std::string& key, const Entry& e) {
    std::size_t v = 0;
    const char* first = e.value.data();
    const char* last = first + e.value.size();
    const auto res = std::from_chars(first, last, v);
    if (res.ec != std::errc() || res.ptr != last) {
        throw ConfigError("malformed integer '" + e.value + "'", key, e.line);
    }
    return v;
}

std::string format_exact(double x) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

// "site3" -> 3, or 0 when `text` does not start with `prefix` followed by digits.
int indexed(const std::string& text, const std::string& prefix) {
    if (text.size() <= prefix.size() || text.compare(0, prefix.size(), prefix) != 0) {
        return 0;
    }
    int n = 0;
    const char* first = text.data() + prefix.size();
    const char* last = text.data() + text.size();
    const auto res = std::from_chars(first, last, n);
    if (res.ec != std::errc() || res.ptr != last || n < 1) {
        return 0;
    }
    return n;
}

Populations populations_of(const Scenario& s) {
    if (std::holds_alternative<init::BothExcited>(s.initial)) {
        return {1.0, 1.0, true};
    }
    return overlap_populations(s.initial, s.model);
}

bool is_qubit_one_excitation(const InitialStateSpec& spec) {
    return std::holds_alternative<init::SiteExcited>(spec) || std::holds_alternative<init::Stationary>(spec) ||
           std::holds_alternative<init::Superposition>(spec);
}

double max_abs_difference(const std::vector<double>& a, const std::vector<double>& b) {
    double m = 0.0;
    for (std::size_t i = 0; i < std::min(a.size(), b.size()); ++i) {
        m = std::max(m, std::abs(a[i] - b[i]));
    }
    return m;
}

std::vector<double> linear_grid(double t_max, std::size_t n) { return TimeGrid{t_max, n, Spacing::linear}.points(); }

// Lost excitation number N(0) - N(t) of a correlator state.
double correlator_signal(const Generator& gen, const StateVector& x0, double t) {
    const StateVector x = gen.propagate(x0, t);
    auto number = [](const StateVector& v) { return (v(0) + v(4) + v(8)).real(); };
    return number(x0) - number(x);
}

std::optional<FitResult> try_fit(const SignalTrace& trace, std::pair<double, double> window, double plateau) {
    try {
        return fit_decay_rate(trace, window, plateau);
    } catch (const FitError&) {
        return std::nullopt;
    }
}

void add(Summary& s, const std::string& key, double v) { s.push_back({key, v}); }
void add_text(Summary& s, const std::string& key, const std::string& v) { s.push_back({key, v}); }
void add_flag(Summary& s, const std::string& key, bool v) { s.push_back({key, v}); }
void add_count(Summary& s, const std::string& key, long long v) { s.push_back({key, v}); }

void add_fit(Summary& s, const std::string& prefix, const std::optional<FitResult>& fit) {
    add(s, prefix, fit ? fit->rate : kNaN);
    add(s, prefix + "_shift", fit ? fit->shift : kNaN);
    add(s, prefix + "_log_shift", fit ? fit->log_shift : kNaN);
    add(s, prefix + "_residual", fit ? fit->residual : kNaN);
}

void add_warnings(Summary& s, const std::vector<std::string>& warnings) {
    add_count(s, "regime_warning_count", static_cast<long long>(warnings.size()));
    std::string joined;
    for (const auto& w : warnings) {
        joined += (joined.empty() ? "" : "; ") + w;
    }
    add_text(s, "regime_warnings", joined);
}

void add_rates(Summary& s, const ModelParams& p) {
    const auto a = asymptotic_report(p);
    add(s, "w1", a.rates.w1);
    add(s, "w2", a.rates.w2);
    add(s, "mu", a.rates.mu);
    add(s, "epsilon0", a.epsilon0);
    add(s, "window_t_min", a.window.t_min);
    add(s, "window_t_max", a.window.t_max);
    add_flag(s, "window_resolvable", a.window.resolvable);
}

// log-log slope of the exactly integrated signal between 1e-3/gamma and 1e-2/gamma.
double small_time_slope(const Scenario& s) {
    const Sector sector = natural_sector(s.initial);
    const Generator gen =
        sector == Sector::one_excitation ? one_excitation_generator(s.model) : two_excitation_generator(s.model);
    const StateVector x0 = correlator_initial_state(s.initial, s.model, sector);
    const double t1 = 1e-3 / s.model.gamma;
    const double t2 = 1e-2 / s.model.gamma;
    const double r1 = 2.0 * s.model.gamma * gen.integrate_component(x0, two_point_index(2, 2), t1).real();
    const double r2 = 2.0 * s.model.gamma * gen.integrate_component(x0, two_point_index(2, 2), t2).real();
    if (!(r1 > 0.0 && r2 > 0.0)) {
        return kNaN;
    }
    return std::log(r2 / r1) / std::log(t2 / t1);
}

} // namespace

const char* engine_name(Engine e) {
    switch (e) {
    case Engine::full:
        return "full";
    case Engine::correlators:
        return "correlators";
    case Engine::direct:
        return "direct";
    case Engine::sweep:
        return "sweep";
    case Engine::chain:
        return "chain";
    }
    return "?";
}

std::vector<double> TimeGrid::points() const {
    if (n_points < 2 || !(t_max > 0.0)) {
        throw std::invalid_argument("time grid needs n_points >= 2 and t_max > 0");
    }
    std::vector<double> t(n_points, 0.0);
    if (spacing == Spacing::linear) {
        for (std::size_t i = 0; i < n_points; ++i) {
            t[i] = t_max * static_cast<double>(i) / static_cast<double>(n_points - 1);
        }
        t.back() = t_max;
        return t;
    }
    const std::size_t m = n_points - 1;
    for (std::size_t k = 0; k < m; ++k) {
        const double frac = m == 1 ? 1.0 : static_cast<double>(k) / static_cast<double>(m - 1);
        t[k + 1] = t_max * std::pow(10.0, -7.0 * (1.0 - frac));
    }
    t.back() = t_max;
    return t;
}

Scenario parse_config(const std::string& text) {
    std::map<std::string, Entry> entries;
    std::istringstream in(text);
    std::string raw;
    std::size_t line_no = 0;
    while (std::getline(in, raw)) {
        ++line_no;
        const auto hash = raw.find('#');
        const std::string line = trim(hash == std::string::npos ? raw : raw.substr(0, hash));
        if (line.empty()) {
            continue;
        }
        const auto eq = line.find('=');
        if (eq == std::string::npos) {
            throw ConfigError("expected 'key = value'", "", line_no);
        }
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        if (std::find(kAllKeys.begin(), kAllKeys.end(), key) == kAllKeys.end()) {
            throw ConfigError("unknown key", key, line_no);
        }
        if (value.empty()) {
            throw ConfigError("missing value", key, line_no);
        }
        if (entries.count(key) != 0) {
            throw ConfigError("duplicate key (first set on line " + std::to_string(entries[key].line) + ")", key,
                              line_no);
        }
        entries[key] = {value, line_no};
    }

    const auto engine_it = entries.find("engine");
    if (engine_it == entries.end()) {
        throw ConfigError("missing required key", "engine", 0);
    }
    Scenario s;
    const std::string& engine_text = engine_it->second.value;
    if (engine_text == "full") {
        s.engine = Engine::full;
    } else if (engine_text == "correlators") {
        s.engine = Engine::correlators;
    } else if (engine_text == "direct") {
        s.engine = Engine::direct;
    } else if (engine_text == "sweep") {
        s.engine = Engine::sweep;
    } else if (engine_text == "chain") {
        s.engine = Engine::chain;
    } else {
        throw ConfigError("unknown engine '" + engine_text + "'", "engine", engine_it->second.line);
    }

    const auto allowed = engine_keys(s.engine);
    for (const auto& [key, e] : entries) {
        if (allowed.count(key) == 0) {
            throw ConfigError(std::string("not used by engine ") + engine_name(s.engine), key, e.line);
        }
    }
    for (const auto& key : required_keys(s.engine)) {
        if (entries.count(key) == 0) {
            throw ConfigError("missing required key", key, 0);
        }
    }

    auto has = [&](const char* key) { return entries.count(key) != 0; };
    auto number = [&](const char* key, double fallback) {
        return has(key) ? parse_double(key, entries.at(key)) : fallback;
    };
    auto line_of = [&](const char* key) { return has(key) ? entries.at(key).line : 0; };
    auto require = [&](bool ok, const char* key, const std::string& what) {
        if (!ok) {
            throw ConfigError(what, key, line_of(key));
        }
    };

    const double gamma = number("gamma", 1.0);
    require(gamma > 0.0, "gamma", "must be positive");
    const double j = number("j", 0.0);
    const double jd = number("jd", 0.0);
    const double delta = number("delta", 0.0);
    const double detuning = number("eps_d_detuning", 0.0);

    if (s.engine == Engine::chain) {
        const Entry& list = entries.at("site_energies");
        std::stringstream items(list.value);
        std::string item;
        while (std::getline(items, item, ',')) {
            s.chain.site_energies.push_back(parse_double("site_energies", {trim(item), list.line}));
        }
        require(s.chain.site_energies.size() >= 2, "site_energies", "needs at least two sites");
        require(s.chain.site_energies.size() + 1 <= max_chain_modes, "site_energies",
                "chain longer than " + std::to_string(max_chain_modes - 1) + " sites");
        const std::size_t measured = parse_count("measured_site", entries.at("measured_site"));
        require(measured >= 1 && measured <= s.chain.site_energies.size(), "measured_site",
                "must name a site (1-based)");
        s.chain.measured_site = measured - 1;
        s.chain.j = j;
        s.chain.jd = jd;
        s.chain.gamma = gamma;
        s.chain.delta = delta;
        s.chain.eps_d_detuning = detuning;
    } else {
        s.model.omega21 = number("omega21", 0.0);
        require(s.model.omega21 > 0.0, "omega21", "must be positive");
        s.model.j = j;
        s.model.jd = jd;
        s.model.gamma = gamma;
        s.model.delta = delta;
        s.model.eps_d_detuning = detuning;
    }

    if (s.engine == Engine::sweep) {
        Sweep sw;
        sw.detuning_start = number("sweep_start", 0.0);
        sw.detuning_end = number("sweep_end", 0.0);
        sw.duration = number("sweep_duration", 0.0);
        require(sw.duration > 0.0, "sweep_duration", "must be positive");
        s.sweep = sw;
    }

    s.grid.t_max = number("t_max", 0.0);
    require(s.grid.t_max > 0.0, "t_max", "must be positive");
    s.grid.n_points = parse_count("n_points", entries.at("n_points"));
    require(s.grid.n_points >= 2, "n_points", "must be at least 2");
    if (has("spacing")) {
        const std::string& sp = entries.at("spacing").value;
        if (sp == "linear") {
            s.grid.spacing = Spacing::linear;
        } else if (sp == "log") {
            s.grid.spacing = Spacing::log;
        } else {
            throw ConfigError("expected linear or log", "spacing", line_of("spacing"));
        }
    }
    s.rel_tol = number("rel_tol", 1e-9);
    require(s.rel_tol >= 1e-12 && s.rel_tol <= 1e-4, "rel_tol", "must lie in [1e-12, 1e-4]");
    if (has("out")) {
        s.out = entries.at("out").value;
    }

    const std::string& initial = entries.at("initial").value;
    const std::size_t initial_line = line_of("initial");
    const std::size_t max_site = s.engine == Engine::chain ? s.chain.site_energies.size() : 2;
    const int site = indexed(initial, "site");
    const int stationary = indexed(initial, "stationary");
    bool superposition = false;
    if (initial == "ground") {
        s.initial = init::Ground{};
    } else if (site > 0) {
        require(static_cast<std::size_t>(site) <= max_site, "initial", "site index out of range");
        s.initial = init::SiteExcited{site};
    } else if (stationary > 0) {
        require(static_cast<std::size_t>(stationary) <= max_site, "initial", "stationary index out of range");
        s.initial = init::Stationary{stationary};
    } else if (initial == "superposition") {
        superposition = true;
    } else if (initial == "both") {
        s.initial = init::BothExcited{};
    } else if (initial == "ds") {
        s.initial = init::DSExcited{};
    } else {
        throw ConfigError("unknown initial state '" + initial + "'", "initial", initial_line);
    }
    if (superposition) {
        if (!has("theta_deg")) {
            throw ConfigError("superposition needs theta_deg", "theta_deg", initial_line);
        }
        s.theta_deg = number("theta_deg", 0.0);
        s.phi_deg = number("phi_deg", 0.0);
        s.initial = init::Superposition{s.theta_deg * kDegree, s.phi_deg * kDegree};
    } else {
        for (const char* key : {"theta_deg", "phi_deg"}) {
            if (has(key)) {
                throw ConfigError("only used with initial = superposition", key, line_of(key));
            }
        }
    }
    if (s.engine == Engine::chain) {
        require(!std::holds_alternative<init::Superposition>(s.initial) &&
                    !std::holds_alternative<init::BothExcited>(s.initial) &&
                    !std::holds_alternative<init::DSExcited>(s.initial),
                "initial", "chain runs take ground, siteN or stationaryN");
    }
    if (s.engine == Engine::direct) {
        require(!std::holds_alternative<init::DSExcited>(s.initial), "initial", "the direct scheme has no detector");
    }
    return s;
}

std::string render(const Scenario& s) {
    std::ostringstream out;
    auto put = [&](const char* key, const std::string& value) { out << key << " = " << value << '\n'; };
    auto num = [&](const char* key, double v) { put(key, format_exact(v)); };
    put("engine", engine_name(s.engine));
    if (s.engine == Engine::chain) {
        std::string list;
        for (double e : s.chain.site_energies) {
            list += (list.empty() ? "" : ", ") + format_exact(e);
        }
        put("site_energies", list);
        put("measured_site", std::to_string(s.chain.measured_site + 1));
        num("j", s.chain.j);
        num("jd", s.chain.jd);
        num("gamma", s.chain.gamma);
        num("delta", s.chain.delta);
        num("eps_d_detuning", s.chain.eps_d_detuning);
    } else {
        num("omega21", s.model.omega21);
        num("j", s.model.j);
        num("jd", s.model.jd);
        num("gamma", s.model.gamma);
        num("delta", s.model.delta);
        if (s.engine == Engine::full || s.engine == Engine::correlators) {
            num("eps_d_detuning", s.model.eps_d_detuning);
        }
    }
    if (s.sweep) {
        num("sweep_start", s.sweep->detuning_start);
        num("sweep_end", s.sweep->detuning_end);
        num("sweep_duration", s.sweep->duration);
    }
    put("initial", describe(s.initial));
    if (std::holds_alternative<init::Superposition>(s.initial)) {
        num("theta_deg", s.theta_deg);
        num("phi_deg", s.phi_deg);
    }
    num("t_max", s.grid.t_max);
    put("n_points", std::to_string(s.grid.n_points));
    put("spacing", s.grid.spacing == Spacing::linear ? "linear" : "log");
    num("rel_tol", s.rel_tol);
    if (!s.out.empty()) {
        put("out", s.out);
    }
    return out.str();
}

bool is_preset(const std::string& name) { return name == "fig2a" || name == "fig2b" || name == "fig3"; }

Scenario preset(const std::string& name) {
    Scenario s;
    s.model = ModelParams{4.0, 0.5, 0.5, 1.0};
    if (name == "fig2a") {
        s.engine = Engine::full;
        s.initial = init::Stationary{1};
        s.grid = {60.0, 601, Spacing::linear};
    } else if (name == "fig2b") {
        s.engine = Engine::correlators;
        s.initial = init::Stationary{2};
        s.grid = {3e5, 2001, Spacing::log};
    } else if (name == "fig3") {
        s.engine = Engine::full;
        s.theta_deg = 45.0;
        s.initial = init::Superposition{s.theta_deg * kDegree, 0.0};
        s.grid = {160.0, 1601, Spacing::linear};
    } else {
        throw ConfigError("unknown preset '" + name + "'", "preset", 0);
    }
    return s;
}

std::vector<Scenario> preset_runs(const std::string& name) {
    std::vector<Scenario> runs{preset(name)};
    if (name == "fig3") {
        Scenario second = runs.front();
        second.theta_deg = 60.0;
        second.initial = init::Superposition{second.theta_deg * kDegree, 0.0};
        runs.push_back(second);
    }
    return runs;
}

FitWindows preset_fit_windows(double gamma) {
    FitWindows w;
    w.w1 = {10.0 / gamma, 40.0 / gamma};
    w.w2 = std::make_pair(1e4 / gamma, 1e5 / gamma);
    return w;
}

FitResult fit_decay_rate(const SignalTrace& trace, std::pair<double, double> window, double plateau) {
    const auto [ta, tb] = window;
    if (trace.times.empty() || !(ta < tb) || ta < trace.times.front() || tb > trace.times.back()) {
        throw FitError("fit window lies outside the trace");
    }
    double n = 0.0;
    double sx = 0.0;
    double sy = 0.0;
    double sxx = 0.0;
    double sxy = 0.0;
    std::vector<std::pair<double, double>> pts;
    for (std::size_t i = 0; i < trace.times.size(); ++i) {
        const double t = trace.times[i];
        if (t < ta || t > tb) {
            continue;
        }
        const double gap = plateau - trace.r[i];
        if (!(gap > 0.0)) {
            throw FitError("nonpositive gap at t = " + std::to_string(t) + ": window past saturation");
        }
        const double y = std::log(gap);
        pts.emplace_back(t, gap);
        n += 1.0;
        sx += t;
        sy += y;
        sxx += t * t;
        sxy += t * y;
    }
    if (pts.size() < 2) {
        throw FitError("fewer than two samples in the fit window");
    }
    const double denom = n * sxx - sx * sx;
    const double slope = (n * sxy - sx * sy) / denom;
    const double intercept = (sy - slope * sx) / n;
    const double gap0 = plateau - trace.r.front();
    if (!(gap0 > 0.0)) {
        throw FitError("nonpositive initial gap");
    }
    FitResult f;
    f.rate = -slope;
    f.log_shift = intercept - std::log(gap0);
    f.shift = f.log_shift / f.rate;
    f.points = pts.size();
    for (const auto& [t, gap] : pts) {
        f.residual = std::max(f.residual, std::abs(std::exp(intercept + slope * t) / gap - 1.0));
    }
    return f;
}

RunResult run_scenario(const Scenario& s, const FitWindows& windows) {
    const auto times = s.grid.points();
    RunResult result;
    Summary& sum = result.summary;
    add_text(sum, "engine", engine_name(s.engine));
    add_text(sum, "initial", describe(s.initial));

    try {
        if (s.engine == Engine::chain) {
            const auto& c = s.chain;
            result.trace = simulate_chain(s.initial, c, times, s.rel_tol);
            const Eigen::VectorXd target = chain_stationary_amplitudes(c, static_cast<int>(c.measured_site) + 1);
            double weight = 0.0;
            if (const auto* st = std::get_if<init::Stationary>(&s.initial)) {
                weight = std::pow(target.dot(chain_stationary_amplitudes(c, st->index)), 2);
            } else if (const auto* site = std::get_if<init::SiteExcited>(&s.initial)) {
                weight = target(site->site - 1) * target(site->site - 1);
            }
            const double w1 = c.jd * c.jd / (2.0 * c.gamma);
            for (double t : times) {
                result.trace.r_asymptotic.push_back(weight * -std::expm1(-w1 * t));
            }
            add_count(sum, "n_sites", static_cast<long long>(c.n_sites()));
            add_count(sum, "measured_site", static_cast<long long>(c.measured_site + 1));
            add(sum, "w1", w1);
            add(sum, "measured_weight", weight);
        } else {
            const ModelParams& p = s.model;
            const auto regime = validate_regime(p);
            result.warnings = regime.warnings;
            switch (s.engine) {
            case Engine::full:
                result.trace = simulate_full(s.initial, p, times, s.rel_tol);
                break;
            case Engine::correlators:
                result.trace = simulate_correlators(s.initial, p, times);
                break;
            case Engine::direct:
                result.trace = direct_damping_evolve(s.initial, p, times, s.rel_tol);
                break;
            case Engine::sweep:
                result.trace =
                    evolve_with_sweep(initial_state(s.initial, p, FockBasis::two_qubit()), p, *s.sweep, times, s.rel_tol);
                break;
            case Engine::chain:
                break;
            }
            const bool ds = std::holds_alternative<init::DSExcited>(s.initial);
            const Populations pops = ds ? Populations{} : populations_of(s);
            const auto rates = decay_rates(p);
            for (double t : times) {
                double r = 0.0;
                if (s.engine == Engine::direct) {
                    r = direct_scheme_signal(pops, p, t);
                } else if (s.engine == Engine::sweep) {
                    r = sweep_signal(pops, p, *s.sweep, t);
                } else if (ds) {
                    r = detector_decay_signal(p, t);
                } else {
                    r = asymptotic_signal(pops, rates, t);
                }
                result.trace.r_asymptotic.push_back(r);
            }
            add(sum, "omega21", p.omega21);
            add(sum, "j", p.j);
            add(sum, "jd", p.jd);
            add(sum, "gamma", p.gamma);
            add(sum, "delta", p.delta);
            if (p.jd > 0.0 && p.j > 0.0) {
                add_rates(sum, p);
            }
            add(sum, "p1", pops.p1);
            add(sum, "p2", pops.p2);

            if (s.engine == Engine::full || s.engine == Engine::correlators) {
                const auto slow = slow_rates(one_excitation_generator(p));
                add(sum, "spectral_w1", slow.resonant);
                add(sum, "spectral_w2", slow.detuned);
                std::optional<FitResult> fit1;
                std::optional<FitResult> fit2;
                if (pops.p1 > 1e-6 && !ds) {
                    fit1 = try_fit(result.trace, windows.w1, pops.p1);
                }
                if (pops.p2 > 1e-6 && !ds && rates.w2 > 0.0) {
                    const auto w2_window =
                        windows.w2.value_or(std::make_pair(0.3 / rates.w2, 3.0 / rates.w2));
                    fit2 = try_fit(result.trace, w2_window, pops.two_excitation ? 2.0 : pops.p1 + pops.p2);
                }
                add_fit(sum, "fitted_w1", fit1);
                add_fit(sum, "fitted_w2", fit2);
                add(sum, "small_time_slope", small_time_slope(s));
            }
            if (s.engine == Engine::sweep) {
                add(sum, "sweep_start", s.sweep->detuning_start);
                add(sum, "sweep_end", s.sweep->detuning_end);
                add(sum, "sweep_duration", s.sweep->duration);
            }
        }
    } catch (const std::domain_error& e) {
        throw ConfigError(e.what(), "initial", 0);
    }

    const auto& tr = result.trace;
    const auto check = check_trace(tr);
    add(sum, "t_final", tr.times.back());
    add(sum, "r_final", tr.r.back());
    add(sum, "r_asymptotic_final", tr.r_asymptotic.back());
    add(sum, "max_deviation", max_abs_difference(tr.r, tr.r_asymptotic));
    add(sum, "identity_error", check.identity_error);
    add(sum, "quadrature_error", max_abs_difference(tr.r, tr.r_quadrature));
    add(sum, "monotonicity_violation", check.worst_decrease);
    add_warnings(sum, result.warnings);
    return result;
}

Comparison compare(const Scenario& s) {
    if (s.engine != Engine::full && s.engine != Engine::correlators) {
        throw ConfigError("compare needs the full or correlators engine", "engine", 0);
    }
    if (!is_qubit_one_excitation(s.initial)) {
        throw ConfigError("compare needs a one-excitation qubit state", "initial", 0);
    }
    const ModelParams& p = s.model;
    Comparison c;
    c.warnings = validate_regime(p).warnings;
    const auto times = s.grid.points();
    const auto full = simulate_full(s.initial, p, times, s.rel_tol);
    const auto corr = simulate_correlators(s.initial, p, times);
    c.oracle_discrepancy = max_abs_difference(full.r, corr.r);

    const auto a = asymptotic_report(p);
    const Populations pops = overlap_populations(s.initial, p);
    const Generator gen = one_excitation_generator(p);
    const auto slow = slow_rates(gen);

    // Resonant rate from Stationary(1) on the fixed window, detuned rate from
    // Stationary(2) on a window scaled by the analytic W2.
    const FitWindows windows = preset_fit_windows(p.gamma);
    const auto st1 = simulate_correlators(init::Stationary{1}, p, linear_grid(1.25 * windows.w1.second, 501));
    const auto fit1 = try_fit(st1, windows.w1, 1.0);
    TimeGrid log_grid{10.0 / a.rates.w2, 1201, Spacing::log};
    const auto st2 = simulate_correlators(init::Stationary{2}, p, log_grid.points());
    const auto fit2 = try_fit(st2, {0.3 / a.rates.w2, 3.0 / a.rates.w2}, 1.0);

    c.plateau_time = std::sqrt(a.window.t_min * a.window.t_max);
    const StateVector x0 = correlator_initial_state(s.initial, p, Sector::one_excitation);
    const double r_star = correlator_signal(gen, x0, c.plateau_time);
    c.plateau_error = std::abs(r_star - pops.p1);
    const double continuous_false_click =
        correlator_signal(gen, correlator_initial_state(init::Stationary{2}, p, Sector::one_excitation), c.plateau_time);

    double phi = 0.0;
    if (const auto* sup = std::get_if<init::Superposition>(&s.initial)) {
        phi = sup->phi;
    }
    const double p_norm = pops.p1 + pops.p2;
    const double projective = projective_reference(pops.p1 / p_norm, pops.p2 / p_norm, phi, p);
    c.projective_error = std::abs(projective - pops.p1);
    c.improvement_ratio = c.projective_error / c.plateau_error;

    // Direct damping: time for Stationary(1) to be seen with the target
    // confidence, and the Stationary(2) signal accumulated by then.
    const auto direct_times = linear_grid(30.0 / p.gamma, 3001);
    const auto d1 = direct_damping_evolve(init::Stationary{1}, p, direct_times, s.rel_tol);
    const auto d2 = direct_damping_evolve(init::Stationary{2}, p, direct_times, s.rel_tol);
    c.direct_detection_time = kNaN;
    c.direct_false_click = kNaN;
    for (std::size_t i = 1; i < d1.r.size(); ++i) {
        if (d1.r[i] >= direct_confidence) {
            const double w = (direct_confidence - d1.r[i - 1]) / (d1.r[i] - d1.r[i - 1]);
            c.direct_detection_time = direct_times[i - 1] + w * (direct_times[i] - direct_times[i - 1]);
            c.direct_false_click = d2.r_at(c.direct_detection_time);
            break;
        }
    }
    const auto ds = direct_scheme_estimates(p);

    Summary& sum = c.summary;
    add_text(sum, "engine", engine_name(s.engine));
    add_text(sum, "initial", describe(s.initial));
    add_rates(sum, p);
    add(sum, "p1", pops.p1);
    add(sum, "p2", pops.p2);
    add(sum, "oracle_discrepancy", c.oracle_discrepancy);
    add(sum, "spectral_w1", slow.resonant);
    add(sum, "spectral_w2", slow.detuned);
    add_fit(sum, "fitted_w1", fit1);
    add_fit(sum, "fitted_w2", fit2);
    add(sum, "fitted_w1_relative_error", fit1 ? fit1->rate / a.rates.w1 - 1.0 : kNaN);
    add(sum, "fitted_w2_relative_error", fit2 ? fit2->rate / a.rates.w2 - 1.0 : kNaN);
    add(sum, "plateau_time", c.plateau_time);
    add(sum, "plateau_signal", r_star);
    add(sum, "plateau_error", c.plateau_error);
    add(sum, "projective_probability", projective);
    add(sum, "projective_error", c.projective_error);
    add(sum, "improvement_ratio", c.improvement_ratio);
    add(sum, "continuous_false_click", continuous_false_click);
    add(sum, "direct_confidence", direct_confidence);
    add(sum, "direct_detection_time", c.direct_detection_time);
    add(sum, "direct_false_click", c.direct_false_click);
    add(sum, "direct_false_click_floor", ds.false_click_floor);
    add(sum, "direct_slow_rate_estimate", ds.slow_rate_estimate);
    add(sum, "direct_over_continuous_false_click", c.direct_false_click / continuous_false_click);
    add(sum, "direct_over_projective_floor", c.direct_false_click / (0.5 * ds.false_click_floor));
    add_warnings(sum, c.warnings);
    return c;
}

Summary rates_summary(const ModelParams& p) {
    check_params(p);
    Summary sum;
    add(sum, "omega21", p.omega21);
    add(sum, "j", p.j);
    add(sum, "jd", p.jd);
    add(sum, "gamma", p.gamma);
    add(sum, "delta", p.delta);
    add_rates(sum, p);
    const auto slow = slow_rates(one_excitation_generator(p));
    add(sum, "spectral_w1", slow.resonant);
    add(sum, "spectral_w2", slow.detuned);
    const auto ds = direct_scheme_estimates(p);
    add(sum, "direct_fast_rate", ds.fast_rate);
    add(sum, "direct_slow_rate_estimate", ds.slow_rate_estimate);
    add(sum, "direct_false_click_floor", ds.false_click_floor);
    add_flag(sum, "direct_order_of_magnitude", ds.order_of_magnitude);
    const auto regime = validate_regime(p);
    for (const auto& r : regime.ratios) {
        add(sum, "ratio_" + r.name, r.value);
    }
    add_flag(sum, "deep_regime", regime.deep);
    add_warnings(sum, regime.warnings);
    return sum;
}

} // namespace readout
