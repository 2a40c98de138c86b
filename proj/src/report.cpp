#include <cmath>
#include <cstdio>
#include <string>

#include <json.hpp>

#include "readout/scenario.hpp"

namespace readout {

namespace {

std::string json_number(double x) {
    if (!std::isfinite(x)) {
        return "null";
    }
    char buf[64];
    const double a = std::abs(x);
    if (a > 0.0 && a < 1e-3) {
        std::snprintf(buf, sizeof buf, "%.12e", x);
    } else {
        std::snprintf(buf, sizeof buf, "%.15g", x);
    }
    return buf;
}

std::string csv_number(double x) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.15g", x);
    return buf;
}

} // namespace

std::string to_json(const Summary& summary) {
    std::string out = "{";
    bool first = true;
    for (const auto& field : summary) {
        out += first ? "\n  " : ",\n  ";
        first = false;
        out += nlohmann::json(field.key).dump() + ": ";
        if (const auto* d = std::get_if<double>(&field.value)) {
            out += json_number(*d);
        } else if (const auto* n = std::get_if<long long>(&field.value)) {
            out += std::to_string(*n);
        } else if (const auto* b = std::get_if<bool>(&field.value)) {
            out += *b ? "true" : "false";
        } else {
            out += nlohmann::json(std::get<std::string>(field.value)).dump();
        }
    }
    out += first ? "}\n" : "\n}\n";
    return out;
}

std::string to_csv(const SignalTrace& trace) {
    std::string out = "t,R,R_asymptotic,rho11,rho22,rhoDD\n";
    auto at = [](const std::vector<double>& v, std::size_t i) { return i < v.size() ? v[i] : NAN; };
    for (std::size_t i = 0; i < trace.times.size(); ++i) {
        out += csv_number(trace.times[i]);
        for (const auto* column : {&trace.r, &trace.r_asymptotic, &trace.rho11, &trace.rho22, &trace.rho_dd}) {
            out += ',';
            out += csv_number(at(*column, i));
        }
        out += '\n';
    }
    return out;
}

} // namespace readout
