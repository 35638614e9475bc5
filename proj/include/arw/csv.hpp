#pragma once

#include <charconv>
#include <cstdint>
#include <string>

#include "common.hpp"
#include "estimators.hpp"
#include "sitewise.hpp"

namespace arw {

/// Shortest decimal form that parses back to the same double, so repeated
/// runs of one spec produce byte-identical files.
inline std::string csv_number(double v) {
    char buf[32];
    const auto res = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, res.ptr);
}

inline std::string csv_number(std::int64_t v) { return std::to_string(v); }

/// Exit-density curve in the documented column order.
inline std::string curve_csv(const ExitDensityCurve& curve) {
    std::string out = "n,volume,mean,stderr,replicas,strategy,seed\n";
    for (const CurvePoint& p : curve.points) {
        out += csv_number(p.radius);
        out += ',';
        out += csv_number(p.volume);
        out += ',';
        out += csv_number(p.mean);
        out += ',';
        out += csv_number(p.std_error);
        out += ',';
        out += csv_number(p.replicas);
        out += ',';
        out += strategy_name(curve.strategy);
        out += ',';
        out += std::to_string(curve.seed);
        out += '\n';
    }
    return out;
}

/// Per-site table of a stabilized configuration: coordinates, final count,
/// sleep flag, and the odometer reading.
template <int D>
std::string site_table_csv(const StabilizationReport<D>& report) {
    std::string out;
    for (int k = 0; k < D; ++k) {
        out += 'x';
        out += std::to_string(k + 1);
        out += ',';
    }
    out += "count,sleeping,topplings\n";
    const SiteConfiguration<D>& config = report.final_config;
    for (const Site<D>& x : config.window().sites()) {
        for (int k = 0; k < D; ++k) {
            out += std::to_string(x[k]);
            out += ',';
        }
        out += std::to_string(config.count(x));
        out += ',';
        out += config.sleeping(x) ? '1' : '0';
        out += ',';
        out += std::to_string(report.odometer.at(x));
        out += '\n';
    }
    return out;
}

}  // namespace arw
