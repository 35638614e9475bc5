#pragma once

#include <chrono>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <ostream>
#include <string>
#include <utility>
#include <vector>

#include "csv.hpp"
#include "estimators.hpp"
#include "experiment.hpp"
#include "verify.hpp"

namespace arw {

struct CommandResult {
    Json report;
    std::string csv;  ///< bulk numeric output; empty when the command has none
};

namespace detail {

class WallTimer {
  public:
    double seconds() const {
        return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_)
            .count();
    }

  private:
    std::chrono::steady_clock::time_point start_ = std::chrono::steady_clock::now();
};

inline Json meta_json(const WallTimer& timer) {
    Json meta;
    meta["version"] = kVersion;
    meta["wall_seconds"] = timer.seconds();
    return meta;
}

template <int D>
Json site_json(const Site<D>& x) {
    Json j = Json::array();
    for (int k = 0; k < D; ++k) j.push_back(x[k]);
    return j;
}

inline Json estimate_json(const FEstimate& f) {
    Json j;
    j["estimate"] = f.estimate;
    j["lower"] = f.lower;
    j["upper"] = f.upper;
    j["std_error"] = f.std_error;
    j["residual"] = f.residual;
    j["samples"] = f.samples;
    j["truncated"] = f.truncated;
    j["method"] = f.method == FMethod::MonteCarlo ? "mc" : "exact";
    return j;
}

inline Json point_json(const CurvePoint& p) {
    Json j;
    j["n"] = p.radius;
    j["volume"] = p.volume;
    j["mean"] = p.mean;
    j["stderr"] = p.std_error;
    j["replicas"] = p.replicas;
    return j;
}

inline CurvePoint point_from_json(const Json& j) {
    CurvePoint p;
    p.radius = j.at("n").get<std::int64_t>();
    p.volume = j.at("volume").get<std::int64_t>();
    p.mean = j.at("mean").get<double>();
    p.std_error = j.at("stderr").get<double>();
    p.replicas = j.at("replicas").get<std::int64_t>();
    return p;
}

}  // namespace detail

/// One seeded stabilization run (replica 0 of the sweep keying, so a sweep
/// cell can be reproduced exactly); writes report JSON plus a site table.
inline CommandResult run_stabilize(const ExperimentSpec& spec) {
    if (spec.radii.empty()) throw ValidationError("stabilize needs a window radius");
    const detail::WallTimer timer;
    return with_dim(spec.kernel.dim, [&](auto dim) {
        constexpr int D = decltype(dim)::value;
        const JumpKernel<D> kernel = make_kernel<D>(spec.kernel);
        const InitialLaw law = make_law(spec.law);
        const Strategy strategy = parse_strategy(spec.strategy);
        const std::int64_t radius = spec.radii.front();
        if (radius < 0) throw ValidationError("window radius must be nonnegative");
        const StreamKey base = StreamKey::root(spec.seed);
        const auto report = sweep_replica(kernel, spec.lambda, law, radius, strategy,
                                          sweep_replica_key<D>(base, radius, 0),
                                          spec.guards.topplings);

        CommandResult out;
        out.report["schema"] = "arw-stabilize-1";
        out.report["spec"] = spec_to_json(spec);
        out.report["radius"] = radius;
        out.report["volume"] = Box<D>(radius).volume();
        out.report["initial_particles"] = report.initial_particles;
        out.report["exits"] = report.exit_count;
        out.report["exit_density"] = static_cast<double>(report.exit_count) /
                                     static_cast<double>(Box<D>(radius).volume());
        out.report["topplings"] = report.topplings;
        out.report["sleeping"] = report.left_behind;
        Json exited = Json::array();
        for (const auto& [site, n] : report.final_config.exited())
            exited.push_back(Json{{"site", detail::site_json<D>(site)}, {"n", n}});
        out.report["exited"] = std::move(exited);
        out.report["meta"] = detail::meta_json(timer);
        out.csv = site_table_csv(report);
        return out;
    });
}

/// Exit-density curve over the spec's radii.  Completed radii are saved to
/// "<out>.ckpt.json" as they finish, and a rerun of the same spec resumes
/// from that file instead of recomputing.
inline CommandResult run_sweep(const ExperimentSpec& spec, std::ostream* progress = nullptr,
                               int threads = 1) {
    if (spec.radii.empty()) throw ValidationError("sweep needs at least one radius");
    const detail::WallTimer timer;
    const std::string hash = spec_hash(spec);
    const std::string ckpt_path = spec.out.empty() ? "" : spec.out + ".ckpt.json";

    std::map<std::int64_t, CurvePoint> done;
    if (!ckpt_path.empty() && std::filesystem::exists(ckpt_path)) {
        std::ifstream in(ckpt_path);
        Json j;
        try {
            in >> j;
            if (j.at("hash").get<std::string>() == hash)
                for (const auto& entry : j.at("points")) {
                    const CurvePoint p = detail::point_from_json(entry);
                    done[p.radius] = p;
                }
        } catch (const Json::exception&) {
            // Unreadable checkpoint: recompute everything.
            done.clear();
        }
    }
    const auto save_checkpoint = [&]() {
        if (ckpt_path.empty()) return;
        Json j;
        j["schema"] = "arw-sweep-ckpt-1";
        j["hash"] = hash;
        Json points = Json::array();
        for (const auto& [radius, p] : done) points.push_back(detail::point_json(p));
        j["points"] = std::move(points);
        std::ofstream out(ckpt_path);
        out << j.dump(2) << '\n';
    };

    return with_dim(spec.kernel.dim, [&](auto dim) {
        constexpr int D = decltype(dim)::value;
        const JumpKernel<D> kernel = make_kernel<D>(spec.kernel);
        const InitialLaw law = make_law(spec.law);
        const Strategy strategy = parse_strategy(spec.strategy);

        ExitDensityCurve curve;
        curve.strategy = strategy;
        curve.seed = spec.seed;
        for (const std::int64_t radius : spec.radii) {
            const auto it = done.find(radius);
            if (it != done.end()) {
                curve.points.push_back(it->second);
                if (progress)
                    *progress << "radius " << radius << ": resumed from checkpoint\n";
                continue;
            }
            const auto partial =
                exit_density_sweep(kernel, spec.lambda, law, {radius}, spec.replicas,
                                   strategy, spec.seed, spec.guards.topplings, threads);
            const CurvePoint& p = partial.points.front();
            curve.points.push_back(p);
            done[radius] = p;
            save_checkpoint();
            if (progress)
                *progress << "radius " << radius << ": mean " << p.mean << " +- "
                          << p.std_error << " over " << p.replicas << " replicas\n";
        }
        if (!ckpt_path.empty()) std::filesystem::remove(ckpt_path);

        CommandResult out;
        out.report["schema"] = "arw-sweep-1";
        out.report["spec"] = spec_to_json(spec);
        Json points = Json::array();
        for (const CurvePoint& p : curve.points) points.push_back(detail::point_json(p));
        out.report["points"] = std::move(points);
        out.report["meta"] = detail::meta_json(timer);
        out.csv = curve_csv(curve);
        return out;
    });
}

/// Return-weight estimate F_v(lambda), by simulation, the absorbed-chain
/// bracket, or both; plus the activity criterion margin at the spec's
/// density.
inline CommandResult run_fv(const ExperimentSpec& spec, const std::string& method,
                            int threads = 1) {
    if (method != "mc" && method != "exact" && method != "both")
        throw ValidationError("fv method must be mc, exact, or both");
    const detail::WallTimer timer;
    return with_dim(spec.kernel.dim, [&](auto dim) {
        constexpr int D = decltype(dim)::value;
        const JumpKernel<D> kernel = make_kernel<D>(spec.kernel);
        Site<D> direction{};
        if (spec.direction) direction = site_from_coords<D>(*spec.direction);
        else if (kernel.bias()) direction = *kernel.bias();
        else throw ValidationError("fv needs a direction: set one or give the kernel a bias");

        std::optional<FEstimate> mc, exact;
        if (method != "exact")
            mc = estimate_return_weight_mc(kernel, direction, spec.lambda, spec.samples,
                                           StreamKey::root(spec.seed),
                                           spec.guards.max_steps, threads);
        if (method != "mc") exact = estimate_return_weight_exact(kernel, direction, spec.lambda);
        const FEstimate& primary = exact ? *exact : *mc;

        CommandResult out;
        out.report["schema"] = "arw-fv-1";
        out.report["spec"] = spec_to_json(spec);
        out.report["lambda"] = spec.lambda;
        out.report["direction"] = detail::site_json<D>(direction);
        out.report["estimate"] = primary.estimate;
        out.report["lower"] = primary.lower;
        out.report["upper"] = primary.upper;
        out.report["method"] = primary.method == FMethod::MonteCarlo ? "mc" : "exact";
        Json methods;
        if (mc) methods["mc"] = detail::estimate_json(*mc);
        if (exact) methods["exact"] = detail::estimate_json(*exact);
        out.report["methods"] = std::move(methods);
        if (mc && exact && mc->std_error > 0.0)
            out.report["agreement_sigma"] =
                std::abs(mc->estimate - exact->estimate) / mc->std_error;
        if (primary.drift_warning)
            out.report["drift_warning"] =
                "kernel drift along the direction is nonpositive; the walk returns "
                "almost surely and F decays to the truncation floor";

        const SustainedActivityCheck crit =
            sustained_activity_check(law_mean(spec.law), primary);
        Json criterion;
        criterion["mu"] = crit.mu;
        criterion["threshold_upper"] = crit.threshold_upper;
        criterion["threshold_lower"] = crit.threshold_lower;
        criterion["margin"] = crit.margin;
        criterion["certified"] = crit.certified;
        out.report["criterion"] = std::move(criterion);
        out.report["meta"] = detail::meta_json(timer);
        return out;
    });
}

struct VerifyOutput {
    Json report;
    std::string text;
    bool passed = false;
};

/// Named property suites with a fixed seed; text has one line per check.
inline VerifyOutput run_verify_command(const std::string& which, std::uint64_t seed) {
    const detail::WallTimer timer;
    const auto suites = run_verify(which, StreamKey::root(seed));
    VerifyOutput out;
    out.passed = true;
    out.report["schema"] = "arw-verify-1";
    out.report["seed"] = seed;
    Json jsuites = Json::array();
    for (const VerifySuite& suite : suites) {
        Json js;
        js["name"] = suite.name;
        js["passed"] = suite.passed();
        Json checks = Json::array();
        for (const VerifyCheck& check : suite.checks) {
            Json jc;
            jc["name"] = check.name;
            jc["passed"] = check.passed;
            jc["detail"] = check.detail;
            checks.push_back(std::move(jc));
            out.text += check.passed ? "[PASS] " : "[FAIL] ";
            out.text += suite.name + ": " + check.name + " -- " + check.detail + "\n";
        }
        js["checks"] = std::move(checks);
        jsuites.push_back(std::move(js));
        if (!suite.passed()) out.passed = false;
    }
    out.report["suites"] = std::move(jsuites);
    out.report["passed"] = out.passed;
    out.report["meta"] = detail::meta_json(timer);
    out.text += out.passed ? "all suites passed\n" : "suite failure\n";
    return out;
}

/// Computes the derived reference values the test suites check against and
/// writes them as fixture files; returns an index of what was written.
inline Json run_oracle(const std::string& dir) {
    const detail::WallTimer timer;
    std::filesystem::create_directories(dir);
    Json index;
    index["schema"] = "arw-oracle-1";
    index["fixtures"] = Json::array();

    // Fixture files hold derived reference values only; no timing metadata,
    // so regenerating them is byte-stable.
    const auto write_fixture = [&](const std::string& name, Json body) {
        const std::string path = (std::filesystem::path(dir) / name).string();
        std::ofstream out(path);
        if (!out) throw ValidationError("cannot write fixture: " + path);
        out << body.dump(2) << '\n';
        index["fixtures"].push_back(path);
    };

    // Deterministic right walk: every excursion leaves immediately, so the
    // return weight is exactly 1/(1+lambda).
    {
        Json body;
        body["schema"] = "arw-fixture-1";
        body["name"] = "deterministic_return_weight";
        const auto kernel = drifted_walk_1d(1.0);
        Json entries = Json::array();
        for (const double lambda : {0.1, 0.25, 1.0}) {
            const auto exact = estimate_return_weight_exact(kernel, Site<1>{1}, lambda);
            Json e;
            e["lambda"] = lambda;
            e["closed_form"] = 1.0 / (1.0 + lambda);
            e["exact"] = detail::estimate_json(exact);
            entries.push_back(std::move(e));
        }
        body["entries"] = std::move(entries);
        write_fixture("deterministic_return_weight.json", std::move(body));
    }

    // Biased nearest-neighbor walk: certified brackets from the absorbed
    // tridiagonal system, the reference for Monte Carlo agreement.
    {
        Json body;
        body["schema"] = "arw-fixture-1";
        body["name"] = "biased_return_weight";
        const auto kernel = drifted_walk_1d(0.75);
        Json entries = Json::array();
        for (const double lambda : {0.1, 0.2, 0.5}) {
            const auto exact = estimate_return_weight_exact(kernel, Site<1>{1}, lambda);
            Json e;
            e["lambda"] = lambda;
            e["exact"] = detail::estimate_json(exact);
            entries.push_back(std::move(e));
        }
        body["entries"] = std::move(entries);
        write_fixture("biased_return_weight.json", std::move(body));
    }

    // A single particle in the radius-0 window exits before sleeping with
    // probability 1/(1+lambda), whatever the kernel.
    {
        Json body;
        body["schema"] = "arw-fixture-1";
        body["name"] = "single_particle_exit";
        Json entries = Json::array();
        for (const double lambda : {0.1, 1.0, 5.0}) {
            Json e;
            e["lambda"] = lambda;
            e["mean_exits"] = 1.0 / (1.0 + lambda);
            entries.push_back(std::move(e));
        }
        body["entries"] = std::move(entries);
        write_fixture("single_particle_exit.json", std::move(body));
    }

    index["meta"] = detail::meta_json(timer);
    return index;
}

/// The documented exit-code mapping shared by every subcommand.
inline int exit_code_for(const std::exception& e) {
    if (dynamic_cast<const ValidationError*>(&e) != nullptr) return 2;
    if (dynamic_cast<const BudgetExceeded*>(&e) != nullptr) return 3;
    if (dynamic_cast<const PopulationGuard*>(&e) != nullptr) return 3;
    if (dynamic_cast<const TapeExhausted*>(&e) != nullptr) return 3;
    return 1;
}

}  // namespace arw
