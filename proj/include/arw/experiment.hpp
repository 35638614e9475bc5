#pragma once

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <type_traits>
#include <utility>
#include <vector>

#include <json.hpp>

#include "common.hpp"
#include "initial_law.hpp"
#include "kernel.hpp"
#include "sitewise.hpp"

namespace arw {

using Json = nlohmann::ordered_json;

/// Dimension-erased jump distribution, as read from a spec file.
struct KernelSpec {
    int dim = 1;
    std::vector<std::pair<std::vector<std::int64_t>, double>> support;
    std::optional<std::vector<std::int64_t>> bias;
};

/// Initial particle law: kind plus its mean parameter; "empirical" draws
/// uniformly from the listed counts instead.
struct LawSpec {
    std::string kind = "poisson";
    double mu = 1.0;
    std::vector<std::int64_t> counts;
};

struct GuardSpec {
    std::int64_t topplings = kDefaultTopplingBudget;
    std::int64_t events = 10'000'000;
    std::int64_t population = 10'000'000;
    std::int64_t max_steps = 1'000'000;
};

/// Everything a run needs; a spec plus the library version determines
/// every output byte outside the metadata field.
struct ExperimentSpec {
    KernelSpec kernel;
    double lambda = 1.0;
    std::optional<std::vector<std::int64_t>> direction;
    LawSpec law;
    std::vector<std::int64_t> radii{8};
    std::string strategy = "greedy";
    std::optional<double> horizon;  ///< absent = run to absorption
    std::string l_rule = "log";     ///< L_n choice for reach experiments
    std::int64_t k_tail = 0;        ///< truncation of the initial-law tail
    std::int64_t samples = 10'000;
    std::int64_t replicas = 100;
    std::uint64_t seed = 1;
    std::string out;  ///< output path; empty writes to stdout
    GuardSpec guards;
};

inline Json kernel_to_json(const KernelSpec& k) {
    Json j;
    j["dim"] = k.dim;
    Json support = Json::array();
    for (const auto& [offset, p] : k.support) support.push_back(Json{{"offset", offset}, {"p", p}});
    j["support"] = std::move(support);
    if (k.bias) j["bias"] = *k.bias;
    return j;
}

inline KernelSpec kernel_from_json(const Json& j) {
    KernelSpec k;
    k.dim = j.at("dim").get<int>();
    for (const auto& entry : j.at("support"))
        k.support.emplace_back(entry.at("offset").get<std::vector<std::int64_t>>(),
                               entry.at("p").get<double>());
    if (j.contains("bias")) k.bias = j.at("bias").get<std::vector<std::int64_t>>();
    return k;
}

inline Json spec_to_json(const ExperimentSpec& s) {
    Json j;
    j["schema"] = "arw-experiment-1";
    j["kernel"] = kernel_to_json(s.kernel);
    j["lambda"] = s.lambda;
    if (s.direction) j["direction"] = *s.direction;
    Json law;
    law["kind"] = s.law.kind;
    if (s.law.kind == "empirical") law["counts"] = s.law.counts;
    else law["mu"] = s.law.mu;
    j["law"] = std::move(law);
    j["radii"] = s.radii;
    j["strategy"] = s.strategy;
    if (s.horizon) j["horizon"] = *s.horizon;
    j["l_rule"] = s.l_rule;
    j["k_tail"] = s.k_tail;
    j["samples"] = s.samples;
    j["replicas"] = s.replicas;
    j["seed"] = s.seed;
    j["out"] = s.out;
    Json guards;
    guards["topplings"] = s.guards.topplings;
    guards["events"] = s.guards.events;
    guards["population"] = s.guards.population;
    guards["max_steps"] = s.guards.max_steps;
    j["guards"] = std::move(guards);
    return j;
}

inline ExperimentSpec spec_from_json(const Json& j) {
    ExperimentSpec s;
    try {
        if (j.contains("schema") && j.at("schema").get<std::string>() != "arw-experiment-1")
            throw ValidationError("unsupported spec schema");
        s.kernel = kernel_from_json(j.at("kernel"));
        if (j.contains("lambda")) s.lambda = j.at("lambda").get<double>();
        if (j.contains("direction"))
            s.direction = j.at("direction").get<std::vector<std::int64_t>>();
        if (j.contains("law")) {
            const Json& law = j.at("law");
            s.law.kind = law.at("kind").get<std::string>();
            if (law.contains("mu")) s.law.mu = law.at("mu").get<double>();
            if (law.contains("counts"))
                s.law.counts = law.at("counts").get<std::vector<std::int64_t>>();
        }
        if (j.contains("radii")) s.radii = j.at("radii").get<std::vector<std::int64_t>>();
        if (j.contains("strategy")) s.strategy = j.at("strategy").get<std::string>();
        if (j.contains("horizon")) s.horizon = j.at("horizon").get<double>();
        if (j.contains("l_rule")) s.l_rule = j.at("l_rule").get<std::string>();
        if (j.contains("k_tail")) s.k_tail = j.at("k_tail").get<std::int64_t>();
        if (j.contains("samples")) s.samples = j.at("samples").get<std::int64_t>();
        if (j.contains("replicas")) s.replicas = j.at("replicas").get<std::int64_t>();
        if (j.contains("seed")) s.seed = j.at("seed").get<std::uint64_t>();
        if (j.contains("out")) s.out = j.at("out").get<std::string>();
        if (j.contains("guards")) {
            const Json& g = j.at("guards");
            if (g.contains("topplings")) s.guards.topplings = g.at("topplings").get<std::int64_t>();
            if (g.contains("events")) s.guards.events = g.at("events").get<std::int64_t>();
            if (g.contains("population"))
                s.guards.population = g.at("population").get<std::int64_t>();
            if (g.contains("max_steps")) s.guards.max_steps = g.at("max_steps").get<std::int64_t>();
        }
    } catch (const Json::exception& e) {
        throw ValidationError(std::string("malformed spec: ") + e.what());
    }
    return s;
}

inline ExperimentSpec spec_from_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ValidationError("cannot open spec file: " + path);
    Json j;
    try {
        in >> j;
    } catch (const Json::exception& e) {
        throw ValidationError(std::string("spec is not valid JSON: ") + e.what());
    }
    return spec_from_json(j);
}

/// Stable fingerprint of a spec (FNV-1a over its canonical serialization);
/// checkpoints refuse to resume under a different spec.
inline std::string spec_hash(const ExperimentSpec& s) {
    const std::string bytes = spec_to_json(s).dump();
    std::uint64_t h = 14695981039346656037ull;
    for (const unsigned char c : bytes) {
        h ^= c;
        h *= 1099511628211ull;
    }
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

/// Calls f with std::integral_constant<int, dim>; the lattice dimension is
/// a template parameter everywhere else.
template <class F>
decltype(auto) with_dim(int dim, F&& f) {
    switch (dim) {
        case 1: return f(std::integral_constant<int, 1>{});
        case 2: return f(std::integral_constant<int, 2>{});
        case 3: return f(std::integral_constant<int, 3>{});
        case 4: return f(std::integral_constant<int, 4>{});
        default: throw ValidationError("dimension must be between 1 and 4");
    }
}

template <int D>
Site<D> site_from_coords(const std::vector<std::int64_t>& coords) {
    if (coords.size() != static_cast<std::size_t>(D))
        throw ValidationError("coordinate list does not match the lattice dimension");
    Site<D> x{};
    for (int k = 0; k < D; ++k) x[k] = coords[static_cast<std::size_t>(k)];
    return x;
}

template <int D>
JumpKernel<D> make_kernel(const KernelSpec& spec) {
    if (spec.dim != D) throw ValidationError("kernel dimension mismatch");
    std::vector<Site<D>> offsets;
    std::vector<double> probs;
    for (const auto& [coords, p] : spec.support) {
        offsets.push_back(site_from_coords<D>(coords));
        probs.push_back(p);
    }
    std::optional<Site<D>> bias;
    if (spec.bias) bias = site_from_coords<D>(*spec.bias);
    return JumpKernel<D>(std::move(offsets), std::move(probs), bias);
}

inline InitialLaw make_law(const LawSpec& spec) {
    if (spec.kind == "constant") {
        const auto n = static_cast<std::int64_t>(std::llround(spec.mu));
        if (std::abs(spec.mu - static_cast<double>(n)) > 1e-9)
            throw ValidationError("constant law needs an integer mu");
        return InitialLaw::constant(n);
    }
    if (spec.kind == "bernoulli") return InitialLaw::bernoulli(spec.mu);
    if (spec.kind == "poisson") return InitialLaw::poisson(spec.mu);
    if (spec.kind == "empirical") return InitialLaw::empirical(spec.counts);
    throw ValidationError("unknown initial law: " + spec.kind);
}

/// Mean particle density of the law, used by the activity criterion.
inline double law_mean(const LawSpec& spec) {
    if (spec.kind == "empirical") {
        if (spec.counts.empty()) throw ValidationError("empirical law needs counts");
        double s = 0.0;
        for (const std::int64_t c : spec.counts) s += static_cast<double>(c);
        return s / static_cast<double>(spec.counts.size());
    }
    return spec.mu;
}

inline KernelSpec kernel_spec_1d(double p_right) {
    KernelSpec k;
    k.dim = 1;
    if (p_right >= 1.0) {
        k.support = {{{+1}, 1.0}};
    } else {
        k.support = {{{+1}, p_right}, {{-1}, 1.0 - p_right}};
    }
    k.bias = std::vector<std::int64_t>{+1};
    return k;
}

inline KernelSpec kernel_spec_symmetric(int dim) {
    KernelSpec k;
    k.dim = dim;
    for (int axis = 0; axis < dim; ++axis) {
        for (int sgn : {-1, +1}) {
            std::vector<std::int64_t> e(static_cast<std::size_t>(dim), 0);
            e[static_cast<std::size_t>(axis)] = sgn;
            k.support.emplace_back(std::move(e), 1.0 / (2.0 * dim));
        }
    }
    return k;
}

}  // namespace arw
