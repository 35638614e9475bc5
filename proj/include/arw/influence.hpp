#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <set>
#include <vector>

#include "common.hpp"
#include "geometry.hpp"
#include "kernel.hpp"
#include "particlewise.hpp"
#include "rng.hpp"

namespace arw {

/// The sites whose labeled event history up to the horizon changes when one
/// particle is removed from the initial configuration.
template <int D>
struct InfluenceRecord {
    ParticleLabel<D> source;
    double horizon = 0.0;
    std::vector<Site<D>> influenced;  ///< sorted, duplicate-free

    bool contains(const Site<D>& z) const {
        return std::binary_search(influenced.begin(), influenced.end(), z);
    }
};

/// Runs the labeled dynamics twice from the same key — once with the full
/// configuration, once with the source particle removed while every other
/// particle keeps its own streams — and collects the sites where the two
/// per-site event logs differ.  The logs agree operation for operation
/// until the removal causally reaches a site, so the comparison is exact,
/// with no floating-point tolerance.  The source site itself always
/// differs through its initial occupancy, and a source index above the
/// initial count influences nothing.
template <int D>
InfluenceRecord<D> influence_set(const std::map<Site<D>, std::int64_t>& pi,
                                 const ParticleLabel<D>& source, double horizon,
                                 const JumpKernel<D>& kernel, double lambda, StreamKey key,
                                 std::int64_t event_budget = 100'000'000) {
    if (source.index < 1) throw ValidationError("particle indexes are 1-based");
    if (!(horizon >= 0.0) || !std::isfinite(horizon))
        throw ValidationError("influence horizon must be finite and nonnegative");

    InfluenceRecord<D> out;
    out.source = source;
    out.horizon = horizon;

    std::vector<ParticleLabel<D>> full, reduced;
    for (const auto& [x, n] : pi) {
        if (n < 0) throw ValidationError("particle counts must be nonnegative");
        for (std::int64_t i = 1; i <= n; ++i) {
            const ParticleLabel<D> label{x, static_cast<std::int32_t>(i)};
            full.push_back(label);
            if (!(label == source)) reduced.push_back(label);
        }
    }
    if (full.size() == reduced.size()) return out;  // source absent: nothing to remove

    LabeledOptions<D> options;
    options.horizon = horizon;
    options.event_budget = event_budget;
    LabeledSim<D> with(full, kernel, lambda, key, options);
    LabeledSim<D> without(reduced, kernel, lambda, key, options);
    with.run();
    without.run();

    std::set<Site<D>> differing;
    const auto& ha = with.histories();
    const auto& hb = without.histories();
    for (const auto& [z, log] : ha) {
        const auto it = hb.find(z);
        if (it == hb.end() ? !log.empty() : !(it->second == log)) differing.insert(z);
    }
    for (const auto& [z, log] : hb) {
        if (!log.empty() && ha.find(z) == ha.end()) differing.insert(z);
    }
    out.influenced.assign(differing.begin(), differing.end());
    return out;
}

} // namespace arw
