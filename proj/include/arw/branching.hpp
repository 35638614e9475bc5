#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <queue>
#include <set>
#include <utility>
#include <vector>

#include "common.hpp"
#include "geometry.hpp"
#include "kernel.hpp"
#include "rng.hpp"

namespace arw {

enum class BranchState : std::uint8_t { Mover = 0, Trail = 1 };

inline const char* branch_state_name(BranchState s) {
    return s == BranchState::Mover ? "mover" : "trail";
}

enum class BranchEventKind : std::uint8_t { Jump, Spawn };

/// One event of the dominating branching system.  A jump moves the parent
/// and creates two children (a trail at the departed site, then a mover at
/// the landing site); a spawn creates one mover at the parent's site.
template <int D>
struct BranchEvent {
    double time = 0.0;
    std::int64_t parent = 0;
    BranchEventKind kind = BranchEventKind::Spawn;
    Site<D> from{};
    Site<D> to{};
};

struct BranchingOptions {
    std::int64_t population_cap = 10'000'000;
    bool record_events = true;
    bool record_series = true;
};

template <int D>
struct BranchParticle {
    std::int64_t id = 0;
    BranchState state = BranchState::Mover;
    Site<D> pos{};
    double birth_time = 0.0;
};

template <int D>
struct BranchingResult {
    std::vector<Site<D>> occupied;  ///< sorted distinct sites holding any particle
    std::int64_t population = 0;
    std::int64_t movers = 0;
    std::int64_t trails = 0;
    double end_time = 0.0;
    std::vector<BranchParticle<D>> particles;
    std::vector<BranchEvent<D>> events;
    /// Population after each event, for growth curves.
    std::vector<std::pair<double, std::int64_t>> population_series;
};

/// Free branching system that dominates the spread of a perturbation: one
/// mover starts at the origin; movers jump at rate 1 and leave a trail
/// particle behind plus a fresh mover at the landing site; trails are
/// immobile; every particle (mover or trail) spawns a fresh mover at its
/// own site at rate lambda.  Nothing ever dies, so the occupied-site set
/// only grows and every trail marks a site some mover departed.
///
/// Each particle draws from its own stream, keyed by birth order, so the
/// whole realization is a pure function of the key.
template <int D>
BranchingResult<D> run_branching_dominator(const JumpKernel<D>& kernel, double lambda,
                                           double horizon, StreamKey key,
                                           const BranchingOptions& options = {}) {
    if (lambda < 0.0) throw ValidationError("spawn rate must be nonnegative");
    if (!(horizon >= 0.0) || !std::isfinite(horizon))
        throw ValidationError("branching horizon must be finite and nonnegative");

    struct Pending {
        double time;
        std::int64_t id;
        bool operator>(const Pending& o) const {
            if (time != o.time) return time > o.time;
            return id > o.id;
        }
    };

    BranchingResult<D> out;
    std::vector<BranchParticle<D>> particles;
    std::vector<RngStream> streams;
    std::priority_queue<Pending, std::vector<Pending>, std::greater<Pending>> queue;

    const double mover_rate = 1.0 + lambda;
    const auto hatch = [&](BranchState state, const Site<D>& pos, double t) {
        if (static_cast<std::int64_t>(particles.size()) >= options.population_cap)
            throw PopulationGuard("branching population cap exceeded");
        const std::int64_t id = static_cast<std::int64_t>(particles.size());
        particles.push_back(BranchParticle<D>{id, state, pos, t});
        streams.emplace_back(key.child(purpose::kBranch).child(static_cast<std::uint64_t>(id)));
        const double rate = state == BranchState::Mover ? mover_rate : lambda;
        if (rate > 0.0) queue.push(Pending{t + streams.back().exponential(rate), id});
        return id;
    };

    hatch(BranchState::Mover, origin_site<D>(), 0.0);
    if (options.record_series) out.population_series.emplace_back(0.0, 1);

    while (!queue.empty() && queue.top().time <= horizon) {
        const auto [t, id] = queue.top();
        queue.pop();
        // hatch() grows the vectors, so index instead of holding references.
        const std::size_t idx = static_cast<std::size_t>(id);
        const BranchState state = particles[idx].state;
        const double rate = state == BranchState::Mover ? mover_rate : lambda;

        bool jump = false;
        if (state == BranchState::Mover) {
            // One uniform decides the event type; consumed even when
            // lambda is zero so the draw pattern does not depend on it.
            jump = streams[idx].bernoulli(1.0 / mover_rate);
        }
        if (jump) {
            const Site<D> from = particles[idx].pos;
            const Site<D> to = add(from, kernel.sample(streams[idx]));
            particles[idx].pos = to;
            hatch(BranchState::Trail, from, t);
            hatch(BranchState::Mover, to, t);
            if (options.record_events)
                out.events.push_back(BranchEvent<D>{t, id, BranchEventKind::Jump, from, to});
        } else {
            const Site<D> at = particles[idx].pos;
            hatch(BranchState::Mover, at, t);
            if (options.record_events)
                out.events.push_back(BranchEvent<D>{t, id, BranchEventKind::Spawn, at, at});
        }
        queue.push(Pending{t + streams[idx].exponential(rate), id});
        if (options.record_series)
            out.population_series.emplace_back(t, static_cast<std::int64_t>(particles.size()));
    }

    out.end_time = horizon;
    out.population = static_cast<std::int64_t>(particles.size());
    std::set<Site<D>> sites;
    for (const auto& p : particles) {
        sites.insert(p.pos);
        if (p.state == BranchState::Mover) ++out.movers;
        else ++out.trails;
    }
    out.occupied.assign(sites.begin(), sites.end());
    out.particles = std::move(particles);
    return out;
}

/// Mean occupied-set size over replicated runs, with its standard error.
struct BranchingMean {
    double mean = 0.0;
    double std_error = 0.0;
    std::int64_t runs = 0;
};

template <int D>
BranchingMean branching_reach_mean(const JumpKernel<D>& kernel, double lambda, double horizon,
                                   StreamKey key, std::int64_t runs,
                                   const BranchingOptions& options = {}) {
    if (runs < 2) throw ValidationError("need at least two runs for a standard error");
    BranchingOptions quiet = options;
    quiet.record_events = false;
    quiet.record_series = false;
    double sum = 0.0, sumsq = 0.0;
    for (std::int64_t i = 0; i < runs; ++i) {
        const StreamKey rk = key.child(purpose::kInstance).child(static_cast<std::uint64_t>(i));
        const auto result = run_branching_dominator<D>(kernel, lambda, horizon, rk, quiet);
        const double v = static_cast<double>(result.occupied.size());
        sum += v;
        sumsq += v * v;
    }
    BranchingMean out;
    const double n = static_cast<double>(runs);
    out.mean = sum / n;
    const double var = (sumsq / n - out.mean * out.mean) * n / (n - 1.0);
    out.std_error = std::sqrt(std::max(0.0, var) / n);
    out.runs = runs;
    return out;
}

} // namespace arw
