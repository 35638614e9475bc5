#pragma once

#include <cstdint>
#include <deque>
#include <limits>
#include <utility>
#include <vector>

#include "common.hpp"
#include "config.hpp"
#include "geometry.hpp"
#include "grid.hpp"
#include "kernel.hpp"
#include "rng.hpp"
#include "tape.hpp"

namespace arw {

inline constexpr std::int64_t kDefaultTopplingBudget = 1'000'000'000;

/// Per-stage counters for the rolling strategy.  `sleep_sites` records
/// (sweep step, site) for every successful stage-2 sleep; the site always
/// lies at sweep position <= step.
template <int D>
struct StageTally {
    std::int64_t leveling_topplings = 0;
    std::int64_t steps_followed = 0;
    std::int64_t steps_skipped = 0;
    std::int64_t exits = 0;
    std::int64_t parks = 0;
    std::int64_t sleeps = 0;
    std::int64_t finishing_topplings = 0;
    std::int64_t finishing_sleeps = 0;
    std::vector<std::pair<std::int64_t, Site<D>>> sleep_sites;
};

template <int D>
struct StabilizationReport {
    SiteConfiguration<D> final_config;
    Grid<D, std::int64_t> odometer;
    std::int64_t initial_particles = 0;
    std::int64_t exit_count = 0;   ///< particles frozen outside the window
    std::int64_t left_behind = 0;  ///< successful sleep events over the whole run
    std::int64_t topplings = 0;
    StageTally<D> tally;
};

/// Topple an unstable site once: consume its next instruction and advance
/// its odometer.  A sleep instruction puts a lone particle to sleep and is
/// discarded in company.  A jump moves one particle; arrival wakes a
/// sleeper, and landing outside the window freezes the particle there.
template <int D, class Tape>
    requires TapeSource<Tape, D>
Instruction topple(SiteConfiguration<D>& config, Tape& tape, const JumpKernel<D>& kernel,
                   Grid<D, std::int64_t>& odometer, const SiteArg<D>& x) {
    if (!config.window().contains(x))
        throw IllegalToppling("cannot topple a site outside the window");
    Cell& c = config.cell(x);
    if (c.count <= 0 || c.sleeping) throw IllegalToppling("cannot topple a stable site");

    const Instruction ins = tape.instruction(x, odometer.at(x));
    ++odometer.at(x);

    if (is_sleep(ins)) {
        if (c.count == 1) c.sleeping = true;
        return ins;
    }

    const Site<D> dest = add(x, kernel.offset(static_cast<std::size_t>(ins)));
    --c.count;
    if (config.window().contains(dest)) {
        Cell& d = config.cell(dest);
        d.sleeping = false;
        ++d.count;
    } else {
        config.record_exit(dest);
    }
    return ins;
}

namespace detail {

template <int D>
std::int64_t entry_exits(const SiteConfiguration<D>& config) {
    return config.exited_particles();
}

template <int D>
void finalize_report(StabilizationReport<D>& rep, SiteConfiguration<D>&& config,
                     std::int64_t exits_before) {
    rep.exit_count = config.exited_particles() - exits_before;
    rep.final_config = std::move(config);
}

} // namespace detail

/// Greedy stabilization: drain each unstable site, enqueueing any site a
/// jump destabilizes, until the window is stable.
template <int D, class Tape>
    requires TapeSource<Tape, D>
StabilizationReport<D> stabilize(SiteConfiguration<D> config, Tape& tape,
                                 const JumpKernel<D>& kernel,
                                 std::int64_t budget = kDefaultTopplingBudget) {
    const Box<D>& window = config.window();
    StabilizationReport<D> rep;
    rep.initial_particles = config.interior_particles();
    rep.odometer = Grid<D, std::int64_t>(window);
    const std::int64_t exits_before = detail::entry_exits(config);

    std::deque<Site<D>> queue;
    Grid<D, char> queued(window, 0);
    for (const Site<D>& x : window.sites()) {
        if (config.unstable(x)) {
            queue.push_back(x);
            queued.at(x) = 1;
        }
    }

    while (!queue.empty()) {
        const Site<D> x = queue.front();
        queue.pop_front();
        queued.at(x) = 0;
        while (config.unstable(x)) {
            if (rep.topplings >= budget) throw BudgetExceeded("toppling budget exceeded");
            ++rep.topplings;
            const Instruction ins = topple(config, tape, kernel, rep.odometer, x);
            if (is_sleep(ins)) {
                if (config.sleeping(x)) ++rep.left_behind;
                continue;
            }
            const Site<D> dest = add(x, kernel.offset(static_cast<std::size_t>(ins)));
            if (dest != x && window.contains(dest) && config.unstable(dest) &&
                !queued.at(dest)) {
                queue.push_back(dest);
                queued.at(dest) = 1;
            }
        }
    }

    detail::finalize_report(rep, std::move(config), exits_before);
    return rep;
}

/// Stabilization by uniformly random legal topplings.  Slower than the
/// greedy order; used to exercise order independence.
template <int D, class Tape>
    requires TapeSource<Tape, D>
StabilizationReport<D> stabilize_random_order(SiteConfiguration<D> config, Tape& tape,
                                              const JumpKernel<D>& kernel, StreamKey order_key,
                                              std::int64_t budget = kDefaultTopplingBudget) {
    const Box<D>& window = config.window();
    StabilizationReport<D> rep;
    rep.initial_particles = config.interior_particles();
    rep.odometer = Grid<D, std::int64_t>(window);
    const std::int64_t exits_before = detail::entry_exits(config);

    RngStream order_rng(order_key.child(purpose::kShuffle));
    std::vector<Site<D>> unstable;
    for (;;) {
        unstable.clear();
        for (const Site<D>& x : window.sites())
            if (config.unstable(x)) unstable.push_back(x);
        if (unstable.empty()) break;
        const Site<D> x = unstable[order_rng.below(unstable.size())];
        if (rep.topplings >= budget) throw BudgetExceeded("toppling budget exceeded");
        ++rep.topplings;
        const Instruction ins = topple(config, tape, kernel, rep.odometer, x);
        if (is_sleep(ins) && config.sleeping(x)) ++rep.left_behind;
    }

    detail::finalize_report(rep, std::move(config), exits_before);
    return rep;
}

/// Rolling stabilization.  Stage 1 levels the window: while any site holds
/// two or more particles, topple each such site once.  Stage 2 sweeps the
/// window in increasing projection onto `direction` and follows the particle
/// at each occupied site until it exits the window, parks on an empty
/// forward site, or falls asleep alone.  Stage 3 finishes greedily.
template <int D, class Tape>
    requires TapeSource<Tape, D>
StabilizationReport<D> stabilize_rolling(SiteConfiguration<D> config, Tape& tape,
                                         const JumpKernel<D>& kernel, const SiteArg<D>& direction,
                                         std::int64_t budget = kDefaultTopplingBudget) {
    const Box<D>& window = config.window();
    StabilizationReport<D> rep;
    rep.initial_particles = config.interior_particles();
    rep.odometer = Grid<D, std::int64_t>(window);
    const std::int64_t exits_before = detail::entry_exits(config);
    StageTally<D>& tally = rep.tally;

    const auto charge = [&]() {
        if (rep.topplings >= budget) throw BudgetExceeded("toppling budget exceeded");
        ++rep.topplings;
    };

    // Stage 1: leveling.  Toppling never empties a site holding >= 2, so
    // every site collected in a pass is still legal when its turn comes.
    std::vector<Site<D>> heavy;
    for (;;) {
        heavy.clear();
        for (const Site<D>& x : window.sites())
            if (config.count(x) >= 2) heavy.push_back(x);
        if (heavy.empty()) break;
        for (const Site<D>& x : heavy) {
            charge();
            ++tally.leveling_topplings;
            topple(config, tape, kernel, rep.odometer, x);
        }
    }

    // Stage 2: the sweep.  After leveling, and inductively after each step,
    // every site at a later sweep position holds at most one particle and
    // never a sleeping one.
    const std::vector<Site<D>> order = projection_order(window, direction);
    Grid<D, std::int64_t> position(window);
    for (std::size_t i = 0; i < order.size(); ++i)
        position.at(order[i]) = static_cast<std::int64_t>(i);

    for (std::size_t i = 0; i < order.size(); ++i) {
        const Site<D>& start = order[i];
        if (config.count(start) == 0) {
            ++tally.steps_skipped;
            continue;
        }
        if (config.count(start) > 1 || config.sleeping(start))
            throw IllegalToppling("rolling sweep invariant violated ahead of the sweep");
        ++tally.steps_followed;

        Site<D> cur = start;
        for (;;) {
            charge();
            const Instruction ins = topple(config, tape, kernel, rep.odometer, cur);
            if (is_sleep(ins)) {
                if (config.sleeping(cur)) {
                    ++tally.sleeps;
                    ++rep.left_behind;
                    tally.sleep_sites.emplace_back(static_cast<std::int64_t>(i), cur);
                    break;
                }
                continue;
            }
            const Site<D> dest = add(cur, kernel.offset(static_cast<std::size_t>(ins)));
            if (!window.contains(dest)) {
                ++tally.exits;
                break;
            }
            if (position.at(dest) > static_cast<std::int64_t>(i) && config.count(dest) == 1) {
                ++tally.parks;
                break;
            }
            cur = dest;
        }
    }

    // Stage 3: stabilize whatever the sweep woke up behind itself.
    std::deque<Site<D>> queue;
    Grid<D, char> queued(window, 0);
    for (const Site<D>& x : window.sites()) {
        if (config.unstable(x)) {
            queue.push_back(x);
            queued.at(x) = 1;
        }
    }
    while (!queue.empty()) {
        const Site<D> x = queue.front();
        queue.pop_front();
        queued.at(x) = 0;
        while (config.unstable(x)) {
            charge();
            ++tally.finishing_topplings;
            const Instruction ins = topple(config, tape, kernel, rep.odometer, x);
            if (is_sleep(ins)) {
                if (config.sleeping(x)) {
                    ++tally.finishing_sleeps;
                    ++rep.left_behind;
                }
                continue;
            }
            const Site<D> dest = add(x, kernel.offset(static_cast<std::size_t>(ins)));
            if (dest != x && window.contains(dest) && config.unstable(dest) &&
                !queued.at(dest)) {
                queue.push_back(dest);
                queued.at(dest) = 1;
            }
        }
    }

    detail::finalize_report(rep, std::move(config), exits_before);
    return rep;
}

enum class Strategy { Greedy, Rolling, RandomOrder };

inline const char* strategy_name(Strategy s) {
    switch (s) {
        case Strategy::Greedy: return "greedy";
        case Strategy::Rolling: return "rolling";
        case Strategy::RandomOrder: return "random";
    }
    return "greedy";
}

inline Strategy parse_strategy(const std::string& name) {
    if (name == "greedy") return Strategy::Greedy;
    if (name == "rolling") return Strategy::Rolling;
    if (name == "random") return Strategy::RandomOrder;
    throw ValidationError("unknown strategy: " + name);
}

/// One clock event of the continuous-time run.
template <int D>
struct ClockEvent {
    double time = 0.0;
    Site<D> site{};
    Instruction instruction = kSleep;
};

template <int D>
struct ContinuousRun {
    SiteConfiguration<D> final_config;
    Grid<D, std::int64_t> odometer;
    std::vector<ClockEvent<D>> events;
    double end_time = 0.0;
    bool absorbed = false;
    /// Time integral of the active-particle count.
    double activity_integral = 0.0;
};

/// Continuous-time dynamics on a finite window via per-site mark clocks.
/// Each site carries a Poisson process of marks at rate (1 + lambda) on its
/// own local-time axis, which advances at speed equal to the site's active
/// particle count; reaching a mark consumes the site's next tape
/// instruction.  Because marks and tape are both fixed by the key, runs
/// sharing a key couple pathwise, and the absorbed configuration matches
/// discrete stabilization of the same tape exactly.
template <int D, class Tape>
    requires TapeSource<Tape, D>
ContinuousRun<D> run_continuous(SiteConfiguration<D> config, Tape& tape,
                                const JumpKernel<D>& kernel, double lambda, StreamKey key,
                                double horizon = std::numeric_limits<double>::infinity(),
                                std::int64_t event_budget = 10'000'000) {
    const Box<D>& window = config.window();
    const double mark_rate = 1.0 + lambda;

    struct SiteClock {
        double local = 0.0;      // local time accumulated up to last_wall
        double last_wall = 0.0;  // wall time of the last sync
        double next_mark = 0.0;  // local time of the next unconsumed mark
        RngStream stream;
    };

    std::vector<SiteClock> clocks;
    const std::vector<Site<D>> sites = window.sites();
    clocks.reserve(sites.size());
    for (const Site<D>& x : sites) {
        RngStream s(key.child(purpose::kSiteClock).child_coords(x));
        SiteClock c{0.0, 0.0, 0.0, s};
        c.next_mark = c.stream.exponential(mark_rate);
        clocks.push_back(c);
    }

    const auto speed = [&](std::size_t i) -> double {
        const Cell& c = config.cell(sites[i]);
        return (c.count > 0 && !c.sleeping) ? static_cast<double>(c.count) : 0.0;
    };
    const auto sync = [&](std::size_t i, double t) {
        SiteClock& c = clocks[i];
        c.local += speed(i) * (t - c.last_wall);
        c.last_wall = t;
    };

    ContinuousRun<D> run;
    run.odometer = Grid<D, std::int64_t>(window);
    double now = 0.0;

    std::int64_t active_particles = 0;
    for (const Site<D>& x : sites)
        if (config.unstable(x)) active_particles += config.count(x);

    for (;;) {
        double best = std::numeric_limits<double>::infinity();
        std::size_t best_i = sites.size();
        for (std::size_t i = 0; i < sites.size(); ++i) {
            const double v = speed(i);
            if (v <= 0.0) continue;
            const SiteClock& c = clocks[i];
            const double t = c.last_wall + (c.next_mark - c.local) / v;
            if (t < best) {
                best = t;
                best_i = i;
            }
        }
        if (best_i == sites.size()) {
            run.absorbed = true;
            run.end_time = std::isfinite(horizon) ? horizon : now;
            break;
        }
        if (best > horizon) {
            run.activity_integral += static_cast<double>(active_particles) * (horizon - now);
            run.end_time = horizon;
            break;
        }
        if (static_cast<std::int64_t>(run.events.size()) >= event_budget)
            throw BudgetExceeded("event budget exceeded");

        run.activity_integral += static_cast<double>(active_particles) * (best - now);
        now = best;

        const Site<D>& x = sites[best_i];
        sync(best_i, now);
        clocks[best_i].next_mark += clocks[best_i].stream.exponential(mark_rate);

        // The destination's clock must accrue at its old speed up to now,
        // before the arrival changes its occupancy.  Peeking is safe: the
        // tape is a pure function of (site, index).
        const Instruction peek = tape.instruction(x, run.odometer.at(x));
        if (!is_sleep(peek)) {
            const Site<D> dest = add(x, kernel.offset(static_cast<std::size_t>(peek)));
            if (dest != x && window.contains(dest))
                sync(static_cast<std::size_t>(window.index_of(dest)), now);
        }

        const Instruction ins = topple(config, tape, kernel, run.odometer, x);
        run.events.push_back(ClockEvent<D>{now, x, ins});

        active_particles = 0;
        for (const Site<D>& s : sites)
            if (config.unstable(s)) active_particles += config.count(s);
    }

    run.final_config = std::move(config);
    return run;
}

} // namespace arw
