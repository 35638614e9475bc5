#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <map>
#include <vector>

#include "arw/branching.hpp"
#include "support/stats.hpp"

using namespace arw;

namespace {

/// Replays the event log against an independent state machine: jumps are
/// made by movers only, a jump leaves a trail exactly where the mover
/// stood plus a fresh mover at the landing site, spawns add a mover at the
/// parent's own site, ids are assigned in event order, and trails never
/// move.
void check_branching_replay(const BranchingResult<1>& result) {
    struct P {
        BranchState state;
        Site<1> pos;
    };
    std::vector<P> state{{BranchState::Mover, {0}}};
    double prev = 0.0;
    for (const auto& e : result.events) {
        REQUIRE(e.time >= prev);
        prev = e.time;
        REQUIRE(e.parent < static_cast<std::int64_t>(state.size()));
        P& parent = state[static_cast<std::size_t>(e.parent)];
        if (e.kind == BranchEventKind::Jump) {
            REQUIRE(parent.state == BranchState::Mover);
            REQUIRE(parent.pos == e.from);
            parent.pos = e.to;
            state.push_back(P{BranchState::Trail, e.from});
            state.push_back(P{BranchState::Mover, e.to});
        } else {
            REQUIRE(parent.pos == e.from);
            REQUIRE(e.to == e.from);
            state.push_back(P{BranchState::Mover, e.from});
        }
    }

    REQUIRE(result.population == static_cast<std::int64_t>(state.size()));
    REQUIRE(result.particles.size() == state.size());
    for (std::size_t i = 0; i < state.size(); ++i) {
        REQUIRE(result.particles[i].state == state[i].state);
        REQUIRE(result.particles[i].pos == state[i].pos);
        REQUIRE(result.particles[i].id == static_cast<std::int64_t>(i));
    }
}

} // namespace

TEST_CASE("a zero-horizon branching run is a single mover at the origin") {
    const auto kernel = symmetric_walk<1>();
    const auto result = run_branching_dominator<1>(kernel, 0.7, 0.0, StreamKey::root(80'000));
    CHECK(result.population == 1);
    CHECK(result.movers == 1);
    CHECK(result.trails == 0);
    REQUIRE(result.occupied.size() == 1);
    CHECK(result.occupied[0] == Site<1>{0});
    CHECK(result.events.empty());
}

TEST_CASE("branching events replay: trails mark departures and ids follow event order") {
    const auto kernel = symmetric_walk<1>();
    for (std::uint64_t seed = 0; seed < 30; ++seed) {
        const auto result =
            run_branching_dominator<1>(kernel, 0.8, 2.0, StreamKey::root(80'100 + seed));
        check_branching_replay(result);

        // Population series: +1 per spawn, +2 per jump, never down.
        REQUIRE(result.population_series.size() == result.events.size() + 1);
        for (std::size_t i = 0; i < result.events.size(); ++i) {
            const std::int64_t step =
                result.events[i].kind == BranchEventKind::Jump ? 2 : 1;
            CHECK(result.population_series[i + 1].second ==
                  result.population_series[i].second + step);
        }
        CHECK(result.population_series.back().second == result.population);

        // The occupied set contains every trail site and every mover site.
        for (const auto& p : result.particles) {
            CHECK(std::binary_search(result.occupied.begin(), result.occupied.end(), p.pos));
        }
    }
}

TEST_CASE("with no spawning the branching system is a splitting walk") {
    const auto kernel = drifted_walk_1d(1.0);
    const auto result = run_branching_dominator<1>(kernel, 0.0, 1.5, StreamKey::root(80'200));
    check_branching_replay(result);
    std::int64_t jumps = 0;
    for (const auto& e : result.events) {
        CHECK(e.kind == BranchEventKind::Jump);
        ++jumps;
    }
    CHECK(result.population == 1 + 2 * jumps);
    CHECK(result.movers == 1 + jumps);
    CHECK(result.trails == jumps);
}

TEST_CASE("a longer horizon extends the same branching run") {
    const auto kernel = symmetric_walk<1>();
    const StreamKey key = StreamKey::root(80'300);
    const auto short_run = run_branching_dominator<1>(kernel, 0.6, 0.8, key);
    const auto long_run = run_branching_dominator<1>(kernel, 0.6, 1.6, key);
    REQUIRE(short_run.events.size() <= long_run.events.size());
    for (std::size_t i = 0; i < short_run.events.size(); ++i) {
        CHECK(short_run.events[i].time == long_run.events[i].time);
        CHECK(short_run.events[i].parent == long_run.events[i].parent);
        CHECK(short_run.events[i].kind == long_run.events[i].kind);
        CHECK(short_run.events[i].from == long_run.events[i].from);
        CHECK(short_run.events[i].to == long_run.events[i].to);
    }
    CHECK(short_run.population <= long_run.population);
}

TEST_CASE("mean occupied size stays below its exponential ceiling") {
    const auto kernel = symmetric_walk<1>();
    const std::int64_t runs = 2'000;
    for (const double lambda : {0.5, 1.0}) {
        for (const double t : {0.5, 1.0}) {
            const auto stat = branching_reach_mean<1>(kernel, lambda, t,
                                                      StreamKey::root(80'400), runs);
            const double ceiling = std::exp(2.0 * (1.0 + lambda) * t);
            INFO("lambda " << lambda << " t " << t << ": mean " << stat.mean << " +- "
                           << stat.std_error << " vs " << ceiling);
            CHECK(stat.mean + 3.0 * stat.std_error <= ceiling);
        }
    }
}

TEST_CASE("mean branching population grows with the horizon and the spawn rate") {
    const auto kernel = symmetric_walk<1>();
    const std::int64_t runs = 500;
    const std::vector<double> lambdas{0.25, 0.5, 1.0};
    const std::vector<double> horizons{0.5, 1.0};
    std::map<std::pair<double, double>, teststats::Moments> grid;
    for (const double lambda : lambdas) {
        for (const double t : horizons) {
            std::vector<double> pops;
            pops.reserve(static_cast<std::size_t>(runs));
            BranchingOptions quiet;
            quiet.record_events = false;
            quiet.record_series = false;
            for (std::int64_t i = 0; i < runs; ++i) {
                const StreamKey key = StreamKey::root(80'500)
                                          .child(purpose::kInstance)
                                          .child(static_cast<std::uint64_t>(i));
                pops.push_back(static_cast<double>(
                    run_branching_dominator<1>(kernel, lambda, t, key, quiet).population));
            }
            grid[{lambda, t}] = teststats::moments(pops);
        }
    }
    for (const double lambda : lambdas) {
        const auto& low = grid[{lambda, 0.5}];
        const auto& high = grid[{lambda, 1.0}];
        CHECK(high.mean >= low.mean - 3.0 * (low.std_error + high.std_error));
    }
    for (const double t : horizons) {
        for (std::size_t i = 0; i + 1 < lambdas.size(); ++i) {
            const auto& low = grid[{lambdas[i], t}];
            const auto& high = grid[{lambdas[i + 1], t}];
            CHECK(high.mean >= low.mean - 3.0 * (low.std_error + high.std_error));
        }
    }
}

TEST_CASE("the population cap guards runaway branching") {
    const auto kernel = symmetric_walk<1>();
    BranchingOptions tight;
    tight.population_cap = 10;
    CHECK_THROWS_AS(
        run_branching_dominator<1>(kernel, 2.0, 50.0, StreamKey::root(80'600), tight),
        PopulationGuard);
}

TEST_CASE("branching runs reject bad parameters") {
    const auto kernel = symmetric_walk<1>();
    CHECK_THROWS_AS(run_branching_dominator<1>(kernel, -0.5, 1.0, StreamKey::root(1)),
                    ValidationError);
    CHECK_THROWS_AS(run_branching_dominator<1>(
                        kernel, 1.0, std::numeric_limits<double>::infinity(),
                        StreamKey::root(1)),
                    ValidationError);
    CHECK_THROWS_AS(run_branching_dominator<1>(kernel, 1.0, -1.0, StreamKey::root(1)),
                    ValidationError);
}
