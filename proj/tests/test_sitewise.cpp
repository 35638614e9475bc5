#include <catch2/catch_amalgamated.hpp>

#include <vector>

#include "arw/initial_law.hpp"
#include "arw/sitewise.hpp"
#include "support/stats.hpp"

using namespace arw;

namespace {

SiteConfiguration<1> three_at_origin() {
    SiteConfiguration<1> c(Box<1>(1));
    c.set_count({0}, 3);
    return c;
}

template <int D>
void check_postconditions(const StabilizationReport<D>& rep) {
    const auto& f = rep.final_config;
    CHECK(f.stable());
    for (const Site<D>& x : f.window().sites()) {
        CHECK(f.count(x) >= 0);
        if (f.sleeping(x)) CHECK(f.count(x) == 1);
        CHECK(rep.odometer.at(x) >= 0);
    }
    CHECK(f.interior_particles() + f.exited_particles() == rep.initial_particles);
    CHECK(rep.exit_count == rep.initial_particles - f.sleeper_count());
    CHECK(rep.exit_count <= rep.initial_particles);
    for (const auto& [site, n] : f.exited()) {
        CHECK_FALSE(f.window().contains(site));
        CHECK(n > 0);
    }
}

} // namespace

TEST_CASE("hand-traced stabilization of three particles on one site") {
    // Window {-1,0,1}, three particles at 0, kernel steps +1 only.
    // Site 0 jumps all three to site 1.  Site 1 then consumes: jump (exit at
    // 2), sleep attempt in company (discarded), jump (exit at 2), sleep
    // (succeeds alone).
    const auto kernel = drifted_walk_1d(1.0);
    ScriptedTape<1> tape({
        {Site<1>{0}, {0, 0, 0}},
        {Site<1>{1}, {0, kSleep, 0, kSleep}},
    });

    const auto rep = stabilize(three_at_origin(), tape, kernel);
    CHECK(rep.exit_count == 2);
    CHECK(rep.left_behind == 1);
    CHECK(rep.topplings == 7);
    CHECK(rep.odometer.at({0}) == 3);
    CHECK(rep.odometer.at({1}) == 4);
    CHECK(rep.odometer.at({-1}) == 0);
    CHECK(rep.final_config.count({0}) == 0);
    CHECK(rep.final_config.count({1}) == 1);
    CHECK(rep.final_config.sleeping({1}));
    CHECK(rep.final_config.exited().at({2}) == 2);
    check_postconditions(rep);

    // Without sleep instructions every particle must leave the window.
    ScriptedTape<1> all_jumps({
        {Site<1>{0}, {0, 0, 0}},
        {Site<1>{1}, {0, 0, 0}},
    });
    const auto rep2 = stabilize(three_at_origin(), all_jumps, kernel);
    CHECK(rep2.exit_count == 3);
    CHECK(rep2.left_behind == 0);
    CHECK(rep2.final_config.exited().at({2}) == 3);
}

TEST_CASE("toppling guards") {
    const auto kernel = drifted_walk_1d(1.0);
    ScriptedTape<1> tape({{Site<1>{0}, {kSleep, 0}}});
    SiteConfiguration<1> c(Box<1>(1));
    Grid<1, std::int64_t> odo(Box<1>(1));

    CHECK_THROWS_AS(topple(c, tape, kernel, odo, Site<1>{0}), IllegalToppling);
    CHECK_THROWS_AS(topple(c, tape, kernel, odo, Site<1>{5}), IllegalToppling);

    c.set_count({0}, 1);
    topple(c, tape, kernel, odo, Site<1>{0});
    REQUIRE(c.sleeping(Site<1>{0}));
    CHECK_THROWS_AS(topple(c, tape, kernel, odo, Site<1>{0}), IllegalToppling);
}

TEST_CASE("arrivals wake sleepers") {
    const auto kernel = drifted_walk_1d(1.0);
    ScriptedTape<1> tape({
        {Site<1>{-1}, {0}},
        {Site<1>{0}, {kSleep}},
    });
    SiteConfiguration<1> c(Box<1>(1));
    c.set_count({-1}, 1);
    c.set_count({0}, 1);
    Grid<1, std::int64_t> odo(Box<1>(1));

    topple(c, tape, kernel, odo, Site<1>{0});
    CHECK(c.sleeping(Site<1>{0}));
    topple(c, tape, kernel, odo, Site<1>{-1});
    CHECK_FALSE(c.sleeping(Site<1>{0}));
    CHECK(c.count(Site<1>{0}) == 2);
    CHECK(c.unstable(Site<1>{0}));
}

TEST_CASE("stabilization outcome is independent of toppling order") {
    const auto kernel1 = drifted_walk_1d(0.75);
    const auto kernel2 = symmetric_walk<2>();
    const InitialLaw law = InitialLaw::poisson(0.8);

    for (std::uint64_t inst = 0; inst < 40; ++inst) {
        const StreamKey key = StreamKey::root(1000 + inst);
        {
            const auto init = sample_initial(law, Box<1>(4), key.child(purpose::kInstance));
            RandomTape<1> ta(key, kernel1, 0.4), tb(key, kernel1, 0.4), tc(key, kernel1, 0.4);
            const auto greedy = stabilize(init, ta, kernel1);
            const auto shuffled =
                stabilize_random_order(init, tb, kernel1, key.child(77 + inst));
            const auto rolled = stabilize_rolling(init, tc, kernel1, Site<1>{1});
            CHECK(greedy.final_config == shuffled.final_config);
            CHECK(greedy.odometer == shuffled.odometer);
            CHECK(greedy.final_config == rolled.final_config);
            CHECK(greedy.odometer == rolled.odometer);
            check_postconditions(greedy);
            check_postconditions(rolled);
        }
        {
            const auto init = sample_initial(law, Box<2>(2), key.child(purpose::kInstance));
            RandomTape<2> ta(key, kernel2, 0.7), tb(key, kernel2, 0.7);
            const auto greedy = stabilize(init, ta, kernel2);
            const auto shuffled =
                stabilize_random_order(init, tb, kernel2, key.child(13 + inst));
            CHECK(greedy.final_config == shuffled.final_config);
            CHECK(greedy.odometer == shuffled.odometer);
            check_postconditions(greedy);
        }
    }
}

TEST_CASE("two random legal orders agree with each other") {
    const auto kernel = drifted_walk_1d(0.6);
    for (std::uint64_t inst = 0; inst < 20; ++inst) {
        const StreamKey key = StreamKey::root(500 + inst);
        const auto init =
            sample_initial(InitialLaw::poisson(1.2), Box<1>(3), key.child(purpose::kInstance));
        RandomTape<1> ta(key, kernel, 0.3), tb(key, kernel, 0.3);
        const auto a = stabilize_random_order(init, ta, kernel, key.child(1));
        const auto b = stabilize_random_order(init, tb, kernel, key.child(2));
        CHECK(a.final_config == b.final_config);
        CHECK(a.odometer == b.odometer);
    }
}

TEST_CASE("adding a particle can only increase odometer and exits") {
    const auto kernel = drifted_walk_1d(0.7);
    const Box<1> window(3);
    for (std::uint64_t inst = 0; inst < 30; ++inst) {
        const StreamKey key = StreamKey::root(800 + inst);
        auto base = sample_initial(InitialLaw::bernoulli(0.6), window, key.child(purpose::kInstance));
        RandomTape<1> ta(key, kernel, 0.5), tb(key, kernel, 0.5);
        const auto before = stabilize(base, ta, kernel);

        RngStream pickrng(key.child(4242));
        const Site<1> extra = window.sites()[pickrng.below(window.sites().size())];
        base.set_count(extra, base.count(extra) + 1);
        const auto after = stabilize(base, tb, kernel);

        for (const Site<1>& x : window.sites())
            CHECK(after.odometer.at(x) >= before.odometer.at(x));
        CHECK(after.exit_count >= before.exit_count);
    }
}

TEST_CASE("lone particle exits a single-site window with probability 1/(1+lambda)") {
    const double lambda = 0.5;
    const auto kernel = drifted_walk_1d(1.0);
    const std::int64_t n = 20'000;
    std::int64_t exits = 0;
    for (std::int64_t i = 0; i < n; ++i) {
        SiteConfiguration<1> c(Box<1>(0));
        c.set_count({0}, 1);
        RandomTape<1> tape(StreamKey::root(321).child(static_cast<std::uint64_t>(i)), kernel,
                           lambda);
        exits += stabilize(c, tape, kernel).exit_count;
    }
    CHECK(teststats::binomial_within(exits, n, 1.0 / (1.0 + lambda), 4.0));
}

TEST_CASE("a lazy kernel self-jump is a harmless no-op") {
    const JumpKernel<1> lazy({{0}, {1}}, {0.5, 0.5});
    ScriptedTape<1> tape({{Site<1>{0}, {0, 0, 1}}});
    SiteConfiguration<1> c(Box<1>(0));
    c.set_count({0}, 1);
    const auto rep = stabilize(c, tape, lazy);
    CHECK(rep.exit_count == 1);
    CHECK(rep.topplings == 3);
    CHECK(rep.odometer.at({0}) == 3);
}

TEST_CASE("toppling budget trips") {
    const auto kernel = symmetric_walk<1>();
    SiteConfiguration<1> c(Box<1>(2));
    for (const Site<1>& x : Box<1>(2).sites()) c.set_count(x, 2);
    RandomTape<1> tape(StreamKey::root(55), kernel, 0.0);
    CHECK_THROWS_AS(stabilize(c, tape, kernel, 5), BudgetExceeded);
}
