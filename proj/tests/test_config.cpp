#include <catch2/catch_amalgamated.hpp>

#include "arw/config.hpp"
#include "arw/initial_law.hpp"

using namespace arw;

TEST_CASE("configuration accounting") {
    SiteConfiguration<1> c(Box<1>(2));
    c.set_count({0}, 3);
    c.set_count({2}, 1);
    CHECK(c.interior_particles() == 4);
    CHECK(c.unstable(Site<1>{0}));
    CHECK_FALSE(c.unstable(Site<1>{1}));
    CHECK_FALSE(c.stable());

    c.record_exit({3});
    c.record_exit({3});
    c.record_exit({-4});
    CHECK(c.exited_particles() == 3);
    CHECK(c.total_particles() == 7);
    CHECK_THROWS_AS(c.set_count({0}, -1), ValidationError);

    SiteConfiguration<1> d = c;
    CHECK(c == d);
    d.cell({1}).count = 1;
    d.cell({1}).sleeping = true;
    CHECK_FALSE(c == d);
    CHECK(d.sleeper_count() == 1);
    CHECK_FALSE(d.unstable(Site<1>{1}));
}

TEST_CASE("initial law validation and means") {
    CHECK_THROWS_AS(InitialLaw::bernoulli(1.5), ValidationError);
    CHECK_THROWS_AS(InitialLaw::constant(-1), ValidationError);
    CHECK_THROWS_AS(InitialLaw::poisson(-0.1), ValidationError);
    CHECK_THROWS_AS(InitialLaw::empirical({}), ValidationError);
    CHECK_THROWS_AS(InitialLaw::empirical({1, -2}), ValidationError);

    CHECK(InitialLaw::constant(2).mean() == 2.0);
    CHECK(InitialLaw::bernoulli(0.3).mean() == Catch::Approx(0.3));
    CHECK(InitialLaw::poisson(1.7).mean() == Catch::Approx(1.7));
    CHECK(InitialLaw::empirical({0, 1, 2, 5}).mean() == Catch::Approx(2.0));
}

TEST_CASE("initial sampling is window independent") {
    const InitialLaw law = InitialLaw::poisson(0.9);
    const StreamKey key = StreamKey::root(123).child(purpose::kInstance);
    const auto small = sample_initial(law, Box<2>(2), key);
    const auto large = sample_initial(law, Box<2>(5), key);
    for (const Site<2>& x : Box<2>(2).sites())
        CHECK(small.count(x) == large.count(x));
}

TEST_CASE("constant law fills exactly") {
    const auto c = sample_initial(InitialLaw::constant(1), Box<1>(4), StreamKey::root(1));
    for (const Site<1>& x : Box<1>(4).sites()) CHECK(c.count(x) == 1);
    CHECK(c.interior_particles() == 9);
}
