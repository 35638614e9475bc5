#pragma once

#include <chrono>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "branching.hpp"
#include "common.hpp"
#include "config.hpp"
#include "geometry.hpp"
#include "influence.hpp"
#include "initial_law.hpp"
#include "kernel.hpp"
#include "particlewise.hpp"
#include "rng.hpp"
#include "sitewise.hpp"
#include "tape.hpp"
#include "twocolor.hpp"

namespace arw {

namespace detail {
using LabeledCounts1 = std::vector<std::pair<Site<1>, std::int64_t>>;
}  // namespace detail

/// One named self-check with its verdict and a human-readable summary.
struct VerifyCheck {
    std::string name;
    bool passed = false;
    std::string detail;
    double seconds = 0.0;
};

struct VerifySuite {
    std::string name;
    std::vector<VerifyCheck> checks;

    bool passed() const {
        for (const auto& c : checks)
            if (!c.passed) return false;
        return true;
    }
};

namespace detail {

template <class Body>
void run_check(VerifySuite& suite, const std::string& name, Body&& body) {
    const auto start = std::chrono::steady_clock::now();
    VerifyCheck check;
    check.name = name;
    try {
        body(check);
    } catch (const std::exception& e) {
        check.passed = false;
        check.detail = std::string("exception: ") + e.what();
    }
    check.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start)
                        .count();
    suite.checks.push_back(std::move(check));
}

/// Final-state fingerprint used for distribution comparisons: per-site
/// (count, sleeping) inside the window plus the exit ledger.
template <int D>
std::string state_signature(const SiteConfiguration<D>& config) {
    std::string s;
    for (const Site<D>& x : config.window().sites()) {
        s += std::to_string(config.count(x));
        s += config.sleeping(x) ? 's' : 'a';
    }
    for (const auto& [x, n] : config.exited()) {
        s += ';';
        for (int d = 0; d < D; ++d) {
            if (d) s += ',';
            s += std::to_string(x[d]);
        }
        s += ':';
        s += std::to_string(n);
    }
    return s;
}

inline double tv_between(const std::map<std::string, std::int64_t>& a,
                         const std::map<std::string, std::int64_t>& b, std::int64_t samples) {
    std::map<std::string, std::pair<std::int64_t, std::int64_t>> merged;
    for (const auto& [k, n] : a) merged[k].first = n;
    for (const auto& [k, n] : b) merged[k].second = n;
    double tv = 0.0;
    for (const auto& [k, counts] : merged)
        tv += std::abs(static_cast<double>(counts.first) -
                       static_cast<double>(counts.second));
    return tv / (2.0 * static_cast<double>(samples));
}

inline std::string fmt(double v) {
    char buf[48];
    std::snprintf(buf, sizeof buf, "%.6g", v);
    return buf;
}

/// One random small instance stabilized under every strategy; returns a
/// mismatch description, or empty when all strategies agree exactly.
template <int D>
std::string strategy_agreement_trial(StreamKey ikey) {
    RngStream gen(ikey.child(purpose::kInitialCount));
    const std::int64_t radius = 1 + static_cast<std::int64_t>(gen.below(D == 1 ? 3 : 2));
    const double lambdas[] = {0.1, 1.0, 5.0};
    const double lambda = lambdas[gen.below(3)];
    JumpKernel<D> kernel = symmetric_walk<D>();
    bool biased = false;
    if constexpr (D == 1) {
        if (gen.bernoulli(0.5)) {
            kernel = drifted_walk_1d(0.75);
            biased = true;
        }
    }
    const Box<D> window(radius);
    SiteConfiguration<D> init(window);
    const std::uint64_t max_count = D == 1 ? 4 : 2;
    for (const Site<D>& x : window.sites())
        init.set_count(x, static_cast<std::int64_t>(gen.below(max_count)));

    RandomTape<D> tape(ikey, kernel, lambda);
    const auto greedy = stabilize(init, tape, kernel);
    const auto random = stabilize_random_order(init, tape, kernel,
                                               ikey.child(purpose::kShuffle));
    const auto agrees = [&](const StabilizationReport<D>& other, const char* what) {
        std::string why;
        if (!(other.final_config == greedy.final_config)) why = "final configuration";
        else if (!(other.odometer == greedy.odometer)) why = "odometer";
        else if (other.topplings != greedy.topplings) why = "toppling count";
        if (why.empty()) return std::string{};
        return std::string(what) + " differs from greedy in " + why;
    };
    std::string mismatch = agrees(random, "random order");
    if (mismatch.empty() && biased) {
        if constexpr (D == 1) {
            const auto rolling = stabilize_rolling(init, tape, kernel, *kernel.bias());
            mismatch = agrees(rolling, "rolling sweep");
        }
    }
    return mismatch;
}

}  // namespace detail

/// Stabilization order must not matter: the same instance and tape under
/// greedy, random-order, and (when the kernel is biased) rolling sweeps
/// must produce identical final configurations and odometers.
inline VerifySuite verify_abelian(StreamKey key, std::int64_t instances = 40) {
    VerifySuite suite{"abelian", {}};
    detail::run_check(suite, "strategies agree on random instances", [&](VerifyCheck& c) {
        std::int64_t ok = 0;
        std::string first_failure;
        for (std::int64_t i = 0; i < instances; ++i) {
            const StreamKey ikey =
                key.child(purpose::kInstance).child(static_cast<std::uint64_t>(i));
            const std::string mismatch = (i % 2 == 0)
                                             ? detail::strategy_agreement_trial<1>(ikey)
                                             : detail::strategy_agreement_trial<2>(ikey);
            if (mismatch.empty()) ++ok;
            else if (first_failure.empty())
                first_failure = "instance " + std::to_string(i) + ": " + mismatch;
        }
        c.passed = ok == instances;
        c.detail = std::to_string(ok) + "/" + std::to_string(instances) +
                   " instances agree across strategies, d in {1,2}";
        if (!first_failure.empty()) c.detail += "; " + first_failure;
    });
    return suite;
}

/// Nested-initial-condition couplings: the region-restricted process never
/// out-converts the free one on shared randomness, adding red particles
/// raises the mean conversion count, and summing colors reproduces the
/// single-color law of final states.
inline VerifySuite verify_coupling(StreamKey key, std::int64_t trials = 200) {
    VerifySuite suite{"coupling", {}};
    const auto kernel = symmetric_walk<1>();
    const double lambda = 1.0;
    const SiteSet<1> inner = SiteSet<1>::from_box(Box<1>(1));
    const SiteSet<1> mid = SiteSet<1>::from_box(Box<1>(2));
    const SiteSet<1> big = SiteSet<1>::from_box(Box<1>(4));
    const InitialLaw law = InitialLaw::constant(1);

    std::vector<MonotoneTriple<1>> triples;
    triples.reserve(static_cast<std::size_t>(trials));
    for (std::int64_t i = 0; i < trials; ++i) {
        const StreamKey ikey =
            key.child(purpose::kInstance).child(static_cast<std::uint64_t>(i));
        triples.push_back(coupled_monotonicity_trial(kernel, lambda, law, inner, mid, big,
                                                     ikey));
    }

    detail::run_check(suite, "restricted exits never exceed the free process",
                      [&](VerifyCheck& c) {
                          std::int64_t ok = 0;
                          for (const auto& t : triples)
                              if (t.restricted <= t.mid && t.restricted <= t.big) ++ok;
                          c.passed = ok == trials;
                          c.detail = std::to_string(ok) + "/" + std::to_string(trials) +
                                     " coupled trials ordered";
                      });

    detail::run_check(suite, "mean exits increase along the nested regions",
                      [&](VerifyCheck& c) {
                          const double n = static_cast<double>(trials);
                          double mr = 0.0, mm = 0.0, mb = 0.0;
                          for (const auto& t : triples) {
                              mr += static_cast<double>(t.restricted);
                              mm += static_cast<double>(t.mid);
                              mb += static_cast<double>(t.big);
                          }
                          mr /= n;
                          mm /= n;
                          mb /= n;
                          const auto paired_gap = [&](auto lo, auto hi) {
                              double sum = 0.0, sumsq = 0.0;
                              for (const auto& t : triples) {
                                  const double d = static_cast<double>(hi(t) - lo(t));
                                  sum += d;
                                  sumsq += d * d;
                              }
                              const double mean = sum / n;
                              const double var = (sumsq - n * mean * mean) / (n - 1.0);
                              return std::pair{mean,
                                               std::sqrt(var > 0.0 ? var / n : 0.0)};
                          };
                          const auto [d1, se1] = paired_gap(
                              [](const auto& t) { return t.restricted; },
                              [](const auto& t) { return t.mid; });
                          const auto [d2, se2] = paired_gap(
                              [](const auto& t) { return t.mid; },
                              [](const auto& t) { return t.big; });
                          c.passed = d1 > 0.0 && d1 >= 3.0 * se1 && d2 > 0.0 &&
                                     d2 >= 3.0 * se2;
                          c.detail = "mean exits restricted " + detail::fmt(mr) + " < mid " +
                                     detail::fmt(mm) + " < big " + detail::fmt(mb) +
                                     " (paired gaps " + detail::fmt(d1) + " +- " +
                                     detail::fmt(se1) + ", " + detail::fmt(d2) + " +- " +
                                     detail::fmt(se2) + ")";
                      });

    detail::run_check(suite, "color-blind projection matches the single-color law",
                      [&](VerifyCheck& c) {
                          const std::int64_t samples = 5000;
                          const Box<1> window(1);
                          const SiteSet<1> region = SiteSet<1>::from_box(window);
                          std::map<std::string, std::int64_t> single_hist, two_hist;
                          for (std::int64_t i = 0; i < samples; ++i) {
                              const StreamKey skey = key.child(purpose::kReplica)
                                                         .child(static_cast<std::uint64_t>(i));
                              SiteConfiguration<1> cfg(window);
                              for (const Site<1>& x : window.sites()) cfg.set_count(x, 1);
                              RandomTape<1> tape(skey, kernel, lambda);
                              const auto run = run_continuous(cfg, tape, kernel, lambda, skey);
                              ++single_hist[detail::state_signature(run.final_config)];

                              std::map<Site<1>, std::int64_t> blue0;
                              for (const Site<1>& x : window.sites()) blue0[x] = 1;
                              TwoColorOptions<1> opt;
                              opt.restrict_exits = true;
                              TwoColorSim<1> sim(region, blue0, {}, kernel, lambda, skey, opt);
                              sim.run();
                              SiteConfiguration<1> projected(window);
                              for (const Site<1>& x : window.sites()) {
                                  const TwoColorCell cell = sim.cell(x);
                                  projected.set_count(x, cell.total());
                                  if (cell.sleeper.has_value())
                                      projected.cell(x).sleeping = true;
                              }
                              for (const auto& [x, n] : sim.exited())
                                  for (std::int64_t k = 0; k < n; ++k) projected.record_exit(x);
                              ++two_hist[detail::state_signature(projected)];
                          }
                          const double tv = detail::tv_between(single_hist, two_hist, samples);
                          c.passed = tv <= 0.08;
                          c.detail = "empirical TV " + detail::fmt(tv) + " at " +
                                     std::to_string(samples) + " samples (limit 0.08)";
                      });
    return suite;
}

/// The branching upper bound: the surrogate population grows, but its mean
/// occupied-site count stays under the exponential envelope, its event
/// ledger is internally consistent, and influence sets behave at the edges.
inline VerifySuite verify_branching(StreamKey key, std::int64_t runs = 500) {
    VerifySuite suite{"branching", {}};
    const auto kernel = symmetric_walk<1>();

    detail::run_check(suite, "mean occupied sites stay under exp(2(1+lambda)t)",
                      [&](VerifyCheck& c) {
                          const double cases[][2] = {{0.5, 1.0}, {1.0, 1.0}};
                          c.passed = true;
                          for (const auto& [lambda, t] : cases) {
                              const auto m = branching_reach_mean(
                                  kernel, lambda, t, key.child(purpose::kBranch), runs);
                              const double envelope = std::exp(2.0 * (1.0 + lambda) * t);
                              const bool ok = m.mean <= envelope + 3.0 * m.std_error;
                              if (!ok) c.passed = false;
                              if (!c.detail.empty()) c.detail += "; ";
                              c.detail += "lambda=" + detail::fmt(lambda) + " t=" +
                                          detail::fmt(t) + ": mean " + detail::fmt(m.mean) +
                                          " vs envelope " + detail::fmt(envelope);
                          }
                      });

    detail::run_check(suite, "event ledger matches the population counters",
                      [&](VerifyCheck& c) {
                          const auto run = run_branching_dominator(
                              kernel, 1.0, 2.0, key.child(purpose::kInstance));
                          std::int64_t jumps = 0, spawns = 0;
                          for (const auto& e : run.events)
                              (e.kind == BranchEventKind::Jump ? jumps : spawns) += 1;
                          const bool pop = run.population == 1 + 2 * jumps + spawns;
                          const bool movers = run.movers == 1 + jumps + spawns;
                          const bool trails = run.trails == jumps;
                          c.passed = pop && movers && trails;
                          c.detail = std::to_string(jumps) + " jumps, " +
                                     std::to_string(spawns) + " spawns, population " +
                                     std::to_string(run.population);
                      });

    detail::run_check(suite, "influence sets: absent source is empty, lone walker is its path",
                      [&](VerifyCheck& c) {
                          const std::map<Site<1>, std::int64_t> pi{{Site<1>{0}, 1}};
                          const auto absent = influence_set<1>(pi, ParticleLabel<1>{{0}, 2}, 1.0,
                                                            kernel, 0.5,
                                                            key.child(purpose::kWalk));
                          bool ok = absent.influenced.empty();

                          const StreamKey solo_key = key.child(purpose::kTrajectory);
                          const auto record = influence_set<1>(pi, ParticleLabel<1>{{0}, 1}, 3.0,
                                                            kernel, 0.5, solo_key);
                          LabeledOptions<1> opt;
                          opt.horizon = 3.0;
                          LabeledSim<1> solo(std::vector<ParticleLabel<1>>{{{0}, 1}}, kernel,
                                             0.5, solo_key, opt);
                          solo.run();
                          std::vector<Site<1>> visited;
                          for (const auto& [x, events] : solo.histories())
                              if (!events.empty()) visited.push_back(x);
                          std::sort(visited.begin(), visited.end());
                          ok = ok && visited == record.influenced;
                          c.passed = ok;
                          c.detail = "lone walker influenced " +
                                     std::to_string(record.influenced.size()) + " sites";
                      });
    return suite;
}

/// Labeled particle dynamics: final-state law matches site-wise
/// stabilization, histories do not depend on the exhaustion order, and
/// translated systems replay their randomness exactly.
inline VerifySuite verify_particlewise(StreamKey key) {
    VerifySuite suite{"particlewise", {}};
    const auto kernel = symmetric_walk<1>();

    detail::run_check(suite, "labeled and site-wise final-state laws agree",
                      [&](VerifyCheck& c) {
                          const std::int64_t samples = 4000;
                          const double lambda = 1.0;
                          const Box<1> window(1);
                          std::map<std::string, std::int64_t> site_hist, labeled_hist;
                          for (std::int64_t i = 0; i < samples; ++i) {
                              const StreamKey skey = key.child(purpose::kInstance)
                                                         .child(static_cast<std::uint64_t>(i));
                              SiteConfiguration<1> cfg(window);
                              for (const Site<1>& x : window.sites()) cfg.set_count(x, 1);
                              RandomTape<1> tape(skey, kernel, lambda);
                              const auto rep = stabilize(cfg, tape, kernel);
                              ++site_hist[detail::state_signature(rep.final_config)];

                              LabeledOptions<1> opt;
                              opt.freeze_window = window;
                              LabeledSim<1> sim(detail::LabeledCounts1{{{-1}, 1}, {{0}, 1}, {{1}, 1}}, kernel,
                                                lambda, skey, opt);
                              sim.run();
                              ++labeled_hist[detail::state_signature(
                                  sim.final_configuration(window))];
                          }
                          const double tv = detail::tv_between(site_hist, labeled_hist,
                                                               samples);
                          c.passed = tv <= 0.10;
                          c.detail = "empirical TV " + detail::fmt(tv) + " at " +
                                     std::to_string(samples) + " samples (limit 0.10)";
                      });

    detail::run_check(suite, "histories are independent of the exhaustion order",
                      [&](VerifyCheck& c) {
                          const InitialLaw law = InitialLaw::bernoulli(0.4);
                          const Box<1> region(4);
                          const Site<1> z{0};
                          std::int64_t both = 0, equal = 0;
                          const std::int64_t pairs = 8;
                          bool references_match = true;
                          for (std::int64_t i = 0; i < pairs; ++i) {
                              const StreamKey pkey = key.child(purpose::kReplica)
                                                         .child(static_cast<std::uint64_t>(i));
                              const auto lex = exhaustion_probe(
                                  law, kernel, 0.5, pkey, z, 1.5,
                                  VolumeSequence<1>::lexicographic(region));
                              const auto mixed = exhaustion_probe(
                                  law, kernel, 0.5, pkey, z, 1.5,
                                  VolumeSequence<1>::shuffled(region, pkey));
                              if (!(lex.history == mixed.history)) references_match = false;
                              if (lex.stabilized && mixed.stabilized) {
                                  ++both;
                                  if (lex.history == mixed.history) ++equal;
                              }
                          }
                          c.passed = references_match && both == equal && both >= 1;
                          c.detail = std::to_string(both) + "/" + std::to_string(pairs) +
                                     " pairs stabilized under both orders, " +
                                     std::to_string(equal) + " with equal histories";
                      });

    detail::run_check(suite, "translated systems replay their randomness",
                      [&](VerifyCheck& c) {
                          const auto drift = drifted_walk_1d(0.7);
                          const StreamKey skey = key.child(purpose::kWalk);
                          const Site<1> shift{7};
                          LabeledSim<1> base(detail::LabeledCounts1{{{-1}, 1}, {{0}, 2}, {{1}, 1}}, drift,
                                             0.5, skey);
                          LabeledOptions<1> opt;
                          opt.key_shift = shift;
                          LabeledSim<1> moved(detail::LabeledCounts1{{{6}, 1}, {{7}, 2}, {{8}, 1}}, drift,
                                              0.5, skey, opt);
                          base.run();
                          moved.run();
                          bool ok = base.histories().size() == moved.histories().size();
                          for (const auto& [site, events] : base.histories()) {
                              const auto& other = moved.site_history(add(site, shift));
                              if (events.size() != other.size()) {
                                  ok = false;
                                  break;
                              }
                              for (std::size_t i = 0; i < events.size(); ++i) {
                                  const auto& a = events[i];
                                  const auto& b = other[i];
                                  if (a.time != b.time || a.kind != b.kind ||
                                      add(a.label.origin, shift) != b.label.origin ||
                                      a.label.index != b.label.index)
                                      ok = false;
                              }
                          }
                          c.passed = ok;
                          c.detail = std::to_string(base.histories().size()) +
                                     " site histories compared after a 7-site shift";
                      });

    detail::run_check(suite, "window probe settles well inside its range",
                      [&](VerifyCheck& c) {
                          const auto probe = well_definedness_probe(
                              InitialLaw::bernoulli(0.3), kernel, 1.0,
                              key.child(purpose::kSleepClock), Site<1>{0}, 1.0, 10);
                          c.passed = probe.stabilized;
                          c.detail = probe.stabilized
                                         ? "stable from window " +
                                               std::to_string(probe.stable_n) + " of 10"
                                         : "last two windows still differ";
                      });
    return suite;
}

inline std::vector<VerifySuite> verify_all(StreamKey key) {
    return {verify_abelian(key.child(1)), verify_coupling(key.child(2)),
            verify_branching(key.child(3)), verify_particlewise(key.child(4))};
}

/// Dispatch by suite name; "all" runs every suite.
inline std::vector<VerifySuite> run_verify(const std::string& which, StreamKey key) {
    if (which == "all") return verify_all(key);
    if (which == "abelian") return {verify_abelian(key.child(1))};
    if (which == "coupling") return {verify_coupling(key.child(2))};
    if (which == "branching") return {verify_branching(key.child(3))};
    if (which == "particlewise") return {verify_particlewise(key.child(4))};
    throw ValidationError("unknown verify suite: " + which);
}

}  // namespace arw
