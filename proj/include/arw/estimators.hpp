#pragma once

#include <cmath>
#include <cstdint>
#include <vector>

#include "absorbing_chain.hpp"
#include "common.hpp"
#include "halfspace_walk.hpp"
#include "initial_law.hpp"
#include "kernel.hpp"
#include "parallel.hpp"
#include "sitewise.hpp"

namespace arw {

enum class FMethod { MonteCarlo, AbsorbingChain };

/// Estimate of E[(1+lambda)^-occupation] for the half-space occupation of
/// one walk.  `lower` and `upper` bracket the truth: truncated walks and
/// the escape-certification error widen the bracket instead of biasing the
/// point estimate.
struct FEstimate {
    double estimate = 0.0;
    double lower = 0.0;
    double upper = 1.0;
    double std_error = 0.0;
    double residual = 1.0;
    std::int64_t samples = 0;
    std::int64_t truncated = 0;
    FMethod method = FMethod::MonteCarlo;
    bool drift_warning = false;
};

/// Monte Carlo estimate.  Walk streams are keyed by sample index only, so
/// runs at different sleep rates reuse the same walks and the estimate is
/// pathwise monotone in lambda.
template <int D>
FEstimate estimate_return_weight_mc(const JumpKernel<D>& kernel, const SiteArg<D>& direction,
                                    double lambda, std::int64_t samples, StreamKey key,
                                    std::int64_t max_steps = 1'000'000, int threads = 1) {
    if (lambda < 0.0) throw ValidationError("sleep rate must be nonnegative");
    if (samples <= 0) throw ValidationError("sample count must be positive");
    const double beta = 1.0 / (1.0 + lambda);
    const auto escape = certified_escape_height<D>(kernel, direction);
    const double certify_gap =
        escape ? return_probability_bound<D>(kernel, direction, *escape) : 0.0;

    std::vector<double> upper_values(static_cast<std::size_t>(samples));
    std::vector<char> truncated_flags(static_cast<std::size_t>(samples), 0);
    parallel_for(samples, threads, [&](std::int64_t i) {
        RngStream rng(key.child(purpose::kWalk).child(static_cast<std::uint64_t>(i)));
        const OccupationSample occ =
            half_space_occupation(kernel, direction, rng, max_steps);
        upper_values[static_cast<std::size_t>(i)] =
            std::pow(beta, static_cast<double>(occ.count));
        truncated_flags[static_cast<std::size_t>(i)] = occ.truncated ? 1 : 0;
    });

    FEstimate out;
    out.method = FMethod::MonteCarlo;
    out.samples = samples;
    out.drift_warning = kernel.drift_along(direction) <= 0.0;

    double up_sum = 0.0, lo_sum = 0.0;
    for (std::int64_t i = 0; i < samples; ++i) {
        const double v = upper_values[static_cast<std::size_t>(i)];
        up_sum += v;
        if (truncated_flags[static_cast<std::size_t>(i)]) ++out.truncated;
        else lo_sum += v;
    }
    const double n = static_cast<double>(samples);
    out.upper = up_sum / n;
    out.lower = std::max(0.0, lo_sum / n - certify_gap);
    out.estimate = 0.5 * (out.lower + out.upper);
    out.residual = out.upper - out.lower;

    double ss = 0.0;
    for (double v : upper_values) ss += (v - out.upper) * (v - out.upper);
    out.std_error = samples > 1 ? std::sqrt(ss / (n * (n - 1.0))) : 0.0;
    return out;
}

/// Exact bracket via the absorbed tridiagonal system; one-dimensional
/// projected increments only.
template <int D>
FEstimate estimate_return_weight_exact(const JumpKernel<D>& kernel,
                                       const SiteArg<D>& direction, double lambda,
                                       double target_residual = 1e-10) {
    const ExactBracket b = exact_return_weight(kernel, direction, lambda, target_residual);
    FEstimate out;
    out.method = FMethod::AbsorbingChain;
    out.lower = b.lower;
    out.upper = b.upper;
    out.estimate = b.midpoint();
    out.residual = b.residual();
    out.std_error = 0.0;
    out.samples = 0;
    out.drift_warning = kernel.drift_along(direction) <= 0.0;
    return out;
}

/// The sustained-activity margin: activity persists at density mu when
/// mu > 1 - F.  Certification uses the conservative side of the bracket.
struct SustainedActivityCheck {
    double mu = 0.0;
    double threshold_upper = 1.0;  ///< 1 - F.lower
    double threshold_lower = 0.0;  ///< 1 - F.upper
    double margin = 0.0;           ///< mu - threshold_upper
    bool certified = false;
};

inline SustainedActivityCheck sustained_activity_check(double mu, const FEstimate& f) {
    SustainedActivityCheck c;
    c.mu = mu;
    c.threshold_upper = 1.0 - f.lower;
    c.threshold_lower = 1.0 - f.upper;
    c.margin = mu - c.threshold_upper;
    c.certified = c.margin > 0.0;
    return c;
}

struct CurvePoint {
    std::int64_t radius = 0;
    std::int64_t volume = 0;
    double mean = 0.0;
    double std_error = 0.0;
    std::int64_t replicas = 0;
};

struct ExitDensityCurve {
    std::vector<CurvePoint> points;
    Strategy strategy = Strategy::Greedy;
    std::uint64_t seed = 0;
};

namespace detail {

template <int D>
Site<D> sweep_direction(const JumpKernel<D>& kernel) {
    if (kernel.bias()) return *kernel.bias();
    throw ValidationError("rolling stabilization needs a kernel bias direction");
}

} // namespace detail

/// One stabilization replica for a sweep point; exposed so callers can
/// reproduce any single curve cell.
template <int D>
StabilizationReport<D> sweep_replica(const JumpKernel<D>& kernel, double lambda,
                                     const InitialLaw& law, std::int64_t radius,
                                     Strategy strategy, StreamKey replica_key,
                                     std::int64_t budget = kDefaultTopplingBudget) {
    const Box<D> window(radius);
    const auto init = sample_initial(law, window, replica_key.child(purpose::kInstance));
    RandomTape<D> tape(replica_key, kernel, lambda);
    switch (strategy) {
        case Strategy::Rolling:
            return stabilize_rolling(init, tape, kernel, detail::sweep_direction(kernel),
                                     budget);
        case Strategy::RandomOrder:
            return stabilize_random_order(init, tape, kernel,
                                          replica_key.child(purpose::kShuffle), budget);
        case Strategy::Greedy: break;
    }
    return stabilize(init, tape, kernel, budget);
}

template <int D>
StreamKey sweep_replica_key(StreamKey base, std::int64_t radius, std::int64_t replica) {
    return base.child(purpose::kReplica)
        .child(static_cast<std::uint64_t>(radius))
        .child(static_cast<std::uint64_t>(replica));
}

/// Mean exit density M / |V| across replicas, per window radius.  Replica
/// streams are keyed by (radius, replica index), so curves are independent
/// of evaluation order and thread count.
template <int D>
ExitDensityCurve exit_density_sweep(const JumpKernel<D>& kernel, double lambda,
                                    const InitialLaw& law,
                                    const std::vector<std::int64_t>& radii,
                                    std::int64_t replicas, Strategy strategy,
                                    std::uint64_t seed,
                                    std::int64_t budget = kDefaultTopplingBudget,
                                    int threads = 1) {
    if (replicas <= 0) throw ValidationError("replica count must be positive");
    const StreamKey base = StreamKey::root(seed);
    ExitDensityCurve curve;
    curve.strategy = strategy;
    curve.seed = seed;
    for (const std::int64_t radius : radii) {
        const Box<D> window(radius);
        std::vector<double> densities(static_cast<std::size_t>(replicas));
        parallel_for(replicas, threads, [&](std::int64_t i) {
            const auto rep = sweep_replica(kernel, lambda, law, radius, strategy,
                                           sweep_replica_key<D>(base, radius, i), budget);
            densities[static_cast<std::size_t>(i)] =
                static_cast<double>(rep.exit_count) / static_cast<double>(window.volume());
        });
        CurvePoint pt;
        pt.radius = radius;
        pt.volume = window.volume();
        pt.replicas = replicas;
        double s = 0.0;
        for (double d : densities) s += d;
        pt.mean = s / static_cast<double>(replicas);
        double ss = 0.0;
        for (double d : densities) ss += (d - pt.mean) * (d - pt.mean);
        pt.std_error = replicas > 1
                           ? std::sqrt(ss / (static_cast<double>(replicas) *
                                             (static_cast<double>(replicas) - 1.0)))
                           : 0.0;
        curve.points.push_back(pt);
    }
    return curve;
}

/// Rolling-strategy accounting across replicas: the conservation inequality
/// (exits >= initial particles - sleep events) is checked per replica, and
/// per-step sleep frequencies are pooled.
struct RollingBoundReport {
    std::int64_t replicas = 0;
    std::int64_t violations = 0;
    double mean_exit_density = 0.0;
    double se_exit_density = 0.0;
    double mean_left_behind_density = 0.0;
    double per_step_sleep_rate = 0.0;
    std::int64_t total_steps = 0;
    std::int64_t total_sleeps = 0;
};

template <int D>
RollingBoundReport rolling_lower_bound_report(const JumpKernel<D>& kernel, double lambda,
                                              const InitialLaw& law, std::int64_t radius,
                                              std::int64_t replicas, std::uint64_t seed,
                                              std::int64_t budget = kDefaultTopplingBudget,
                                              int threads = 1) {
    const StreamKey base = StreamKey::root(seed);
    const Box<D> window(radius);
    std::vector<double> densities(static_cast<std::size_t>(replicas));
    std::vector<double> left(static_cast<std::size_t>(replicas));
    std::vector<std::int64_t> steps(static_cast<std::size_t>(replicas));
    std::vector<std::int64_t> sleeps(static_cast<std::size_t>(replicas));
    std::vector<char> violated(static_cast<std::size_t>(replicas), 0);

    parallel_for(replicas, threads, [&](std::int64_t i) {
        const auto rep = sweep_replica(kernel, lambda, law, radius, Strategy::Rolling,
                                       sweep_replica_key<D>(base, radius, i), budget);
        const auto u = static_cast<std::size_t>(i);
        densities[u] =
            static_cast<double>(rep.exit_count) / static_cast<double>(window.volume());
        left[u] =
            static_cast<double>(rep.left_behind) / static_cast<double>(window.volume());
        steps[u] = rep.tally.steps_followed;
        sleeps[u] = rep.tally.sleeps;
        violated[u] = rep.exit_count < rep.initial_particles - rep.left_behind ? 1 : 0;
    });

    RollingBoundReport out;
    out.replicas = replicas;
    double s = 0.0, sl = 0.0;
    for (std::int64_t i = 0; i < replicas; ++i) {
        const auto u = static_cast<std::size_t>(i);
        s += densities[u];
        sl += left[u];
        out.total_steps += steps[u];
        out.total_sleeps += sleeps[u];
        out.violations += violated[u];
    }
    out.mean_exit_density = s / static_cast<double>(replicas);
    out.mean_left_behind_density = sl / static_cast<double>(replicas);
    double ss = 0.0;
    for (std::int64_t i = 0; i < replicas; ++i) {
        const double d = densities[static_cast<std::size_t>(i)] - out.mean_exit_density;
        ss += d * d;
    }
    out.se_exit_density =
        replicas > 1 ? std::sqrt(ss / (static_cast<double>(replicas) *
                                       (static_cast<double>(replicas) - 1.0)))
                     : 0.0;
    out.per_step_sleep_rate =
        out.total_steps > 0
            ? static_cast<double>(out.total_sleeps) / static_cast<double>(out.total_steps)
            : 0.0;
    return out;
}

} // namespace arw
