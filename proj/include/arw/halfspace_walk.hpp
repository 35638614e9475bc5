#pragma once

#include <cmath>
#include <cstdint>
#include <optional>
#include <vector>

#include "common.hpp"
#include "geometry.hpp"
#include "kernel.hpp"
#include "rng.hpp"

namespace arw {

/// Exponential tilt of the projected step law: phi(theta) = E[exp(-theta S)]
/// where S is one projected increment.
template <int D>
double tilt(const JumpKernel<D>& kernel, const SiteArg<D>& direction, double theta) {
    double s = 0.0;
    for (const auto& [step, prob] : kernel.projected(direction))
        s += prob * std::exp(-theta * static_cast<double>(step));
    return s;
}

/// Positive root of phi(theta) = 1, which exists exactly when the projected
/// drift is positive and a negative increment is possible.  The probability
/// of ever re-entering the half space from height s is at most
/// exp(-theta* s).
template <int D>
std::optional<double> decay_rate(const JumpKernel<D>& kernel, const SiteArg<D>& direction) {
    if (kernel.drift_along(direction) <= 0.0) return std::nullopt;
    bool has_negative = false;
    for (const auto& [step, prob] : kernel.projected(direction))
        if (step < 0) has_negative = true;
    if (!has_negative) return std::nullopt;

    double hi = 1.0;
    while (tilt(kernel, direction, hi) < 1.0) {
        hi *= 2.0;
        if (hi > 1e6) return std::nullopt;
    }
    double lo = 0.0;
    for (int iter = 0; iter < 200; ++iter) {
        const double mid = 0.5 * (lo + hi);
        if (tilt(kernel, direction, mid) < 1.0) lo = mid; else hi = mid;
    }
    return 0.5 * (lo + hi);
}

/// Upper bound on the probability that a walk at height s > 0 ever returns
/// to the half space.  1 when nothing can be certified.
template <int D>
double return_probability_bound(const JumpKernel<D>& kernel, const SiteArg<D>& direction,
                                std::int64_t height) {
    bool has_negative = false;
    for (const auto& [step, prob] : kernel.projected(direction))
        if (step < 0) has_negative = true;
    if (!has_negative) return 0.0;
    const auto theta = decay_rate(kernel, direction);
    if (!theta) return 1.0;
    return std::exp(-*theta * static_cast<double>(height));
}

/// Smallest height h with return_probability_bound(h) <= tol, if one exists.
template <int D>
std::optional<std::int64_t> certified_escape_height(const JumpKernel<D>& kernel,
                                                    const SiteArg<D>& direction,
                                                    double tol = 1e-6) {
    bool has_negative = false;
    for (const auto& [step, prob] : kernel.projected(direction))
        if (step < 0) has_negative = true;
    if (!has_negative) return 1;
    const auto theta = decay_rate(kernel, direction);
    if (!theta) return std::nullopt;
    return static_cast<std::int64_t>(std::ceil(-std::log(tol) / *theta)) + 1;
}

/// One sampled walk from the origin: the number of time indexes spent in
/// the half space {x . direction <= 0}, counting time 0.  The walk stops
/// once its height certifies escape; `truncated` marks walks that hit the
/// step limit first, for which `count` is only a lower bound.
struct OccupationSample {
    std::int64_t count = 0;
    std::int64_t steps = 0;
    bool truncated = false;
};

template <int D>
OccupationSample half_space_occupation(const JumpKernel<D>& kernel,
                                       const SiteArg<D>& direction, RngStream& rng,
                                       std::int64_t max_steps = 1'000'000) {
    const auto escape = certified_escape_height<D>(kernel, direction);
    OccupationSample out;
    std::int64_t height = 0;
    for (;;) {
        if (height <= 0) ++out.count;
        else if (escape && height >= *escape) return out;
        if (out.steps >= max_steps) {
            out.truncated = true;
            return out;
        }
        height += dot(kernel.sample(rng), direction);
        ++out.steps;
    }
}

} // namespace arw
