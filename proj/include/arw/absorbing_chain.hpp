#pragma once

#include <cmath>
#include <cstdint>
#include <optional>
#include <vector>

#include "common.hpp"
#include "geometry.hpp"
#include "halfspace_walk.hpp"
#include "kernel.hpp"

namespace arw {

/// Projected step law restricted to increments {-1, 0, +1}.
struct ProjectedStepLaw {
    double down = 0.0;
    double stay = 0.0;
    double up = 0.0;
};

template <int D>
ProjectedStepLaw nearest_neighbor_projection(const JumpKernel<D>& kernel,
                                             const SiteArg<D>& direction) {
    ProjectedStepLaw law;
    for (const auto& [step, prob] : kernel.projected(direction)) {
        if (step == -1) law.down = prob;
        else if (step == 0) law.stay = prob;
        else if (step == 1) law.up = prob;
        else
            throw NotNearestNeighbor(
                "exact solver needs projected increments in {-1, 0, +1}");
    }
    return law;
}

/// Thomas algorithm.  Row i: diag[i] x[i] + sub[i] x[i-1] + super[i] x[i+1]
/// = rhs[i], with sub[0] and super[n-1] ignored.
inline std::vector<double> solve_tridiagonal(const std::vector<double>& sub,
                                             std::vector<double> diag,
                                             const std::vector<double>& super,
                                             std::vector<double> rhs) {
    const std::size_t n = diag.size();
    for (std::size_t i = 1; i < n; ++i) {
        const double w = sub[i] / diag[i - 1];
        diag[i] -= w * super[i - 1];
        rhs[i] -= w * rhs[i - 1];
    }
    std::vector<double> x(n);
    x[n - 1] = rhs[n - 1] / diag[n - 1];
    for (std::size_t i = n - 1; i-- > 0;) x[i] = (rhs[i] - super[i] * x[i + 1]) / diag[i];
    return x;
}

/// Rigorous bracket on a scalar quantity.
struct ExactBracket {
    double lower = 0.0;
    double upper = 1.0;
    double midpoint() const { return 0.5 * (lower + upper); }
    double residual() const { return upper - lower; }
};

namespace detail {

/// Solve G(s) = c(s) [q- G(s-1) + q0 G(s) + q+ G(s+1)] on s in [-m, M],
/// with c(s) = beta for s <= 0 and 1 otherwise, and prescribed values at
/// the absorbed boundary heights -m-1 and M+1.
inline double weighted_return_solve(const ProjectedStepLaw& q, double beta, std::int64_t m,
                                    std::int64_t big_m, double bottom, double top) {
    const std::size_t n = static_cast<std::size_t>(m + big_m + 1);
    std::vector<double> sub(n), diag(n), super(n), rhs(n, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        const std::int64_t s = static_cast<std::int64_t>(i) - m;
        const double c = s <= 0 ? beta : 1.0;
        diag[i] = 1.0 - c * q.stay;
        sub[i] = -c * q.down;
        super[i] = -c * q.up;
        if (i == 0) rhs[i] += c * q.down * bottom;
        if (i == n - 1) rhs[i] += c * q.up * top;
    }
    const auto x = solve_tridiagonal(sub, diag, super, rhs);
    return x[static_cast<std::size_t>(m)];
}

} // namespace detail

/// E[beta^occupation] for the projected walk started at height 0, where
/// occupation counts the time indexes at height <= 0 (time 0 included) and
/// beta = 1/(1 + lambda).  Computed as a rigorous bracket by solving the
/// absorbed linear system twice, once with each boundary rounded outward:
/// below depth -m every path must make at least m + 2 more visits, and
/// above height M + 1 the return probability is at most exp(-theta (M+1)).
template <int D>
ExactBracket exact_return_weight(const JumpKernel<D>& kernel, const SiteArg<D>& direction,
                                 double lambda, double target_residual = 1e-10,
                                 std::int64_t max_depth = 1 << 15) {
    if (lambda < 0.0) throw ValidationError("sleep rate must be nonnegative");
    const double beta = 1.0 / (1.0 + lambda);
    if (lambda == 0.0) return ExactBracket{1.0, 1.0};

    const ProjectedStepLaw q = nearest_neighbor_projection(kernel, direction);
    // Zero or negative drift keeps the walk in the half space for infinitely
    // many indexes, so the weight vanishes.
    if (kernel.drift_along(direction) <= 0.0) return ExactBracket{0.0, 0.0};

    const auto theta = decay_rate(kernel, direction);
    ExactBracket bracket;
    for (std::int64_t depth = 64; depth <= max_depth; depth *= 2) {
        const std::int64_t m = depth, big_m = depth;
        const double bottom_upper = std::pow(beta, static_cast<double>(m + 2));
        const double top_lower =
            1.0 - (q.down > 0.0
                       ? (theta ? std::exp(-*theta * static_cast<double>(big_m + 1)) : 1.0)
                       : 0.0);
        bracket.upper = detail::weighted_return_solve(q, beta, m, big_m, bottom_upper, 1.0);
        bracket.lower =
            detail::weighted_return_solve(q, beta, m, big_m, 0.0, std::max(0.0, top_lower));
        if (bracket.residual() <= target_residual) break;
    }
    return bracket;
}

/// Distribution of the half-space occupation count, computed by forward
/// propagation of probability mass over (height, visits so far).  Mass is
/// resolved when the walk's height certifies escape; anything the horizon
/// or the height floor leaves unresolved is reported, not dropped.
struct OccupationDistribution {
    std::vector<double> probability;  ///< P(count = k) for k = 0..K
    double tail = 0.0;                ///< P(count > K), resolved walks only
    double unresolved = 0.0;          ///< mass not resolved within the bounds
};

template <int D>
OccupationDistribution occupation_distribution(const JumpKernel<D>& kernel,
                                               const SiteArg<D>& direction, std::int64_t max_k,
                                               std::int64_t horizon = 4000,
                                               std::int64_t floor_depth = 80) {
    const ProjectedStepLaw q = nearest_neighbor_projection(kernel, direction);
    const double certify_tol = 1e-9;
    const auto ceiling = certified_escape_height<D>(kernel, direction, certify_tol);

    OccupationDistribution out;
    out.probability.assign(static_cast<std::size_t>(max_k) + 1, 0.0);
    if (!ceiling) {
        // No certification possible: every visit count stays unresolved.
        out.unresolved = 1.0;
        return out;
    }

    const std::int64_t top = *ceiling;
    const std::int64_t span = floor_depth + top + 1;
    const std::int64_t kcap = max_k + 1;  // last slot aggregates counts > max_k

    std::vector<double> mass(static_cast<std::size_t>(span * (kcap + 1)), 0.0);
    const auto at = [&](std::int64_t s, std::int64_t k) -> double& {
        return mass[static_cast<std::size_t>((s + floor_depth) * (kcap + 1) +
                                             std::min(k, kcap))];
    };
    at(0, 1) = 1.0;  // time 0 counts: the walk starts inside the half space

    std::vector<double> next(mass.size(), 0.0);
    const auto move = [&](std::vector<double>& dst, std::int64_t s, std::int64_t k, double m) {
        if (m == 0.0) return;
        if (s >= top) {
            // Certified escape: resolve, charging the certification error.
            if (k <= max_k) out.probability[static_cast<std::size_t>(k)] += m;
            else out.tail += m;
            out.unresolved += m * certify_tol;
            return;
        }
        if (s < -floor_depth) {
            out.unresolved += m;
            return;
        }
        dst[static_cast<std::size_t>((s + floor_depth) * (kcap + 1) + std::min(k, kcap))] += m;
    };

    for (std::int64_t step = 0; step < horizon; ++step) {
        std::fill(next.begin(), next.end(), 0.0);
        double remaining = 0.0;
        for (std::int64_t s = -floor_depth; s < top; ++s) {
            for (std::int64_t k = 0; k <= kcap; ++k) {
                const double m = at(s, k);
                if (m == 0.0) continue;
                remaining += m;
                const auto hop = [&](std::int64_t ds, double prob) {
                    if (prob == 0.0) return;
                    const std::int64_t s2 = s + ds;
                    move(next, s2, k + (s2 <= 0 ? 1 : 0), m * prob);
                };
                hop(-1, q.down);
                hop(0, q.stay);
                hop(+1, q.up);
            }
        }
        mass.swap(next);
        if (remaining < 1e-15) break;
    }
    for (double m : mass) out.unresolved += m;
    return out;
}

} // namespace arw
