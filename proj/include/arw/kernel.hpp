#pragma once

#include <cmath>
#include <cstdint>
#include <map>
#include <numeric>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "common.hpp"
#include "geometry.hpp"
#include "rng.hpp"

namespace arw {

/// Jump distribution p(.) on Z^d with finite support, plus an optional
/// preferred direction used by sweeps and half-space estimates.
template <int D>
class JumpKernel {
  public:
    JumpKernel(std::vector<Site<D>> offsets, std::vector<double> probabilities,
               std::optional<Site<D>> bias = std::nullopt)
        : offsets_(std::move(offsets)), probs_(std::move(probabilities)) {
        validate();
        cumulative_.resize(probs_.size());
        double acc = 0.0;
        for (std::size_t i = 0; i < probs_.size(); ++i) {
            acc += probs_[i];
            cumulative_[i] = acc;
        }
        cumulative_.back() = 1.0;
        if (bias) bias_ = normalize_direction(*bias);
    }

    std::size_t support_size() const { return offsets_.size(); }
    const std::vector<Site<D>>& offsets() const { return offsets_; }
    const std::vector<double>& probabilities() const { return probs_; }
    const Site<D>& offset(std::size_t i) const { return offsets_[i]; }
    double probability(std::size_t i) const { return probs_[i]; }
    const std::optional<Site<D>>& bias() const { return bias_; }

    std::size_t sample_index(RngStream& rng) const { return rng.pick(cumulative_); }
    const Site<D>& sample(RngStream& rng) const { return offsets_[sample_index(rng)]; }

    /// Mean displacement vector.
    std::array<double, D> drift() const {
        std::array<double, D> m{};
        for (std::size_t i = 0; i < offsets_.size(); ++i)
            for (int k = 0; k < D; ++k) m[k] += probs_[i] * static_cast<double>(offsets_[i][k]);
        return m;
    }

    /// Mean displacement along an integer direction.
    double drift_along(const Site<D>& direction) const {
        double s = 0.0;
        for (std::size_t i = 0; i < offsets_.size(); ++i)
            s += probs_[i] * static_cast<double>(dot(offsets_[i], direction));
        return s;
    }

    /// Law of the projection x . direction, aggregated over offsets.
    std::vector<std::pair<std::int64_t, double>> projected(const Site<D>& direction) const {
        std::map<std::int64_t, double> agg;
        for (std::size_t i = 0; i < offsets_.size(); ++i)
            agg[dot(offsets_[i], direction)] += probs_[i];
        return {agg.begin(), agg.end()};
    }

    /// Reduce an integer direction by the gcd of its entries.
    static Site<D> normalize_direction(const Site<D>& v) {
        std::int64_t g = 0;
        for (std::int64_t c : v) g = std::gcd(g, std::abs(c));
        if (g == 0) throw ValidationError("direction must be nonzero");
        Site<D> out{};
        for (int k = 0; k < D; ++k) out[k] = v[k] / g;
        return out;
    }

  private:
    void validate() const {
        if (offsets_.empty() || offsets_.size() != probs_.size())
            throw ValidationError("kernel support and probabilities must be nonempty and equal-sized");
        std::set<Site<D>> seen;
        double total = 0.0;
        for (std::size_t i = 0; i < offsets_.size(); ++i) {
            if (!(probs_[i] > 0.0) || probs_[i] > 1.0)
                throw ValidationError("kernel probabilities must lie in (0, 1]");
            if (!seen.insert(offsets_[i]).second)
                throw ValidationError("kernel offsets must be distinct");
            total += probs_[i];
        }
        if (std::abs(total - 1.0) > 1e-12)
            throw ValidationError("kernel probabilities must sum to 1 within 1e-12");
        for (std::size_t i = 0; i < offsets_.size(); ++i)
            if (offsets_[i] == Site<D>{} && probs_[i] >= 1.0 - 1e-12)
                throw ValidationError("kernel must move: p(origin) = 1 never stabilizes");
    }

    std::vector<Site<D>> offsets_;
    std::vector<double> probs_;
    std::vector<double> cumulative_;
    std::optional<Site<D>> bias_;
};

/// Nearest-neighbor kernel on Z with P(+1) = p.
inline JumpKernel<1> drifted_walk_1d(double p) {
    if (p <= 0.0 || p > 1.0) throw ValidationError("p must lie in (0, 1]");
    std::vector<Site<1>> offs{{+1}};
    std::vector<double> probs{p};
    if (p < 1.0) {
        offs.push_back({-1});
        probs.push_back(1.0 - p);
    }
    return JumpKernel<1>(std::move(offs), std::move(probs), Site<1>{+1});
}

/// Symmetric nearest-neighbor kernel on Z^D.
template <int D>
JumpKernel<D> symmetric_walk() {
    std::vector<Site<D>> offs;
    std::vector<double> probs;
    for (int k = 0; k < D; ++k) {
        for (int sgn : {-1, +1}) {
            Site<D> e{};
            e[k] = sgn;
            offs.push_back(e);
            probs.push_back(1.0 / (2 * D));
        }
    }
    return JumpKernel<D>(std::move(offs), std::move(probs));
}

} // namespace arw
