#pragma once

#include <algorithm>
#include <array>
#include <cstdint>
#include <cstdlib>
#include <functional>
#include <numeric>
#include <type_traits>
#include <vector>

#include "common.hpp"
#include "rng.hpp"

namespace arw {

/// Lattice site in d dimensions.  std::array comparison gives lexicographic
/// order, which is the tie-break order used throughout.
template <int D>
using Site = std::array<std::int64_t, D>;

/// Use for Site parameters whose D is deduced from another argument; the
/// array's size_t extent otherwise fails to unify with an int D.
template <int D>
using SiteArg = std::type_identity_t<Site<D>>;

template <int D>
constexpr Site<D> origin_site() {
    return Site<D>{};
}

template <std::size_t N>
constexpr std::array<std::int64_t, N> add(const std::array<std::int64_t, N>& a,
                                          const std::array<std::int64_t, N>& b) {
    std::array<std::int64_t, N> r{};
    for (std::size_t k = 0; k < N; ++k) r[k] = a[k] + b[k];
    return r;
}

template <std::size_t N>
constexpr std::array<std::int64_t, N> sub(const std::array<std::int64_t, N>& a,
                                          const std::array<std::int64_t, N>& b) {
    std::array<std::int64_t, N> r{};
    for (std::size_t k = 0; k < N; ++k) r[k] = a[k] - b[k];
    return r;
}

template <std::size_t N>
constexpr std::int64_t dot(const std::array<std::int64_t, N>& a,
                           const std::array<std::int64_t, N>& b) {
    std::int64_t s = 0;
    for (std::size_t k = 0; k < N; ++k) s += a[k] * b[k];
    return s;
}

/// Sup-norm distance from the origin.
template <std::size_t N>
constexpr std::int64_t sup_norm(const std::array<std::int64_t, N>& a) {
    std::int64_t m = 0;
    for (std::size_t k = 0; k < N; ++k) m = std::max(m, std::abs(a[k]));
    return m;
}

template <int D>
struct SiteHash {
    std::size_t operator()(const Site<D>& s) const {
        std::uint64_t h = 0x51cbe3f5d1a0932bULL;
        for (std::int64_t c : s) h = mix64(h ^ static_cast<std::uint64_t>(c));
        return static_cast<std::size_t>(h);
    }
};

/// Centered box {-radius, ..., radius}^D.
template <int D>
class Box {
  public:
    Box() = default;
    explicit Box(std::int64_t radius) : radius_(radius) {
        if (radius < 0) throw ValidationError("box radius must be nonnegative");
    }

    std::int64_t radius() const { return radius_; }
    std::int64_t side() const { return 2 * radius_ + 1; }

    std::int64_t volume() const {
        std::int64_t v = 1;
        for (int k = 0; k < D; ++k) v *= side();
        return v;
    }

    bool contains(const Site<D>& x) const {
        for (int k = 0; k < D; ++k)
            if (x[k] < -radius_ || x[k] > radius_) return false;
        return true;
    }

    /// Mixed-radix index of a site, in lexicographic order.
    std::int64_t index_of(const Site<D>& x) const {
        std::int64_t idx = 0;
        for (int k = 0; k < D; ++k) idx = idx * side() + (x[k] + radius_);
        return idx;
    }

    Site<D> site_at(std::int64_t idx) const {
        Site<D> x{};
        for (int k = D - 1; k >= 0; --k) {
            x[k] = idx % side() - radius_;
            idx /= side();
        }
        return x;
    }

    /// All sites in lexicographic order.
    std::vector<Site<D>> sites() const {
        std::vector<Site<D>> out;
        out.reserve(static_cast<std::size_t>(volume()));
        for (std::int64_t i = 0; i < volume(); ++i) out.push_back(site_at(i));
        return out;
    }

    friend bool operator==(const Box& a, const Box& b) { return a.radius_ == b.radius_; }

  private:
    std::int64_t radius_ = 0;
};

/// Half space {x : x . normal <= 0} with exact integer arithmetic.
template <int D>
class HalfSpace {
  public:
    explicit HalfSpace(const Site<D>& normal) : normal_(normal) {
        if (normal == Site<D>{}) throw ValidationError("half-space normal must be nonzero");
    }

    const Site<D>& normal() const { return normal_; }
    std::int64_t height(const Site<D>& x) const { return dot(x, normal_); }
    bool contains(const Site<D>& x) const { return height(x) <= 0; }

  private:
    Site<D> normal_;
};

/// Finite site set with deterministic (lexicographic) iteration order.
template <int D>
class SiteSet {
  public:
    SiteSet() = default;
    explicit SiteSet(std::vector<Site<D>> sites) : sites_(std::move(sites)) {
        std::sort(sites_.begin(), sites_.end());
        sites_.erase(std::unique(sites_.begin(), sites_.end()), sites_.end());
    }

    static SiteSet from_box(const Box<D>& box) { return SiteSet(box.sites()); }

    bool contains(const Site<D>& x) const {
        return std::binary_search(sites_.begin(), sites_.end(), x);
    }

    std::size_t size() const { return sites_.size(); }
    bool empty() const { return sites_.empty(); }
    const std::vector<Site<D>>& sites() const { return sites_; }

    /// Set difference, preserving order.
    SiteSet minus(const SiteSet& other) const {
        std::vector<Site<D>> out;
        std::set_difference(sites_.begin(), sites_.end(), other.sites_.begin(),
                            other.sites_.end(), std::back_inserter(out));
        SiteSet r;
        r.sites_ = std::move(out);
        return r;
    }

    bool subset_of(const SiteSet& other) const {
        return std::includes(other.sites_.begin(), other.sites_.end(), sites_.begin(),
                             sites_.end());
    }

  private:
    std::vector<Site<D>> sites_;
};

/// Sites of a box sorted by increasing projection onto `direction`,
/// lexicographic among ties.  This is the sweep order of the rolling
/// strategy: larger projection means deeper into the forward half space.
template <int D>
std::vector<Site<D>> projection_order(const Box<D>& box, const SiteArg<D>& direction) {
    std::vector<Site<D>> order = box.sites();
    std::stable_sort(order.begin(), order.end(), [&](const Site<D>& a, const Site<D>& b) {
        const std::int64_t pa = dot(a, direction), pb = dot(b, direction);
        if (pa != pb) return pa < pb;
        return a < b;
    });
    return order;
}

} // namespace arw
