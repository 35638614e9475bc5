#pragma once

#include <cstdint>
#include <map>

#include "common.hpp"
#include "geometry.hpp"
#include "grid.hpp"

namespace arw {

/// State of one site: particle count plus whether the single occupant is
/// asleep.  A sleeping cell always has count exactly 1.
struct Cell {
    std::int64_t count = 0;
    bool sleeping = false;

    friend bool operator==(const Cell& a, const Cell& b) {
        return a.count == b.count && a.sleeping == b.sleeping;
    }
};

/// Particle configuration on a finite window, plus a ledger of particles
/// that left the window and froze at their first exterior site.
template <int D>
class SiteConfiguration {
  public:
    SiteConfiguration() = default;
    explicit SiteConfiguration(const Box<D>& window) : window_(window), cells_(window) {}

    const Box<D>& window() const { return window_; }

    const Cell& cell(const Site<D>& x) const { return cells_.at(x); }
    Cell& cell(const Site<D>& x) { return cells_.at(x); }

    std::int64_t count(const Site<D>& x) const { return cells_.at(x).count; }
    bool sleeping(const Site<D>& x) const { return cells_.at(x).sleeping; }

    /// A site can topple iff it holds an active particle.
    bool unstable(const Site<D>& x) const {
        const Cell& c = cells_.at(x);
        return c.count > 0 && !c.sleeping;
    }

    bool stable() const {
        for (const Cell& c : cells_.data())
            if (c.count > 0 && !c.sleeping) return false;
        return true;
    }

    void set_count(const Site<D>& x, std::int64_t n) {
        if (n < 0) throw ValidationError("particle counts must be nonnegative");
        cells_.at(x) = Cell{n, false};
    }

    /// Particles that froze outside the window, by landing site.
    const std::map<Site<D>, std::int64_t>& exited() const { return exited_; }
    void record_exit(const Site<D>& landing, std::int64_t n = 1) { exited_[landing] += n; }

    std::int64_t interior_particles() const {
        std::int64_t total = 0;
        for (const Cell& c : cells_.data()) total += c.count;
        return total;
    }

    std::int64_t exited_particles() const {
        std::int64_t total = 0;
        for (const auto& [site, n] : exited_) total += n;
        return total;
    }

    std::int64_t total_particles() const { return interior_particles() + exited_particles(); }

    std::int64_t sleeper_count() const {
        std::int64_t total = 0;
        for (const Cell& c : cells_.data()) total += c.sleeping ? 1 : 0;
        return total;
    }

    friend bool operator==(const SiteConfiguration& a, const SiteConfiguration& b) {
        return a.cells_ == b.cells_ && a.exited_ == b.exited_;
    }

  private:
    Box<D> window_;
    Grid<D, Cell> cells_;
    std::map<Site<D>, std::int64_t> exited_;
};

} // namespace arw
