#pragma once

#include <cmath>
#include <cstdint>
#include <limits>
#include <map>
#include <optional>
#include <utility>
#include <vector>

#include "common.hpp"
#include "geometry.hpp"
#include "initial_law.hpp"
#include "kernel.hpp"
#include "rng.hpp"
#include "tape.hpp"

namespace arw {

enum class Color : std::uint8_t { Blue = 0, Red = 1 };

inline const char* color_name(Color c) { return c == Color::Blue ? "blue" : "red"; }

/// Counts by color plus the single sleeper slot.  A sleeper exists only
/// when the site holds exactly one particle counting both colors, so one
/// optional flag is enough to record which color naps.
struct TwoColorCell {
    std::int64_t blue = 0;
    std::int64_t red = 0;
    std::optional<Color> sleeper;

    std::int64_t total() const { return blue + red; }
    std::int64_t count(Color c) const { return c == Color::Blue ? blue : red; }
    std::int64_t active(Color c) const {
        return count(c) - ((sleeper && *sleeper == c) ? 1 : 0);
    }
    bool operator==(const TwoColorCell&) const = default;
};

template <int D>
struct TwoColorEvent {
    double time = 0.0;
    Site<D> site{};
    Color color = Color::Blue;
    Instruction instruction = 0;
    bool slept = false;      // sleep instruction that found the particle alone
    bool converted = false;  // jump that landed outside the region

    bool operator==(const TwoColorEvent&) const = default;
};

template <int D>
struct TwoColorOptions {
    double horizon = std::numeric_limits<double>::infinity();
    std::int64_t event_budget = 10'000'000;
    /// Freeze converted particles at their landing site instead of letting
    /// them keep moving: this is the region-restricted process.
    bool restrict_exits = false;
    /// Overridable so a run with no red particles can replay the exact
    /// randomness of the single-color continuous dynamics.
    std::uint64_t blue_tape_purpose = purpose::kTapeBlue;
    std::uint64_t blue_clock_purpose = purpose::kClockBlue;
};

/// Two populations on one lattice, each with its own instruction tapes and
/// mark clocks.  Blue particles start inside the region and are recolored
/// red the moment a jump lands outside it; both colors block each other's
/// naps and wake each other on arrival.  All per-site randomness is fixed
/// by the key, so runs sharing a key consume identical tapes and marks
/// whatever the initial red population: nested initial conditions couple
/// pathwise, and the conversion count (the number of particles that have
/// left the region) can be compared sample by sample.
template <int D>
class TwoColorSim {
  public:
    TwoColorSim(SiteSet<D> region, const std::map<Site<D>, std::int64_t>& blue0,
                const std::map<Site<D>, std::int64_t>& red0, const JumpKernel<D>& kernel,
                double lambda, StreamKey key, TwoColorOptions<D> options = {})
        : region_(std::move(region)), kernel_(&kernel), lambda_(lambda), key_(key),
          options_(options), blue_tape_(key, kernel, lambda, options.blue_tape_purpose),
          red_tape_(key, kernel, lambda, purpose::kTapeRed) {
        if (lambda < 0.0) throw ValidationError("sleep rate must be nonnegative");
        for (const auto& [x, n] : blue0) {
            if (n < 0) throw ValidationError("negative initial count");
            if (n == 0) continue;
            if (!region_.contains(x))
                throw ValidationError("blue particles must start inside the region");
            ensure_site(x, 0.0).cell.blue = n;
            initial_blue_ += n;
        }
        for (const auto& [x, n] : red0) {
            if (n < 0) throw ValidationError("negative initial count");
            if (n == 0) continue;
            if (options_.restrict_exits)
                throw ValidationError("the restricted process has no red particles");
            ensure_site(x, 0.0).cell.red += n;
            initial_red_ += n;
        }
    }

    void run() {
        for (;;) {
            double best = std::numeric_limits<double>::infinity();
            const Site<D>* best_site = nullptr;
            int best_color = 0;
            for (auto& [x, rec] : sites_) {
                for (int c = 0; c < 2; ++c) {
                    const double v =
                        static_cast<double>(rec.cell.active(static_cast<Color>(c)));
                    if (v <= 0.0) continue;
                    const ColorClock& k = rec.clock[c];
                    const double t = k.last_wall + (k.next_mark - k.local) / v;
                    if (t < best) {
                        best = t;
                        best_site = &x;
                        best_color = c;
                    }
                }
            }
            if (best_site == nullptr) {
                absorbed_ = true;
                end_time_ = std::isfinite(options_.horizon) ? options_.horizon : now_;
                return;
            }
            if (best > options_.horizon) {
                end_time_ = options_.horizon;
                return;
            }
            if (static_cast<std::int64_t>(events_.size()) >= options_.event_budget)
                throw BudgetExceeded("two-color event budget exceeded");
            process(*best_site, static_cast<Color>(best_color), best);
        }
    }

    bool absorbed() const { return absorbed_; }
    double end_time() const { return end_time_; }
    const std::vector<TwoColorEvent<D>>& events() const { return events_; }

    /// Number of particles that have left the region so far.
    std::int64_t conversions() const { return conversions_; }
    const std::vector<double>& conversion_times() const { return conversion_times_; }
    std::int64_t conversions_before(double t) const {
        std::int64_t n = 0;
        for (double s : conversion_times_)
            if (s <= t) ++n;
        return n;
    }

    std::int64_t initial_blue() const { return initial_blue_; }
    std::int64_t initial_red() const { return initial_red_; }
    std::int64_t blue_total() const {
        std::int64_t n = 0;
        for (const auto& [x, rec] : sites_) n += rec.cell.blue;
        return n;
    }
    std::int64_t red_total() const {
        std::int64_t n = 0;
        for (const auto& [x, rec] : sites_) n += rec.cell.red;
        return n;
    }

    TwoColorCell cell(const Site<D>& x) const {
        const auto it = sites_.find(x);
        return it == sites_.end() ? TwoColorCell{} : it->second.cell;
    }
    std::int64_t topplings(const Site<D>& x, Color c) const {
        const auto it = sites_.find(x);
        return it == sites_.end() ? 0 : it->second.h[static_cast<int>(c)];
    }
    std::map<Site<D>, std::pair<std::int64_t, std::int64_t>> toppling_counts() const {
        std::map<Site<D>, std::pair<std::int64_t, std::int64_t>> out;
        for (const auto& [x, rec] : sites_)
            if (rec.h[0] > 0 || rec.h[1] > 0) out[x] = {rec.h[0], rec.h[1]};
        return out;
    }

    /// Landing sites of frozen conversions (restricted mode only).
    const std::map<Site<D>, std::int64_t>& exited() const { return exited_; }

    /// Occupied cells, colorblind callers can sum the two counts.
    std::map<Site<D>, TwoColorCell> occupied_cells() const {
        std::map<Site<D>, TwoColorCell> out;
        for (const auto& [x, rec] : sites_)
            if (rec.cell.total() > 0) out[x] = rec.cell;
        return out;
    }

  private:
    struct ColorClock {
        double local = 0.0;      // local time accumulated up to last_wall
        double last_wall = 0.0;  // wall time of the last sync
        double next_mark = 0.0;  // local time of the next unconsumed mark
        std::optional<RngStream> stream;
    };
    struct SiteRecord {
        TwoColorCell cell;
        ColorClock clock[2];
        std::int64_t h[2] = {0, 0};
    };

    double mark_rate() const { return 1.0 + lambda_; }

    RandomTape<D>& tape(Color c) { return c == Color::Blue ? blue_tape_ : red_tape_; }

    SiteRecord& ensure_site(const Site<D>& x, double t) {
        const auto it = sites_.find(x);
        if (it != sites_.end()) return it->second;
        SiteRecord rec;
        for (int c = 0; c < 2; ++c) {
            const std::uint64_t tag =
                (c == 0) ? options_.blue_clock_purpose : purpose::kClockRed;
            rec.clock[c].stream.emplace(key_.child(tag).child_coords(x));
            rec.clock[c].next_mark = rec.clock[c].stream->exponential(mark_rate());
            rec.clock[c].last_wall = t;  // speed was zero before now
        }
        return sites_.emplace(x, std::move(rec)).first->second;
    }

    void sync(SiteRecord& rec, Color c, double t) {
        ColorClock& k = rec.clock[static_cast<int>(c)];
        k.local += static_cast<double>(rec.cell.active(c)) * (t - k.last_wall);
        k.last_wall = t;
    }

    void process(const Site<D>& x, Color c, double t) {
        SiteRecord& rec = sites_.at(x);
        sync(rec, c, t);
        now_ = t;
        ColorClock& clk = rec.clock[static_cast<int>(c)];
        clk.next_mark += clk.stream->exponential(mark_rate());

        const std::int64_t k = rec.h[static_cast<int>(c)]++;
        const Instruction ins = tape(c).instruction(x, k);
        bool slept = false;
        bool converted = false;

        if (is_sleep(ins)) {
            if (rec.cell.total() == 1) {
                rec.cell.sleeper = c;
                slept = true;
            }
        } else {
            const Site<D> dest = add(x, kernel_->offset(static_cast<std::size_t>(ins)));
            converted = (c == Color::Blue && !region_.contains(dest));
            if (converted) {
                ++conversions_;
                conversion_times_.push_back(t);
            }
            if (converted && options_.restrict_exits) {
                rec.cell.blue -= 1;
                exited_[dest] += 1;
            } else {
                SiteRecord& dr = ensure_site(dest, t);
                if (&dr != &rec) {
                    // The destination's clocks accrue at their old speeds up
                    // to now, before the arrival changes occupancy.
                    sync(dr, Color::Blue, t);
                    sync(dr, Color::Red, t);
                }
                (c == Color::Blue ? rec.cell.blue : rec.cell.red) -= 1;
                dr.cell.sleeper.reset();  // arrival wakes either color
                ((c == Color::Blue && !converted) ? dr.cell.blue : dr.cell.red) += 1;
            }
        }
        events_.push_back(TwoColorEvent<D>{t, x, c, ins, slept, converted});
    }

    SiteSet<D> region_;
    const JumpKernel<D>* kernel_;
    double lambda_;
    StreamKey key_;
    TwoColorOptions<D> options_;
    RandomTape<D> blue_tape_;
    RandomTape<D> red_tape_;

    std::map<Site<D>, SiteRecord> sites_;
    std::map<Site<D>, std::int64_t> exited_;
    std::vector<TwoColorEvent<D>> events_;
    std::vector<double> conversion_times_;
    std::int64_t conversions_ = 0;
    std::int64_t initial_blue_ = 0;
    std::int64_t initial_red_ = 0;
    double now_ = 0.0;
    double end_time_ = 0.0;
    bool absorbed_ = false;
};

template <int D>
struct MonotoneTriple {
    std::int64_t restricted = 0;  // exits frozen, no red particles
    std::int64_t mid = 0;         // red particles from the middle region
    std::int64_t big = 0;         // red particles from the outer region

    bool ordered() const { return restricted <= mid && mid <= big; }
};

/// One coupled sample of the exit count from `inner` under three nested
/// initial conditions drawn from the same per-site law: the restricted
/// process on `inner`, and the free process with the extra particles of
/// `mid` resp. `big` present as red.  All three runs share tapes and
/// clocks through the key.
template <int D>
MonotoneTriple<D> coupled_monotonicity_trial(const JumpKernel<D>& kernel, double lambda,
                                             const InitialLaw& law, const SiteSet<D>& inner,
                                             const SiteSet<D>& mid, const SiteSet<D>& big,
                                             StreamKey key, TwoColorOptions<D> options = {}) {
    if (!inner.subset_of(mid) || !mid.subset_of(big))
        throw ValidationError("regions must be nested");
    const auto counts_on = [&](const SiteSet<D>& sites, const SiteSet<D>& except) {
        std::map<Site<D>, std::int64_t> out;
        for (const Site<D>& x : sites.sites()) {
            if (except.contains(x)) continue;
            RngStream stream = initial_count_stream<D>(key, x);
            const std::int64_t n = law.sample(stream);
            if (n > 0) out[x] = n;
        }
        return out;
    };
    const auto blue0 = counts_on(inner, SiteSet<D>{});
    const auto red_mid = counts_on(mid, inner);
    const auto red_big = counts_on(big, inner);

    MonotoneTriple<D> out;
    {
        TwoColorOptions<D> o = options;
        o.restrict_exits = true;
        TwoColorSim<D> sim(inner, blue0, {}, kernel, lambda, key, o);
        sim.run();
        out.restricted = sim.conversions();
    }
    {
        TwoColorSim<D> sim(inner, blue0, red_mid, kernel, lambda, key, options);
        sim.run();
        out.mid = sim.conversions();
    }
    {
        TwoColorSim<D> sim(inner, blue0, red_big, kernel, lambda, key, options);
        sim.run();
        out.big = sim.conversions();
    }
    return out;
}

}  // namespace arw
