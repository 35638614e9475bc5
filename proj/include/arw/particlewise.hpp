#pragma once

#include <algorithm>
#include <cstdint>
#include <limits>
#include <map>
#include <optional>
#include <queue>
#include <unordered_map>
#include <vector>

#include "common.hpp"
#include "config.hpp"
#include "geometry.hpp"
#include "initial_law.hpp"
#include "kernel.hpp"
#include "rng.hpp"

namespace arw {

/// A particle is addressed by its birth site and a 1-based index; the
/// label never changes, and the label determines the particle's random
/// streams.
template <int D>
struct ParticleLabel {
    Site<D> origin{};
    std::int32_t index = 1;

    friend bool operator==(const ParticleLabel& a, const ParticleLabel& b) {
        return a.origin == b.origin && a.index == b.index;
    }
    friend bool operator<(const ParticleLabel& a, const ParticleLabel& b) {
        if (a.origin != b.origin) return a.origin < b.origin;
        return a.index < b.index;
    }
};

enum class ParticleState { Active, Passive, Frozen };

enum class SiteEventKind { Initial, Arrive, Depart, Sleep, Wake };

inline const char* event_kind_name(SiteEventKind k) {
    switch (k) {
        case SiteEventKind::Initial: return "initial";
        case SiteEventKind::Arrive: return "arrive";
        case SiteEventKind::Depart: return "depart";
        case SiteEventKind::Sleep: return "sleep";
        case SiteEventKind::Wake: return "wake";
    }
    return "";
}

template <int D>
struct SiteEvent {
    double time = 0.0;
    ParticleLabel<D> label;
    SiteEventKind kind = SiteEventKind::Initial;

    friend bool operator==(const SiteEvent& a, const SiteEvent& b) {
        return a.time == b.time && a.label == b.label && a.kind == b.kind;
    }
};

template <int D>
using LocalHistory = std::vector<SiteEvent<D>>;

template <int D>
struct LabeledOptions {
    /// When set, a particle leaving this window freezes at its first
    /// exterior site and stops interacting.
    std::optional<Box<D>> freeze_window;
    double horizon = std::numeric_limits<double>::infinity();
    std::int64_t event_budget = 100'000'000;
    /// Subtracted from a label's origin when deriving its streams; lets a
    /// translated copy of a system reuse the original randomness.
    Site<D> key_shift{};
    bool record_events = true;
};

/// Particle-wise dynamics: every particle owns a putative trajectory
/// (holding times and jump offsets) and a sleep clock, both indexed by the
/// particle's inner time, which only advances while the particle is active.
/// A jump mark moves the particle and wakes any sleeper at the landing
/// site in the same instant; a sleep mark puts the particle to sleep only
/// if it is alone, and is otherwise discarded.
template <int D>
class LabeledSim {
  public:
    LabeledSim(const std::vector<std::pair<Site<D>, std::int64_t>>& counts,
               const JumpKernel<D>& kernel, double lambda, StreamKey base,
               LabeledOptions<D> options = {})
        : LabeledSim(expand(counts), kernel, lambda, base, std::move(options)) {}

    LabeledSim(const std::vector<ParticleLabel<D>>& labels, const JumpKernel<D>& kernel,
               double lambda, StreamKey base, LabeledOptions<D> options = {})
        : kernel_(&kernel), lambda_(lambda), base_(base), options_(std::move(options)) {
        if (lambda < 0.0) throw ValidationError("sleep rate must be nonnegative");
        std::vector<ParticleLabel<D>> sorted = labels;
        std::sort(sorted.begin(), sorted.end());
        if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end())
            throw ValidationError("particle labels must be distinct");
        particles_.reserve(sorted.size());
        for (const auto& label : sorted) {
            if (label.index < 1) throw ValidationError("particle indexes are 1-based");
            const StreamKey pk = particle_key(label);
            Particle p{label,
                       label.origin,
                       ParticleState::Active,
                       0.0,
                       0.0,
                       0.0,
                       0.0,
                       RngStream(pk.child(purpose::kTrajectory)),
                       RngStream(pk.child(purpose::kSleepClock)),
                       0,
                       sup_norm(label.origin)};
            p.next_jump = p.traj.exponential(1.0);
            p.next_sleep = p.sleep.exponential(lambda_);
            particles_.push_back(std::move(p));
        }
        for (std::size_t pid = 0; pid < particles_.size(); ++pid) {
            occupancy_[particles_[pid].pos].push_back(static_cast<int>(pid));
            record(particles_[pid].pos,
                   SiteEvent<D>{0.0, particles_[pid].label, SiteEventKind::Initial});
        }
        for (std::size_t pid = 0; pid < particles_.size(); ++pid)
            schedule(static_cast<int>(pid));
    }

    LabeledSim(const LabeledSim&) = delete;
    LabeledSim& operator=(const LabeledSim&) = delete;
    LabeledSim(LabeledSim&&) = delete;
    LabeledSim& operator=(LabeledSim&&) = delete;

    /// Drives the system to absorption, the horizon, or the event budget.
    void run() {
        while (!heap_.empty()) {
            const QueueEntry top = heap_.top();
            const Particle& peek = particles_[static_cast<std::size_t>(top.pid)];
            if (top.version != peek.version || peek.state != ParticleState::Active) {
                heap_.pop();
                continue;
            }
            if (top.time > options_.horizon) {
                end_time_ = options_.horizon;
                return;
            }
            heap_.pop();
            if (events_processed_ >= options_.event_budget)
                throw BudgetExceeded("labeled event budget exceeded");
            ++events_processed_;
            if (top.is_jump) process_jump(top.pid, top.time);
            else process_sleep(top.pid, top.time);
        }
        absorbed_ = true;
        end_time_ = std::isfinite(options_.horizon) ? options_.horizon : last_event_time_;
    }

    bool absorbed() const { return absorbed_; }
    double end_time() const { return end_time_; }
    std::int64_t events_processed() const { return events_processed_; }

    const LocalHistory<D>& site_history(const Site<D>& z) const {
        static const LocalHistory<D> empty;
        const auto it = histories_.find(z);
        return it == histories_.end() ? empty : it->second;
    }

    const std::unordered_map<Site<D>, LocalHistory<D>, SiteHash<D>>& histories() const {
        return histories_;
    }

    struct Presence {
        ParticleLabel<D> label;
        ParticleState state = ParticleState::Active;
        Site<D> pos{};
    };

    /// All particles and their final states, in label order.
    std::vector<Presence> final_presences() const {
        std::vector<Presence> out;
        out.reserve(particles_.size());
        for (const auto& p : particles_) out.push_back(Presence{p.label, p.state, p.pos});
        return out;
    }

    /// Counting projection of the final state onto site occupation.
    SiteConfiguration<D> final_configuration(const Box<D>& window) const {
        SiteConfiguration<D> config(window);
        for (const auto& p : particles_) {
            if (window.contains(p.pos)) {
                Cell& c = config.cell(p.pos);
                ++c.count;
                if (p.state == ParticleState::Passive) c.sleeping = true;
            } else {
                config.record_exit(p.pos);
            }
        }
        return config;
    }

    /// Largest sup-norm distance from the lattice origin the particle has
    /// visited, evaluated at event times.
    std::int64_t max_reach(const ParticleLabel<D>& label) const {
        for (const auto& p : particles_)
            if (p.label == label) return p.max_reach;
        throw ValidationError("no such particle label");
    }

    std::int64_t active_count() const {
        std::int64_t n = 0;
        for (const auto& p : particles_)
            if (p.state == ParticleState::Active) ++n;
        return n;
    }

    std::int64_t passive_count() const {
        std::int64_t n = 0;
        for (const auto& p : particles_)
            if (p.state == ParticleState::Passive) ++n;
        return n;
    }

    std::int64_t frozen_count() const {
        std::int64_t n = 0;
        for (const auto& p : particles_)
            if (p.state == ParticleState::Frozen) ++n;
        return n;
    }

  private:
    struct Particle {
        ParticleLabel<D> label;
        Site<D> pos;
        ParticleState state;
        double inner;        // inner time consumed so far
        double resume_wall;  // wall time at which the inner clock resumed
        double next_jump;    // inner time of the pending jump mark
        double next_sleep;   // inner time of the pending sleep mark
        RngStream traj;
        RngStream sleep;
        std::uint64_t version;
        std::int64_t max_reach;
    };

    struct QueueEntry {
        double time;
        int pid;
        std::uint64_t version;
        bool is_jump;
    };
    struct QueueOrder {
        const std::vector<Particle>* particles;
        bool operator()(const QueueEntry& a, const QueueEntry& b) const {
            if (a.time != b.time) return a.time > b.time;
            const auto& la = (*particles)[static_cast<std::size_t>(a.pid)].label;
            const auto& lb = (*particles)[static_cast<std::size_t>(b.pid)].label;
            if (!(la == lb)) return lb < la;
            return a.is_jump < b.is_jump;
        }
    };

    static std::vector<ParticleLabel<D>> expand(
        const std::vector<std::pair<Site<D>, std::int64_t>>& counts) {
        std::vector<ParticleLabel<D>> labels;
        for (const auto& [site, n] : counts) {
            if (n < 0) throw ValidationError("particle counts must be nonnegative");
            for (std::int64_t i = 1; i <= n; ++i)
                labels.push_back(ParticleLabel<D>{site, static_cast<std::int32_t>(i)});
        }
        return labels;
    }

    StreamKey particle_key(const ParticleLabel<D>& label) const {
        const Site<D> keyed = sub(label.origin, options_.key_shift);
        return base_.child_coords(keyed).child(static_cast<std::uint64_t>(label.index));
    }

    void record(const Site<D>& z, SiteEvent<D> e) {
        if (options_.record_events) histories_[z].push_back(e);
    }

    void schedule(int pid) {
        Particle& p = particles_[static_cast<std::size_t>(pid)];
        if (p.state != ParticleState::Active) return;
        const bool jump_first = p.next_jump <= p.next_sleep;
        const double inner_mark = jump_first ? p.next_jump : p.next_sleep;
        heap_.push(QueueEntry{p.resume_wall + (inner_mark - p.inner), pid, p.version,
                              jump_first});
    }

    void process_jump(int pid, double t) {
        Particle& p = particles_[static_cast<std::size_t>(pid)];
        last_event_time_ = t;
        p.inner = p.next_jump;
        p.resume_wall = t;

        remove_from(occupancy_, p.pos, pid);
        record(p.pos, SiteEvent<D>{t, p.label, SiteEventKind::Depart});

        const Site<D> dest = add(p.pos, kernel_->sample(p.traj));
        p.next_jump = p.inner + p.traj.exponential(1.0);
        p.pos = dest;
        p.max_reach = std::max(p.max_reach, sup_norm(dest));
        ++p.version;

        if (options_.freeze_window && !options_.freeze_window->contains(dest)) {
            p.state = ParticleState::Frozen;
            record(dest, SiteEvent<D>{t, p.label, SiteEventKind::Arrive});
            return;
        }

        auto& cell = occupancy_[dest];
        if (!cell.empty()) {
            for (const int other_pid : cell) {
                Particle& other = particles_[static_cast<std::size_t>(other_pid)];
                if (other.state == ParticleState::Passive) {
                    other.state = ParticleState::Active;
                    other.resume_wall = t;
                    ++other.version;
                    record(dest, SiteEvent<D>{t, other.label, SiteEventKind::Wake});
                    schedule(other_pid);
                }
            }
        }
        cell.push_back(pid);
        record(dest, SiteEvent<D>{t, p.label, SiteEventKind::Arrive});
        schedule(pid);
    }

    void process_sleep(int pid, double t) {
        Particle& p = particles_[static_cast<std::size_t>(pid)];
        last_event_time_ = t;
        p.inner = p.next_sleep;
        p.resume_wall = t;
        p.next_sleep = p.inner + p.sleep.exponential(lambda_);
        ++p.version;

        const auto it = occupancy_.find(p.pos);
        const bool alone = it != occupancy_.end() && it->second.size() == 1;
        if (alone) {
            p.state = ParticleState::Passive;
            record(p.pos, SiteEvent<D>{t, p.label, SiteEventKind::Sleep});
            return;
        }
        schedule(pid);
    }

    static void remove_from(std::unordered_map<Site<D>, std::vector<int>, SiteHash<D>>& occ,
                            const Site<D>& site, int pid) {
        auto& cell = occ[site];
        cell.erase(std::find(cell.begin(), cell.end(), pid));
        if (cell.empty()) occ.erase(site);
    }

    const JumpKernel<D>* kernel_;
    double lambda_;
    StreamKey base_;
    LabeledOptions<D> options_;
    std::vector<Particle> particles_;
    std::unordered_map<Site<D>, std::vector<int>, SiteHash<D>> occupancy_;
    std::unordered_map<Site<D>, LocalHistory<D>, SiteHash<D>> histories_;
    std::priority_queue<QueueEntry, std::vector<QueueEntry>, QueueOrder> heap_{
        QueueOrder{&particles_}};
    std::int64_t events_processed_ = 0;
    double last_event_time_ = 0.0;
    double end_time_ = 0.0;
    bool absorbed_ = false;
};

/// Result of probing whether local histories settle as the initial
/// configuration grows.
struct ProbeResult {
    bool stabilized = false;
    std::int64_t stable_n = -1;  ///< smallest n whose history matches max_n's
    std::int64_t windows_run = 0;
};

/// Simulates the unrestricted dynamics started from the initial law on the
/// windows W_1 ⊂ ... ⊂ W_max and compares the event history observed at z
/// up to the horizon.  Initial counts are keyed per site, so a larger
/// window extends the smaller one without changing shared sites.
template <int D>
ProbeResult well_definedness_probe(const InitialLaw& law, const JumpKernel<D>& kernel,
                                   double lambda, StreamKey base, const SiteArg<D>& z,
                                   double horizon, std::int64_t max_n,
                                   std::int64_t event_budget = 100'000'000) {
    if (max_n < 2) throw ValidationError("probe needs at least two windows");

    const auto history_for = [&](std::int64_t n) {
        const Box<D> window(n);
        std::vector<std::pair<Site<D>, std::int64_t>> counts;
        for (const Site<D>& x : window.sites()) {
            RngStream rng = initial_count_stream<D>(base, x);
            const std::int64_t c = law.sample(rng);
            if (c > 0) counts.emplace_back(x, c);
        }
        LabeledOptions<D> opt;
        opt.horizon = horizon;
        opt.event_budget = event_budget;
        LabeledSim<D> sim(counts, kernel, lambda, base, opt);
        sim.run();
        return sim.site_history(z);
    };

    ProbeResult out;
    const LocalHistory<D> reference = history_for(max_n);
    out.windows_run = 1;
    std::int64_t stable_n = max_n;
    for (std::int64_t n = max_n - 1; n >= 1; --n) {
        ++out.windows_run;
        if (history_for(n) == reference) {
            stable_n = n;
            continue;
        }
        break;
    }
    out.stabilized = stable_n < max_n;
    out.stable_n = out.stabilized ? stable_n : -1;
    return out;
}

/// An exhaustion order for a finite region: distinct sites whose prefixes
/// W_1 ⊂ W_2 ⊂ ... grow by one site per step.
template <int D>
class VolumeSequence {
  public:
    explicit VolumeSequence(std::vector<Site<D>> sites) : sites_(std::move(sites)) {
        if (sites_.empty())
            throw ValidationError("a volume sequence needs at least one site");
        std::vector<Site<D>> sorted = sites_;
        std::sort(sorted.begin(), sorted.end());
        if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end())
            throw ValidationError("volume sequence sites must be distinct");
    }

    static VolumeSequence lexicographic(const Box<D>& box) {
        return VolumeSequence(box.sites());
    }

    /// Fisher-Yates over the box's sites, fixed by the key.
    static VolumeSequence shuffled(const Box<D>& box, StreamKey key) {
        std::vector<Site<D>> order = box.sites();
        RngStream rng(key.child(purpose::kShuffle));
        for (std::size_t i = order.size(); i > 1; --i)
            std::swap(order[i - 1], order[static_cast<std::size_t>(rng.below(i))]);
        return VolumeSequence(std::move(order));
    }

    std::size_t size() const { return sites_.size(); }
    const std::vector<Site<D>>& sites() const { return sites_; }

  private:
    std::vector<Site<D>> sites_;
};

/// Probe result that also carries the history the windows settled on, so
/// runs under different exhaustion orders of one region can be compared.
template <int D>
struct SequenceProbeResult {
    bool stabilized = false;
    std::int64_t stable_n = -1;  ///< smallest prefix whose history matches the full one
    std::int64_t windows_run = 0;
    LocalHistory<D> history;  ///< history at z on the full region
};

/// Same settling question as well_definedness_probe, but the windows are
/// the prefixes W_n = {x_1, ..., x_n} of an explicit site order.  Initial
/// counts and particle streams are keyed per site, so the run on the full
/// region is a function of the region as a set: any two orders share the
/// same reference history and differ only in how the prefixes approach it.
template <int D>
SequenceProbeResult<D> exhaustion_probe(const InitialLaw& law, const JumpKernel<D>& kernel,
                                        double lambda, StreamKey base, const SiteArg<D>& z,
                                        double horizon, const VolumeSequence<D>& order,
                                        std::int64_t event_budget = 100'000'000) {
    if (order.size() < 2) throw ValidationError("probe needs at least two windows");

    const auto history_for = [&](std::size_t n) {
        std::vector<std::pair<Site<D>, std::int64_t>> counts;
        for (std::size_t i = 0; i < n; ++i) {
            const Site<D>& x = order.sites()[i];
            RngStream rng = initial_count_stream<D>(base, x);
            const std::int64_t c = law.sample(rng);
            if (c > 0) counts.emplace_back(x, c);
        }
        LabeledOptions<D> opt;
        opt.horizon = horizon;
        opt.event_budget = event_budget;
        LabeledSim<D> sim(counts, kernel, lambda, base, opt);
        sim.run();
        return sim.site_history(z);
    };

    SequenceProbeResult<D> out;
    const std::size_t max_n = order.size();
    out.history = history_for(max_n);
    out.windows_run = 1;
    std::size_t stable_n = max_n;
    for (std::size_t n = max_n - 1; n >= 1; --n) {
        ++out.windows_run;
        if (history_for(n) != out.history) break;
        stable_n = n;
    }
    out.stabilized = stable_n < max_n;
    out.stable_n = out.stabilized ? static_cast<std::int64_t>(stable_n) : -1;
    return out;
}

/// P(the particle born first at the origin travels sup-distance >= reach
/// by the horizon), conditioned on that particle existing.  Counts are
/// drawn from the law on the window.
struct ReachEstimate {
    double probability = 0.0;
    std::int64_t conditioned_samples = 0;
    std::int64_t hits = 0;
};

template <int D>
ReachEstimate particle_reach_probability(const InitialLaw& law, const JumpKernel<D>& kernel,
                                         double lambda, StreamKey base,
                                         std::int64_t window_radius, std::int64_t reach,
                                         double horizon, std::int64_t samples) {
    const Box<D> window(window_radius);
    const ParticleLabel<D> target{origin_site<D>(), 1};
    ReachEstimate out;
    for (std::int64_t s = 0; s < samples; ++s) {
        const StreamKey sample_key = base.child(purpose::kInstance).child(
            static_cast<std::uint64_t>(s));
        std::vector<std::pair<Site<D>, std::int64_t>> counts;
        bool target_present = false;
        for (const Site<D>& x : window.sites()) {
            RngStream rng = initial_count_stream<D>(sample_key, x);
            const std::int64_t c = law.sample(rng);
            if (c > 0) {
                counts.emplace_back(x, c);
                if (x == origin_site<D>()) target_present = true;
            }
        }
        if (!target_present) continue;
        ++out.conditioned_samples;
        LabeledOptions<D> opt;
        opt.horizon = horizon;
        opt.record_events = false;
        LabeledSim<D> sim(counts, kernel, lambda, sample_key, opt);
        sim.run();
        if (sim.max_reach(target) >= reach) ++out.hits;
    }
    out.probability = out.conditioned_samples > 0
                          ? static_cast<double>(out.hits) /
                                static_cast<double>(out.conditioned_samples)
                          : 0.0;
    return out;
}

} // namespace arw
