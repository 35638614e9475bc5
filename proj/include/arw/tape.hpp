#pragma once

#include <concepts>
#include <cstdint>
#include <map>
#include <unordered_map>
#include <vector>

#include "common.hpp"
#include "geometry.hpp"
#include "kernel.hpp"
#include "rng.hpp"

namespace arw {

/// One tape entry: kSleep, or an index into the kernel support.
using Instruction = std::int32_t;
inline constexpr Instruction kSleep = -1;
inline constexpr bool is_sleep(Instruction i) { return i == kSleep; }

/// Anything that maps (site, consumption index) to a fixed instruction.
/// The map must be a pure function: the instruction at (x, k) never depends
/// on the order in which instructions are consumed.  That purity is what
/// makes stabilization outcomes independent of toppling order.
template <class T, int D>
concept TapeSource = requires(T tape, const Site<D>& x, std::int64_t k) {
    { tape.instruction(x, k) } -> std::convertible_to<Instruction>;
};

/// Lazily generated i.i.d. instruction tapes, one stream per site.
/// Entry law: sleep with probability lambda / (1 + lambda), otherwise a
/// kernel draw.  Tapes extend on demand and are cached, so repeated reads
/// of the same entry always agree.
template <int D>
class RandomTape {
  public:
    RandomTape(StreamKey base, const JumpKernel<D>& kernel, double lambda,
               std::uint64_t purpose_tag = purpose::kTape)
        : base_(base), kernel_(&kernel), purpose_(purpose_tag) {
        if (lambda < 0.0) throw ValidationError("sleep rate must be nonnegative");
        sleep_probability_ = lambda / (1.0 + lambda);
    }

    Instruction instruction(const Site<D>& x, std::int64_t k) {
        SiteTape& tape = site_tape(x);
        while (static_cast<std::int64_t>(tape.entries.size()) <= k) {
            Instruction next;
            if (tape.stream.bernoulli(sleep_probability_)) {
                next = kSleep;
            } else {
                next = static_cast<Instruction>(kernel_->sample_index(tape.stream));
            }
            tape.entries.push_back(next);
        }
        return tape.entries[static_cast<std::size_t>(k)];
    }

    const JumpKernel<D>& kernel() const { return *kernel_; }
    double sleep_probability() const { return sleep_probability_; }

  private:
    struct SiteTape {
        RngStream stream;
        std::vector<Instruction> entries;
    };

    SiteTape& site_tape(const Site<D>& x) {
        auto it = tapes_.find(x);
        if (it == tapes_.end()) {
            it = tapes_.emplace(x, SiteTape{RngStream(base_.child(purpose_).child_coords(x)), {}})
                     .first;
        }
        return it->second;
    }

    StreamKey base_;
    const JumpKernel<D>* kernel_;
    std::uint64_t purpose_;
    double sleep_probability_ = 0.0;
    std::unordered_map<Site<D>, SiteTape, SiteHash<D>> tapes_;
};

/// Fixed, finite tapes for hand-traced fixtures.  Reading past the end of a
/// site's script throws.
template <int D>
class ScriptedTape {
  public:
    ScriptedTape() = default;
    explicit ScriptedTape(std::map<Site<D>, std::vector<Instruction>> scripts)
        : scripts_(std::move(scripts)) {}

    Instruction instruction(const Site<D>& x, std::int64_t k) const {
        auto it = scripts_.find(x);
        if (it == scripts_.end() || k >= static_cast<std::int64_t>(it->second.size()))
            throw TapeExhausted("scripted tape has no instruction at the requested index");
        return it->second[static_cast<std::size_t>(k)];
    }

  private:
    std::map<Site<D>, std::vector<Instruction>> scripts_;
};

} // namespace arw
