#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "common.hpp"
#include "config.hpp"
#include "rng.hpp"

namespace arw {

/// Product initial law: i.i.d. particle counts per site.
class InitialLaw {
  public:
    enum class Kind { Constant, Bernoulli, Poisson, Empirical };

    static InitialLaw constant(std::int64_t n) {
        if (n < 0) throw ValidationError("constant initial count must be nonnegative");
        InitialLaw law;
        law.kind_ = Kind::Constant;
        law.value_ = n;
        return law;
    }

    static InitialLaw bernoulli(double p) {
        if (p < 0.0 || p > 1.0) throw ValidationError("bernoulli mean must lie in [0, 1]");
        InitialLaw law;
        law.kind_ = Kind::Bernoulli;
        law.mean_ = p;
        return law;
    }

    static InitialLaw poisson(double mean) {
        if (mean < 0.0) throw ValidationError("poisson mean must be nonnegative");
        InitialLaw law;
        law.kind_ = Kind::Poisson;
        law.mean_ = mean;
        return law;
    }

    /// Uniform draw from an explicit list of counts.
    static InitialLaw empirical(std::vector<std::int64_t> counts) {
        if (counts.empty()) throw ValidationError("empirical law needs at least one count");
        for (std::int64_t c : counts)
            if (c < 0) throw ValidationError("empirical counts must be nonnegative");
        InitialLaw law;
        law.kind_ = Kind::Empirical;
        law.counts_ = std::move(counts);
        return law;
    }

    Kind kind() const { return kind_; }

    double mean() const {
        switch (kind_) {
            case Kind::Constant: return static_cast<double>(value_);
            case Kind::Bernoulli:
            case Kind::Poisson: return mean_;
            case Kind::Empirical: {
                double s = 0.0;
                for (std::int64_t c : counts_) s += static_cast<double>(c);
                return s / static_cast<double>(counts_.size());
            }
        }
        return 0.0;
    }

    std::int64_t sample(RngStream& rng) const {
        switch (kind_) {
            case Kind::Constant: return value_;
            case Kind::Bernoulli: return rng.bernoulli(mean_) ? 1 : 0;
            case Kind::Poisson: return rng.poisson(mean_);
            case Kind::Empirical: return counts_[rng.below(counts_.size())];
        }
        return 0;
    }

    std::int64_t constant_value() const { return value_; }
    const std::vector<std::int64_t>& empirical_counts() const { return counts_; }

  private:
    Kind kind_ = Kind::Constant;
    std::int64_t value_ = 0;
    double mean_ = 0.0;
    std::vector<std::int64_t> counts_;
};

/// Per-site stream for drawing the initial count at `x` under `base`.
template <int D>
RngStream initial_count_stream(StreamKey base, const Site<D>& x) {
    return RngStream(base.child(purpose::kInitialCount).child_coords(x));
}

/// Sample a configuration on a window.  Each site draws from its own keyed
/// stream, so the counts inside a window do not depend on the window size.
template <int D>
SiteConfiguration<D> sample_initial(const InitialLaw& law, const Box<D>& window,
                                    StreamKey base) {
    SiteConfiguration<D> config(window);
    for (const Site<D>& x : window.sites()) {
        RngStream rng = initial_count_stream<D>(base, x);
        config.set_count(x, law.sample(rng));
    }
    return config;
}

/// Same per-site draws, for an arbitrary site list.
template <int D>
std::vector<std::int64_t> sample_counts(const InitialLaw& law,
                                        const std::vector<Site<D>>& sites, StreamKey base) {
    std::vector<std::int64_t> out;
    out.reserve(sites.size());
    for (const Site<D>& x : sites) {
        RngStream rng = initial_count_stream<D>(base, x);
        out.push_back(law.sample(rng));
    }
    return out;
}

} // namespace arw
