#pragma once

#include <stdexcept>
#include <string>

namespace arw {

inline constexpr const char* kVersion = "0.1.0";

/// Invalid model or experiment parameters (bad kernel, law, spec file).
struct ValidationError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Attempt to topple a stable or sleeping site.
struct IllegalToppling : std::logic_error {
    using std::logic_error::logic_error;
};

/// A scripted instruction tape ran out of entries.
struct TapeExhausted : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// A stabilization exceeded its toppling budget (infinite-loop guard).
struct BudgetExceeded : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// The branching dominator exceeded its population cap.
struct PopulationGuard : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Kernel projection has support beyond {-1, 0, +1}.
struct NotNearestNeighbor : std::runtime_error {
    using std::runtime_error::runtime_error;
};

} // namespace arw
