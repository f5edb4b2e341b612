#pragma once

// Frozen reference parameter set. It shows the S-shaped peak curve, the
// non-monotonic lifetime and the ablation signatures with margin; it is a
// repository fixture, not a reconstruction of any published fit.

#include <vector>

#include "lse/spectrum.hpp"

namespace lse {

ModelConfig reference_config();

/// 30 points on [10, 300] K.
std::vector<double> reference_temperatures();

}  // namespace lse
