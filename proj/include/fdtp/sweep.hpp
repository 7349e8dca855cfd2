#pragma once

#include <cstdint>
#include <vector>

#include "fdtp/fd.hpp"

namespace fdtp {

struct ReconstructionPoint {
  int image = 0;
  /// Largest |overlap-add - input| over pixels covered by two tiles per axis.
  double max_error = 0.0;
};

/// Forward MCLT plus stride-8 overlap-add IMCLT of `count` uniform random
/// size x size images. Throws std::invalid_argument unless size is a
/// multiple of 8 and at least 32.
std::vector<ReconstructionPoint> reconstruction_sweep(int count, std::uint64_t seed, int size = 64);

struct ShiftPoint {
  double dx = 0.0;
  double dy = 0.0;
  Vec2 peak{};
  double error = 0.0;  // max over both axes
};

/// Band-limited tile against its phase_rotate'd copy for every (dx, dy) in
/// steps x steps (|step| <= 0.5), peak from fit_subpixel.
std::vector<ShiftPoint> shift_theorem_sweep(std::uint64_t seed, const std::vector<double>& steps,
                                            const CorrelationParams& params = {});

}  // namespace fdtp
