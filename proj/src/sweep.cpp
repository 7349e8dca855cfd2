#include "fdtp/sweep.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <stdexcept>

#include "fdtp/disparity.hpp"
#include "fdtp/synth.hpp"

namespace fdtp {

std::vector<ReconstructionPoint> reconstruction_sweep(int count, std::uint64_t seed, int size) {
  if (count < 0) throw std::invalid_argument("reconstruction_sweep: count must be >= 0");
  if (size < 32 || size % kTileStride != 0) {
    throw std::invalid_argument("reconstruction_sweep: size must be a multiple of 8, >= 32");
  }
  const Window1D w = Window1D::canonical();
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> ud(0.0, 1.0);
  std::vector<ReconstructionPoint> out;
  for (int i = 0; i < count; ++i) {
    Image img(size, size);
    for (double& v : img.data()) v = ud(rng);
    Image canvas(size, size);
    for (int r0 = 0; r0 + kTileSize <= size; r0 += kTileStride) {
      for (int c0 = 0; c0 + kTileSize <= size; c0 += kTileStride) {
        Tile16 t;
        for (int r = 0; r < kTileSize; ++r) {
          for (int c = 0; c < kTileSize; ++c) t(r, c) = img(r0 + r, c0 + c);
        }
        imclt_accumulate(mclt_forward(t, w, w), w, w, canvas, r0, c0);
      }
    }
    double worst = 0.0;
    for (int r = kTileStride; r < size - kTileStride; ++r) {
      for (int c = kTileStride; c < size - kTileStride; ++c) {
        worst = std::max(worst, std::abs(canvas(r, c) - img(r, c)));
      }
    }
    out.push_back({i, worst});
  }
  return out;
}

std::vector<ShiftPoint> shift_theorem_sweep(std::uint64_t seed, const std::vector<double>& steps,
                                            const CorrelationParams& params) {
  for (double s : steps) {
    if (!(std::abs(s) <= 0.5)) throw std::invalid_argument("shift_theorem_sweep: |step| must be <= 0.5");
  }
  synth::TextureSpec spec;
  spec.seed = seed;
  const synth::Texture tex(spec);
  Tile16 tile = synth::sample_tile(tex, {40.0, 24.0});
  for (double& v : tile.px) v = 0.5 + 0.15 * v;
  const Window1D w = Window1D::canonical();
  const FdTile fd = mclt_forward(tile, w, w);
  BayerFdTile a;
  for (Color c : kColors) a[c] = fd;

  std::vector<ShiftPoint> out;
  for (double dy : steps) {
    for (double dx : steps) {
      BayerFdTile b;
      for (Color c : kColors) b[c] = phase_rotate(fd, dx, dy);
      const PeakFit f = fit_subpixel(phase_correlate(a, b, params));
      ShiftPoint p;
      p.dx = dx;
      p.dy = dy;
      p.peak = f.center;
      p.error = f.valid ? std::max(std::abs(f.center.x - dx), std::abs(f.center.y - dy))
                        : std::numeric_limits<double>::infinity();
      out.push_back(p);
    }
  }
  return out;
}

}  // namespace fdtp
