#pragma once

#include <array>
#include <cstddef>

#include "fdtp/dtt.hpp"
#include "fdtp/image.hpp"

namespace fdtp {

inline constexpr int kTileSize = 16;
inline constexpr int kTileStride = 8;
inline constexpr int kFdSize = dtt::kSize;

/// 16x16 pixel tile, row-major.
struct Tile16 {
  std::array<double, kTileSize * kTileSize> px{};

  double& operator()(int row, int col) { return px[row * kTileSize + col]; }
  double operator()(int row, int col) const { return px[row * kTileSize + col]; }
};

/// Half-sine MCLT window, optionally shifted by up to half a pixel.
/// taps(n) = sin(pi * (n + 1/2 + shift) / 16), zero outside [0, 16].
class Window1D {
 public:
  /// Throws std::invalid_argument for |shift| > 0.5.
  static Window1D make(double shift);
  static Window1D canonical() { return make(0.0); }

  double shift() const { return shift_; }
  const std::array<double, kTileSize>& taps() const { return taps_; }
  double operator[](int n) const { return taps_[n]; }

 private:
  Window1D() = default;
  std::array<double, kTileSize> taps_{};
  double shift_ = 0.0;
};

/// Quadrant order inside an FdTile. First letter is the vertical basis
/// (C = cosine / MDCT, S = sine / MDST), second the horizontal one.
enum class Quadrant : int { CC = 0, SC = 1, CS = 2, SS = 3 };

/// MCLT representation of one 16x16 tile: four 8x8 real blocks.
struct FdTile {
  std::array<dtt::Block8x8, 4> quadrants{};
  /// Window shifts used at analysis time.
  double shift_h = 0.0;
  double shift_v = 0.0;

  dtt::Block8x8& operator[](Quadrant q) { return quadrants[static_cast<int>(q)]; }
  const dtt::Block8x8& operator[](Quadrant q) const { return quadrants[static_cast<int>(q)]; }

  double energy() const;
};

enum class Color : int { Red = 0, Blue = 1, Green = 2 };
inline constexpr std::array<Color, 3> kColors{Color::Red, Color::Blue, Color::Green};

/// Color found at tile pixel (0, 0) on an RGGB sensor: R, G on a red row,
/// G on a blue row, or B.
enum class BayerPhase : int { R = 0, Gr = 1, Gb = 2, B = 3 };

/// Phase of a tile whose origin sits at sensor pixel (row, col).
BayerPhase bayer_phase_at(int row, int col);
/// Throws std::invalid_argument for a value outside the four alignments.
BayerPhase bayer_phase_from_int(int value);
/// Color sensed at tile pixel (row, col) for the given alignment.
Color bayer_color(BayerPhase phase, int row, int col);

struct BayerFdTile {
  std::array<FdTile, 3> colors{};

  FdTile& operator[](Color c) { return colors[static_cast<int>(c)]; }
  const FdTile& operator[](Color c) const { return colors[static_cast<int>(c)]; }
};

FdTile mclt_forward(const Tile16& tile, const Window1D& window_h, const Window1D& window_v);

/// Inverse MCLT of a single tile: unfolded, windowed 16x16 contribution.
Tile16 imclt(const FdTile& fd, const Window1D& window_h, const Window1D& window_v);

/// Adds the inverse of `fd` into canvas[origin_row .. +16, origin_col .. +16].
/// Throws std::out_of_range if the 16x16 footprint leaves the canvas.
void imclt_accumulate(const FdTile& fd, const Window1D& window_h, const Window1D& window_v,
                      Image& canvas, int origin_row, int origin_col);

/// Per-color MCLT of a raw Bayer tile. Each color only sees its own mosaic
/// samples and is renormalized so a constant scene gives the same CC[0][0]
/// for every color. Costs four 2D DTT sets (R 1, B 1, G 2).
BayerFdTile mclt_forward_bayer(const Tile16& tile, BayerPhase phase, const Window1D& window_h,
                               const Window1D& window_v);

/// One color of mclt_forward_bayer.
FdTile mclt_forward_bayer_color(const Tile16& tile, BayerPhase phase, Color color,
                                const Window1D& window_h, const Window1D& window_v);

/// Renormalization factor applied to `color` by mclt_forward_bayer_color.
double bayer_color_scale(BayerPhase phase, Color color, const Window1D& window_h,
                         const Window1D& window_v);

/// Per-thread operation counters.
struct McltCounters {
  /// Number of 8x8 two-dimensional DTT-IV applications.
  std::size_t dtt_sets = 0;
};

McltCounters& mclt_counters();

}  // namespace fdtp
