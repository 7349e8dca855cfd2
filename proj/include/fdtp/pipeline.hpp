#pragma once

#include <array>
#include <optional>
#include <vector>

#include "fdtp/fd.hpp"
#include "fdtp/geometry.hpp"
#include "fdtp/image.hpp"
#include "fdtp/mclt.hpp"

namespace fdtp {

inline constexpr int kCameras = 4;
/// Mirror padding available around the frame (the nominal tile overhang).
inline constexpr int kEdgeMargin = 4;

/// Four RGGB mosaic frames in [0, 1] full scale plus their calibration.
struct QuadFrameSet {
  std::array<Image, kCameras> images;
  CameraGeometry geometry;
  /// Per-camera kernel grids; an empty grid means identity kernels.
  std::array<KernelGrid, kCameras> kernels;

  int width() const { return images[0].width(); }
  int height() const { return images[0].height(); }

  /// Throws std::invalid_argument unless all frames share one size that is
  /// divisible by 8 and matches the geometry, and kernel grids cover it.
  void validate() const;
};

struct TileGridShape {
  int rows = 0;
  int cols = 0;
  int count() const { return rows * cols; }
  bool operator==(const TileGridShape&) const = default;
};

/// (height / 8) x (width / 8). Throws std::invalid_argument otherwise.
TileGridShape tile_grid_shape(int width, int height);

/// Pixel center of tile (row, col) and the origin of its 16x16 window.
Vec2 tile_center(int row, int col);
IVec2 tile_window_origin(int row, int col);

struct CameraColorPatch {
  IVec2 integer_offset;
  Vec2 fractional_offset;
};

struct TileJob {
  int row = 0;
  int col = 0;
  double target_disparity = 0.0;
  /// Geometric offset per camera, before kernel center offsets.
  std::array<Vec2, kCameras> offsets{};
  /// offset + kernel center offset, split, per camera and color.
  std::array<std::array<CameraColorPatch, 3>, kCameras> patches{};
};

TileJob make_tile_job(const QuadFrameSet& frames, int row, int col, double target_disparity);

struct UnaryTiles {
  bool valid = false;
  std::array<BayerFdTile, kCameras> cameras{};
};

/// Reads, transforms, shifts and kernel-corrects the tile in all cameras.
/// A window reaching past the mirror margin yields valid = false.
UnaryTiles process_tile_unary(const QuadFrameSet& frames, const TileJob& job);

/// Camera pairs (a, b) averaged into each direction; the correlation peak
/// lands at the residual disparity measured along the pair's baseline.
struct CameraPair {
  int a;
  int b;
};
const std::vector<CameraPair>& direction_pairs(PairDirection d);

struct TileCorrSet {
  int row = 0;
  int col = 0;
  double target_disparity = 0.0;
  bool valid = false;
  std::array<CorrTile, 4> directions{};

  const CorrTile& operator[](PairDirection d) const { return directions[static_cast<int>(d)]; }
};

TileCorrSet correlate_tile(const UnaryTiles& tiles, const CorrelationParams& params = {});

struct TextureParams {
  /// Alpha falls to zero where the rms camera deviation reaches tau.
  double tau = 0.05;
  /// Gaussian low-pass (px) applied before the inverse transform to hide
  /// the mosaic; 0 keeps the raw per-color reconstruction.
  double lpf_sigma = 1.0;
};

/// Windowed 16x16 RGBA contribution of one tile (stride-8 overlap-add
/// partition), alpha already multiplied by the squared window.
struct TextureTile {
  std::array<Tile16, 3> rgb{};
  Tile16 alpha;
  /// Unweighted per-pixel alpha in [0, 1].
  Tile16 raw_alpha;
};

TextureTile texture_tile(const UnaryTiles& tiles, const TextureParams& params = {});

struct FrameOptions {
  CorrelationParams correlation{};
  int workers = 1;
  bool texture = false;
  TextureParams texture_params{};
};

struct TextureImage {
  std::array<Image, 3> rgb;
  Image alpha;
};

struct FrameCorrelation {
  TileGridShape shape;
  std::vector<TileCorrSet> tiles;  // row-major
  std::optional<TextureImage> texture;
};

/// Processes every tile at the given per-tile target disparities. Output is
/// bit-identical for any worker count.
FrameCorrelation process_frame(const QuadFrameSet& frames, const std::vector<double>& disparity_in,
                               const FrameOptions& options = {});

/// Runs fn(index) for index in [0, count) on `workers` threads with a static
/// contiguous partition. Exceptions are rethrown on the calling thread.
template <class Fn>
void parallel_for(int count, int workers, Fn&& fn);

}  // namespace fdtp

#include "fdtp/detail/parallel.hpp"
