#pragma once

#include <array>
#include <cstdint>
#include <vector>

#include "fdtp/fd.hpp"
#include "fdtp/vec2.hpp"

namespace fdtp {

/// Quad camera: four sensors on the corners of a square, tile coordinates
/// expressed in the (distorted) image of a virtual camera at their centroid.
struct CameraGeometry {
  double baseline_m = 0.258;
  double pixel_pitch_m = 2.2e-6;
  /// No default worth trusting; 0 means "not configured" and only range
  /// conversion needs it.
  double focal_length_m = 0.0;
  int width = 2592;
  int height = 1936;
  /// Corner offsets in baseline units, (x right, y down).
  std::array<Vec2, 4> positions{Vec2{-0.5, -0.5}, Vec2{0.5, -0.5}, Vec2{-0.5, 0.5},
                                Vec2{0.5, 0.5}};
  /// Radial polynomial k1, k2, k3 in px^-2, px^-4, px^-6.
  std::array<double, 3> distortion{};

  Vec2 principal_point() const { return {(width - 1) / 2.0, (height - 1) / 2.0}; }
  bool has_distortion() const;

  /// Throws std::invalid_argument on non-positive sizes/baseline/pitch or
  /// positions whose centroid is not the origin.
  void validate() const;

  /// Distance (m) for a disparity (px) between cameras one baseline apart.
  double range_for_disparity(double disparity_px) const;
};

/// Per-camera pixel offsets of the patch centered at `tile_center` for the
/// given target disparity. Zero distortion gives -d * positions[i].
/// Throws std::invalid_argument for negative or non-finite disparity.
std::array<Vec2, 4> disparity_to_offsets(const CameraGeometry& geom, Vec2 tile_center,
                                         double target_disparity);

struct SplitOffset {
  IVec2 integer;
  Vec2 fraction;
};

/// Integer part rounds half away from zero, so |fraction| <= 0.5.
SplitOffset split_offset(Vec2 offset);
int split_offset_1d(double offset, double& fraction);

Vec2 distort(const CameraGeometry& geom, Vec2 p);
/// Inverse of distort by damped fixed-point iteration to 1e-9 px.
/// Throws std::runtime_error if it has not converged after 50 iterations.
Vec2 undistort(const CameraGeometry& geom, Vec2 p);

/// Space-variant calibration kernels, one lattice per color. Node (r, c)
/// sits at pixel (x = c * spacing, y = r * spacing).
class KernelGrid {
 public:
  KernelGrid() = default;
  /// nodes[color] is row-major rows x cols. Throws std::invalid_argument on
  /// shape mismatch or non-positive spacing.
  KernelGrid(double spacing, int rows, int cols, std::array<std::vector<CalibKernel>, 3> nodes);

  /// Smallest grid covering width x height with identity kernels.
  static KernelGrid identity(int width, int height, double spacing = 64.0);

  double spacing() const { return spacing_; }
  int rows() const { return rows_; }
  int cols() const { return cols_; }
  bool empty() const { return rows_ == 0; }

  const CalibKernel& node(Color color, int row, int col) const;
  CalibKernel& node(Color color, int row, int col);

  /// True if the lattice spans [0, width-1] x [0, height-1].
  bool covers(int width, int height) const;

 private:
  double spacing_ = 0.0;
  int rows_ = 0;
  int cols_ = 0;
  std::array<std::vector<CalibKernel>, 3> nodes_;
};

/// Kernel for `color` at a tile center: the nearest node's multiplier (ties
/// go to the lower index) with a bilinearly interpolated center offset.
/// Throws std::out_of_range for a center outside the grid.
CalibKernel lookup_kernel(const KernelGrid& grid, Vec2 tile_center, Color color);

}  // namespace fdtp
