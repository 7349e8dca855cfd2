#pragma once

#include <array>
#include <complex>

#include "fdtp/mclt.hpp"
#include "fdtp/vec2.hpp"

namespace fdtp {

using Complex = std::complex<double>;

/// Complex view of an FdTile. The four real quadrants hold 256 numbers, so
/// the view needs two 8x8 complex planes: `plus` carries positive vertical
/// frequencies, `minus` negative ones (horizontal frequency positive in both).
///   plus  = (CC - SS) - i (SC + CS)
///   minus = (CC + SS) + i (SC - CS)
/// With this sign choice a content shift by +d multiplies plus by
/// exp(-i (wx dx + wy dy)) and minus by exp(-i (wx dx - wy dy)),
/// w = pi (k + 1/2) / 8.
struct ComplexSpectrum8 {
  std::array<Complex, 64> plus{};
  std::array<Complex, 64> minus{};
  double shift_h = 0.0;
  double shift_v = 0.0;
};

ComplexSpectrum8 to_complex(const FdTile& fd);
FdTile from_complex(const ComplexSpectrum8& spectrum);

/// Angular frequency of bin k (radians per pixel).
double bin_frequency(int k);

/// Lossless fractional shift of the tile content by (dx, dy) px.
/// Throws std::invalid_argument for |dx| or |dy| above 0.5.
FdTile phase_rotate(const FdTile& fd, double dx, double dy);

/// Frequency-domain multiplier stored in quadrant form, one per color, plus
/// the kernel's center offset (px) that the geometry stage adds to the
/// per-camera pixel offset.
struct CalibKernel {
  std::array<FdTile, 3> multiplier{};
  Vec2 center_offset{};

  FdTile& operator[](Color c) { return multiplier[static_cast<int>(c)]; }
  const FdTile& operator[](Color c) const { return multiplier[static_cast<int>(c)]; }

  /// CC = 1, other quadrants 0: multiplies both complex planes by 1.
  static CalibKernel identity();
  /// Same multiplier for all three colors.
  static CalibKernel uniform(const FdTile& multiplier, Vec2 center_offset = {});
};

/// The phase_rotate(dx, dy) operator written as a kernel multiplier.
FdTile rotation_multiplier(double dx, double dy);
/// Sampled Gaussian blur transfer function exp(-sigma^2 |w|^2 / 2).
FdTile gaussian_multiplier(double sigma);
/// Tikhonov-regularized inverse g / (g^2 + lambda) of gaussian_multiplier.
FdTile gaussian_inverse_multiplier(double sigma, double lambda);

/// Pointwise complex product of two tiles in the complex view.
FdTile multiply(const FdTile& fd, const FdTile& multiplier);
BayerFdTile apply_kernel(const BayerFdTile& fd, const CalibKernel& kernel);

enum class PairDirection : int { Horizontal = 0, Vertical = 1, DiagMain = 2, DiagAnti = 3 };
inline constexpr std::array<PairDirection, 4> kDirections{
    PairDirection::Horizontal, PairDirection::Vertical, PairDirection::DiagMain,
    PairDirection::DiagAnti};
const char* direction_name(PairDirection d);

inline constexpr int kCorrSize = 9;
inline constexpr int kCorrCenter = 4;
inline constexpr int kSurfaceSize = 16;

/// Center 9x9 of the correlation surface. Cell (r, c) is the lag
/// (y = r - 4, x = c - 4); the peak sits at the shift of b relative to a.
struct CorrTile {
  std::array<double, kCorrSize * kCorrSize> surface{};
  PairDirection direction = PairDirection::Horizontal;

  double& operator()(int row, int col) { return surface[row * kCorrSize + col]; }
  double operator()(int row, int col) const { return surface[row * kCorrSize + col]; }
};

struct ColorWeights {
  double red = 0.25;
  double blue = 0.25;
  double green = 0.5;

  double operator[](Color c) const;
  /// Throws std::invalid_argument unless the weights are finite, non-negative
  /// and sum to 1 within 1e-9.
  void validate() const;
};

struct CorrelationParams {
  ColorWeights weights{};
  double epsilon = 1e-6;
  /// Gaussian low-pass (px) applied to the normalized cross power.
  /// 0 disables it.
  double lpf_sigma = 2.0;

  void validate() const;
};

/// Full 16x16 surface, lags -8..7 on both axes, row-major (y, x).
std::array<double, kSurfaceSize * kSurfaceSize> correlation_surface(const BayerFdTile& a,
                                                                    const BayerFdTile& b,
                                                                    const CorrelationParams& params);

/// Color-averaged, magnitude-normalized phase correlation cropped to 9x9.
CorrTile phase_correlate(const BayerFdTile& a, const BayerFdTile& b,
                         const CorrelationParams& params = {},
                         PairDirection direction = PairDirection::Horizontal);

}  // namespace fdtp
