#pragma once

#include <array>
#include <cstdint>
#include <vector>

#include "fdtp/geometry.hpp"
#include "fdtp/mclt.hpp"
#include "fdtp/pipeline.hpp"

namespace fdtp::synth {

enum class TextureKind { Noise, HorizontalBars, VerticalBars };

struct TextureSpec {
  TextureKind kind = TextureKind::Noise;
  std::uint64_t seed = 1;
  /// Highest spatial frequency as a fraction of Nyquist, in (0, 1].
  double cutoff = 0.5;
  int components = 60;
  /// Gaussian blur sigma (px) applied analytically.
  double blur_sigma = 0.0;

  void validate() const;
};

/// Continuous band-limited field: a sum of 2D sinusoids (plus an optional
/// linear ramp) that can be evaluated exactly at any real coordinate.
class Texture {
 public:
  struct Component {
    double fx;  // cycles per px
    double fy;
    double amplitude;
    double phase;
  };

  Texture() = default;
  explicit Texture(const TextureSpec& spec);
  static Texture ramp(double gx, double gy, double offset = 0.0);

  double operator()(double y, double x) const;

  /// T'(y, x) = T(y - dy, x - dx): content moved by (+dx, +dy).
  Texture shifted(double dx, double dy) const;
  /// Multiplies each component by its Gaussian transfer exp(-2 pi^2 s^2 f^2).
  Texture blurred(double sigma) const;

  const std::vector<Component>& components() const { return components_; }

 private:
  std::vector<Component> components_;
  double gx_ = 0.0;
  double gy_ = 0.0;
  double offset_ = 0.0;
};

/// 16x16 samples of `texture` shifted by delta, tile pixel (r, c) taken at
/// (origin.y + r, origin.x + c).
Tile16 shift_reference(const Texture& texture, Vec2 origin, Vec2 delta);
Tile16 sample_tile(const Texture& texture, Vec2 origin);

enum class SceneKind { FrontoPlane, SlantedPlane, TwoDepthEdge, BarTarget };
enum class Orientation { Vertical, Horizontal };

struct SceneSpec {
  SceneKind kind = SceneKind::FrontoPlane;
  int width = 64;
  int height = 64;
  /// Plane disparity; for slanted planes the value at the image center.
  double disparity = 0.0;
  /// Slanted plane gradient, px of disparity per px.
  double slope_x = 0.0;
  double slope_y = 0.0;
  /// Two-depth edge: foreground occupies x < edge (vertical) or y < edge.
  Orientation orientation = Orientation::Vertical;
  double d_fg = 0.0;
  double d_bg = 0.0;
  double edge_position = -1.0;  // < 0: frame center
  TextureSpec texture{};
  double contrast = 0.15;
  double noise_sigma = 0.0;
  std::uint64_t noise_seed = 7;
  std::array<double, 4> camera_blur{};
  std::array<double, 3> color_gains{1.0, 1.0, 1.0};

  /// Throws std::invalid_argument describing the first problem.
  void validate() const;
};

struct GroundTruth {
  TileGridShape shape;
  std::vector<double> disparity;
  std::vector<std::uint8_t> valid;
  /// Tiles straddling a depth edge, with the other disparity alongside.
  std::vector<std::uint8_t> mixed;
  std::vector<double> secondary;
};

struct Rendered {
  QuadFrameSet frames;
  GroundTruth truth;
  /// Pre-mosaic luminance per camera (before gains and noise).
  std::array<Image, kCameras> luminance;
};

/// Geometry image size is overwritten with the scene size.
Rendered render(const SceneSpec& spec, CameraGeometry geometry = {});

}  // namespace fdtp::synth
