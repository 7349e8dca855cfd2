#include "fdtp/synth.hpp"

#include <cmath>
#include <numbers>
#include <random>
#include <stdexcept>
#include <string>

namespace fdtp::synth {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

void require(bool ok, const std::string& what) {
  if (!ok) throw std::invalid_argument("scene spec: " + what);
}

bool finite_nonneg(double v) { return std::isfinite(v) && v >= 0.0; }

}  // namespace

void TextureSpec::validate() const {
  require(cutoff > 0.0 && cutoff <= 1.0, "texture cutoff must be in (0, 1]");
  require(components >= 1, "texture needs at least one component");
  require(finite_nonneg(blur_sigma), "texture blur must be >= 0");
}

Texture::Texture(const TextureSpec& spec) {
  spec.validate();
  std::mt19937_64 rng(spec.seed);
  std::uniform_real_distribution<double> unit(-1.0, 1.0);
  std::uniform_real_distribution<double> phase(0.0, kTwoPi);
  std::uniform_real_distribution<double> amp(0.5, 1.0);
  const double fmax = 0.5 * spec.cutoff;
  const double fmin = 0.04 * fmax;  // keep clear of DC
  components_.reserve(static_cast<std::size_t>(spec.components));
  while (static_cast<int>(components_.size()) < spec.components) {
    Component c{};
    switch (spec.kind) {
      case TextureKind::Noise: {
        const double u = unit(rng);
        const double v = unit(rng);
        if (u * u + v * v > 1.0) continue;
        c.fx = u * fmax;
        c.fy = v * fmax;
        break;
      }
      case TextureKind::HorizontalBars:
        c.fx = 0.0;
        c.fy = unit(rng) * fmax;
        break;
      case TextureKind::VerticalBars:
        c.fx = unit(rng) * fmax;
        c.fy = 0.0;
        break;
    }
    if (std::hypot(c.fx, c.fy) < fmin) continue;
    c.phase = phase(rng);
    c.amplitude = amp(rng) / std::sqrt(static_cast<double>(spec.components));
    components_.push_back(c);
  }
  if (spec.blur_sigma > 0.0) *this = blurred(spec.blur_sigma);
}

Texture Texture::ramp(double gx, double gy, double offset) {
  Texture t;
  t.gx_ = gx;
  t.gy_ = gy;
  t.offset_ = offset;
  return t;
}

double Texture::operator()(double y, double x) const {
  double v = offset_ + gx_ * x + gy_ * y;
  for (const Component& c : components_) {
    v += c.amplitude * std::cos(kTwoPi * (c.fx * x + c.fy * y) + c.phase);
  }
  return v;
}

Texture Texture::shifted(double dx, double dy) const {
  Texture t = *this;
  for (Component& c : t.components_) c.phase -= kTwoPi * (c.fx * dx + c.fy * dy);
  t.offset_ -= gx_ * dx + gy_ * dy;
  return t;
}

Texture Texture::blurred(double sigma) const {
  Texture t = *this;
  const double k = 2.0 * std::numbers::pi * std::numbers::pi * sigma * sigma;
  for (Component& c : t.components_) c.amplitude *= std::exp(-k * (c.fx * c.fx + c.fy * c.fy));
  return t;
}

Tile16 sample_tile(const Texture& texture, Vec2 origin) {
  Tile16 t;
  for (int r = 0; r < kTileSize; ++r) {
    for (int c = 0; c < kTileSize; ++c) t(r, c) = texture(origin.y + r, origin.x + c);
  }
  return t;
}

Tile16 shift_reference(const Texture& texture, Vec2 origin, Vec2 delta) {
  return sample_tile(texture.shifted(delta.x, delta.y), origin);
}

void SceneSpec::validate() const {
  require(width > 0 && height > 0 && width % 8 == 0 && height % 8 == 0,
          "width and height must be positive multiples of 8");
  texture.validate();
  require(std::isfinite(contrast), "contrast must be finite");
  require(finite_nonneg(noise_sigma), "noise sigma must be >= 0");
  for (double b : camera_blur) require(finite_nonneg(b), "camera blur must be >= 0");
  for (double g : color_gains) require(std::isfinite(g) && g > 0.0, "color gains must be > 0");
  switch (kind) {
    case SceneKind::FrontoPlane:
    case SceneKind::BarTarget:
      require(finite_nonneg(disparity), "disparity must be >= 0");
      break;
    case SceneKind::SlantedPlane: {
      require(std::isfinite(disparity) && std::isfinite(slope_x) && std::isfinite(slope_y),
              "slanted plane parameters must be finite");
      const double hx = std::abs(slope_x) * (width - 1) / 2.0;
      const double hy = std::abs(slope_y) * (height - 1) / 2.0;
      require(disparity - hx - hy >= 0.0, "slanted plane disparity goes negative in the frame");
      break;
    }
    case SceneKind::TwoDepthEdge:
      require(finite_nonneg(d_fg) && finite_nonneg(d_bg), "edge disparities must be >= 0");
      require(std::isfinite(edge_position), "edge position must be finite");
      break;
  }
}

Rendered render(const SceneSpec& spec, CameraGeometry geometry) {
  spec.validate();
  geometry.width = spec.width;
  geometry.height = spec.height;
  geometry.validate();

  const Texture base(spec.texture);
  TextureSpec bg_spec = spec.texture;
  bg_spec.seed = spec.texture.seed + 1000003;
  const Texture background(bg_spec);

  const double cx = (spec.width - 1) / 2.0;
  const double cy = (spec.height - 1) / 2.0;
  const bool vertical_edge = spec.orientation == Orientation::Vertical;
  const double edge = spec.edge_position >= 0.0
                          ? spec.edge_position
                          : (vertical_edge ? spec.width : spec.height) / 2.0;
  auto in_foreground = [&](Vec2 u) { return (vertical_edge ? u.x : u.y) < edge; };
  auto plane_disparity = [&](Vec2 u) {
    return spec.disparity + spec.slope_x * (u.x - cx) + spec.slope_y * (u.y - cy);
  };

  Rendered out;
  out.frames.geometry = geometry;
  for (int cam = 0; cam < kCameras; ++cam) {
    const Vec2 pos = geometry.positions[cam];
    const double blur = spec.camera_blur[cam];
    const Texture fg = blur > 0.0 ? base.blurred(blur) : base;
    const Texture bg = blur > 0.0 ? background.blurred(blur) : background;
    // Virtual-camera point seen by camera pixel p at disparity d.
    auto virtual_point = [&](Vec2 p_undist, double d) {
      return distort(geometry, p_undist + d * pos);
    };

    Image lum(spec.width, spec.height);
    Image mosaic(spec.width, spec.height);
    std::mt19937_64 rng(spec.noise_seed + 0x9E3779B97F4A7C15ULL * static_cast<std::uint64_t>(cam + 1));
    std::normal_distribution<double> noise(0.0, 1.0);
    for (int r = 0; r < spec.height; ++r) {
      for (int c = 0; c < spec.width; ++c) {
        const Vec2 pu = undistort(geometry, Vec2{static_cast<double>(c), static_cast<double>(r)});
        double t = 0.0;
        switch (spec.kind) {
          case SceneKind::FrontoPlane:
          case SceneKind::BarTarget: {
            const Vec2 u = virtual_point(pu, spec.disparity);
            t = fg(u.y, u.x);
            break;
          }
          case SceneKind::SlantedPlane: {
            Vec2 u = virtual_point(pu, spec.disparity);
            for (int it = 0; it < 30; ++it) u = virtual_point(pu, plane_disparity(u));
            t = fg(u.y, u.x);
            break;
          }
          case SceneKind::TwoDepthEdge: {
            const Vec2 uf = virtual_point(pu, spec.d_fg);
            if (in_foreground(uf)) {
              t = fg(uf.y, uf.x);
            } else {
              const Vec2 ub = virtual_point(pu, spec.d_bg);
              t = bg(ub.y, ub.x);
            }
            break;
          }
        }
        const double l = 0.5 + spec.contrast * t;
        lum(r, c) = l;
        const double gain = spec.color_gains[static_cast<int>(bayer_color(BayerPhase::R, r, c))];
        double v = gain * l;
        if (spec.noise_sigma > 0.0) v += spec.noise_sigma * noise(rng);
        mosaic(r, c) = v;
      }
    }
    out.luminance[cam] = std::move(lum);
    out.frames.images[cam] = std::move(mosaic);
  }

  GroundTruth& gt = out.truth;
  gt.shape = tile_grid_shape(spec.width, spec.height);
  const auto n = static_cast<std::size_t>(gt.shape.count());
  gt.disparity.assign(n, spec.disparity);
  gt.valid.assign(n, 1);
  gt.mixed.assign(n, 0);
  gt.secondary.assign(n, std::nan(""));
  for (int row = 0; row < gt.shape.rows; ++row) {
    for (int col = 0; col < gt.shape.cols; ++col) {
      const std::size_t i = static_cast<std::size_t>(row) * gt.shape.cols + col;
      const Vec2 center = tile_center(row, col);
      if (spec.kind == SceneKind::SlantedPlane) {
        gt.disparity[i] = plane_disparity(center);  // linear: tile mean == center value
      } else if (spec.kind == SceneKind::TwoDepthEdge) {
        const double lo = kTileStride * (vertical_edge ? col : row);
        const double hi = lo + kTileStride - 1;
        const bool fg_center = in_foreground(center);
        gt.disparity[i] = fg_center ? spec.d_fg : spec.d_bg;
        if (lo < edge && hi >= edge) {
          gt.mixed[i] = 1;
          gt.secondary[i] = fg_center ? spec.d_bg : spec.d_fg;
        }
      }
    }
  }
  return out;
}

}  // namespace fdtp::synth
