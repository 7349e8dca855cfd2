#include "fdtp/geometry.hpp"

#include <cmath>
#include <algorithm>
#include <stdexcept>
#include <utility>

namespace fdtp {

namespace {

double radial_gain(const CameraGeometry& g, double r2) {
  const auto& k = g.distortion;
  return 1.0 + r2 * (k[0] + r2 * (k[1] + r2 * k[2]));
}

}  // namespace

bool CameraGeometry::has_distortion() const {
  return distortion[0] != 0.0 || distortion[1] != 0.0 || distortion[2] != 0.0;
}

void CameraGeometry::validate() const {
  if (!(baseline_m > 0.0)) throw std::invalid_argument("geometry: baseline must be > 0");
  if (!(pixel_pitch_m > 0.0)) throw std::invalid_argument("geometry: pixel pitch must be > 0");
  if (!(focal_length_m >= 0.0)) throw std::invalid_argument("geometry: focal length must be >= 0");
  if (width <= 0 || height <= 0) throw std::invalid_argument("geometry: image size must be > 0");
  Vec2 sum{};
  for (const Vec2& p : positions) {
    if (!std::isfinite(p.x) || !std::isfinite(p.y)) {
      throw std::invalid_argument("geometry: camera positions must be finite");
    }
    sum = sum + p;
  }
  if (std::abs(sum.x) > 1e-12 || std::abs(sum.y) > 1e-12) {
    throw std::invalid_argument("geometry: camera positions must be centered on the origin");
  }
  for (double k : distortion) {
    if (!std::isfinite(k)) throw std::invalid_argument("geometry: distortion must be finite");
  }
}

double CameraGeometry::range_for_disparity(double disparity_px) const {
  if (!(focal_length_m > 0.0)) throw std::logic_error("geometry: focal length not configured");
  if (!(disparity_px > 0.0)) throw std::invalid_argument("geometry: disparity must be > 0");
  return baseline_m * focal_length_m / (disparity_px * pixel_pitch_m);
}

Vec2 distort(const CameraGeometry& geom, Vec2 p) {
  const Vec2 c = geom.principal_point();
  const Vec2 d = p - c;
  return c + radial_gain(geom, d.x * d.x + d.y * d.y) * d;
}

Vec2 undistort(const CameraGeometry& geom, Vec2 p) {
  if (!geom.has_distortion()) return p;
  const Vec2 c = geom.principal_point();
  const Vec2 target = p - c;
  Vec2 u = target;
  double damping = 1.0;
  double prev_err = INFINITY;
  for (int it = 0; it < 50; ++it) {
    const double g = radial_gain(geom, u.x * u.x + u.y * u.y);
    const Vec2 err = g * u - target;
    const double e = std::hypot(err.x, err.y);
    if (e <= 1e-9) return c + u;
    if (e > prev_err) damping *= 0.5;
    prev_err = e;
    if (g <= 0.0 || !std::isfinite(g)) break;
    const Vec2 next = (1.0 / g) * target;
    u = u + damping * (next - u);
  }
  throw std::runtime_error("undistort: no convergence, distortion not invertible here");
}

std::array<Vec2, 4> disparity_to_offsets(const CameraGeometry& geom, Vec2 tile_center,
                                         double target_disparity) {
  if (!(target_disparity >= 0.0) || !std::isfinite(target_disparity)) {
    throw std::invalid_argument("disparity_to_offsets: disparity must be finite and >= 0");
  }
  std::array<Vec2, 4> out{};
  if (!geom.has_distortion()) {
    for (int i = 0; i < 4; ++i) out[i] = -target_disparity * geom.positions[i];
    return out;
  }
  const Vec2 v = undistort(geom, tile_center);
  for (int i = 0; i < 4; ++i) {
    out[i] = distort(geom, v - target_disparity * geom.positions[i]) - tile_center;
  }
  return out;
}

int split_offset_1d(double offset, double& fraction) {
  const double r = std::round(offset);  // half away from zero
  fraction = offset - r;
  return static_cast<int>(r);
}

SplitOffset split_offset(Vec2 offset) {
  SplitOffset s;
  s.integer.x = split_offset_1d(offset.x, s.fraction.x);
  s.integer.y = split_offset_1d(offset.y, s.fraction.y);
  return s;
}

KernelGrid::KernelGrid(double spacing, int rows, int cols,
                       std::array<std::vector<CalibKernel>, 3> nodes)
    : spacing_(spacing), rows_(rows), cols_(cols), nodes_(std::move(nodes)) {
  if (!(spacing > 0.0)) throw std::invalid_argument("KernelGrid: spacing must be > 0");
  if (rows < 1 || cols < 1) throw std::invalid_argument("KernelGrid: need at least one node");
  for (const auto& v : nodes_) {
    if (v.size() != static_cast<std::size_t>(rows) * static_cast<std::size_t>(cols)) {
      throw std::invalid_argument("KernelGrid: node count does not match rows x cols");
    }
  }
}

KernelGrid KernelGrid::identity(int width, int height, double spacing) {
  const int cols = static_cast<int>(std::ceil((width - 1) / spacing)) + 1;
  const int rows = static_cast<int>(std::ceil((height - 1) / spacing)) + 1;
  std::array<std::vector<CalibKernel>, 3> nodes;
  for (auto& v : nodes) v.assign(static_cast<std::size_t>(rows) * cols, CalibKernel::identity());
  return KernelGrid(spacing, rows, cols, std::move(nodes));
}

const CalibKernel& KernelGrid::node(Color color, int row, int col) const {
  if (row < 0 || col < 0 || row >= rows_ || col >= cols_) {
    throw std::out_of_range("KernelGrid: node index out of range");
  }
  return nodes_[static_cast<int>(color)][static_cast<std::size_t>(row) * cols_ + col];
}

CalibKernel& KernelGrid::node(Color color, int row, int col) {
  return const_cast<CalibKernel&>(std::as_const(*this).node(color, row, col));
}

bool KernelGrid::covers(int width, int height) const {
  return rows_ > 0 && (cols_ - 1) * spacing_ >= width - 1 && (rows_ - 1) * spacing_ >= height - 1;
}

CalibKernel lookup_kernel(const KernelGrid& grid, Vec2 tile_center, Color color) {
  if (grid.empty()) throw std::out_of_range("lookup_kernel: empty grid");
  const double gx = tile_center.x / grid.spacing();
  const double gy = tile_center.y / grid.spacing();
  if (!(gx >= 0.0 && gy >= 0.0 && gx <= grid.cols() - 1 && gy <= grid.rows() - 1)) {
    throw std::out_of_range("lookup_kernel: tile center outside the kernel grid");
  }
  const int c0 = std::min(static_cast<int>(std::floor(gx)), grid.cols() - 1);
  const int r0 = std::min(static_cast<int>(std::floor(gy)), grid.rows() - 1);
  const int c1 = std::min(c0 + 1, grid.cols() - 1);
  const int r1 = std::min(r0 + 1, grid.rows() - 1);
  const double fx = gx - c0;
  const double fy = gy - r0;

  // nearest node, exact halves resolved toward the lower index
  const int nc = static_cast<int>(std::ceil(gx - 0.5));
  const int nr = static_cast<int>(std::ceil(gy - 0.5));
  CalibKernel out = grid.node(color, std::max(nr, 0), std::max(nc, 0));

  const Vec2 o00 = grid.node(color, r0, c0).center_offset;
  const Vec2 o01 = grid.node(color, r0, c1).center_offset;
  const Vec2 o10 = grid.node(color, r1, c0).center_offset;
  const Vec2 o11 = grid.node(color, r1, c1).center_offset;
  out.center_offset = (1 - fy) * ((1 - fx) * o00 + fx * o01) + fy * ((1 - fx) * o10 + fx * o11);
  return out;
}

}  // namespace fdtp
