#include "fdtp/pipeline.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace fdtp {

namespace {

int reflect(int v, int size) {
  if (v < 0) return -v;
  if (v > size - 1) return 2 * (size - 1) - v;
  return v;
}

bool window_inside(IVec2 origin, int width, int height) {
  return origin.x >= -kEdgeMargin && origin.y >= -kEdgeMargin &&
         origin.x + kTileSize - 1 <= width - 1 + kEdgeMargin &&
         origin.y + kTileSize - 1 <= height - 1 + kEdgeMargin;
}

Tile16 read_tile(const Image& img, IVec2 origin) {
  Tile16 t;
  for (int r = 0; r < kTileSize; ++r) {
    const int y = reflect(origin.y + r, img.height());
    for (int c = 0; c < kTileSize; ++c) t(r, c) = img(y, reflect(origin.x + c, img.width()));
  }
  return t;
}

IVec2 operator+(IVec2 a, IVec2 b) { return {a.x + b.x, a.y + b.y}; }

}  // namespace

void QuadFrameSet::validate() const {
  const int w = images[0].width();
  const int h = images[0].height();
  for (const Image& img : images) {
    if (img.width() != w || img.height() != h) {
      throw std::invalid_argument("QuadFrameSet: frames differ in size");
    }
  }
  tile_grid_shape(w, h);
  geometry.validate();
  if (geometry.width != w || geometry.height != h) {
    throw std::invalid_argument("QuadFrameSet: geometry image size does not match the frames");
  }
  for (const KernelGrid& g : kernels) {
    if (!g.empty() && !g.covers(w, h)) {
      throw std::invalid_argument("QuadFrameSet: kernel grid does not cover the frame");
    }
  }
}

TileGridShape tile_grid_shape(int width, int height) {
  if (width <= 0 || height <= 0 || width % kTileStride != 0 || height % kTileStride != 0) {
    throw std::invalid_argument("frame size must be positive and divisible by 8, got " +
                                std::to_string(width) + "x" + std::to_string(height));
  }
  return {height / kTileStride, width / kTileStride};
}

Vec2 tile_center(int row, int col) {
  return {kTileStride * col + (kTileStride - 1) / 2.0, kTileStride * row + (kTileStride - 1) / 2.0};
}

IVec2 tile_window_origin(int row, int col) {
  return {kTileStride * col - kTileStride / 2, kTileStride * row - kTileStride / 2};
}

TileJob make_tile_job(const QuadFrameSet& frames, int row, int col, double target_disparity) {
  TileJob job;
  job.row = row;
  job.col = col;
  job.target_disparity = target_disparity;
  const Vec2 center = tile_center(row, col);
  job.offsets = disparity_to_offsets(frames.geometry, center, target_disparity);
  for (int cam = 0; cam < kCameras; ++cam) {
    for (Color color : kColors) {
      Vec2 o = job.offsets[cam];
      if (!frames.kernels[cam].empty()) {
        o = o + lookup_kernel(frames.kernels[cam], center, color).center_offset;
      }
      const SplitOffset s = split_offset(o);
      job.patches[cam][static_cast<int>(color)] = {s.integer, s.fraction};
    }
  }
  return job;
}

UnaryTiles process_tile_unary(const QuadFrameSet& frames, const TileJob& job) {
  UnaryTiles out;
  const IVec2 base = tile_window_origin(job.row, job.col);
  const Vec2 center = tile_center(job.row, job.col);
  for (int cam = 0; cam < kCameras; ++cam) {
    const Image& img = frames.images[cam];
    std::optional<IVec2> cached_origin;
    Tile16 tile;
    for (Color color : kColors) {
      const CameraColorPatch& p = job.patches[cam][static_cast<int>(color)];
      const IVec2 origin = base + p.integer_offset;
      if (!window_inside(origin, img.width(), img.height())) return UnaryTiles{};
      if (!cached_origin || !(*cached_origin == origin)) {
        tile = read_tile(img, origin);
        cached_origin = origin;
      }
      // The patch content sits at +fraction from where it belongs: the
      // window follows it, then the rotation moves it back.
      const Vec2 f = p.fractional_offset;
      const Window1D wh = Window1D::make(-f.x);
      const Window1D wv = Window1D::make(-f.y);
      FdTile fd = mclt_forward_bayer_color(tile, bayer_phase_at(origin.y, origin.x), color, wh, wv);
      fd = phase_rotate(fd, -f.x, -f.y);
      if (!frames.kernels[cam].empty()) {
        fd = multiply(fd, lookup_kernel(frames.kernels[cam], center, color)[color]);
      }
      out.cameras[cam][color] = fd;
    }
  }
  out.valid = true;
  return out;
}

const std::vector<CameraPair>& direction_pairs(PairDirection d) {
  // Cameras: 0 top-left, 1 top-right, 2 bottom-left, 3 bottom-right.
  static const std::vector<CameraPair> horizontal{{1, 0}, {3, 2}};
  static const std::vector<CameraPair> vertical{{2, 0}, {3, 1}};
  static const std::vector<CameraPair> diag_main{{3, 0}};
  static const std::vector<CameraPair> diag_anti{{2, 1}};
  switch (d) {
    case PairDirection::Horizontal: return horizontal;
    case PairDirection::Vertical: return vertical;
    case PairDirection::DiagMain: return diag_main;
    case PairDirection::DiagAnti: return diag_anti;
  }
  throw std::invalid_argument("unknown pair direction");
}

TileCorrSet correlate_tile(const UnaryTiles& tiles, const CorrelationParams& params) {
  params.validate();
  TileCorrSet set;
  for (PairDirection d : kDirections) set.directions[static_cast<int>(d)].direction = d;
  if (!tiles.valid) return set;
  for (PairDirection d : kDirections) {
    CorrTile& acc = set.directions[static_cast<int>(d)];
    const auto& pairs = direction_pairs(d);
    for (const CameraPair& p : pairs) {
      const CorrTile t = phase_correlate(tiles.cameras[p.a], tiles.cameras[p.b], params, d);
      for (int i = 0; i < kCorrSize * kCorrSize; ++i) acc.surface[i] += t.surface[i];
    }
    for (double& v : acc.surface) v /= static_cast<double>(pairs.size());
  }
  set.valid = true;
  return set;
}

TextureTile texture_tile(const UnaryTiles& tiles, const TextureParams& params) {
  if (!tiles.valid) throw std::invalid_argument("texture_tile: invalid tile");
  if (!(params.tau > 0.0)) throw std::invalid_argument("texture_tile: tau must be > 0");
  const Window1D w = Window1D::canonical();
  const bool lpf = params.lpf_sigma > 0.0;
  const FdTile g = lpf ? gaussian_multiplier(params.lpf_sigma) : FdTile{};

  std::array<std::array<Tile16, 3>, kCameras> px{};
  for (int cam = 0; cam < kCameras; ++cam) {
    for (Color color : kColors) {
      const FdTile& fd = tiles.cameras[cam][color];
      px[cam][static_cast<int>(color)] = imclt(lpf ? multiply(fd, g) : fd, w, w);
    }
  }

  TextureTile out;
  for (int i = 0; i < kTileSize * kTileSize; ++i) {
    double dev2 = 0.0;
    for (int c = 0; c < 3; ++c) {
      double mean = 0.0;
      for (int cam = 0; cam < kCameras; ++cam) mean += px[cam][c].px[i];
      mean /= kCameras;
      out.rgb[c].px[i] = mean;
      for (int cam = 0; cam < kCameras; ++cam) dev2 += std::pow(px[cam][c].px[i] - mean, 2);
    }
    const int r = i / kTileSize;
    const int col = i % kTileSize;
    const double weight = w[r] * w[r] * w[col] * w[col];
    const double rms = std::sqrt(dev2 / (3.0 * kCameras));
    // Deviations carry the squared window too; compare in unwindowed units.
    const double a = rms == 0.0 ? 1.0 : std::clamp(1.0 - rms / (params.tau * weight), 0.0, 1.0);
    out.raw_alpha.px[i] = a;
    out.alpha.px[i] = a * weight;
  }
  return out;
}

FrameCorrelation process_frame(const QuadFrameSet& frames, const std::vector<double>& disparity_in,
                               const FrameOptions& options) {
  frames.validate();
  options.correlation.validate();
  const TileGridShape shape = tile_grid_shape(frames.width(), frames.height());
  if (static_cast<int>(disparity_in.size()) != shape.count()) {
    throw std::invalid_argument("process_frame: disparity grid does not match the tile grid");
  }
  FrameCorrelation result;
  result.shape = shape;
  result.tiles.resize(static_cast<std::size_t>(shape.count()));

  // Padded canvases: tile windows overhang the frame by the margin.
  const int pw = frames.width() + 2 * kEdgeMargin;
  const int ph = frames.height() + 2 * kEdgeMargin;
  std::array<Image, 4> canvas;
  if (options.texture) {
    for (Image& c : canvas) c = Image(pw, ph);
  }

  // Four parity passes keep concurrent texture writes disjoint, and the
  // per-pixel accumulation order fixed regardless of worker count.
  for (int pass = 0; pass < 4; ++pass) {
    const int pr = pass / 2;
    const int pc = pass % 2;
    const int prow = (shape.rows - pr + 1) / 2;
    const int pcol = (shape.cols - pc + 1) / 2;
    parallel_for(prow * pcol, options.workers, [&](int k) {
      const int row = pr + 2 * (k / pcol);
      const int col = pc + 2 * (k % pcol);
      const int index = row * shape.cols + col;
      const TileJob job = make_tile_job(frames, row, col, disparity_in[index]);
      const UnaryTiles unary = process_tile_unary(frames, job);
      TileCorrSet set = correlate_tile(unary, options.correlation);
      set.row = row;
      set.col = col;
      set.target_disparity = job.target_disparity;
      result.tiles[index] = set;
      if (options.texture && unary.valid) {
        const TextureTile t = texture_tile(unary, options.texture_params);
        const int oy = kTileStride * row;
        const int ox = kTileStride * col;
        for (int r = 0; r < kTileSize; ++r) {
          for (int c = 0; c < kTileSize; ++c) {
            for (int ch = 0; ch < 3; ++ch) canvas[ch](oy + r, ox + c) += t.rgb[ch](r, c);
            canvas[3](oy + r, ox + c) += t.alpha(r, c);
          }
        }
      }
    });
  }

  if (options.texture) {
    TextureImage tex;
    for (int ch = 0; ch < 4; ++ch) {
      Image cropped(frames.width(), frames.height());
      for (int r = 0; r < frames.height(); ++r) {
        for (int c = 0; c < frames.width(); ++c) {
          cropped(r, c) = canvas[ch](r + kEdgeMargin, c + kEdgeMargin);
        }
      }
      if (ch < 3) {
        tex.rgb[ch] = std::move(cropped);
      } else {
        tex.alpha = std::move(cropped);
      }
    }
    result.texture = std::move(tex);
  }
  return result;
}

}  // namespace fdtp
