#include "fdtp/disparity.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <istream>
#include <limits>
#include <json.hpp>
#include <ostream>
#include <stdexcept>
#include <string>

namespace fdtp {

namespace {

constexpr int C = kCorrCenter;

struct Sample {
  double x;
  double y;
  double z;
};

// Gaussian + floor, parameters [A, cx, (cy), s, f].
struct GaussFit {
  bool converged = false;
  double a = 0.0;
  double cx = 0.0;
  double cy = 0.0;
  double s = 0.0;
  double f = 0.0;
};

GaussFit lma_gaussian(const std::vector<Sample>& pts, bool two_d, double a0, double cx0, double cy0,
                      double s0, double f0) {
  const int np = two_d ? 5 : 4;
  const int is = two_d ? 3 : 2;
  const int iff = np - 1;
  Eigen::VectorXd p(np);
  if (two_d) {
    p << a0, cx0, cy0, s0, f0;
  } else {
    p << a0, cx0, s0, f0;
  }
  const auto n = static_cast<Eigen::Index>(pts.size());

  auto residuals = [&](const Eigen::VectorXd& q, Eigen::VectorXd& r, Eigen::MatrixXd* jac) {
    r.resize(n);
    if (jac) jac->resize(n, np);
    const double s = q[is];
    for (Eigen::Index i = 0; i < n; ++i) {
      const double dx = pts[i].x - q[1];
      const double dy = two_d ? pts[i].y - q[2] : 0.0;
      const double d2 = dx * dx + dy * dy;
      const double e = std::exp(-d2 / (2.0 * s * s));
      r[i] = q[0] * e + q[iff] - pts[i].z;
      if (jac) {
        (*jac)(i, 0) = e;
        (*jac)(i, 1) = q[0] * e * dx / (s * s);
        if (two_d) (*jac)(i, 2) = q[0] * e * dy / (s * s);
        (*jac)(i, is) = q[0] * e * d2 / (s * s * s);
        (*jac)(i, iff) = 1.0;
      }
    }
  };

  Eigen::VectorXd r;
  Eigen::MatrixXd jac;
  residuals(p, r, &jac);
  double cost = r.squaredNorm();
  double lambda = 1e-3;
  GaussFit out;
  for (int it = 0; it < 20 && !out.converged; ++it) {
    const Eigen::MatrixXd h = jac.transpose() * jac;
    const Eigen::VectorXd g = jac.transpose() * r;
    bool accepted = false;
    while (!accepted) {
      Eigen::MatrixXd hd = h;
      for (int k = 0; k < np; ++k) hd(k, k) += lambda * h(k, k) + 1e-15;
      const Eigen::VectorXd delta = -hd.ldlt().solve(g);
      const Eigen::VectorXd q = p + delta;
      Eigen::VectorXd rq;
      residuals(q, rq, nullptr);
      const double cq = rq.squaredNorm();
      if (std::isfinite(cq) && cq <= cost && q[is] > 0.0) {
        const double step = delta.lpNorm<Eigen::Infinity>();
        p = q;
        cost = cq;
        residuals(p, r, &jac);
        lambda = std::max(lambda / 10.0, 1e-12);
        accepted = true;
        if (step < 1e-10 * (1.0 + p.lpNorm<Eigen::Infinity>())) out.converged = true;
      } else {
        lambda *= 10.0;
        if (lambda > 1e12) {
          // No descent direction left: already at the minimum.
          out.converged = true;
          break;
        }
      }
    }
  }
  out.a = p[0];
  out.cx = p[1];
  out.cy = two_d ? p[2] : 0.0;
  out.s = p[is];
  out.f = p[iff];
  return out;
}

double parabola_vertex(double left, double mid, double right) {
  const double den = left - 2.0 * mid + right;
  if (!(den < 0.0)) return 0.0;
  return std::clamp(0.5 * (left - right) / den, -0.5, 0.5);
}

void check_window(int fit_window) {
  if (fit_window < 3 || fit_window > kCorrSize || fit_window % 2 == 0) {
    throw std::invalid_argument("fit_subpixel: fit window must be odd, 3..9");
  }
}

double clamp01(double v) { return std::clamp(v, 0.0, 1.0); }

// Starting width from the log curvature of the floor-free peak.
double initial_sigma(double left, double mid, double right, double floor) {
  const double l = std::log(std::max(left - floor, 1e-12));
  const double m = std::log(std::max(mid - floor, 1e-12));
  const double r = std::log(std::max(right - floor, 1e-12));
  const double curv = l - 2.0 * m + r;
  if (!(curv < 0.0)) return 2.0;
  return std::clamp(std::sqrt(-1.0 / curv), 0.5, 4.0);
}

}  // namespace

PeakFit fit_subpixel(const CorrTile& t, int fit_window) {
  check_window(fit_window);
  int br = -1;
  int bc = -1;
  for (int r = 1; r < kCorrSize - 1; ++r) {
    for (int c = 1; c < kCorrSize - 1; ++c) {
      if (br < 0 || t(r, c) > t(br, bc)) {
        br = r;
        bc = c;
      }
    }
  }
  // A peak halfway between cells ties with a neighbour; a plateau does not
  // count as a peak.
  bool drops = false;
  for (int dr = -1; dr <= 1; ++dr) {
    for (int dc = -1; dc <= 1; ++dc) {
      if (dr == 0 && dc == 0) continue;
      if (!(t(br, bc) >= t(br + dr, bc + dc))) return PeakFit{};
      drops = drops || t(br, bc) > t(br + dr, bc + dc);
    }
  }
  if (!drops) return PeakFit{};
  const int h = fit_window / 2;
  const int wr = std::clamp(br, h, kCorrSize - 1 - h);
  const int wc = std::clamp(bc, h, kCorrSize - 1 - h);
  std::vector<Sample> pts;
  double zmin = t(br, bc);
  for (int r = wr - h; r <= wr + h; ++r) {
    for (int c = wc - h; c <= wc + h; ++c) {
      pts.push_back({static_cast<double>(c), static_cast<double>(r), t(r, c)});
      zmin = std::min(zmin, t(r, c));
    }
  }
  const double peak = t(br, bc);
  // Half the window minimum as floor guess keeps the log finite at the edge.
  const double f0 = 0.5 * zmin;
  const double s0 = 0.5 * (initial_sigma(t(br, bc - 1), peak, t(br, bc + 1), f0) +
                           initial_sigma(t(br - 1, bc), peak, t(br + 1, bc), f0));
  const GaussFit g = lma_gaussian(pts, true, peak - f0, bc, br, s0, f0);

  PeakFit out;
  out.valid = true;
  if (g.converged && g.a > 0.0 && std::abs(g.cx - wc) <= h && std::abs(g.cy - wr) <= h) {
    out.center = {g.cx - C, g.cy - C};
    out.strength = clamp01(g.a + g.f);
    out.width = g.s;
    out.lma = true;
  } else {
    out.center = {bc - C + parabola_vertex(t(br, bc - 1), peak, t(br, bc + 1)),
                  br - C + parabola_vertex(t(br - 1, bc), peak, t(br + 1, bc))};
    out.strength = clamp01(peak);
  }
  if (out.strength == 0.0) out.valid = false;
  return out;
}

PeakFit fit_subpixel(const Profile9& p, int fit_window) {
  check_window(fit_window);
  int best = 1;
  for (int i = 2; i < kCorrSize - 1; ++i) {
    if (p[i] > p[best]) best = i;
  }
  if (!(p[best] >= p[best - 1] && p[best] >= p[best + 1]) ||
      !(p[best] > p[best - 1] || p[best] > p[best + 1])) {
    return PeakFit{};
  }
  const int h = fit_window / 2;
  const int wc = std::clamp(best, h, kCorrSize - 1 - h);
  std::vector<Sample> pts;
  double zmin = p[best];
  for (int i = wc - h; i <= wc + h; ++i) {
    pts.push_back({static_cast<double>(i), 0.0, p[i]});
    zmin = std::min(zmin, p[i]);
  }
  const double f0 = 0.5 * zmin;
  const double s0 = initial_sigma(p[best - 1], p[best], p[best + 1], f0);
  const GaussFit g = lma_gaussian(pts, false, p[best] - f0, best, 0.0, s0, f0);
  PeakFit out;
  out.valid = true;
  if (g.converged && g.a > 0.0 && std::abs(g.cx - wc) <= h) {
    out.center = {g.cx - C, 0.0};
    out.strength = clamp01(g.a + g.f);
    out.width = g.s;
    out.lma = true;
  } else {
    out.center = {best - C + parabola_vertex(p[best - 1], p[best], p[best + 1]), 0.0};
    out.strength = clamp01(p[best]);
  }
  if (out.strength == 0.0) out.valid = false;
  return out;
}

Profile9 disparity_profile(const CorrTile& t) {
  Profile9 p{};
  for (int u = -C; u <= C; ++u) {
    switch (t.direction) {
      case PairDirection::Horizontal: p[u + C] = t(C, C + u); break;
      case PairDirection::Vertical: p[u + C] = t(C + u, C); break;
      case PairDirection::DiagMain: p[u + C] = t(C + u, C + u); break;
      case PairDirection::DiagAnti: p[u + C] = t(C + u, C - u); break;
    }
  }
  return p;
}

double profile_contrast(const Profile9& p) {
  const int best = static_cast<int>(std::max_element(p.begin(), p.end()) - p.begin());
  const double peak = p[best];
  if (!(peak > 0.0)) return 0.0;
  double far = -INFINITY;
  for (int i = 0; i < kCorrSize; ++i) {
    if (std::abs(i - best) >= 3) far = std::max(far, p[i]);
  }
  return (peak - far) / peak;
}

namespace {

double project_to_baseline(PairDirection d, Vec2 c) {
  switch (d) {
    case PairDirection::Horizontal: return c.x;
    case PairDirection::Vertical: return c.y;
    case PairDirection::DiagMain: return 0.5 * (c.x + c.y);
    case PairDirection::DiagAnti: return 0.5 * (c.y - c.x);
  }
  throw std::invalid_argument("unknown pair direction");
}

}  // namespace

CombinedCorrelation combine_directions(const TileCorrSet& set, const CombineParams& params) {
  if (!set.valid) throw std::invalid_argument("combine_directions: invalid tile");
  CombinedCorrelation out;
  bool any_valid = false;
  double strongest = 0.0;
  for (PairDirection d : kDirections) {
    DirectionEstimate& e = out.directions[static_cast<int>(d)];
    const CorrTile& t = set[d];
    e.direction = d;
    e.profile = disparity_profile(t);
    e.contrast = profile_contrast(e.profile);
    const PeakFit fit = fit_subpixel(e.profile, params.fit_window);
    e.valid = fit.valid;
    e.residual = fit.center.x;
    e.strength = fit.strength;
    e.ambiguous = e.contrast < params.ridge_contrast;
    if (params.surface_fit && e.valid && !e.ambiguous) {
      const PeakFit f2 = fit_subpixel(t, params.fit_window);
      if (f2.valid) {
        e.residual = project_to_baseline(d, f2.center);
        e.strength = f2.strength;
      }
    }
    any_valid = any_valid || e.valid;
    if (e.valid && !e.ambiguous) strongest = std::max(strongest, e.strength);
  }
  if (!any_valid) throw std::invalid_argument("combine_directions: no valid direction");

  double wsum = 0.0;
  for (DirectionEstimate& e : out.directions) {
    if (e.valid && !e.ambiguous && e.strength >= params.min_relative_strength * strongest) {
      e.weight = e.strength;
      wsum += e.weight;
    }
  }
  if (wsum > 0.0) {
    for (const DirectionEstimate& e : out.directions) {
      if (e.weight == 0.0) continue;
      const double w = e.weight / wsum;
      out.residual += w * e.residual;
      out.strength += w * e.strength;
      for (int i = 0; i < kCorrSize; ++i) out.combined_profile[i] += w * e.profile[i];
    }
    out.valid = true;
  }
  return out;
}

namespace {

std::optional<CombinedCorrelation> correlate_at(const QuadFrameSet& frames, int row, int col,
                                                double target, const RefineParams& params,
                                                bool& in_frame) {
  const TileJob job = make_tile_job(frames, row, col, target);
  const UnaryTiles unary = process_tile_unary(frames, job);
  in_frame = unary.valid;
  if (!unary.valid) return std::nullopt;
  const TileCorrSet set = correlate_tile(unary, params.correlation);
  try {
    CombinedCorrelation c = combine_directions(set, params.combine);
    if (!c.valid) return std::nullopt;
    return c;
  } catch (const std::invalid_argument&) {
    return std::nullopt;
  }
}

void check_refine(const RefineParams& p) {
  if (!(p.step_threshold > 0.0)) throw std::invalid_argument("refine: threshold must be > 0");
  if (p.max_iters < 1) throw std::invalid_argument("refine: max_iters must be >= 1");
  if (!(p.max_step > 0.0)) throw std::invalid_argument("refine: max_step must be > 0");
  p.correlation.validate();
}

}  // namespace

DisparityEstimate refine_tile(const QuadFrameSet& frames, int row, int col, double initial_target,
                              const RefineParams& params) {
  check_refine(params);
  if (!(initial_target >= 0.0)) throw std::invalid_argument("refine: target must be >= 0");
  DisparityEstimate est;
  est.target = initial_target;
  est.disparity = initial_target;
  double target = initial_target;
  double prev_target = 0.0;
  double prev_residual = 0.0;
  double lo = -1.0;  // no target with a positive residual yet
  double hi = std::numeric_limits<double>::infinity();
  for (int it = 1; it <= params.max_iters; ++it) {
    bool in_frame = false;
    const auto c = correlate_at(frames, row, col, target, params, in_frame);
    if (!c) {
      // Keep the last good estimate if one exists.
      if (!est.valid) {
        est.strength = 0.0;
        est.iterations = it;
      }
      est.converged = false;
      return est;
    }
    est.valid = true;
    est.iterations = it;
    est.target = target;
    est.residual = c->residual;
    est.disparity = target + c->residual;
    est.strength = c->strength;
    est.history.push_back(est.disparity);
    if (std::abs(c->residual) < params.step_threshold) {
      est.converged = true;
      return est;
    }
    // The fixed point is a root of residual(target); it lies above targets
    // with a positive residual and below those with a negative one.
    if (c->residual > 0.0) {
      lo = std::max(lo, target);
    } else {
      hi = std::min(hi, target);
    }
    double step = c->residual;
    if (params.secant && it > 1 && target != prev_target) {
      const double gain = -(c->residual - prev_residual) / (target - prev_target);
      if (gain > 0.1 && gain < 10.0) step = c->residual / gain;
    }
    prev_target = target;
    prev_residual = c->residual;
    double next = std::max(0.0, target + std::clamp(step, -params.max_step, params.max_step));
    if (params.secant && std::isfinite(hi) && lo >= 0.0 && !(next > lo && next < hi)) {
      next = 0.5 * (lo + hi);
    }
    if (next == target) break;  // pinned at zero disparity
    target = next;
  }
  est.converged = false;
  return est;
}

DisparityEstimate single_pass(const QuadFrameSet& frames, int row, int col, double target,
                              const RefineParams& params) {
  RefineParams one = params;
  one.max_iters = 1;
  return refine_tile(frames, row, col, target, one);
}

namespace {

// Every scan target predicts a disparity. Near the truth the predictions
// agree with each other while far ones scatter, so each prediction is
// scored by the summed strength of all predictions within half a pixel.
// Returns distinct starts (0.5 px apart) best score first.
std::vector<double> coarse_candidates(const QuadFrameSet& frames, int row, int col,
                                      const EstimateParams& params) {
  struct Vote {
    double disparity;
    double strength;
    double score = 0.0;
  };
  std::vector<Vote> votes;
  for (int i = 0;; ++i) {
    const double td = i * params.coarse_step;
    if (td > params.coarse_max + 1e-9) break;
    bool in_frame = false;
    const auto c = correlate_at(frames, row, col, td, params.refine, in_frame);
    if (!c) continue;
    const double step = std::clamp(c->residual, -params.refine.max_step, params.refine.max_step);
    const double predicted = std::max(0.0, td + step);
    // A pair shift near the 8 px stride correlates with the lapped
    // transform's own time-domain alias, so far predictions are ghosts.
    if (predicted > params.coarse_max + 1.0) continue;
    votes.push_back({predicted, c->strength});
  }
  for (Vote& v : votes) {
    for (const Vote& w : votes) {
      if (std::abs(w.disparity - v.disparity) < 0.5) v.score += w.strength;
    }
  }
  std::stable_sort(votes.begin(), votes.end(), [](const Vote& a, const Vote& b) {
    return a.score > b.score || (a.score == b.score && a.disparity < b.disparity);
  });
  std::vector<double> starts;
  for (const Vote& v : votes) {
    if (static_cast<int>(starts.size()) >= params.candidates) break;
    const bool distinct = std::none_of(starts.begin(), starts.end(), [&](double s) {
      return std::abs(s - v.disparity) < 0.5;
    });
    if (distinct) starts.push_back(v.disparity);
  }
  if (starts.empty()) starts.push_back(0.0);
  return starts;
}

// Valid beats invalid, then the stronger final correlation. Convergence is
// not ranked: a true zero disparity under noise pins the target at 0
// without converging, while a false match far away may still converge.
bool better(const DisparityEstimate& a, const DisparityEstimate& b) {
  if (a.valid != b.valid) return a.valid;
  return a.strength > b.strength;
}

}  // namespace

DisparityMap estimate_frame(const QuadFrameSet& frames, const EstimateParams& params) {
  frames.validate();
  check_refine(params.refine);
  if (params.coarse &&
      !(params.coarse_step > 0.0 && params.coarse_max >= 0.0 && params.candidates >= 1)) {
    throw std::invalid_argument("estimate_frame: bad coarse scan parameters");
  }
  DisparityMap map;
  map.shape = tile_grid_shape(frames.width(), frames.height());
  map.tiles.resize(static_cast<std::size_t>(map.shape.count()));
  parallel_for(map.shape.count(), params.workers, [&](int index) {
    const int row = index / map.shape.cols;
    const int col = index % map.shape.cols;
    if (!params.coarse) {
      map.tiles[index] = refine_tile(frames, row, col, 0.0, params.refine);
      return;
    }
    std::optional<DisparityEstimate> best;
    for (double start : coarse_candidates(frames, row, col, params)) {
      DisparityEstimate e = refine_tile(frames, row, col, start, params.refine);
      if (!best || better(e, *best)) best = std::move(e);
    }
    map.tiles[index] = std::move(*best);
  });
  return map;
}

FeatureSet export_features(const FrameCorrelation& frame, const std::vector<double>& targets,
                           const std::optional<std::vector<double>>& gt) {
  const auto n = static_cast<std::size_t>(frame.shape.count());
  if (frame.tiles.size() != n || targets.size() != n) {
    throw std::invalid_argument("export_features: grid shape mismatch");
  }
  if (gt && gt->size() != n) throw std::invalid_argument("export_features: gt shape mismatch");
  FeatureSet fs;
  fs.shape = frame.shape;
  if (gt) fs.ground_truth.emplace();
  for (std::size_t i = 0; i < n; ++i) {
    const TileCorrSet& set = frame.tiles[i];
    if (!set.valid) {
      fs.invalid_tiles.push_back(static_cast<int>(i));
      continue;
    }
    std::array<float, kFeatureLength> rec{};
    for (int r = 0; r < kCorrSize; ++r) {
      for (int c = 0; c < kCorrSize; ++c) {
        for (int d = 0; d < 4; ++d) {
          rec[(r * kCorrSize + c) * 4 + d] = static_cast<float>(set.directions[d](r, c));
        }
      }
    }
    rec[kFeatureLength - 1] = static_cast<float>(targets[i]);
    fs.tile_index.push_back(static_cast<int>(i));
    fs.records.push_back(rec);
    if (gt) fs.ground_truth->push_back((*gt)[i]);
  }
  return fs;
}

namespace {

constexpr const char* kFeatureMagic = "fdtp-features";
constexpr int kFeatureVersion = 1;

std::uint32_t to_little(std::uint32_t v) {
  if constexpr (std::endian::native == std::endian::little) {
    return v;
  } else {
    return ((v & 0xffu) << 24) | ((v & 0xff00u) << 8) | ((v >> 8) & 0xff00u) | (v >> 24);
  }
}

}  // namespace

void write_features(std::ostream& out, const FeatureSet& fs) {
  nlohmann::json h;
  h["magic"] = kFeatureMagic;
  h["version"] = kFeatureVersion;
  h["grid"] = {fs.shape.rows, fs.shape.cols};
  h["record_count"] = fs.records.size();
  h["record_length"] = kFeatureLength;
  h["layout"] = "row,col,direction(horizontal,vertical,diag_main,diag_anti) then target";
  h["dtype"] = "float32le";
  h["tiles"] = fs.tile_index;
  h["invalid_tiles"] = fs.invalid_tiles;
  if (fs.ground_truth) h["gt"] = *fs.ground_truth;
  out << h.dump() << '\n';
  for (const auto& rec : fs.records) {
    for (float f : rec) {
      const std::uint32_t bits = to_little(std::bit_cast<std::uint32_t>(f));
      out.write(reinterpret_cast<const char*>(&bits), sizeof bits);
    }
  }
  if (!out) throw std::runtime_error("write_features: stream error");
}

FeatureSet read_features(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw std::runtime_error("read_features: missing header");
  nlohmann::json h;
  try {
    h = nlohmann::json::parse(line);
  } catch (const nlohmann::json::exception& e) {
    throw std::runtime_error(std::string("read_features: bad header: ") + e.what());
  }
  if (h.value("magic", "") != kFeatureMagic || h.value("version", 0) != kFeatureVersion) {
    throw std::runtime_error("read_features: not a feature dump");
  }
  if (h.value("record_length", 0) != kFeatureLength) {
    throw std::runtime_error("read_features: unexpected record length");
  }
  FeatureSet fs;
  try {
    fs.shape = {h.at("grid").at(0).get<int>(), h.at("grid").at(1).get<int>()};
    fs.tile_index = h.at("tiles").get<std::vector<int>>();
    fs.invalid_tiles = h.at("invalid_tiles").get<std::vector<int>>();
    if (h.contains("gt")) fs.ground_truth = h["gt"].get<std::vector<double>>();
  } catch (const nlohmann::json::exception& e) {
    throw std::runtime_error(std::string("read_features: bad header: ") + e.what());
  }
  const auto count = h.at("record_count").get<std::size_t>();
  if (fs.tile_index.size() != count || (fs.ground_truth && fs.ground_truth->size() != count)) {
    throw std::runtime_error("read_features: header counts disagree");
  }
  fs.records.resize(count);
  for (auto& rec : fs.records) {
    for (float& f : rec) {
      std::uint32_t bits = 0;
      if (!in.read(reinterpret_cast<char*>(&bits), sizeof bits)) {
        throw std::runtime_error("read_features: truncated records");
      }
      f = std::bit_cast<float>(to_little(bits));
    }
  }
  if (in.peek() != std::char_traits<char>::eof()) {
    throw std::runtime_error("read_features: trailing data");
  }
  return fs;
}

std::vector<BiasPoint> pixel_locking_sweep(const std::function<QuadFrameSet(double)>& scene,
                                           double from, double to, double step,
                                           const SweepParams& params) {
  if (!(step > 0.0)) throw std::invalid_argument("pixel_locking_sweep: step must be > 0");
  if (!(to >= from)) throw std::invalid_argument("pixel_locking_sweep: empty range");
  std::vector<BiasPoint> curve;
  const int steps = static_cast<int>(std::floor((to - from) / step + 1e-9));
  for (int s = 0; s <= steps; ++s) {
    const double d = from + s * step;
    const QuadFrameSet frames = scene(d);
    const TileGridShape shape = tile_grid_shape(frames.width(), frames.height());
    const int b = params.border_tiles;
    const int rows = shape.rows - 2 * b;
    const int cols = shape.cols - 2 * b;
    if (rows <= 0 || cols <= 0) throw std::invalid_argument("pixel_locking_sweep: frame too small");
    std::vector<DisparityEstimate> refined(static_cast<std::size_t>(rows * cols));
    std::vector<DisparityEstimate> single(refined.size());
    parallel_for(rows * cols, params.workers, [&](int k) {
      const int row = b + k / cols;
      const int col = b + k % cols;
      refined[k] = refine_tile(frames, row, col, 0.0, params.refine);
      single[k] = single_pass(frames, row, col, 0.0, params.refine);
    });
    BiasPoint pt;
    pt.true_disparity = d;
    for (std::size_t k = 0; k < refined.size(); ++k) {
      if (!refined[k].valid || !single[k].valid) continue;
      const double er = refined[k].disparity - d;
      const double es = single[k].disparity - d;
      pt.refined_bias += er;
      pt.single_bias += es;
      pt.refined_rms += er * er;
      pt.single_rms += es * es;
      ++pt.tiles;
    }
    if (pt.tiles > 0) {
      pt.refined_bias /= pt.tiles;
      pt.single_bias /= pt.tiles;
      pt.refined_rms = std::sqrt(pt.refined_rms / pt.tiles);
      pt.single_rms = std::sqrt(pt.single_rms / pt.tiles);
    }
    curve.push_back(pt);
  }
  return curve;
}

}  // namespace fdtp
