#pragma once

#include <array>
#include <functional>
#include <iosfwd>
#include <optional>
#include <vector>

#include "fdtp/fd.hpp"
#include "fdtp/pipeline.hpp"

namespace fdtp {

using Profile9 = std::array<double, kCorrSize>;

/// Result of fitting a peak model to a 9x9 surface or a 9-sample profile.
/// Centers are offsets from the middle cell in px.
struct PeakFit {
  Vec2 center{};
  double strength = 0.0;
  double width = 0.0;
  bool valid = false;
  /// false when the parabola fallback produced the center.
  bool lma = false;
};

/// Gaussian-plus-floor least squares (Levenberg-Marquardt, at most 20
/// iterations) over a fit_window x fit_window patch around the local
/// maximum of the central 7x7, with a 3-point parabola per axis as fallback.
/// No local maximum (a flat plateau is none) gives valid = false and strength 0.
PeakFit fit_subpixel(const CorrTile& surface, int fit_window = 5);
/// 1D version on a profile; the result sits in center.x.
PeakFit fit_subpixel(const Profile9& profile, int fit_window = 5);

/// Profile along the pair baseline through the surface center, sampled in
/// disparity units: horizontal row, vertical column, the main diagonal
/// (u, u) and the anti-diagonal (y = u, x = -u).
Profile9 disparity_profile(const CorrTile& surface);

/// (peak - largest sample at least 3 cells from the peak) / peak. Low
/// values mean a ridge along the baseline: the pair sees no structure in
/// that direction.
double profile_contrast(const Profile9& profile);

struct CombineParams {
  double ridge_contrast = 0.35;
  /// Directions weaker than this fraction of the strongest are dropped.
  double min_relative_strength = 0.5;
  int fit_window = 5;
  /// Take the residual from the full 2D surface fit projected onto the
  /// baseline instead of the 1D profile fit. Ridge-like (ambiguous)
  /// directions never contribute either way.
  bool surface_fit = false;
};

struct DirectionEstimate {
  PairDirection direction = PairDirection::Horizontal;
  Profile9 profile{};
  double residual = 0.0;
  double strength = 0.0;
  double contrast = 0.0;
  bool valid = false;
  bool ambiguous = false;
  double weight = 0.0;
};

struct CombinedCorrelation {
  std::array<DirectionEstimate, 4> directions{};
  /// Weight-averaged profile of the contributing directions.
  Profile9 combined_profile{};
  /// Weighted mean of the per-direction residuals.
  double residual = 0.0;
  double strength = 0.0;
  bool valid = false;
};

/// Throws std::invalid_argument when the set or every direction is invalid.
CombinedCorrelation combine_directions(const TileCorrSet& set, const CombineParams& params = {});

struct RefineParams {
  double step_threshold = 0.001;
  int max_iters = 10;
  /// Largest target change per iteration (the 9x9 crop only sees +/-4 px).
  double max_step = 4.0;
  /// After the first pass, divide the residual by the gain measured between
  /// the last two passes (secant step). The plain update target += residual
  /// contracts the error only by (1 - gain) per pass.
  bool secant = true;
  CorrelationParams correlation{};
  CombineParams combine{};
};

struct DisparityEstimate {
  double disparity = 0.0;
  double target = 0.0;
  double residual = 0.0;
  double strength = 0.0;
  int iterations = 0;
  bool converged = false;
  bool valid = false;
  /// disparity after each iteration
  std::vector<double> history;
};

DisparityEstimate refine_tile(const QuadFrameSet& frames, int row, int col,
                              double initial_target = 0.0, const RefineParams& params = {});

/// One correlation pass at `target`, no iteration.
DisparityEstimate single_pass(const QuadFrameSet& frames, int row, int col, double target,
                              const RefineParams& params = {});

struct EstimateParams {
  RefineParams refine{};
  /// Pick the starting target per tile from a scan of targets 0, step,
  /// 2 step, ... <= coarse_max: the prediction (target + residual) backed
  /// by the most peak strength among predictions within 0.5 px wins.
  /// Predictions beyond coarse_max + 1 are discarded: a disparity near 8 px
  /// aliases with the transform stride.
  bool coarse = true;
  double coarse_max = 5.0;
  double coarse_step = 0.5;
  /// Refinement runs from this many of the best-voted distinct starts and
  /// the valid result with the strongest final correlation is kept.
  int candidates = 3;
  int workers = 1;
};

struct DisparityMap {
  TileGridShape shape;
  std::vector<DisparityEstimate> tiles;  // row-major
};

DisparityMap estimate_frame(const QuadFrameSet& frames, const EstimateParams& params = {});

inline constexpr int kFeatureLength = kCorrSize * kCorrSize * 4 + 1;

/// Network input records: for each valid tile the 9x9x4 correlation tensor
/// (row, column, direction; direction fastest) followed by the target.
struct FeatureSet {
  TileGridShape shape;
  std::vector<int> tile_index;
  std::vector<std::array<float, kFeatureLength>> records;
  std::vector<int> invalid_tiles;
  std::optional<std::vector<double>> ground_truth;  // one per record
};

/// Throws std::invalid_argument when targets or gt do not match the grid.
FeatureSet export_features(const FrameCorrelation& frame, const std::vector<double>& targets,
                           const std::optional<std::vector<double>>& gt = std::nullopt);

/// JSON header line, then little-endian float32 records.
void write_features(std::ostream& out, const FeatureSet& features);
/// Throws std::runtime_error on a malformed stream.
FeatureSet read_features(std::istream& in);

struct BiasPoint {
  double true_disparity = 0.0;
  double refined_bias = 0.0;
  double single_bias = 0.0;
  double refined_rms = 0.0;
  double single_rms = 0.0;
  int tiles = 0;
};

struct SweepParams {
  RefineParams refine{};
  /// Tiles this far from the frame edge are skipped.
  int border_tiles = 1;
  int workers = 1;
};

/// For each true disparity in [from, to] (inclusive, `step` apart) renders
/// a scene and compares refined (from target 0) and single-pass estimates
/// with the truth. Throws std::invalid_argument for step <= 0.
std::vector<BiasPoint> pixel_locking_sweep(const std::function<QuadFrameSet(double)>& scene,
                                           double from, double to, double step,
                                           const SweepParams& params = {});

}  // namespace fdtp
