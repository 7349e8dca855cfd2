#pragma once

#include <array>
#include <filesystem>
#include <iosfwd>
#include <stdexcept>
#include <string>
#include <vector>

#include "fdtp/disparity.hpp"
#include "fdtp/geometry.hpp"
#include "fdtp/pipeline.hpp"
#include "fdtp/synth.hpp"

namespace fdtp::io {

/// Unreadable or malformed input files.
struct FormatError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// 16-bit binary graymap (P5, maxval 65535, big-endian). Values are
/// clamped to [0, 1] full scale and rounded to the nearest code.
void write_pgm16(std::ostream& out, const Image& image);
void write_pgm16(const std::filesystem::path& path, const Image& image);
/// Accepts any maxval up to 65535 (one byte per sample below 256) and
/// rescales to [0, 1].
Image read_pgm16(std::istream& in);
Image read_pgm16(const std::filesystem::path& path);

/// 16-bit binary pixmap (P6) from three channels of one size.
void write_ppm16(const std::filesystem::path& path, const std::array<Image, 3>& rgb);

inline constexpr const char* kCalibrationFormat = "fdtp-calibration/1";

struct Calibration {
  CameraGeometry geometry;
  /// Empty grids mean identity kernels.
  std::array<KernelGrid, kCameras> kernels;
};

/// {format, baseline_m, pixel_pitch_m, focal_length_m, image_size [w, h],
/// distortion [k1, k2, k3], camera_positions [[x, y] x 4], kernel_grids?}.
/// kernel_grids is a list of four {spacing, rows, cols, nodes}, nodes
/// row-major. A node maps red, blue and green to {center_offset: [x, y],
/// multiplier?: [cc, sc, cs, ss]}, each quadrant 64 values row-major; a
/// missing multiplier is the identity.
std::string calibration_to_json(const Calibration& calibration);
/// Throws FormatError on bad JSON, a wrong format tag or a bad field.
Calibration parse_calibration(const std::string& text);
Calibration load_calibration(const std::filesystem::path& path);
void save_calibration(const std::filesystem::path& path, const Calibration& calibration);

/// Just the kernel_grids list, for a kernel file separate from geometry.
std::array<KernelGrid, kCameras> parse_kernel_grids(const std::string& text);

struct RunConfig {
  /// Calibration file; relative paths resolve against the frame directory.
  std::filesystem::path geometry = "calibration.json";
  /// Optional kernel file overriding the calibration's kernel grids.
  std::filesystem::path kernels;
  ColorWeights color_weights{};
  double epsilon = 1e-6;
  double lpf_sigma = 2.0;
  double refine_threshold = 0.001;
  int max_iters = 10;
  bool coarse = true;
  double coarse_max = 5.0;
  int workers = 1;
  std::string disparity_csv = "disparity.csv";
  /// Empty names switch the output off.
  std::string texture;
  std::string features;

  /// Throws std::invalid_argument on an unusable value.
  void validate() const;
  EstimateParams estimate_params() const;
};

/// Missing keys keep their defaults; unknown keys are rejected.
/// Throws FormatError on bad JSON or types, std::invalid_argument on values.
RunConfig parse_run_config(const std::string& text);
RunConfig load_run_config(const std::filesystem::path& path);

/// {kind: fronto_plane|slanted_plane|two_depth_edge|bar_target, width,
/// height, disparity, slope_x, slope_y, orientation: vertical|horizontal,
/// d_fg, d_bg, edge_position, texture: {kind: noise|horizontal_bars|
/// vertical_bars, seed, cutoff, components, blur_sigma}, contrast,
/// noise_sigma, noise_seed, camera_blur [4], color_gains [3], geometry?}.
/// A bar_target picks its bar texture from orientation. The optional
/// geometry block uses the calibration keys (image_size is ignored).
struct SceneFile {
  synth::SceneSpec spec;
  CameraGeometry geometry;
};
/// Throws std::invalid_argument for anything malformed or invalid.
SceneFile parse_scene(const std::string& text);

/// Frame directory: cam0.pgm .. cam3.pgm plus the calibration file.
inline constexpr std::array<const char*, kCameras> kFrameNames{"cam0.pgm", "cam1.pgm", "cam2.pgm",
                                                              "cam3.pgm"};
void save_frames(const std::filesystem::path& dir, const QuadFrameSet& frames);
/// Throws FormatError when files are missing, unreadable or inconsistent.
QuadFrameSet load_frames(const std::filesystem::path& dir, const RunConfig& config = {});

/// tile_row,tile_col,disparity,strength,iterations,converged
void write_disparity_csv(std::ostream& out, const DisparityMap& map);
/// tile_row,tile_col,disparity,valid,mixed,secondary
void write_ground_truth_csv(std::ostream& out, const synth::GroundTruth& truth);
/// true_disparity,refined_bias,single_bias,refined_rms,single_rms,tiles
void write_bias_csv(std::ostream& out, const std::vector<BiasPoint>& curve);

/// Shortest decimal form that reads back to the same double.
std::string format_double(double v);

}  // namespace fdtp::io
