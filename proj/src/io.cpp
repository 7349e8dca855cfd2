#include "fdtp/io.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <json.hpp>
#include <map>
#include <ostream>
#include <set>
#include <sstream>

namespace fdtp::io {

namespace {

using nlohmann::json;
using ojson = nlohmann::ordered_json;

[[noreturn]] void fail(const std::string& what) { throw FormatError(what); }

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail("cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::ofstream open_out(const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  return out;
}

// PNM header token, skipping whitespace and comments.
std::string pnm_token(std::istream& in) {
  std::string tok;
  int ch;
  while ((ch = in.get()) != EOF) {
    if (ch == '#') {
      while ((ch = in.get()) != EOF && ch != '\n') {
      }
      continue;
    }
    if (std::isspace(ch)) {
      if (!tok.empty()) break;
      continue;
    }
    tok.push_back(static_cast<char>(ch));
  }
  return tok;
}

int pnm_int(std::istream& in, const char* what) {
  const std::string tok = pnm_token(in);
  int v = 0;
  const auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v);
  if (tok.empty() || ec != std::errc{} || ptr != tok.data() + tok.size() || v <= 0) {
    fail(std::string("pgm: bad ") + what + " '" + tok + "'");
  }
  return v;
}

std::uint16_t to_code(double v) {
  if (!std::isfinite(v)) v = 0.0;
  return static_cast<std::uint16_t>(std::lround(std::clamp(v, 0.0, 1.0) * 65535.0));
}

void put16(std::ostream& out, std::uint16_t v) {
  out.put(static_cast<char>(v >> 8));
  out.put(static_cast<char>(v & 0xff));
}

// JSON field access with FormatError messages naming the key.
template <class T>
T get(const json& j, const char* key) {
  if (!j.contains(key)) fail(std::string("missing key '") + key + "'");
  try {
    return j.at(key).get<T>();
  } catch (const json::exception&) {
    fail(std::string("bad value for '") + key + "'");
  }
}

template <class T>
void get_opt(const json& j, const char* key, T& out) {
  if (j.contains(key)) out = get<T>(j, key);
}

void reject_unknown(const json& j, std::initializer_list<const char*> keys, const char* where) {
  const std::set<std::string> known(keys.begin(), keys.end());
  for (const auto& [k, v] : j.items()) {
    if (!known.count(k)) fail(std::string(where) + ": unknown key '" + k + "'");
  }
}

ojson vec2_json(Vec2 v) { return ojson::array({v.x, v.y}); }

Vec2 vec2_from(const json& j, const char* key) {
  const auto a = get<std::vector<double>>(j, key);
  if (a.size() != 2) fail(std::string("'") + key + "' must have 2 values");
  return {a[0], a[1]};
}

constexpr std::array<const char*, 3> kColorKeys{"red", "blue", "green"};

bool is_identity(const FdTile& t) {
  const FdTile id = CalibKernel::identity().multiplier[0];
  return t.quadrants == id.quadrants;
}

ojson kernel_grid_json(const KernelGrid& g) {
  ojson nodes = ojson::array();
  for (int r = 0; r < g.rows(); ++r) {
    for (int c = 0; c < g.cols(); ++c) {
      ojson node = ojson::object();
      for (Color color : kColors) {
        const CalibKernel& k = g.node(color, r, c);
        ojson entry = {{"center_offset", vec2_json(k.center_offset)}};
        if (!is_identity(k[color])) {
          ojson quads = ojson::array();
          for (const auto& q : k[color].quadrants) quads.push_back(q);
          entry["multiplier"] = quads;
        }
        node[kColorKeys[static_cast<int>(color)]] = entry;
      }
      nodes.push_back(node);
    }
  }
  return {{"spacing", g.spacing()}, {"rows", g.rows()}, {"cols", g.cols()}, {"nodes", nodes}};
}

KernelGrid kernel_grid_from(const json& j) {
  if (!j.is_object()) fail("kernel grid must be an object");
  reject_unknown(j, {"spacing", "rows", "cols", "nodes"}, "kernel grid");
  const auto spacing = get<double>(j, "spacing");
  const auto rows = get<int>(j, "rows");
  const auto cols = get<int>(j, "cols");
  const json& nodes = j.at("nodes");
  if (!nodes.is_array() || rows < 1 || cols < 1 ||
      nodes.size() != static_cast<std::size_t>(rows) * static_cast<std::size_t>(cols)) {
    fail("kernel grid: nodes must list rows x cols entries");
  }
  std::array<std::vector<CalibKernel>, 3> out;
  for (const json& node : nodes) {
    for (Color color : kColors) {
      const char* key = kColorKeys[static_cast<int>(color)];
      if (!node.contains(key)) fail(std::string("kernel node: missing '") + key + "'");
      const json& e = node.at(key);
      FdTile m = CalibKernel::identity().multiplier[0];
      if (e.contains("multiplier")) {
        const auto quads = get<std::vector<std::vector<double>>>(e, "multiplier");
        if (quads.size() != 4) fail("kernel multiplier needs 4 quadrants");
        for (int q = 0; q < 4; ++q) {
          if (quads[q].size() != 64) fail("kernel quadrant needs 64 values");
          std::copy(quads[q].begin(), quads[q].end(), m.quadrants[q].begin());
        }
      }
      out[static_cast<int>(color)].push_back(CalibKernel::uniform(m, vec2_from(e, "center_offset")));
    }
  }
  try {
    return KernelGrid(spacing, rows, cols, std::move(out));
  } catch (const std::invalid_argument& e) {
    fail(e.what());
  }
}

std::array<KernelGrid, kCameras> kernel_grids_from(const json& j) {
  if (!j.is_array() || j.size() != kCameras) fail("kernel_grids must list 4 grids");
  std::array<KernelGrid, kCameras> out;
  for (int i = 0; i < kCameras; ++i) out[i] = kernel_grid_from(j[i]);
  return out;
}

// Geometry keys shared by calibration files and scene specs.
void read_geometry(const json& j, CameraGeometry& g, bool with_size) {
  get_opt(j, "baseline_m", g.baseline_m);
  get_opt(j, "pixel_pitch_m", g.pixel_pitch_m);
  get_opt(j, "focal_length_m", g.focal_length_m);
  if (with_size && j.contains("image_size")) {
    const auto s = get<std::vector<int>>(j, "image_size");
    if (s.size() != 2) fail("image_size must be [width, height]");
    g.width = s[0];
    g.height = s[1];
  }
  if (j.contains("distortion")) {
    const auto d = get<std::vector<double>>(j, "distortion");
    if (d.size() != 3) fail("distortion must be [k1, k2, k3]");
    std::copy(d.begin(), d.end(), g.distortion.begin());
  }
  if (j.contains("camera_positions")) {
    const auto p = get<std::vector<std::vector<double>>>(j, "camera_positions");
    if (p.size() != kCameras) fail("camera_positions must list 4 cameras");
    for (int i = 0; i < kCameras; ++i) {
      if (p[i].size() != 2) fail("camera position must be [x, y]");
      g.positions[i] = {p[i][0], p[i][1]};
    }
  }
}

json parse_json(const std::string& text) {
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    fail(std::string("malformed JSON: ") + e.what());
  }
}

}  // namespace

void write_pgm16(std::ostream& out, const Image& image) {
  out << "P5\n" << image.width() << ' ' << image.height() << "\n65535\n";
  for (double v : image.data()) put16(out, to_code(v));
  if (!out) throw std::runtime_error("pgm: write failed");
}

void write_pgm16(const std::filesystem::path& path, const Image& image) {
  std::ofstream out = open_out(path);
  write_pgm16(out, image);
}

Image read_pgm16(std::istream& in) {
  if (pnm_token(in) != "P5") fail("pgm: not a binary graymap (P5)");
  const int w = pnm_int(in, "width");
  const int h = pnm_int(in, "height");
  const int maxval = pnm_int(in, "maxval");
  if (maxval > 65535) fail("pgm: maxval above 65535");
  const bool wide = maxval > 255;
  Image img(w, h);
  const std::size_t n = static_cast<std::size_t>(w) * static_cast<std::size_t>(h);
  std::vector<unsigned char> buf(n * (wide ? 2 : 1));
  in.read(reinterpret_cast<char*>(buf.data()), static_cast<std::streamsize>(buf.size()));
  if (static_cast<std::size_t>(in.gcount()) != buf.size()) fail("pgm: truncated pixel data");
  for (std::size_t i = 0; i < n; ++i) {
    const unsigned v = wide ? (buf[2 * i] << 8) | buf[2 * i + 1] : buf[i];
    if (v > static_cast<unsigned>(maxval)) fail("pgm: sample above maxval");
    img.data()[i] = static_cast<double>(v) / maxval;
  }
  return img;
}

Image read_pgm16(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail("cannot open " + path.string());
  try {
    return read_pgm16(in);
  } catch (const FormatError& e) {
    fail(path.string() + ": " + e.what());
  }
}

void write_ppm16(const std::filesystem::path& path, const std::array<Image, 3>& rgb) {
  const int w = rgb[0].width();
  const int h = rgb[0].height();
  for (const Image& c : rgb) {
    if (c.width() != w || c.height() != h) throw std::invalid_argument("ppm: channel size mismatch");
  }
  std::ofstream out = open_out(path);
  out << "P6\n" << w << ' ' << h << "\n65535\n";
  for (std::size_t i = 0; i < rgb[0].data().size(); ++i) {
    for (const Image& c : rgb) put16(out, to_code(c.data()[i]));
  }
  if (!out) throw std::runtime_error("ppm: write failed");
}

std::string calibration_to_json(const Calibration& cal) {
  const CameraGeometry& g = cal.geometry;
  ojson pos = ojson::array();
  for (const Vec2& p : g.positions) pos.push_back(vec2_json(p));
  ojson j = {{"format", kCalibrationFormat},
            {"baseline_m", g.baseline_m},
            {"pixel_pitch_m", g.pixel_pitch_m},
            {"focal_length_m", g.focal_length_m},
            {"image_size", {g.width, g.height}},
            {"distortion", g.distortion},
            {"camera_positions", pos}};
  if (std::any_of(cal.kernels.begin(), cal.kernels.end(), [](const KernelGrid& k) { return !k.empty(); })) {
    ojson grids = ojson::array();
    for (const KernelGrid& k : cal.kernels) {
      if (k.empty()) throw std::invalid_argument("calibration: kernel grids must be all set or all empty");
      grids.push_back(kernel_grid_json(k));
    }
    j["kernel_grids"] = grids;
  }
  return j.dump(2) + "\n";
}

Calibration parse_calibration(const std::string& text) {
  const json j = parse_json(text);
  if (!j.is_object()) fail("calibration must be a JSON object");
  reject_unknown(j,
                 {"format", "baseline_m", "pixel_pitch_m", "focal_length_m", "image_size",
                  "distortion", "camera_positions", "kernel_grids"},
                 "calibration");
  const auto format = get<std::string>(j, "format");
  if (format != kCalibrationFormat) fail("calibration: unsupported format '" + format + "'");
  if (!j.contains("image_size")) fail("calibration: missing key 'image_size'");
  Calibration cal;
  read_geometry(j, cal.geometry, true);
  if (j.contains("kernel_grids")) cal.kernels = kernel_grids_from(j.at("kernel_grids"));
  try {
    cal.geometry.validate();
  } catch (const std::invalid_argument& e) {
    fail(std::string("calibration: ") + e.what());
  }
  return cal;
}

Calibration load_calibration(const std::filesystem::path& path) {
  try {
    return parse_calibration(read_file(path));
  } catch (const FormatError& e) {
    const std::string what = e.what();
    if (what.rfind("cannot open", 0) == 0) throw;
    fail(path.string() + ": " + what);
  }
}

void save_calibration(const std::filesystem::path& path, const Calibration& cal) {
  std::ofstream out = open_out(path);
  out << calibration_to_json(cal);
}

std::array<KernelGrid, kCameras> parse_kernel_grids(const std::string& text) {
  const json j = parse_json(text);
  if (j.is_object() && j.contains("kernel_grids")) return kernel_grids_from(j.at("kernel_grids"));
  return kernel_grids_from(j);
}

void RunConfig::validate() const {
  color_weights.validate();
  if (!(epsilon > 0.0)) throw std::invalid_argument("config: epsilon must be > 0");
  if (!(lpf_sigma >= 0.0)) throw std::invalid_argument("config: lpf_sigma must be >= 0");
  if (!(refine_threshold > 0.0)) throw std::invalid_argument("config: threshold must be > 0");
  if (max_iters < 1) throw std::invalid_argument("config: max_iters must be >= 1");
  if (!(coarse_max >= 0.0)) throw std::invalid_argument("config: coarse_max must be >= 0");
  if (workers < 1) throw std::invalid_argument("config: workers must be >= 1");
  if (disparity_csv.empty()) throw std::invalid_argument("config: disparity output name is empty");
  if (geometry.empty()) throw std::invalid_argument("config: geometry path is empty");
}

EstimateParams RunConfig::estimate_params() const {
  EstimateParams p;
  p.refine.step_threshold = refine_threshold;
  p.refine.max_iters = max_iters;
  p.refine.correlation.weights = color_weights;
  p.refine.correlation.epsilon = epsilon;
  p.refine.correlation.lpf_sigma = lpf_sigma;
  p.coarse = coarse;
  p.coarse_max = coarse_max;
  p.workers = workers;
  return p;
}

RunConfig parse_run_config(const std::string& text) {
  const json j = parse_json(text);
  if (!j.is_object()) fail("config must be a JSON object");
  reject_unknown(j,
                 {"geometry", "kernels", "color_weights", "epsilon", "lpf_sigma", "refinement",
                  "workers", "outputs"},
                 "config");
  RunConfig c;
  if (j.contains("geometry")) c.geometry = get<std::string>(j, "geometry");
  if (j.contains("kernels")) c.kernels = get<std::string>(j, "kernels");
  if (j.contains("color_weights")) {
    const json& w = j.at("color_weights");
    reject_unknown(w, {"red", "blue", "green"}, "color_weights");
    get_opt(w, "red", c.color_weights.red);
    get_opt(w, "blue", c.color_weights.blue);
    get_opt(w, "green", c.color_weights.green);
  }
  get_opt(j, "epsilon", c.epsilon);
  get_opt(j, "lpf_sigma", c.lpf_sigma);
  if (j.contains("refinement")) {
    const json& r = j.at("refinement");
    reject_unknown(r, {"threshold", "max_iters", "coarse", "coarse_max"}, "refinement");
    get_opt(r, "threshold", c.refine_threshold);
    get_opt(r, "max_iters", c.max_iters);
    get_opt(r, "coarse", c.coarse);
    get_opt(r, "coarse_max", c.coarse_max);
  }
  get_opt(j, "workers", c.workers);
  if (j.contains("outputs")) {
    const json& o = j.at("outputs");
    reject_unknown(o, {"disparity", "texture", "features"}, "outputs");
    get_opt(o, "disparity", c.disparity_csv);
    get_opt(o, "texture", c.texture);
    get_opt(o, "features", c.features);
  }
  c.validate();
  return c;
}

RunConfig load_run_config(const std::filesystem::path& path) { return parse_run_config(read_file(path)); }

SceneFile parse_scene(const std::string& text) {
  // Every problem with a scene is a spec error.
  try {
    const json j = parse_json(text);
    if (!j.is_object()) fail("scene must be a JSON object");
    reject_unknown(j,
                   {"kind", "width", "height", "disparity", "slope_x", "slope_y", "orientation",
                    "d_fg", "d_bg", "edge_position", "texture", "contrast", "noise_sigma",
                    "noise_seed", "camera_blur", "color_gains", "geometry"},
                   "scene");
    SceneFile f;
    synth::SceneSpec& s = f.spec;
    static const std::map<std::string, synth::SceneKind> kinds{
        {"fronto_plane", synth::SceneKind::FrontoPlane},
        {"slanted_plane", synth::SceneKind::SlantedPlane},
        {"two_depth_edge", synth::SceneKind::TwoDepthEdge},
        {"bar_target", synth::SceneKind::BarTarget}};
    const auto kind = get<std::string>(j, "kind");
    if (!kinds.count(kind)) fail("unknown scene kind '" + kind + "'");
    s.kind = kinds.at(kind);
    get_opt(j, "width", s.width);
    get_opt(j, "height", s.height);
    get_opt(j, "disparity", s.disparity);
    get_opt(j, "slope_x", s.slope_x);
    get_opt(j, "slope_y", s.slope_y);
    if (j.contains("orientation")) {
      const auto o = get<std::string>(j, "orientation");
      if (o == "vertical") {
        s.orientation = synth::Orientation::Vertical;
      } else if (o == "horizontal") {
        s.orientation = synth::Orientation::Horizontal;
      } else {
        fail("orientation must be vertical or horizontal");
      }
    }
    get_opt(j, "d_fg", s.d_fg);
    get_opt(j, "d_bg", s.d_bg);
    get_opt(j, "edge_position", s.edge_position);
    if (s.kind == synth::SceneKind::BarTarget) {
      s.texture.kind = s.orientation == synth::Orientation::Horizontal
                           ? synth::TextureKind::HorizontalBars
                           : synth::TextureKind::VerticalBars;
    }
    if (j.contains("texture")) {
      const json& t = j.at("texture");
      reject_unknown(t, {"kind", "seed", "cutoff", "components", "blur_sigma"}, "texture");
      if (t.contains("kind")) {
        static const std::map<std::string, synth::TextureKind> tk{
            {"noise", synth::TextureKind::Noise},
            {"horizontal_bars", synth::TextureKind::HorizontalBars},
            {"vertical_bars", synth::TextureKind::VerticalBars}};
        const auto k = get<std::string>(t, "kind");
        if (!tk.count(k)) fail("unknown texture kind '" + k + "'");
        s.texture.kind = tk.at(k);
      }
      get_opt(t, "seed", s.texture.seed);
      get_opt(t, "cutoff", s.texture.cutoff);
      get_opt(t, "components", s.texture.components);
      get_opt(t, "blur_sigma", s.texture.blur_sigma);
    }
    get_opt(j, "contrast", s.contrast);
    get_opt(j, "noise_sigma", s.noise_sigma);
    get_opt(j, "noise_seed", s.noise_seed);
    get_opt(j, "camera_blur", s.camera_blur);
    get_opt(j, "color_gains", s.color_gains);
    if (j.contains("geometry")) {
      const json& g = j.at("geometry");
      reject_unknown(g,
                     {"format", "baseline_m", "pixel_pitch_m", "focal_length_m", "image_size",
                      "distortion", "camera_positions"},
                     "scene geometry");
      read_geometry(g, f.geometry, false);
    }
    f.geometry.width = s.width;
    f.geometry.height = s.height;
    s.validate();
    f.geometry.validate();
    return f;
  } catch (const FormatError& e) {
    throw std::invalid_argument(std::string("scene spec: ") + e.what());
  }
}

void save_frames(const std::filesystem::path& dir, const QuadFrameSet& frames) {
  std::filesystem::create_directories(dir);
  for (int cam = 0; cam < kCameras; ++cam) write_pgm16(dir / kFrameNames[cam], frames.images[cam]);
  Calibration cal;
  cal.geometry = frames.geometry;
  cal.kernels = frames.kernels;
  save_calibration(dir / "calibration.json", cal);
}

QuadFrameSet load_frames(const std::filesystem::path& dir, const RunConfig& config) {
  if (!std::filesystem::is_directory(dir)) fail("frame directory not found: " + dir.string());
  QuadFrameSet f;
  for (int cam = 0; cam < kCameras; ++cam) f.images[cam] = read_pgm16(dir / kFrameNames[cam]);
  const std::filesystem::path geom = config.geometry.is_absolute() ? config.geometry : dir / config.geometry;
  const Calibration cal = load_calibration(geom);
  f.geometry = cal.geometry;
  f.kernels = cal.kernels;
  if (!config.kernels.empty()) {
    const std::filesystem::path kp = config.kernels.is_absolute() ? config.kernels : dir / config.kernels;
    f.kernels = parse_kernel_grids(read_file(kp));
  }
  try {
    f.validate();
  } catch (const std::invalid_argument& e) {
    fail(std::string("frames: ") + e.what());
  }
  return f;
}

std::string format_double(double v) {
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  if (ec != std::errc{}) throw std::runtime_error("format_double failed");
  return std::string(buf, ptr);
}

void write_disparity_csv(std::ostream& out, const DisparityMap& map) {
  out << "tile_row,tile_col,disparity,strength,iterations,converged\n";
  for (int row = 0; row < map.shape.rows; ++row) {
    for (int col = 0; col < map.shape.cols; ++col) {
      const DisparityEstimate& e = map.tiles[static_cast<std::size_t>(row * map.shape.cols + col)];
      // Invalid tiles stay in the table with strength 0.
      out << row << ',' << col << ',' << format_double(e.disparity) << ','
          << format_double(e.valid ? e.strength : 0.0) << ',' << e.iterations << ','
          << (e.converged ? 1 : 0) << '\n';
    }
  }
}

void write_ground_truth_csv(std::ostream& out, const synth::GroundTruth& gt) {
  out << "tile_row,tile_col,disparity,valid,mixed,secondary\n";
  for (int row = 0; row < gt.shape.rows; ++row) {
    for (int col = 0; col < gt.shape.cols; ++col) {
      const auto i = static_cast<std::size_t>(row * gt.shape.cols + col);
      out << row << ',' << col << ',' << format_double(gt.disparity[i]) << ',' << int(gt.valid[i])
          << ',' << int(gt.mixed[i]) << ',';
      if (!std::isnan(gt.secondary[i])) out << format_double(gt.secondary[i]);
      out << '\n';
    }
  }
}

void write_bias_csv(std::ostream& out, const std::vector<BiasPoint>& curve) {
  out << "true_disparity,refined_bias,single_bias,refined_rms,single_rms,tiles\n";
  for (const BiasPoint& b : curve) {
    out << format_double(b.true_disparity) << ',' << format_double(b.refined_bias) << ','
        << format_double(b.single_bias) << ',' << format_double(b.refined_rms) << ','
        << format_double(b.single_rms) << ',' << b.tiles << '\n';
  }
}

}  // namespace fdtp::io
