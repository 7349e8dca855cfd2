#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <cstdlib>
#include <fstream>
#include <random>
#include <sstream>

#include "fdtp/io.hpp"

using namespace fdtp;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("fdtp_test_io_" + name);
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

// String literal with embedded NULs, minus the terminator.
template <std::size_t N>
std::string bytes(const char (&s)[N]) {
  return std::string(s, N - 1);
}

std::string calibration_text(const std::string& extra = "") {
  return R"({"format": "fdtp-calibration/1", "image_size": [64, 48])" + extra + "}";
}

}  // namespace

TEST_CASE("pgm") {
  SUBCASE("round trip within half a code") {
    Image img(24, 16);
    std::mt19937_64 rng(61);
    std::uniform_real_distribution<double> ud(0.0, 1.0);
    for (double& v : img.data()) v = ud(rng);
    std::stringstream ss;
    io::write_pgm16(ss, img);
    const Image back = io::read_pgm16(ss);
    REQUIRE(back.width() == 24);
    REQUIRE(back.height() == 16);
    for (std::size_t i = 0; i < img.data().size(); ++i) {
      CHECK(std::abs(back.data()[i] - img.data()[i]) <= 0.5 / 65535 + 1e-15);
    }
    // a second trip is exact
    std::stringstream again;
    io::write_pgm16(again, back);
    CHECK(io::read_pgm16(again) == back);
  }
  SUBCASE("layout is big-endian with a plain header") {
    Image img(2, 1);
    img(0, 0) = 1.0;
    img(0, 1) = 2.0 / 65535;
    std::stringstream ss;
    io::write_pgm16(ss, img);
    CHECK(ss.str() == bytes("P5\n2 1\n65535\n\xff\xff\x00\x02"));
  }
  SUBCASE("out of range values clamp") {
    Image img(2, 1);
    img(0, 0) = -0.2;
    img(0, 1) = 1.7;
    std::stringstream ss;
    io::write_pgm16(ss, img);
    const Image back = io::read_pgm16(ss);
    CHECK(back(0, 0) == 0.0);
    CHECK(back(0, 1) == 1.0);
  }
  SUBCASE("8-bit files and comments") {
    std::stringstream ss(bytes("P5\n# made by hand\n3 1\n255\n\x00\x80\xff"));
    const Image img = io::read_pgm16(ss);
    CHECK(img(0, 0) == 0.0);
    CHECK(img(0, 1) == doctest::Approx(128.0 / 255));
    CHECK(img(0, 2) == 1.0);
  }
  SUBCASE("malformed") {
    std::stringstream p2("P2\n1 1\n255\n0\n");
    CHECK_THROWS_AS(io::read_pgm16(p2), io::FormatError);
    std::stringstream truncated(bytes("P5\n2 2\n65535\n\x00\x01\x02"));
    CHECK_THROWS_AS(io::read_pgm16(truncated), io::FormatError);
    std::stringstream bad_size("P5\n-2 2\n255\n");
    CHECK_THROWS_AS(io::read_pgm16(bad_size), io::FormatError);
    std::stringstream above(bytes("P5\n1 1\n100\n\xc8"));
    CHECK_THROWS_AS(io::read_pgm16(above), io::FormatError);
    CHECK_THROWS_AS(io::read_pgm16(fs::path("/nonexistent/cam0.pgm")), io::FormatError);
  }
}

TEST_CASE("calibration") {
  SUBCASE("defaults from a minimal file") {
    const io::Calibration c = io::parse_calibration(calibration_text());
    CHECK(c.geometry.width == 64);
    CHECK(c.geometry.height == 48);
    CHECK(c.geometry.baseline_m == CameraGeometry{}.baseline_m);
    for (const KernelGrid& k : c.kernels) CHECK(k.empty());
  }
  SUBCASE("round trip with kernels") {
    io::Calibration c;
    c.geometry.width = 64;
    c.geometry.height = 48;
    c.geometry.focal_length_m = 0.005;
    c.geometry.distortion = {1e-8, -2e-15, 0.0};
    c.geometry.positions = {Vec2{-0.4, -0.6}, Vec2{0.6, -0.4}, Vec2{-0.6, 0.4}, Vec2{0.4, 0.6}};
    for (int cam = 0; cam < kCameras; ++cam) {
      c.kernels[cam] = KernelGrid::identity(64, 48, 32.0);
      c.kernels[cam].node(Color::Green, 1, 1).center_offset = {0.1 * cam, -0.3};
      c.kernels[cam].node(Color::Red, 0, 1) = CalibKernel::uniform(gaussian_multiplier(0.7), {0.25, 0.0});
    }
    const std::string text = io::calibration_to_json(c);
    CHECK(text.find("\"format\": \"fdtp-calibration/1\"") < 10);
    const io::Calibration back = io::parse_calibration(text);
    CHECK(back.geometry.focal_length_m == 0.005);
    CHECK(back.geometry.distortion == c.geometry.distortion);
    for (int i = 0; i < 4; ++i) CHECK(back.geometry.positions[i] == c.geometry.positions[i]);
    for (int cam = 0; cam < kCameras; ++cam) {
      REQUIRE(back.kernels[cam].rows() == c.kernels[cam].rows());
      CHECK(back.kernels[cam].node(Color::Green, 1, 1).center_offset.x == 0.1 * cam);
      const CalibKernel& k = back.kernels[cam].node(Color::Red, 0, 1);
      CHECK(k.center_offset == Vec2{0.25, 0.0});
      CHECK(k[Color::Red].quadrants == gaussian_multiplier(0.7).quadrants);
    }
    CHECK(io::calibration_to_json(back) == text);
  }
  SUBCASE("rejections") {
    CHECK_THROWS_AS(io::parse_calibration("{"), io::FormatError);
    CHECK_THROWS_AS(io::parse_calibration(R"({"image_size": [64, 48]})"), io::FormatError);
    CHECK_THROWS_AS(io::parse_calibration(R"({"format": "fdtp-calibration/2", "image_size": [64, 48]})"),
                    io::FormatError);
    CHECK_THROWS_AS(io::parse_calibration(R"({"format": "fdtp-calibration/1"})"), io::FormatError);
    CHECK_THROWS_AS(io::parse_calibration(calibration_text(R"(, "baseline": 1)")), io::FormatError);
    CHECK_THROWS_AS(io::parse_calibration(calibration_text(R"(, "baseline_m": -1)")), io::FormatError);
    CHECK_THROWS_AS(io::parse_calibration(calibration_text(R"(, "distortion": [1, 2])")), io::FormatError);
    CHECK_THROWS_AS(io::parse_calibration(calibration_text(R"(, "baseline_m": "wide")")), io::FormatError);
    CHECK_THROWS_AS(io::parse_calibration(calibration_text(R"(, "kernel_grids": [])")), io::FormatError);
  }
}

TEST_CASE("run config") {
  SUBCASE("empty object keeps defaults") {
    const io::RunConfig c = io::parse_run_config("{}");
    CHECK(c.workers == 1);
    CHECK(c.epsilon == 1e-6);
    CHECK(c.disparity_csv == "disparity.csv");
    const EstimateParams p = c.estimate_params();
    CHECK(p.refine.step_threshold == 0.001);
    CHECK(p.refine.correlation.lpf_sigma == 2.0);
  }
  SUBCASE("fields map onto the estimator") {
    const io::RunConfig c = io::parse_run_config(R"({
      "color_weights": {"red": 0.2, "blue": 0.2, "green": 0.6},
      "epsilon": 1e-5, "refinement": {"threshold": 0.002, "max_iters": 7, "coarse": false},
      "workers": 4, "outputs": {"texture": "tex", "features": "f.bin"}})");
    const EstimateParams p = c.estimate_params();
    CHECK(p.refine.correlation.weights.green == 0.6);
    CHECK(p.refine.correlation.epsilon == 1e-5);
    CHECK(p.refine.max_iters == 7);
    CHECK(p.refine.step_threshold == 0.002);
    CHECK_FALSE(p.coarse);
    CHECK(p.workers == 4);
    CHECK(c.texture == "tex");
    CHECK(c.features == "f.bin");
  }
  SUBCASE("rejections") {
    CHECK_THROWS_AS(io::parse_run_config("[1]"), io::FormatError);
    CHECK_THROWS_AS(io::parse_run_config(R"({"threads": 2})"), io::FormatError);
    CHECK_THROWS_AS(io::parse_run_config(R"({"workers": "two"})"), io::FormatError);
    CHECK_THROWS_AS(io::parse_run_config(R"({"workers": 0})"), std::invalid_argument);
    CHECK_THROWS_AS(io::parse_run_config(R"({"color_weights": {"red": 0.5}})"), std::invalid_argument);
    CHECK_THROWS_AS(io::parse_run_config(R"({"refinement": {"threshold": 0}})"), std::invalid_argument);
  }
}

TEST_CASE("scene spec") {
  SUBCASE("plane") {
    const io::SceneFile f = io::parse_scene(
        R"({"kind": "fronto_plane", "width": 32, "height": 24, "disparity": 1.5,
            "texture": {"seed": 9, "cutoff": 0.4}, "noise_sigma": 0.01})");
    CHECK(f.spec.kind == synth::SceneKind::FrontoPlane);
    CHECK(f.spec.width == 32);
    CHECK(f.spec.disparity == 1.5);
    CHECK(f.spec.texture.seed == 9);
    CHECK(f.spec.texture.cutoff == 0.4);
    CHECK(f.geometry.width == 32);
    CHECK(f.geometry.height == 24);
  }
  SUBCASE("bar target texture follows orientation") {
    const io::SceneFile h = io::parse_scene(R"({"kind": "bar_target", "orientation": "horizontal"})");
    CHECK(h.spec.texture.kind == synth::TextureKind::HorizontalBars);
    const io::SceneFile v = io::parse_scene(R"({"kind": "bar_target"})");
    CHECK(v.spec.texture.kind == synth::TextureKind::VerticalBars);
  }
  SUBCASE("edge and geometry") {
    const io::SceneFile f = io::parse_scene(
        R"({"kind": "two_depth_edge", "d_fg": 3, "d_bg": 1,
            "geometry": {"distortion": [1e-9, 0, 0], "focal_length_m": 0.004}})");
    CHECK(f.spec.d_fg == 3.0);
    CHECK(f.geometry.distortion[0] == 1e-9);
    CHECK(f.geometry.focal_length_m == 0.004);
  }
  SUBCASE("everything wrong is invalid_argument") {
    CHECK_THROWS_AS(io::parse_scene("{\"kind\": "), std::invalid_argument);
    CHECK_THROWS_AS(io::parse_scene("{}"), std::invalid_argument);
    CHECK_THROWS_AS(io::parse_scene(R"({"kind": "sphere"})"), std::invalid_argument);
    CHECK_THROWS_AS(io::parse_scene(R"({"kind": "fronto_plane", "width": 30})"), std::invalid_argument);
    CHECK_THROWS_AS(io::parse_scene(R"({"kind": "fronto_plane", "disparity": -1})"), std::invalid_argument);
    CHECK_THROWS_AS(io::parse_scene(R"({"kind": "fronto_plane", "texture": {"cutoff": 0}})"),
                    std::invalid_argument);
    CHECK_THROWS_AS(io::parse_scene(R"({"kind": "fronto_plane", "colour": 1})"), std::invalid_argument);
    CHECK_THROWS_AS(io::parse_scene(R"({"kind": "fronto_plane", "camera_blur": [1, 2]})"),
                    std::invalid_argument);
  }
}

TEST_CASE("frame directories") {
  synth::SceneSpec spec;
  spec.width = 32;
  spec.height = 24;
  spec.disparity = 1.0;
  QuadFrameSet frames = synth::render(spec).frames;
  const fs::path dir = scratch("frames");
  io::save_frames(dir, frames);
  for (const char* name : io::kFrameNames) CHECK(fs::exists(dir / name));

  SUBCASE("load matches within quantization") {
    const QuadFrameSet back = io::load_frames(dir);
    for (int cam = 0; cam < kCameras; ++cam) {
      for (std::size_t i = 0; i < frames.images[cam].data().size(); ++i) {
        CHECK(std::abs(back.images[cam].data()[i] - frames.images[cam].data()[i]) <= 0.5 / 65535 + 1e-15);
      }
    }
    CHECK(back.geometry.width == 32);
  }
  SUBCASE("separate kernel file") {
    std::array<KernelGrid, kCameras> k;
    for (KernelGrid& g : k) g = KernelGrid::identity(32, 24, 16.0);
    io::Calibration only_kernels;
    only_kernels.geometry = frames.geometry;
    only_kernels.kernels = k;
    {
      std::ofstream out(dir / "kernels.json");
      out << io::calibration_to_json(only_kernels);
    }
    io::RunConfig cfg;
    cfg.kernels = "kernels.json";
    const QuadFrameSet back = io::load_frames(dir, cfg);
    CHECK(back.kernels[2].rows() == 3);
  }
  SUBCASE("missing pieces") {
    io::RunConfig cfg;
    cfg.geometry = "other.json";
    CHECK_THROWS_AS(io::load_frames(dir, cfg), io::FormatError);
    CHECK_THROWS_AS(io::load_frames(dir / "nope"), io::FormatError);
    fs::remove(dir / "cam3.pgm");
    CHECK_THROWS_AS(io::load_frames(dir), io::FormatError);
  }
  SUBCASE("size mismatch") {
    io::write_pgm16(dir / "cam1.pgm", Image(40, 24));
    CHECK_THROWS_AS(io::load_frames(dir), io::FormatError);
  }
  fs::remove_all(dir);
}

TEST_CASE("csv output") {
  SUBCASE("disparity table") {
    DisparityMap m;
    m.shape = {1, 2};
    m.tiles.resize(2);
    m.tiles[0].disparity = 1.25;
    m.tiles[0].strength = 0.9;
    m.tiles[0].iterations = 3;
    m.tiles[0].converged = true;
    m.tiles[0].valid = true;
    m.tiles[1].disparity = 0.5;
    m.tiles[1].strength = 0.4;  // invalid tiles report strength 0
    m.tiles[1].iterations = 1;
    std::ostringstream out;
    io::write_disparity_csv(out, m);
    CHECK(out.str() ==
          "tile_row,tile_col,disparity,strength,iterations,converged\n"
          "0,0,1.25,0.9,3,1\n"
          "0,1,0.5,0,1,0\n");
  }
  SUBCASE("ground truth rows") {
    synth::SceneSpec s;
    s.kind = synth::SceneKind::TwoDepthEdge;
    s.width = 64;
    s.height = 16;
    s.d_fg = 3;
    s.d_bg = 1;
    s.edge_position = 34;
    std::ostringstream out;
    io::write_ground_truth_csv(out, synth::render(s).truth);
    std::istringstream in(out.str());
    std::string line;
    int n = 0;
    std::getline(in, line);
    CHECK(line == "tile_row,tile_col,disparity,valid,mixed,secondary");
    while (std::getline(in, line)) ++n;
    CHECK(n == 2 * 8);
    CHECK(out.str().find("0,4,1,1,1,3\n") != std::string::npos);
    CHECK(out.str().find("0,0,3,1,0,\n") != std::string::npos);
  }
  SUBCASE("doubles round trip") {
    std::mt19937_64 rng(62);
    std::uniform_real_distribution<double> ud(-10.0, 10.0);
    for (int i = 0; i < 200; ++i) {
      const double v = ud(rng);
      CHECK(std::strtod(io::format_double(v).c_str(), nullptr) == v);
    }
    CHECK(io::format_double(2.0) == "2");
  }
}
