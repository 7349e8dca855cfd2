#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <limits>
#include <random>

#include "fdtp/geometry.hpp"

using namespace fdtp;

namespace {

CameraGeometry distorted() {
  CameraGeometry g;
  g.distortion = {1e-9, 0.0, 0.0};
  return g;
}

double pair_distance(const std::array<Vec2, 4>& o, int a, int b) {
  return std::hypot(o[a].x - o[b].x, o[a].y - o[b].y);
}

}  // namespace

TEST_CASE("CameraGeometry") {
  CameraGeometry g;
  CHECK_NOTHROW(g.validate());
  CHECK(g.principal_point() == Vec2{1295.5, 967.5});
  CHECK_FALSE(g.has_distortion());
  CHECK(distorted().has_distortion());

  SUBCASE("validation") {
    CameraGeometry bad = g;
    bad.baseline_m = 0.0;
    CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
    bad = g;
    bad.width = 0;
    CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
    bad = g;
    bad.positions[0] = {-0.4, -0.5};
    CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
  }

  SUBCASE("range from disparity") {
    // A 4.26 mm lens puts 5 px of disparity at about 100 m.
    g.focal_length_m = 100.0 * 5.0 * 2.2e-6 / 0.258;
    CHECK(g.range_for_disparity(5.0) == doctest::Approx(100.0).epsilon(1e-12));
    CHECK(g.range_for_disparity(2.5) == doctest::Approx(200.0).epsilon(1e-12));
    CHECK_THROWS_AS(g.range_for_disparity(0.0), std::invalid_argument);
    CHECK_THROWS_AS(CameraGeometry{}.range_for_disparity(5.0), std::logic_error);
  }
}

TEST_CASE("disparity_to_offsets") {
  const CameraGeometry g;
  const Vec2 center{640.0, 480.0};

  SUBCASE("zero disparity") {
    for (Vec2 o : disparity_to_offsets(g, center, 0.0)) CHECK(o == Vec2{0.0, 0.0});
  }
  SUBCASE("five pixels") {
    const auto o = disparity_to_offsets(g, center, 5.0);
    CHECK(o[0] == Vec2{2.5, 2.5});
    CHECK(o[1] == Vec2{-2.5, 2.5});
    CHECK(o[2] == Vec2{2.5, -2.5});
    CHECK(o[3] == Vec2{-2.5, -2.5});
  }
  SUBCASE("one pixel gives a unit shift between the top pair") {
    const auto o = disparity_to_offsets(g, center, 1.0);
    CHECK(o[0].x - o[1].x == 1.0);
    CHECK(o[0].y - o[1].y == 0.0);
  }
  SUBCASE("pair distances and centroid") {
    std::mt19937_64 rng(31);
    std::uniform_real_distribution<double> ud(0.0, 20.0);
    for (int i = 0; i < 100; ++i) {
      const double d = ud(rng);
      const auto o = disparity_to_offsets(g, center, d);
      CHECK(std::abs(pair_distance(o, 0, 1) - d) <= 1e-12);
      CHECK(std::abs(pair_distance(o, 2, 3) - d) <= 1e-12);
      CHECK(std::abs(pair_distance(o, 0, 2) - d) <= 1e-12);
      CHECK(std::abs(pair_distance(o, 0, 3) - d * std::sqrt(2.0)) <= 1e-12);
      CHECK(std::abs(pair_distance(o, 1, 2) - d * std::sqrt(2.0)) <= 1e-12);
      const Vec2 s = o[0] + o[1] + o[2] + o[3];
      CHECK(std::abs(s.x) <= 1e-12);
      CHECK(std::abs(s.y) <= 1e-12);
    }
  }
  SUBCASE("distortion bends the offsets") {
    const CameraGeometry dg = distorted();
    const Vec2 far = dg.principal_point() + Vec2{900.0, 600.0};
    const auto o = disparity_to_offsets(dg, far, 4.0);
    const auto flat = disparity_to_offsets(g, far, 4.0);
    CHECK(std::abs(o[0].x - flat[0].x) > 1e-3);
    // the square stays centered to second order in the disparity
    const Vec2 s = o[0] + o[1] + o[2] + o[3];
    CHECK(std::abs(s.x) <= 1e-3);
    CHECK(std::abs(s.y) <= 1e-3);
    // at the principal point distortion has no first-order effect
    const auto c = disparity_to_offsets(dg, dg.principal_point(), 4.0);
    CHECK(std::abs(c[3].x + 2.0) <= 1e-6);
  }
  SUBCASE("rejections") {
    CHECK_THROWS_AS(disparity_to_offsets(g, center, -0.1), std::invalid_argument);
    CHECK_THROWS_AS(disparity_to_offsets(g, center, std::nan("")), std::invalid_argument);
    CHECK_THROWS_AS(disparity_to_offsets(g, center, std::numeric_limits<double>::infinity()),
                    std::invalid_argument);
  }
}

TEST_CASE("split_offset") {
  double f = 0.0;
  CHECK(split_offset_1d(2.5, f) == 3);
  CHECK(f == -0.5);
  CHECK(split_offset_1d(-0.4, f) == 0);
  CHECK(f == -0.4);
  CHECK(split_offset_1d(7.49, f) == 7);
  CHECK(f == doctest::Approx(0.49).epsilon(1e-12));
  CHECK(split_offset_1d(-2.5, f) == -3);
  CHECK(f == 0.5);

  const SplitOffset s = split_offset({2.5, -7.2});
  CHECK(s.integer.x == 3);
  CHECK(s.integer.y == -7);

  SUBCASE("exact reconstruction") {
    std::mt19937_64 rng(32);
    std::uniform_real_distribution<double> ud(-40.0, 40.0);
    for (int i = 0; i < 10000; ++i) {
      const Vec2 o{ud(rng), ud(rng)};
      const SplitOffset sp = split_offset(o);
      CHECK(sp.integer.x + sp.fraction.x == o.x);
      CHECK(sp.integer.y + sp.fraction.y == o.y);
      CHECK(std::abs(sp.fraction.x) <= 0.5);
      CHECK(std::abs(sp.fraction.y) <= 0.5);
    }
  }
}

TEST_CASE("distortion") {
  SUBCASE("no coefficients is the identity") {
    const CameraGeometry g;
    const Vec2 p{10.25, 1900.75};
    CHECK(distort(g, p) == p);
    CHECK(undistort(g, p) == p);
  }
  SUBCASE("principal point is fixed") {
    const CameraGeometry g = distorted();
    CHECK(distort(g, g.principal_point()) == g.principal_point());
    CHECK(undistort(g, g.principal_point()) == g.principal_point());
  }
  SUBCASE("radial polynomial") {
    const CameraGeometry g = distorted();
    const Vec2 p = g.principal_point() + Vec2{1000.0, 0.0};
    const Vec2 q = distort(g, p);
    CHECK(q.x - g.principal_point().x == doctest::Approx(1001.0).epsilon(1e-12));
    CHECK(q.y == p.y);
    const Vec2 back = undistort(g, q);
    CHECK(std::abs(back.x - p.x) <= 1e-8);
    CHECK(std::abs(back.y - p.y) <= 1e-8);
  }
  SUBCASE("round trip over the frame") {
    CameraGeometry g;
    g.distortion = {2e-8, -3e-15, 1e-21};
    std::mt19937_64 rng(33);
    std::uniform_real_distribution<double> ux(0.0, g.width - 1.0);
    std::uniform_real_distribution<double> uy(0.0, g.height - 1.0);
    double worst = 0.0;
    for (int i = 0; i < 2000; ++i) {
      const Vec2 p{ux(rng), uy(rng)};
      const Vec2 b = distort(g, undistort(g, p));
      worst = std::max({worst, std::abs(b.x - p.x), std::abs(b.y - p.y)});
    }
    CHECK(worst <= 1e-8);
  }
  SUBCASE("non-invertible coefficients") {
    CameraGeometry g;
    g.distortion = {-5e-6, 0.0, 0.0};
    CHECK_THROWS_AS(undistort(g, g.principal_point() + Vec2{1200.0, 900.0}), std::runtime_error);
  }
}

TEST_CASE("kernel grid") {
  SUBCASE("identity grid covers the frame") {
    const KernelGrid grid = KernelGrid::identity(200, 130, 64.0);
    CHECK(grid.covers(200, 130));
    CHECK_FALSE(grid.covers(300, 130));
    const CalibKernel k = lookup_kernel(grid, {100.5, 77.25}, Color::Green);
    const CalibKernel id = CalibKernel::identity();
    CHECK(k[Color::Green][Quadrant::CC] == id[Color::Green][Quadrant::CC]);
    CHECK(k.center_offset == Vec2{0.0, 0.0});
  }

  SUBCASE("offsets interpolate bilinearly, multipliers come from the nearest node") {
    KernelGrid grid = KernelGrid::identity(129, 129, 64.0);
    REQUIRE(grid.rows() == 3);
    REQUIRE(grid.cols() == 3);
    grid.node(Color::Red, 0, 1).center_offset = {1.0, 0.0};
    grid.node(Color::Red, 0, 1)[Color::Red][Quadrant::CC][0] = 7.0;
    grid.node(Color::Red, 1, 1).center_offset = {0.0, 2.0};

    const CalibKernel on_node = lookup_kernel(grid, {64.0, 0.0}, Color::Red);
    CHECK(on_node.center_offset == Vec2{1.0, 0.0});
    CHECK(on_node[Color::Red][Quadrant::CC][0] == 7.0);

    const CalibKernel mid = lookup_kernel(grid, {32.0, 0.0}, Color::Red);
    CHECK(mid.center_offset == Vec2{0.5, 0.0});
    // exact tie between columns 0 and 1 resolves to the lower index
    CHECK(mid[Color::Red][Quadrant::CC][0] == 1.0);
    CHECK(lookup_kernel(grid, {32.5, 0.0}, Color::Red)[Color::Red][Quadrant::CC][0] == 7.0);

    const CalibKernel quad = lookup_kernel(grid, {48.0, 16.0}, Color::Red);
    CHECK(quad.center_offset.x == doctest::Approx(0.75 * 0.75).epsilon(1e-15));
    CHECK(quad.center_offset.y == doctest::Approx(0.75 * 0.25 * 2.0).epsilon(1e-15));

    // other colors are untouched
    CHECK(lookup_kernel(grid, {64.0, 0.0}, Color::Blue).center_offset == Vec2{0.0, 0.0});
  }

  SUBCASE("rejections") {
    const KernelGrid grid = KernelGrid::identity(100, 100, 64.0);
    CHECK_THROWS_AS(lookup_kernel(grid, {-1.0, 5.0}, Color::Red), std::out_of_range);
    CHECK_THROWS_AS(lookup_kernel(grid, {5.0, 500.0}, Color::Red), std::out_of_range);
    CHECK_THROWS_AS(KernelGrid(0.0, 1, 1, {}), std::invalid_argument);
    std::array<std::vector<CalibKernel>, 3> nodes;
    nodes[0].resize(4);
    nodes[1].resize(4);
    nodes[2].resize(3);
    CHECK_THROWS_AS(KernelGrid(64.0, 2, 2, nodes), std::invalid_argument);
  }
}
