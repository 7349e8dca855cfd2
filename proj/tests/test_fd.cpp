#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "fdtp/fd.hpp"
#include "fdtp/synth.hpp"
#include "support/oracles.hpp"
#include "support/peak.hpp"

using namespace fdtp;

namespace {

const Window1D kW0 = Window1D::canonical();

BayerFdTile mono(const FdTile& fd) {
  BayerFdTile b;
  b.colors.fill(fd);
  return b;
}

BayerFdTile rotate_all(const BayerFdTile& b, double dx, double dy) {
  BayerFdTile out;
  for (Color c : kColors) out[c] = phase_rotate(b[c], dx, dy);
  return out;
}

using oracle::peak_of;

synth::Texture texture(std::uint64_t seed) {
  synth::TextureSpec spec;
  spec.seed = seed;
  return synth::Texture(spec);
}

Tile16 gray_tile(const synth::Texture& t, Vec2 origin) {
  Tile16 tile = synth::sample_tile(t, origin);
  for (double& v : tile.px) v = 0.5 + 0.15 * v;
  return tile;
}

// Overlap-adds per-tile results over a size x size grid; fn(origin) gives
// the FdTile of the tile whose window starts at origin.
template <class Fn>
Image overlap_add(int size, Fn&& fn) {
  Image canvas(size, size);
  for (int r0 = 0; r0 + kTileSize <= size; r0 += kTileStride) {
    for (int c0 = 0; c0 + kTileSize <= size; c0 += kTileStride) {
      imclt_accumulate(fn(Vec2{static_cast<double>(c0), static_cast<double>(r0)}), kW0, kW0,
                       canvas, r0, c0);
    }
  }
  return canvas;
}

}  // namespace

TEST_CASE("complex view") {
  std::mt19937_64 rng(21);

  SUBCASE("zero tile gives zero spectrum") {
    const ComplexSpectrum8 s = to_complex(FdTile{});
    for (int i = 0; i < 64; ++i) {
      CHECK(s.plus[i] == Complex(0.0, 0.0));
      CHECK(s.minus[i] == Complex(0.0, 0.0));
    }
  }

  SUBCASE("round trip") {
    // (a-b)+(a+b) can lose the last bit, so this is ulp-level, not bitwise.
    for (int i = 0; i < 50; ++i) {
      const FdTile fd = mclt_forward(oracle::random_tile(rng), kW0, kW0);
      const FdTile back = from_complex(to_complex(fd));
      CHECK(oracle::max_abs_diff(fd, back) <= 1e-15 * 8.0);
      CHECK(back.shift_h == fd.shift_h);
    }
  }

  SUBCASE("centered cosine is real once the basis phase origin is removed") {
    const double f = 0.1;
    Tile16 t;
    for (int r = 0; r < 16; ++r) {
      for (int c = 0; c < 16; ++c) {
        t(r, c) = std::cos(2 * std::numbers::pi * f * (r - 7.5)) *
                  std::cos(2 * std::numbers::pi * f * (c - 7.5));
      }
    }
    const FdTile ref = oracle::mclt(t, kW0, kW0);
    // The raw quadrants are all populated (equal magnitudes).
    double sc = 0.0;
    for (double v : ref[Quadrant::SC]) sc = std::max(sc, std::abs(v));
    CHECK(sc > 1.0);
    const ComplexSpectrum8 s = to_complex(ref);
    double worst = 0.0;
    for (int k1 = 0; k1 < 8; ++k1) {
      for (int k2 = 0; k2 < 8; ++k2) {
        const double wy = bin_frequency(k1);
        const double wx = bin_frequency(k2);
        const Complex p = s.plus[k1 * 8 + k2] * std::polar(1.0, 12.0 * (wy + wx));
        const Complex m = s.minus[k1 * 8 + k2] * std::polar(1.0, -12.0 * (wy - wx));
        worst = std::max({worst, std::abs(p.imag()), std::abs(m.imag())});
      }
    }
    CHECK(worst <= 1e-12);
  }
}

TEST_CASE("phase_rotate") {
  std::mt19937_64 rng(22);
  const FdTile fd = mclt_forward(oracle::random_tile(rng), kW0, kW0);

  SUBCASE("zero rotation is the identity") {
    const FdTile r = phase_rotate(fd, 0.0, 0.0);
    CHECK(oracle::max_abs_diff(r, fd) == 0.0);
  }
  SUBCASE("inverse pair") {
    CHECK(oracle::max_abs_diff(phase_rotate(phase_rotate(fd, 0.37, -0.21), -0.37, 0.21), fd) <=
          1e-12);
  }
  SUBCASE("composition adds shifts") {
    const FdTile a = phase_rotate(phase_rotate(fd, 0.2, -0.1), 0.15, -0.3);
    const FdTile b = phase_rotate(fd, 0.35, -0.4);
    CHECK(oracle::max_abs_diff(a, b) <= 1e-12);
  }
  SUBCASE("rotation preserves energy") {
    CHECK(std::abs(phase_rotate(fd, 0.5, -0.5).energy() - fd.energy()) <= 1e-9);
  }
  SUBCASE("shifts above half a pixel are rejected") {
    CHECK_THROWS_AS(phase_rotate(fd, 0.6, 0.0), std::invalid_argument);
    CHECK_THROWS_AS(phase_rotate(fd, 0.0, -0.51), std::invalid_argument);
  }
  SUBCASE("matches ideal resampling of a band-limited image") {
    // Analysis window follows the content (shift +d), rotation moves the
    // content by +d, synthesis uses the canonical window.
    const synth::Texture tex = texture(3);
    // Single-axis quarter pixel holds 1e-3. The error grows with the shift
    // and adds across axes (measured 1.3e-3 at (.25,.25), 3.2e-3 at (.5,.5)).
    struct Case {
      Vec2 d;
      double bound;
    };
    const Case cases[] = {{{0.25, 0.0}, 1e-3}, {{0.0, -0.25}, 1e-3}, {{0.25, 0.25}, 2e-3},
                          {{-0.5, 0.1}, 3e-3}, {{0.5, 0.5}, 4.5e-3}};
    for (const Case& cs : cases) {
      const Vec2 d = cs.d;
      const double bound = cs.bound;
      const Window1D wh = Window1D::make(d.x);
      const Window1D wv = Window1D::make(d.y);
      const Image out = overlap_add(64, [&](Vec2 o) {
        return phase_rotate(mclt_forward(gray_tile(tex, o), wh, wv), d.x, d.y);
      });
      double worst = 0.0;
      for (int r = 8; r < 56; ++r) {
        for (int c = 8; c < 56; ++c) {
          const double ideal = 0.5 + 0.15 * tex.shifted(d.x, d.y)(r, c);
          worst = std::max(worst, std::abs(out(r, c) - ideal));
        }
      }
      CAPTURE(d.x);
      CAPTURE(d.y);
      CHECK(worst <= bound);
    }
  }
}

TEST_CASE("kernels") {
  std::mt19937_64 rng(23);
  const BayerFdTile b = mclt_forward_bayer(oracle::random_tile(rng), BayerPhase::Gr, kW0, kW0);

  SUBCASE("identity kernel leaves tiles unchanged") {
    const BayerFdTile out = apply_kernel(b, CalibKernel::identity());
    for (Color c : kColors) CHECK(oracle::max_abs_diff(out[c], b[c]) <= 1e-12);
  }
  SUBCASE("rotation written as a kernel equals phase_rotate") {
    const CalibKernel k = CalibKernel::uniform(rotation_multiplier(0.3, -0.45));
    const BayerFdTile out = apply_kernel(b, k);
    for (Color c : kColors) CHECK(oracle::max_abs_diff(out[c], phase_rotate(b[c], 0.3, -0.45)) <= 1e-12);
  }
  SUBCASE("gaussian blur then regularized inverse restores the image") {
    const double sigma = 0.5;
    const synth::Texture sharp = texture(4);
    const synth::Texture blurred = sharp.blurred(sigma);
    const FdTile inv = gaussian_inverse_multiplier(sigma, 1e-2);
    const Image out = overlap_add(64, [&](Vec2 o) {
      return multiply(mclt_forward(gray_tile(blurred, o), kW0, kW0), inv);
    });
    double worst = 0.0;
    double blur_err = 0.0;
    for (int r = 8; r < 56; ++r) {
      for (int c = 8; c < 56; ++c) {
        const double truth = 0.5 + 0.15 * sharp(r, c);
        worst = std::max(worst, std::abs(out(r, c) - truth));
        blur_err = std::max(blur_err, std::abs(0.15 * (blurred(r, c) - sharp(r, c))));
      }
    }
    CHECK(worst <= 1e-2);
    CHECK(worst < blur_err);
  }
  SUBCASE("inverse needs positive regularization") {
    CHECK_THROWS_AS(gaussian_inverse_multiplier(0.5, 0.0), std::invalid_argument);
  }
}

TEST_CASE("phase_correlate") {
  const synth::Texture tex = texture(5);
  const Vec2 origin{20.0, 12.0};
  const BayerFdTile a = mono(mclt_forward(gray_tile(tex, origin), kW0, kW0));

  SUBCASE("autocorrelation peaks at the center with value 1") {
    const CorrTile t = phase_correlate(a, a);
    const Vec2 p = peak_of(t);
    CHECK(std::abs(p.x) <= 1e-9);
    CHECK(std::abs(p.y) <= 1e-9);
    // the epsilon floor costs weak bins a little, so the peak sits just below 1
    CHECK(t(4, 4) <= 1.0);
    CHECK(t(4, 4) >= 0.99);
  }

  SUBCASE("one pixel shift moves the argmax one cell right") {
    Tile16 shifted = synth::shift_reference(tex, origin, {1.0, 0.0});
    for (double& v : shifted.px) v = 0.5 + 0.15 * v;
    const CorrTile t = phase_correlate(a, mono(mclt_forward(shifted, kW0, kW0)));
    int br = 0;
    int bc = 0;
    oracle::argmax(t, br, bc);
    CHECK(br == 4);
    CHECK(bc == 5);
  }

  SUBCASE("half pixel pixel-domain shift") {
    Tile16 shifted = synth::shift_reference(tex, origin, {0.5, 0.0});
    for (double& v : shifted.px) v = 0.5 + 0.15 * v;
    // window following the content recovers the shift
    const Vec2 p = peak_of(phase_correlate(a, mono(mclt_forward(shifted, Window1D::make(-0.5), kW0))));
    CHECK(std::abs(p.x - 0.5) <= 0.05);
    CHECK(std::abs(p.y) <= 0.05);
    // a fixed window drags the estimate toward the integer grid
    const Vec2 q = peak_of(phase_correlate(a, mono(mclt_forward(shifted, kW0, kW0))));
    CHECK(q.x < 0.5);
    CHECK(q.x > 0.3);
  }

  SUBCASE("shift theorem over the half-pixel grid") {
    const double steps[] = {-0.5, -0.25, 0.0, 0.25, 0.5};
    double worst = 0.0;
    for (double dy : steps) {
      for (double dx : steps) {
        const Vec2 p = peak_of(phase_correlate(a, rotate_all(a, dx, dy)));
        worst = std::max({worst, std::abs(p.x - dx), std::abs(p.y - dy)});
      }
    }
    CHECK(worst <= 0.02);
  }

  SUBCASE("bounded by one") {
    std::mt19937_64 rng(24);
    for (int i = 0; i < 20; ++i) {
      const BayerFdTile x = mclt_forward_bayer(oracle::random_tile(rng), BayerPhase::R, kW0, kW0);
      const BayerFdTile y = mclt_forward_bayer(oracle::random_tile(rng), BayerPhase::R, kW0, kW0);
      CorrelationParams p;
      p.lpf_sigma = (i % 2) ? 0.0 : 2.0;
      for (double v : correlation_surface(x, y, p)) CHECK(std::abs(v) <= 1.0 + 1e-6);
    }
  }

  SUBCASE("swapping inputs reflects the surface") {
    const BayerFdTile b = rotate_all(a, 0.3, -0.2);
    const CorrTile ab = phase_correlate(a, b);
    const CorrTile ba = phase_correlate(b, a);
    double worst = 0.0;
    for (int r = 0; r < 9; ++r) {
      for (int c = 0; c < 9; ++c) worst = std::max(worst, std::abs(ab(r, c) - ba(8 - r, 8 - c)));
    }
    CHECK(worst <= 1e-9);
  }

  SUBCASE("zero tiles give a zero surface") {
    const CorrTile t = phase_correlate(BayerFdTile{}, BayerFdTile{});
    for (double v : t.surface) CHECK(v == 0.0);
  }

  SUBCASE("parameter validation") {
    CorrelationParams p;
    p.epsilon = 0.0;
    CHECK_THROWS_AS(phase_correlate(a, a, p), std::invalid_argument);
    p.epsilon = -1e-6;
    CHECK_THROWS_AS(phase_correlate(a, a, p), std::invalid_argument);
    CorrelationParams q;
    q.weights = {0.3, 0.3, 0.3};
    CHECK_THROWS_AS(phase_correlate(a, a, q), std::invalid_argument);
    q.weights = {0.25, 0.25, 0.5 + 2e-9};
    CHECK_THROWS_AS(phase_correlate(a, a, q), std::invalid_argument);
    q.weights = {0.25, 0.25, 0.5 + 5e-10};
    CHECK_NOTHROW(phase_correlate(a, a, q));
  }
}
