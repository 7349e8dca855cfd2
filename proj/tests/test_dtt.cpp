#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "fdtp/dtt.hpp"
#include "support/oracles.hpp"

using namespace fdtp::dtt;

namespace {

constexpr Kind kAllKinds[] = {Kind::Dct2, Kind::Dct3, Kind::Dct4,
                              Kind::Dst2, Kind::Dst3, Kind::Dst4};

double max_diff(const Vec8& a, const Vec8& b) {
  double m = 0.0;
  for (int i = 0; i < 8; ++i) m = std::max(m, std::abs(a[i] - b[i]));
  return m;
}

double norm(const Vec8& a) {
  double s = 0.0;
  for (double v : a) s += v * v;
  return std::sqrt(s);
}

Block8x8 random_block(std::mt19937_64& rng) {
  std::normal_distribution<double> nd(0.0, 1.0);
  Block8x8 b{};
  for (double& v : b) v = nd(rng);
  return b;
}

}  // namespace

TEST_CASE("zero input maps to zero for every kind") {
  for (Kind k : kAllKinds) {
    const Vec8 y = fdtp::dtt::apply(k, Vec8{});
    for (double v : y) CHECK(v == 0.0);
  }
}

TEST_CASE("dct4 of an impulse matches the definition sum") {
  // Frozen from the definition sum sqrt(2/8) cos(pi (k + 1/2) / 16).
  const Vec8 expected{0.49759236333609846, 0.4784701678661044,  0.4409606321741775,
                      0.3865052266813685,  0.31719664208182274, 0.2356983684129989,
                      0.14514233862723117, 0.049008570164780385};
  Vec8 e0{};
  e0[0] = 1.0;
  CHECK(max_diff(dct4(e0), expected) <= 1e-15);
  CHECK(max_diff(oracle::dtt(Kind::Dct4, e0), expected) <= 1e-15);
}

TEST_CASE("dst4 of an impulse matches the definition sum") {
  const Vec8 expected{0.0490085701647803,  0.14514233862723117, 0.23569836841299882,
                      0.31719664208182274, 0.3865052266813685,  0.44096063217417747,
                      0.47847016786610447, 0.4975923633360984};
  Vec8 e0{};
  e0[0] = 1.0;
  CHECK(max_diff(dst4(e0), expected) <= 1e-15);
  CHECK(max_diff(oracle::dtt(Kind::Dst4, e0), expected) <= 1e-15);
}

TEST_CASE("type IV transforms are involutions") {
  std::mt19937_64 rng(1);
  for (int i = 0; i < 200; ++i) {
    const Vec8 x = oracle::random_vec(rng);
    CHECK(max_diff(dct4(dct4(x)), x) <= 1e-12);
    CHECK(max_diff(dst4(dst4(x)), x) <= 1e-12);
  }
}

TEST_CASE("type II and III are inverse pairs") {
  std::mt19937_64 rng(2);
  for (int i = 0; i < 200; ++i) {
    const Vec8 x = oracle::random_vec(rng);
    CHECK(max_diff(dct3(dct2(x)), x) <= 1e-12);
    CHECK(max_diff(dct2(dct3(x)), x) <= 1e-12);
    CHECK(max_diff(dst3(dst2(x)), x) <= 1e-12);
    CHECK(max_diff(dst2(dst3(x)), x) <= 1e-12);
  }
}

TEST_CASE("constant vector concentrates in the DCT-II DC term") {
  const double c = 0.75;
  Vec8 x{};
  x.fill(c);
  const Vec8 y = dct2(x);
  // orthonormal: X_0 = sqrt(2/8) * (1/sqrt2) * 8c = c * sqrt(8)
  CHECK(y[0] == doctest::Approx(c * std::sqrt(8.0)).epsilon(1e-14));
  for (int k = 1; k < 8; ++k) CHECK(std::abs(y[k]) <= 1e-14);
}

TEST_CASE("fast paths equal the definition sum") {
  std::mt19937_64 rng(3);
  for (Kind k : kAllKinds) {
    CAPTURE(name(k));
    double worst = 0.0;
    for (int i = 0; i < 1000; ++i) {
      const Vec8 x = oracle::random_vec(rng);
      worst = std::max(worst, max_diff(fdtp::dtt::apply(k, x), oracle::dtt(k, x)));
    }
    CHECK(worst <= 1e-12);
  }
}

TEST_CASE("every kind preserves the L2 norm") {
  std::mt19937_64 rng(4);
  for (Kind k : kAllKinds) {
    for (int i = 0; i < 200; ++i) {
      const Vec8 x = oracle::random_vec(rng);
      CHECK(std::abs(norm(fdtp::dtt::apply(k, x)) - norm(x)) <= 1e-12);
    }
  }
}

TEST_CASE("apply_2d") {
  std::mt19937_64 rng(5);

  SUBCASE("zero block") {
    const Block8x8 z = apply_2d(Block8x8{}, Kind::Dct4, Kind::Dst2);
    for (double v : z) CHECK(v == 0.0);
  }

  SUBCASE("inverse kinds restore the block") {
    for (Kind h : kAllKinds) {
      for (Kind v : kAllKinds) {
        const Block8x8 b = random_block(rng);
        const Block8x8 back = apply_2d(apply_2d(b, h, v), inverse(h), inverse(v));
        double m = 0.0;
        for (int i = 0; i < 64; ++i) m = std::max(m, std::abs(back[i] - b[i]));
        CHECK(m <= 1e-12);
      }
    }
  }

  SUBCASE("rows-first equals columns-first") {
    for (Kind h : kAllKinds) {
      for (Kind v : kAllKinds) {
        const Block8x8 b = random_block(rng);
        const Block8x8 a1 = apply_2d(b, h, v);
        const Block8x8 a2 = apply_2d_columns_first(b, h, v);
        double m = 0.0;
        for (int i = 0; i < 64; ++i) m = std::max(m, std::abs(a1[i] - a2[i]));
        CHECK(m <= 1e-13);
      }
    }
  }

  SUBCASE("separable form matches 1D row transform") {
    const Block8x8 b = random_block(rng);
    const Block8x8 a = apply_2d(b, Kind::Dct4, Kind::Dct4);
    // first row of the result equals DCT-IV down the columns of row-transformed data
    Block8x8 rows{};
    for (int r = 0; r < 8; ++r) {
      Vec8 x{};
      for (int c = 0; c < 8; ++c) x[c] = b[r * 8 + c];
      x = oracle::dtt(Kind::Dct4, x);
      for (int c = 0; c < 8; ++c) rows[r * 8 + c] = x[c];
    }
    for (int c = 0; c < 8; ++c) {
      Vec8 col{};
      for (int r = 0; r < 8; ++r) col[r] = rows[r * 8 + c];
      col = oracle::dtt(Kind::Dct4, col);
      for (int r = 0; r < 8; ++r) CHECK(std::abs(col[r] - a[r * 8 + c]) <= 1e-12);
    }
  }
}
