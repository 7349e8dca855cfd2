#include "fdtp/dtt.hpp"

#include <cmath>
#include <complex>
#include <numbers>
#include <stdexcept>

namespace fdtp::dtt {

namespace {

constexpr int N = kSize;
constexpr int M = kSize / 2;

using Matrix8 = std::array<std::array<double, N>, N>;

// Basis tables for the type II transforms; type III uses their transposes.
struct Tables {
  Matrix8 dct2{};
  Matrix8 dst2{};
  // Pre- and post-twiddles for the half-length complex DCT-IV.
  std::array<std::complex<double>, M> pre{};
  std::array<std::complex<double>, M> post{};
  std::array<std::complex<double>, M> dft{};
};

const Tables& tables() {
  static const Tables t = [] {
    Tables r;
    const double pi = std::numbers::pi;
    const double scale = std::sqrt(2.0 / N);
    for (int k = 0; k < N; ++k) {
      const double ck = (k == 0) ? std::sqrt(0.5) : 1.0;
      const double dk = (k == N - 1) ? std::sqrt(0.5) : 1.0;
      for (int n = 0; n < N; ++n) {
        r.dct2[k][n] = scale * ck * std::cos(pi / N * (n + 0.5) * k);
        r.dst2[k][n] = scale * dk * std::sin(pi / N * (n + 0.5) * (k + 1));
      }
    }
    for (int n = 0; n < M; ++n) {
      r.pre[n] = std::polar(1.0, -pi * (n + 0.25) / N);
      r.post[n] = std::polar(1.0, -pi * n / N);
      r.dft[n] = std::polar(1.0, -2.0 * pi * n / M);
    }
    return r;
  }();
  return t;
}

Vec8 multiply(const Matrix8& m, const Vec8& x) {
  Vec8 y{};
  for (int k = 0; k < N; ++k) {
    double acc = 0.0;
    for (int n = 0; n < N; ++n) acc += m[k][n] * x[n];
    y[k] = acc;
  }
  return y;
}

Vec8 multiply_transposed(const Matrix8& m, const Vec8& x) {
  Vec8 y{};
  for (int n = 0; n < N; ++n) {
    double acc = 0.0;
    for (int k = 0; k < N; ++k) acc += m[k][n] * x[k];
    y[n] = acc;
  }
  return y;
}

}  // namespace

// DCT-IV through a 4-point complex DFT: pair even samples with reversed odd
// ones, pre-twiddle, transform, post-twiddle and interleave.
Vec8 dct4(const Vec8& x) {
  const Tables& t = tables();
  std::array<std::complex<double>, M> v{};
  for (int n = 0; n < M; ++n) {
    v[n] = std::complex<double>(x[2 * n], x[N - 1 - 2 * n]) * t.pre[n];
  }
  std::array<std::complex<double>, M> spec{};
  for (int k = 0; k < M; ++k) {
    std::complex<double> acc = 0.0;
    for (int n = 0; n < M; ++n) acc += v[n] * t.dft[(k * n) % M];
    spec[k] = acc * t.post[k];
  }
  const double scale = std::sqrt(2.0 / N);
  Vec8 y{};
  for (int k = 0; k < M; ++k) {
    y[2 * k] = scale * spec[k].real();
    y[N - 1 - 2 * k] = -scale * spec[k].imag();
  }
  return y;
}

// DST-IV(x)_k = (-1)^k DCT-IV(reverse(x))_k
Vec8 dst4(const Vec8& x) {
  Vec8 reversed{};
  for (int n = 0; n < N; ++n) reversed[n] = x[N - 1 - n];
  Vec8 y = dct4(reversed);
  for (int k = 1; k < N; k += 2) y[k] = -y[k];
  return y;
}

Vec8 dct2(const Vec8& x) { return multiply(tables().dct2, x); }
Vec8 dct3(const Vec8& x) { return multiply_transposed(tables().dct2, x); }
Vec8 dst2(const Vec8& x) { return multiply(tables().dst2, x); }
Vec8 dst3(const Vec8& x) { return multiply_transposed(tables().dst2, x); }

Vec8 apply(Kind kind, const Vec8& x) {
  switch (kind) {
    case Kind::Dct2: return dct2(x);
    case Kind::Dct3: return dct3(x);
    case Kind::Dct4: return dct4(x);
    case Kind::Dst2: return dst2(x);
    case Kind::Dst3: return dst3(x);
    case Kind::Dst4: return dst4(x);
  }
  throw std::invalid_argument("dtt: unknown transform kind");
}

Kind inverse(Kind kind) {
  switch (kind) {
    case Kind::Dct2: return Kind::Dct3;
    case Kind::Dct3: return Kind::Dct2;
    case Kind::Dst2: return Kind::Dst3;
    case Kind::Dst3: return Kind::Dst2;
    case Kind::Dct4:
    case Kind::Dst4: return kind;
  }
  throw std::invalid_argument("dtt: unknown transform kind");
}

std::string_view name(Kind kind) {
  switch (kind) {
    case Kind::Dct2: return "DCT-II";
    case Kind::Dct3: return "DCT-III";
    case Kind::Dct4: return "DCT-IV";
    case Kind::Dst2: return "DST-II";
    case Kind::Dst3: return "DST-III";
    case Kind::Dst4: return "DST-IV";
  }
  return "?";
}

Block8x8 apply_2d(const Block8x8& block, Kind horizontal, Kind vertical) {
  Block8x8 tmp{};
  for (int r = 0; r < N; ++r) {
    Vec8 row{};
    for (int c = 0; c < N; ++c) row[c] = block[r * N + c];
    row = apply(horizontal, row);
    for (int c = 0; c < N; ++c) tmp[r * N + c] = row[c];
  }
  Block8x8 out{};
  for (int c = 0; c < N; ++c) {
    Vec8 col{};
    for (int r = 0; r < N; ++r) col[r] = tmp[r * N + c];
    col = apply(vertical, col);
    for (int r = 0; r < N; ++r) out[r * N + c] = col[r];
  }
  return out;
}

Block8x8 apply_2d_columns_first(const Block8x8& block, Kind horizontal, Kind vertical) {
  Block8x8 tmp{};
  for (int c = 0; c < N; ++c) {
    Vec8 col{};
    for (int r = 0; r < N; ++r) col[r] = block[r * N + c];
    col = apply(vertical, col);
    for (int r = 0; r < N; ++r) tmp[r * N + c] = col[r];
  }
  Block8x8 out{};
  for (int r = 0; r < N; ++r) {
    Vec8 row{};
    for (int c = 0; c < N; ++c) row[c] = tmp[r * N + c];
    row = apply(horizontal, row);
    for (int c = 0; c < N; ++c) out[r * N + c] = row[c];
  }
  return out;
}

}  // namespace fdtp::dtt
