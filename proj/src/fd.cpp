#include "fdtp/fd.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace fdtp {

namespace {

constexpr int N = kFdSize;

void check_shift(double d, const char* what) {
  if (!(std::abs(d) <= 0.5)) {
    throw std::invalid_argument(std::string("phase_rotate: |") + what + "| must be <= 0.5");
  }
}

// cos/sin of w_k * lag for lags -8..7.
struct LagTables {
  std::array<std::array<double, N>, kSurfaceSize> cos{};
  std::array<std::array<double, N>, kSurfaceSize> sin{};

  LagTables() {
    for (int m = 0; m < kSurfaceSize; ++m) {
      for (int k = 0; k < N; ++k) {
        const double a = bin_frequency(k) * (m - kSurfaceSize / 2);
        cos[m][k] = std::cos(a);
        sin[m][k] = std::sin(a);
      }
    }
  }
};

const LagTables& lag_tables() {
  static const LagTables t;
  return t;
}

}  // namespace

double bin_frequency(int k) { return std::numbers::pi * (k + 0.5) / N; }

ComplexSpectrum8 to_complex(const FdTile& fd) {
  ComplexSpectrum8 s;
  s.shift_h = fd.shift_h;
  s.shift_v = fd.shift_v;
  const auto& cc = fd[Quadrant::CC];
  const auto& sc = fd[Quadrant::SC];
  const auto& cs = fd[Quadrant::CS];
  const auto& ss = fd[Quadrant::SS];
  for (int i = 0; i < N * N; ++i) {
    s.plus[i] = Complex(cc[i] - ss[i], -(sc[i] + cs[i]));
    s.minus[i] = Complex(cc[i] + ss[i], sc[i] - cs[i]);
  }
  return s;
}

FdTile from_complex(const ComplexSpectrum8& s) {
  FdTile fd;
  fd.shift_h = s.shift_h;
  fd.shift_v = s.shift_v;
  for (int i = 0; i < N * N; ++i) {
    const Complex p = s.plus[i];
    const Complex m = s.minus[i];
    fd[Quadrant::CC][i] = 0.5 * (p.real() + m.real());
    fd[Quadrant::SS][i] = 0.5 * (m.real() - p.real());
    fd[Quadrant::SC][i] = 0.5 * (m.imag() - p.imag());
    fd[Quadrant::CS][i] = -0.5 * (p.imag() + m.imag());
  }
  return fd;
}

FdTile phase_rotate(const FdTile& fd, double dx, double dy) {
  check_shift(dx, "dx");
  check_shift(dy, "dy");
  FdTile out = fd;
  std::array<double, N> cx{}, sx{}, cy{}, sy{};
  for (int k = 0; k < N; ++k) {
    cx[k] = std::cos(bin_frequency(k) * dx);
    sx[k] = std::sin(bin_frequency(k) * dx);
    cy[k] = std::cos(bin_frequency(k) * dy);
    sy[k] = std::sin(bin_frequency(k) * dy);
  }
  auto rotate_pair = [&](Quadrant qc, Quadrant qs, bool horizontal) {
    auto& c = out[qc];
    auto& s = out[qs];
    for (int k1 = 0; k1 < N; ++k1) {
      for (int k2 = 0; k2 < N; ++k2) {
        const int i = k1 * N + k2;
        const double co = horizontal ? cx[k2] : cy[k1];
        const double si = horizontal ? sx[k2] : sy[k1];
        const double a = c[i];
        const double b = s[i];
        c[i] = a * co - b * si;
        s[i] = b * co + a * si;
      }
    }
  };
  rotate_pair(Quadrant::CC, Quadrant::CS, true);
  rotate_pair(Quadrant::SC, Quadrant::SS, true);
  rotate_pair(Quadrant::CC, Quadrant::SC, false);
  rotate_pair(Quadrant::CS, Quadrant::SS, false);
  return out;
}

CalibKernel CalibKernel::identity() {
  FdTile one;
  one[Quadrant::CC].fill(1.0);
  return uniform(one);
}

CalibKernel CalibKernel::uniform(const FdTile& multiplier, Vec2 center_offset) {
  CalibKernel k;
  k.multiplier.fill(multiplier);
  k.center_offset = center_offset;
  return k;
}

FdTile rotation_multiplier(double dx, double dy) {
  ComplexSpectrum8 s;
  for (int k1 = 0; k1 < N; ++k1) {
    for (int k2 = 0; k2 < N; ++k2) {
      const double ax = bin_frequency(k2) * dx;
      const double ay = bin_frequency(k1) * dy;
      s.plus[k1 * N + k2] = std::polar(1.0, -(ax + ay));
      s.minus[k1 * N + k2] = std::polar(1.0, -(ax - ay));
    }
  }
  return from_complex(s);
}

FdTile gaussian_multiplier(double sigma) {
  FdTile g;
  for (int k1 = 0; k1 < N; ++k1) {
    for (int k2 = 0; k2 < N; ++k2) {
      const double w2 = bin_frequency(k1) * bin_frequency(k1) + bin_frequency(k2) * bin_frequency(k2);
      g[Quadrant::CC][k1 * N + k2] = std::exp(-0.5 * sigma * sigma * w2);
    }
  }
  return g;
}

FdTile gaussian_inverse_multiplier(double sigma, double lambda) {
  if (!(lambda > 0.0)) throw std::invalid_argument("gaussian_inverse_multiplier: lambda must be > 0");
  FdTile g = gaussian_multiplier(sigma);
  for (double& v : g[Quadrant::CC]) v = v / (v * v + lambda);
  return g;
}

FdTile multiply(const FdTile& fd, const FdTile& multiplier) {
  ComplexSpectrum8 a = to_complex(fd);
  const ComplexSpectrum8 k = to_complex(multiplier);
  for (int i = 0; i < N * N; ++i) {
    a.plus[i] *= k.plus[i];
    a.minus[i] *= k.minus[i];
  }
  return from_complex(a);
}

BayerFdTile apply_kernel(const BayerFdTile& fd, const CalibKernel& kernel) {
  BayerFdTile out;
  for (Color c : kColors) out[c] = multiply(fd[c], kernel[c]);
  return out;
}

const char* direction_name(PairDirection d) {
  switch (d) {
    case PairDirection::Horizontal: return "horizontal";
    case PairDirection::Vertical: return "vertical";
    case PairDirection::DiagMain: return "diag_main";
    case PairDirection::DiagAnti: return "diag_anti";
  }
  throw std::invalid_argument("unknown pair direction");
}

double ColorWeights::operator[](Color c) const {
  switch (c) {
    case Color::Red: return red;
    case Color::Blue: return blue;
    case Color::Green: return green;
  }
  throw std::invalid_argument("unknown color");
}

void ColorWeights::validate() const {
  for (double w : {red, blue, green}) {
    if (!std::isfinite(w) || w < 0.0) {
      throw std::invalid_argument("color weights must be finite and non-negative");
    }
  }
  if (std::abs(red + blue + green - 1.0) > 1e-9) {
    throw std::invalid_argument("color weights must sum to 1");
  }
}

void CorrelationParams::validate() const {
  weights.validate();
  if (!(epsilon > 0.0) || !std::isfinite(epsilon)) {
    throw std::invalid_argument("correlation epsilon must be > 0");
  }
  if (!(lpf_sigma >= 0.0) || !std::isfinite(lpf_sigma)) {
    throw std::invalid_argument("correlation lpf_sigma must be >= 0");
  }
}

std::array<double, kSurfaceSize * kSurfaceSize> correlation_surface(const BayerFdTile& a,
                                                                    const BayerFdTile& b,
                                                                    const CorrelationParams& params) {
  params.validate();
  std::array<Complex, N * N> pp{};
  std::array<Complex, N * N> pm{};
  for (Color c : kColors) {
    const double w = params.weights[c];
    if (w == 0.0) continue;
    const ComplexSpectrum8 fa = to_complex(a[c]);
    const ComplexSpectrum8 fb = to_complex(b[c]);
    for (int i = 0; i < N * N; ++i) {
      pp[i] += w * fb.plus[i] * std::conj(fa.plus[i]);
      pm[i] += w * fb.minus[i] * std::conj(fa.minus[i]);
    }
  }

  double peak = 0.0;
  for (int i = 0; i < N * N; ++i) peak = std::max({peak, std::abs(pp[i]), std::abs(pm[i])});
  std::array<double, kSurfaceSize * kSurfaceSize> out{};
  if (peak == 0.0) return out;

  const double floor = params.epsilon * peak;
  const double s2 = params.lpf_sigma * params.lpf_sigma;
  // Real-valued coefficient planes of the inverse: cos/sin per axis.
  std::array<double, N * N> qcc{}, qss{}, qsc{}, qcs{};
  double gain = 0.0;
  for (int k1 = 0; k1 < N; ++k1) {
    for (int k2 = 0; k2 < N; ++k2) {
      const int i = k1 * N + k2;
      const double wy = bin_frequency(k1);
      const double wx = bin_frequency(k2);
      const double g = std::exp(-0.5 * s2 * (wy * wy + wx * wx));
      gain += 2.0 * g;
      const Complex p = pp[i] * (g / (std::abs(pp[i]) + floor));
      const Complex m = pm[i] * (g / (std::abs(pm[i]) + floor));
      qcc[i] = p.real() + m.real();
      qss[i] = m.real() - p.real();
      qsc[i] = m.imag() - p.imag();
      qcs[i] = -(p.imag() + m.imag());
    }
  }

  // Separable DCT/DST-style synthesis to integer lags, x first. Dividing by
  // the total filter gain puts a perfect match at exactly 1.
  const LagTables& t = lag_tables();
  std::array<std::array<double, kSurfaceSize>, N> hc{}, hs{};  // [k1][lag_x]
  for (int k1 = 0; k1 < N; ++k1) {
    for (int mx = 0; mx < kSurfaceSize; ++mx) {
      double c_part = 0.0;
      double s_part = 0.0;
      for (int k2 = 0; k2 < N; ++k2) {
        const int i = k1 * N + k2;
        const double cx = t.cos[mx][k2];
        const double sx = t.sin[mx][k2];
        c_part += cx * qcc[i] + sx * qcs[i];
        s_part += sx * qss[i] + cx * qsc[i];
      }
      hc[k1][mx] = c_part;
      hs[k1][mx] = s_part;
    }
  }
  for (int my = 0; my < kSurfaceSize; ++my) {
    for (int mx = 0; mx < kSurfaceSize; ++mx) {
      double acc = 0.0;
      for (int k1 = 0; k1 < N; ++k1) acc += t.cos[my][k1] * hc[k1][mx] + t.sin[my][k1] * hs[k1][mx];
      out[my * kSurfaceSize + mx] = acc / gain;
    }
  }
  return out;
}

CorrTile phase_correlate(const BayerFdTile& a, const BayerFdTile& b, const CorrelationParams& params,
                         PairDirection direction) {
  const auto full = correlation_surface(a, b, params);
  CorrTile tile;
  tile.direction = direction;
  const int off = kSurfaceSize / 2 - kCorrCenter;
  for (int r = 0; r < kCorrSize; ++r) {
    for (int c = 0; c < kCorrSize; ++c) tile(r, c) = full[(r + off) * kSurfaceSize + c + off];
  }
  return tile;
}

}  // namespace fdtp
