#include "fdtp/mclt.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace fdtp {

namespace {

constexpr int N = kFdSize;
constexpr int N2 = kTileSize;

using dtt::Block8x8;
using dtt::Kind;
using Vec8 = dtt::Vec8;
using Vec16 = std::array<double, N2>;

// Basis of the fold+DTT-IV factorization: the MDCT fold pairs sample n with
// its mirror across the quarter points (time offset N/2 inside the basis).
Vec8 fold(const Vec16& x, bool sine) {
  Vec8 y{};
  for (int m = 0; m < N / 2; ++m) {
    const double a = x[N + N / 2 - 1 - m];
    const double b = x[N + N / 2 + m];
    y[m] = sine ? (a - b) : -(a + b);
  }
  for (int j = 0; j < N / 2; ++j) {
    const double a = x[j];
    const double b = x[N - 1 - j];
    y[N / 2 + j] = sine ? (a + b) : (a - b);
  }
  return y;
}

void unfold_add(const Vec8& y, bool sine, Vec16& x) {
  for (int m = 0; m < N / 2; ++m) {
    if (sine) {
      x[N + N / 2 - 1 - m] += y[m];
      x[N + N / 2 + m] -= y[m];
    } else {
      x[N + N / 2 - 1 - m] -= y[m];
      x[N + N / 2 + m] -= y[m];
    }
  }
  for (int j = 0; j < N / 2; ++j) {
    x[j] += y[N / 2 + j];
    x[N - 1 - j] += sine ? y[N / 2 + j] : -y[N / 2 + j];
  }
}

Kind dtt4_kind(bool sine) { return sine ? Kind::Dst4 : Kind::Dct4; }

bool vertical_is_sine(Quadrant q) { return q == Quadrant::SC || q == Quadrant::SS; }
bool horizontal_is_sine(Quadrant q) { return q == Quadrant::CS || q == Quadrant::SS; }

constexpr std::array<Quadrant, 4> kQuadrants{Quadrant::CC, Quadrant::SC, Quadrant::CS,
                                             Quadrant::SS};

Block8x8 dtt4_2d(const Block8x8& b, bool horizontal_sine, bool vertical_sine) {
  ++mclt_counters().dtt_sets;
  return dtt::apply_2d(b, dtt4_kind(horizontal_sine), dtt4_kind(vertical_sine));
}

// Folds a windowed 16x16 tile to the 8x8 block of one quadrant.
Block8x8 fold_2d(const Tile16& windowed, bool vertical_sine, bool horizontal_sine) {
  std::array<Vec16, N> rows{};  // vertically folded, 8 x 16
  for (int c = 0; c < N2; ++c) {
    Vec16 col{};
    for (int r = 0; r < N2; ++r) col[r] = windowed(r, c);
    const Vec8 f = fold(col, vertical_sine);
    for (int r = 0; r < N; ++r) rows[r][c] = f[r];
  }
  Block8x8 out{};
  for (int r = 0; r < N; ++r) {
    const Vec8 f = fold(rows[r], horizontal_sine);
    for (int c = 0; c < N; ++c) out[r * N + c] = 0.5 * f[c];
  }
  return out;
}

Tile16 apply_window(const Tile16& tile, const Window1D& wh, const Window1D& wv) {
  Tile16 out;
  for (int r = 0; r < N2; ++r) {
    for (int c = 0; c < N2; ++c) out(r, c) = tile(r, c) * wv[r] * wh[c];
  }
  return out;
}

// Sum over one sample parity of window * lowest MDCT basis function.
double lattice_mass(const Window1D& w, int parity) {
  const double pi = std::numbers::pi;
  double acc = 0.0;
  for (int n = parity; n < N2; n += 2) acc += w[n] * std::cos(pi / N * (n + 0.5 + N / 2) * 0.5);
  return acc;
}

struct Lattice {
  int row_parity;
  int col_parity;
};

// Sublattices (single parity per axis) holding one color's samples.
std::array<Lattice, 2> color_lattices(BayerPhase phase, Color color, int& count) {
  const int py = (phase == BayerPhase::Gb || phase == BayerPhase::B) ? 1 : 0;
  const int px = (phase == BayerPhase::Gr || phase == BayerPhase::B) ? 1 : 0;
  switch (color) {
    case Color::Red:
      count = 1;
      return {Lattice{py, px}, Lattice{}};
    case Color::Blue:
      count = 1;
      return {Lattice{1 - py, 1 - px}, Lattice{}};
    case Color::Green:
      count = 2;
      return {Lattice{py, 1 - px}, Lattice{1 - py, px}};
  }
  throw std::invalid_argument("mclt: unknown color");
}

}  // namespace

McltCounters& mclt_counters() {
  thread_local McltCounters counters;
  return counters;
}

Window1D Window1D::make(double shift) {
  if (!(std::abs(shift) <= 0.5)) {
    throw std::invalid_argument("Window1D: shift must be within [-0.5, 0.5]");
  }
  Window1D w;
  w.shift_ = shift;
  const double pi = std::numbers::pi;
  for (int n = 0; n < N2; ++n) {
    const double a = n + 0.5 + shift;
    w.taps_[n] = (a < 0.0 || a > N2) ? 0.0 : std::sin(pi * a / N2);
  }
  return w;
}

double FdTile::energy() const {
  double e = 0.0;
  for (const auto& q : quadrants) {
    for (double v : q) e += v * v;
  }
  return e;
}

BayerPhase bayer_phase_at(int row, int col) {
  const int py = ((row % 2) + 2) % 2;
  const int px = ((col % 2) + 2) % 2;
  if (py == 0) return px == 0 ? BayerPhase::R : BayerPhase::Gr;
  return px == 0 ? BayerPhase::Gb : BayerPhase::B;
}

BayerPhase bayer_phase_from_int(int value) {
  if (value < 0 || value > 3) throw std::invalid_argument("unknown Bayer phase");
  return static_cast<BayerPhase>(value);
}

Color bayer_color(BayerPhase phase, int row, int col) {
  int py = 0;
  int px = 0;
  switch (phase) {
    case BayerPhase::R: break;
    case BayerPhase::Gr: px = 1; break;
    case BayerPhase::Gb: py = 1; break;
    case BayerPhase::B: py = 1; px = 1; break;
    default: throw std::invalid_argument("unknown Bayer phase");
  }
  const int y = (row + py) % 2;
  const int x = (col + px) % 2;
  if (y == 0 && x == 0) return Color::Red;
  if (y == 1 && x == 1) return Color::Blue;
  return Color::Green;
}

FdTile mclt_forward(const Tile16& tile, const Window1D& window_h, const Window1D& window_v) {
  const Tile16 windowed = apply_window(tile, window_h, window_v);
  FdTile fd;
  fd.shift_h = window_h.shift();
  fd.shift_v = window_v.shift();
  for (Quadrant q : kQuadrants) {
    const bool vs = vertical_is_sine(q);
    const bool hs = horizontal_is_sine(q);
    fd[q] = dtt4_2d(fold_2d(windowed, vs, hs), hs, vs);
  }
  return fd;
}

Tile16 imclt(const FdTile& fd, const Window1D& window_h, const Window1D& window_v) {
  std::array<Vec16, N2> acc{};  // acc[col][row], unfolded columns
  for (Quadrant q : kQuadrants) {
    const bool vs = vertical_is_sine(q);
    const bool hs = horizontal_is_sine(q);
    const Block8x8 b = dtt4_2d(fd[q], hs, vs);
    // horizontal unfold of each of the 8 rows
    std::array<Vec16, N> rows{};
    for (int r = 0; r < N; ++r) {
      Vec8 y{};
      for (int c = 0; c < N; ++c) y[c] = 0.5 * b[r * N + c];
      unfold_add(y, hs, rows[r]);
    }
    // vertical unfold of each of the 16 columns
    for (int c = 0; c < N2; ++c) {
      Vec8 y{};
      for (int r = 0; r < N; ++r) y[r] = rows[r][c];
      unfold_add(y, vs, acc[c]);
    }
  }
  Tile16 out;
  for (int r = 0; r < N2; ++r) {
    for (int c = 0; c < N2; ++c) out(r, c) = acc[c][r] * window_v[r] * window_h[c];
  }
  return out;
}

void imclt_accumulate(const FdTile& fd, const Window1D& window_h, const Window1D& window_v,
                      Image& canvas, int origin_row, int origin_col) {
  if (origin_row < 0 || origin_col < 0 || origin_row + N2 > canvas.height() ||
      origin_col + N2 > canvas.width()) {
    throw std::out_of_range("imclt_accumulate: tile footprint outside canvas");
  }
  const Tile16 t = imclt(fd, window_h, window_v);
  for (int r = 0; r < N2; ++r) {
    for (int c = 0; c < N2; ++c) canvas(origin_row + r, origin_col + c) += t(r, c);
  }
}

double bayer_color_scale(BayerPhase phase, Color color, const Window1D& window_h,
                         const Window1D& window_v) {
  int count = 0;
  const auto lattices = color_lattices(phase, color, count);
  const double full = (lattice_mass(window_v, 0) + lattice_mass(window_v, 1)) *
                      (lattice_mass(window_h, 0) + lattice_mass(window_h, 1));
  double part = 0.0;
  for (int i = 0; i < count; ++i) {
    part += lattice_mass(window_v, lattices[i].row_parity) *
            lattice_mass(window_h, lattices[i].col_parity);
  }
  if (std::abs(part) < 1e-12 * std::abs(full)) {
    throw std::domain_error("bayer_color_scale: degenerate color mass");
  }
  return full / part;
}

// A signal living on one sample parity has MDST(k) = +/-MDCT(7 - k), the
// sign being the parity. So one fold + DCT-IVxDCT-IV per lattice yields
// all four quadrants.
FdTile mclt_forward_bayer_color(const Tile16& tile, BayerPhase phase, Color color,
                                const Window1D& window_h, const Window1D& window_v) {
  int count = 0;
  const auto lattices = color_lattices(phase, color, count);
  const double scale = bayer_color_scale(phase, color, window_h, window_v);
  FdTile fd;
  fd.shift_h = window_h.shift();
  fd.shift_v = window_v.shift();
  for (int i = 0; i < count; ++i) {
    const Lattice& lat = lattices[i];
    Tile16 masked;
    for (int r = lat.row_parity; r < N2; r += 2) {
      for (int c = lat.col_parity; c < N2; c += 2) {
        masked(r, c) = tile(r, c) * window_v[r] * window_h[c];
      }
    }
    const Block8x8 cc = dtt4_2d(fold_2d(masked, false, false), false, false);
    const double sv = lat.row_parity == 0 ? 1.0 : -1.0;
    const double sh = lat.col_parity == 0 ? 1.0 : -1.0;
    for (int k1 = 0; k1 < N; ++k1) {
      for (int k2 = 0; k2 < N; ++k2) {
        const int i0 = k1 * N + k2;
        fd[Quadrant::CC][i0] += scale * cc[i0];
        fd[Quadrant::SC][i0] += scale * sv * cc[(N - 1 - k1) * N + k2];
        fd[Quadrant::CS][i0] += scale * sh * cc[k1 * N + (N - 1 - k2)];
        fd[Quadrant::SS][i0] += scale * sv * sh * cc[(N - 1 - k1) * N + (N - 1 - k2)];
      }
    }
  }
  return fd;
}

BayerFdTile mclt_forward_bayer(const Tile16& tile, BayerPhase phase, const Window1D& window_h,
                               const Window1D& window_v) {
  bayer_phase_from_int(static_cast<int>(phase));
  BayerFdTile out;
  for (Color c : kColors) out[c] = mclt_forward_bayer_color(tile, phase, c, window_h, window_v);
  return out;
}

}  // namespace fdtp
