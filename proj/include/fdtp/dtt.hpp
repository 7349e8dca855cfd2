#pragma once

#include <array>
#include <string_view>

/// Eight-point discrete trigonometric transforms (DCT/DST types II, III, IV).
///
/// All transforms use orthonormal scaling, so type IV transforms are
/// involutions and the type II/III pairs are mutual inverses.
namespace fdtp::dtt {

inline constexpr int kSize = 8;

using Vec8 = std::array<double, kSize>;
/// Row-major 8x8 block, element (row, col) at index row * 8 + col.
/// Rows run vertically, columns horizontally.
using Block8x8 = std::array<double, kSize * kSize>;

enum class Kind { Dct2, Dct3, Dct4, Dst2, Dst3, Dst4 };

Vec8 dct2(const Vec8& x);
Vec8 dct3(const Vec8& x);
Vec8 dct4(const Vec8& x);
Vec8 dst2(const Vec8& x);
Vec8 dst3(const Vec8& x);
Vec8 dst4(const Vec8& x);

Vec8 apply(Kind kind, const Vec8& x);

/// Kind that undoes `kind` (II <-> III, IV is its own inverse).
Kind inverse(Kind kind);

std::string_view name(Kind kind);

/// Separable 2D transform: each row with `horizontal`, then each column
/// with `vertical`.
Block8x8 apply_2d(const Block8x8& block, Kind horizontal, Kind vertical);

/// Same result as apply_2d but columns are transformed first.
Block8x8 apply_2d_columns_first(const Block8x8& block, Kind horizontal, Kind vertical);

}  // namespace fdtp::dtt
