#pragma once

#include <compare>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace arc {

using Color = std::uint8_t;

inline constexpr int kNumColors = 10;
inline constexpr int kMaxGridSide = 30;

/// Cell address: row y, column x, origin at the top-left corner.
struct Coord {
  int y = 0;
  int x = 0;

  friend auto operator<=>(const Coord&, const Coord&) = default;
};

/// Dense row-major grid of color codes 0-9 with 1 <= height, width <= 30.
class Grid {
 public:
  /// Throws Error(EmptyGrid) for a zero side and Error(SchemaViolation) above
  /// the 30x30 cap; Error(ColorOutOfRange) when fill > 9.
  Grid(int height, int width, Color fill = 0);

  /// Builds a grid from nested rows, validating shape and palette.
  static Grid from_rows(const std::vector<std::vector<int>>& rows);

  int height() const noexcept { return height_; }
  int width() const noexcept { return width_; }
  std::size_t size() const noexcept { return cells_.size(); }

  bool contains(int y, int x) const noexcept {
    return y >= 0 && y < height_ && x >= 0 && x < width_;
  }
  bool contains(Coord c) const noexcept { return contains(c.y, c.x); }

  Color at(int y, int x) const { return cells_[index(y, x)]; }
  Color at(Coord c) const { return at(c.y, c.x); }

  void set(int y, int x, Color color);
  void set(Coord c, Color color) { set(c.y, c.x, color); }

  std::span<const Color> cells() const noexcept { return cells_; }
  std::vector<std::vector<int>> to_rows() const;

  friend bool operator==(const Grid&, const Grid&) = default;

 private:
  std::size_t index(int y, int x) const {
    return static_cast<std::size_t>(y) * static_cast<std::size_t>(width_) +
           static_cast<std::size_t>(x);
  }

  int height_;
  int width_;
  std::vector<Color> cells_;
};

/// True iff dimensions and every cell match.
bool grids_equal(const Grid& a, const Grid& b) noexcept;

/// One line per row, digits only.
std::string to_ascii(const Grid& g);

/// FNV-1a over dims and cells; used for dedup of intermediate grids.
std::uint64_t grid_hash(const Grid& g) noexcept;

}  // namespace arc
