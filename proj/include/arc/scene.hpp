#pragma once

#include "arc/grid.hpp"

#include <nlohmann/json_fwd.hpp>

#include <array>
#include <cstdint>
#include <span>
#include <string_view>
#include <vector>

namespace arc {

/// Exact fraction kept in lowest terms with a positive denominator.
struct Rational {
  std::int64_t num = 0;
  std::int64_t den = 1;

  static Rational of(std::int64_t num, std::int64_t den);
  double value() const noexcept { return static_cast<double>(num) / static_cast<double>(den); }

  friend bool operator==(const Rational&, const Rational&) = default;
};

struct BoundingBox {
  int y_min = 0;
  int x_min = 0;
  int y_max = 0;
  int x_max = 0;

  int height() const noexcept { return y_max - y_min + 1; }
  int width() const noexcept { return x_max - x_min + 1; }
  bool contains(Coord c) const noexcept {
    return c.y >= y_min && c.y <= y_max && c.x >= x_min && c.x <= x_max;
  }
  bool on_boundary(Coord c) const noexcept {
    return contains(c) && (c.y == y_min || c.y == y_max || c.x == x_min || c.x == x_max);
  }

  friend bool operator==(const BoundingBox&, const BoundingBox&) = default;
};

struct Pixel {
  Coord pos;
  Color color = 0;

  friend bool operator==(const Pixel&, const Pixel&) = default;
};

/// Background region enclosed inside an object's bounding box.
struct Cavity {
  std::vector<Coord> pixels;  // row-major sorted

  std::size_t size() const noexcept { return pixels.size(); }
  friend bool operator==(const Cavity&, const Cavity&) = default;
};

/// Primary shape label derived from the canonical shape.
enum class ShapeLabel { Rectangle, Square, Line, Plus, LShape, Irregular };

std::string_view to_string(ShapeLabel label);

struct GridObject {
  int object_id = 0;
  std::vector<Pixel> pixels;  // row-major sorted
  BoundingBox bbox;
  Rational centroid_y;
  Rational centroid_x;
  std::vector<Coord> canonical_shape;  // row-major sorted offsets from (y_min, x_min)
  std::array<int, kNumColors> color_histogram{};
  std::vector<Cavity> cavities;
  ShapeLabel shape = ShapeLabel::Irregular;

  int height() const noexcept { return bbox.height(); }
  int width() const noexcept { return bbox.width(); }
  std::size_t size() const noexcept { return pixels.size(); }
  /// Most frequent color; lowest code on ties.
  Color dominant_color() const noexcept;
  bool is_filled_box() const noexcept {
    return pixels.size() == static_cast<std::size_t>(height()) * static_cast<std::size_t>(width());
  }

  friend bool operator==(const GridObject&, const GridObject&) = default;
};

/// Background color plus objects in scan order of their first pixel.
struct SceneGraph {
  Color background = 0;
  std::vector<GridObject> objects;
  int height = 1;
  int width = 1;

  friend bool operator==(const SceneGraph&, const SceneGraph&) = default;
};

/// Mode of the grid; lowest color code wins ties.
Color find_background(const Grid& g);

/// Maximal 8-connected components of non-background cells, in row-major
/// order of their first cell. Each component lists cells in BFS order.
std::vector<std::vector<Coord>> connected_components(const Grid& g, Color bg);

/// Enclosed 4-connected background regions of a bounding box: regions that
/// never reach the box perimeter through background cells.
std::vector<Cavity> detect_cavities(std::span<const Coord> obj_pixels, const BoundingBox& bbox,
                                    const Grid& g, Color bg);

GridObject compute_features(std::span<const Coord> pixels, const Grid& g, Color bg,
                            int object_id = 0);

ShapeLabel classify_shape(std::span<const Coord> canonical_shape, int height, int width);

SceneGraph abstract_scene(const Grid& g);

/// Background fill, then object pixels in list order (last writer wins).
/// Throws Error(PixelOutOfBounds) for pixels outside height x width.
Grid render(const SceneGraph& scene, int height, int width);
inline Grid render(const SceneGraph& scene) { return render(scene, scene.height, scene.width); }

nlohmann::json scene_to_json(const SceneGraph& scene);

}  // namespace arc
