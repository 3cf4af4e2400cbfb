#include "arc/scene.hpp"

#include "arc/error.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <deque>
#include <numeric>

namespace arc {

Rational Rational::of(std::int64_t num, std::int64_t den) {
  if (den == 0) throw Error(ErrorCode::InvalidArgument, "zero denominator");
  if (den < 0) {
    num = -num;
    den = -den;
  }
  const auto g = std::gcd(num < 0 ? -num : num, den);
  return g == 0 ? Rational{0, 1} : Rational{num / g, den / g};
}

std::string_view to_string(ShapeLabel label) {
  switch (label) {
    case ShapeLabel::Rectangle: return "rectangle";
    case ShapeLabel::Square: return "square";
    case ShapeLabel::Line: return "line";
    case ShapeLabel::Plus: return "plus";
    case ShapeLabel::LShape: return "L-shape";
    case ShapeLabel::Irregular: return "irregular";
  }
  return "irregular";
}

Color GridObject::dominant_color() const noexcept {
  int best = 0;
  for (int c = 1; c < kNumColors; ++c) {
    if (color_histogram[static_cast<std::size_t>(c)] >
        color_histogram[static_cast<std::size_t>(best)]) {
      best = c;
    }
  }
  return static_cast<Color>(best);
}

Color find_background(const Grid& g) {
  std::array<int, kNumColors> counts{};
  for (Color c : g.cells()) ++counts[c];
  // max_element returns the first maximum, i.e. the lowest code on ties.
  return static_cast<Color>(std::max_element(counts.begin(), counts.end()) - counts.begin());
}

std::vector<std::vector<Coord>> connected_components(const Grid& g, Color bg) {
  const int h = g.height();
  const int w = g.width();
  std::vector<char> seen(g.size(), 0);
  std::vector<std::vector<Coord>> components;
  std::deque<Coord> queue;

  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      const auto idx = static_cast<std::size_t>(y * w + x);
      if (seen[idx] || g.at(y, x) == bg) continue;
      std::vector<Coord> comp;
      seen[idx] = 1;
      queue.push_back({y, x});
      while (!queue.empty()) {
        const Coord cur = queue.front();
        queue.pop_front();
        comp.push_back(cur);
        for (int dy = -1; dy <= 1; ++dy) {
          for (int dx = -1; dx <= 1; ++dx) {
            const int ny = cur.y + dy;
            const int nx = cur.x + dx;
            if ((dy == 0 && dx == 0) || !g.contains(ny, nx)) continue;
            const auto nidx = static_cast<std::size_t>(ny * w + nx);
            if (seen[nidx] || g.at(ny, nx) == bg) continue;
            seen[nidx] = 1;
            queue.push_back({ny, nx});
          }
        }
      }
      components.push_back(std::move(comp));
    }
  }
  return components;
}

std::vector<Cavity> detect_cavities(std::span<const Coord> /*obj_pixels*/, const BoundingBox& bbox,
                                    const Grid& g, Color bg) {
  const int bh = bbox.height();
  const int bw = bbox.width();
  std::vector<Cavity> cavities;
  if (bh < 3 || bw < 3) return cavities;

  // 0 = unvisited, 1 = visited
  std::vector<char> visited(static_cast<std::size_t>(bh * bw), 0);
  auto local = [&](int y, int x) {
    return static_cast<std::size_t>((y - bbox.y_min) * bw + (x - bbox.x_min));
  };
  constexpr std::array<Coord, 4> kSteps{{{-1, 0}, {1, 0}, {0, -1}, {0, 1}}};

  std::vector<Coord> region;
  std::deque<Coord> queue;
  for (int y = bbox.y_min + 1; y < bbox.y_max; ++y) {
    for (int x = bbox.x_min + 1; x < bbox.x_max; ++x) {
      if (visited[local(y, x)] || g.at(y, x) != bg) continue;
      region.clear();
      bool escapes = false;
      visited[local(y, x)] = 1;
      queue.push_back({y, x});
      while (!queue.empty()) {
        const Coord cur = queue.front();
        queue.pop_front();
        region.push_back(cur);
        if (bbox.on_boundary(cur)) escapes = true;
        for (const auto& s : kSteps) {
          const Coord n{cur.y + s.y, cur.x + s.x};
          if (!bbox.contains(n) || visited[local(n.y, n.x)] || g.at(n) != bg) continue;
          visited[local(n.y, n.x)] = 1;
          queue.push_back(n);
        }
      }
      if (!escapes) {
        std::sort(region.begin(), region.end());
        cavities.push_back(Cavity{region});
      }
    }
  }
  return cavities;
}

ShapeLabel classify_shape(std::span<const Coord> canonical_shape, int height, int width) {
  const auto n = canonical_shape.size();
  const auto area = static_cast<std::size_t>(height) * static_cast<std::size_t>(width);
  if (n == area) {
    if (height == width) return ShapeLabel::Square;
    if (height == 1 || width == 1) return ShapeLabel::Line;
    return ShapeLabel::Rectangle;
  }
  std::vector<char> mask(area, 0);
  for (const auto& c : canonical_shape) mask[static_cast<std::size_t>(c.y * width + c.x)] = 1;
  auto has = [&](int y, int x) { return mask[static_cast<std::size_t>(y * width + x)] != 0; };

  if (height == width && height >= 3 && height % 2 == 1 &&
      n == static_cast<std::size_t>(2 * height - 1)) {
    const int c = height / 2;
    bool plus = true;
    for (int i = 0; i < height && plus; ++i) plus = has(c, i) && has(i, c);
    if (plus) return ShapeLabel::Plus;
  }

  if (height >= 2 && width >= 2 && n == static_cast<std::size_t>(height + width - 1)) {
    for (int col : {0, width - 1}) {
      for (int row : {0, height - 1}) {
        bool ok = true;
        for (int y = 0; y < height && ok; ++y) ok = has(y, col);
        for (int x = 0; x < width && ok; ++x) ok = has(row, x);
        if (ok) return ShapeLabel::LShape;
      }
    }
  }
  return ShapeLabel::Irregular;
}

GridObject compute_features(std::span<const Coord> pixels, const Grid& g, Color bg,
                            int object_id) {
  GridObject obj;
  obj.object_id = object_id;
  std::vector<Coord> sorted(pixels.begin(), pixels.end());
  std::sort(sorted.begin(), sorted.end());

  obj.bbox = {sorted.front().y, sorted.front().x, sorted.front().y, sorted.front().x};
  std::int64_t sum_y = 0;
  std::int64_t sum_x = 0;
  obj.pixels.reserve(sorted.size());
  for (const auto& c : sorted) {
    obj.bbox.y_min = std::min(obj.bbox.y_min, c.y);
    obj.bbox.x_min = std::min(obj.bbox.x_min, c.x);
    obj.bbox.y_max = std::max(obj.bbox.y_max, c.y);
    obj.bbox.x_max = std::max(obj.bbox.x_max, c.x);
    sum_y += c.y;
    sum_x += c.x;
    const Color color = g.at(c);
    ++obj.color_histogram[color];
    obj.pixels.push_back({c, color});
  }
  const auto n = static_cast<std::int64_t>(sorted.size());
  obj.centroid_y = Rational::of(sum_y, n);
  obj.centroid_x = Rational::of(sum_x, n);

  obj.canonical_shape.reserve(sorted.size());
  for (const auto& c : sorted) obj.canonical_shape.push_back({c.y - obj.bbox.y_min, c.x - obj.bbox.x_min});
  obj.cavities = detect_cavities(sorted, obj.bbox, g, bg);
  obj.shape = classify_shape(obj.canonical_shape, obj.height(), obj.width());
  return obj;
}

SceneGraph abstract_scene(const Grid& g) {
  SceneGraph scene;
  scene.height = g.height();
  scene.width = g.width();
  scene.background = find_background(g);
  const auto components = connected_components(g, scene.background);
  scene.objects.reserve(components.size());
  int next_id = 0;
  for (const auto& comp : components) {
    scene.objects.push_back(compute_features(comp, g, scene.background, next_id++));
  }
  return scene;
}

Grid render(const SceneGraph& scene, int height, int width) {
  Grid out(height, width, scene.background);
  for (const auto& obj : scene.objects) {
    for (const auto& p : obj.pixels) {
      if (!out.contains(p.pos)) {
        throw Error(ErrorCode::PixelOutOfBounds,
                    "object " + std::to_string(obj.object_id) + " pixel (" +
                        std::to_string(p.pos.y) + "," + std::to_string(p.pos.x) + ")");
      }
      out.set(p.pos, p.color);
    }
  }
  return out;
}

nlohmann::json scene_to_json(const SceneGraph& scene) {
  using Json = nlohmann::json;
  Json objects = Json::array();
  for (const auto& obj : scene.objects) {
    Json shape = Json::array();
    for (const auto& c : obj.canonical_shape) shape.push_back({c.y, c.x});
    Json cavities = Json::array();
    for (const auto& cav : obj.cavities) {
      Json cells = Json::array();
      for (const auto& c : cav.pixels) cells.push_back({c.y, c.x});
      cavities.push_back(std::move(cells));
    }
    objects.push_back({
        {"id", obj.object_id},
        {"color_histogram", obj.color_histogram},
        {"bbox", {obj.bbox.y_min, obj.bbox.x_min, obj.bbox.y_max, obj.bbox.x_max}},
        {"size", obj.size()},
        {"centroid", {obj.centroid_y.value(), obj.centroid_x.value()}},
        {"canonical_shape", std::move(shape)},
        {"cavities", std::move(cavities)},
        {"shape", std::string(to_string(obj.shape))},
    });
  }
  return Json{{"background", scene.background},
              {"height", scene.height},
              {"width", scene.width},
              {"objects", std::move(objects)}};
}

}  // namespace arc
