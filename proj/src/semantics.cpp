#include "arc/semantics.hpp"

#include "arc/error.hpp"
#include "arc/patterns.hpp"

#include <algorithm>
#include <array>
#include <functional>
#include <set>

namespace arc {
namespace {

namespace p = pattern;

using ApplyFn = void (*)(struct StepContext&);

struct SemanticsEntry {
  PatternSemantics semantics;
  ApplyFn apply;
};

/// Mutable state of one step: the original grid is read for obstacle tests,
/// the canvas receives paint (last writer wins).
struct StepContext {
  const PatternInstance& inst;
  const PatternSemantics& semantics;
  const SceneGraph& scene;
  const Grid& original;
  Grid canvas;
  std::vector<const GridObject*> sources;
  Color paint = 0;
  std::vector<Coord> walk;  // scratch buffer for straight walks

  Color bg() const { return scene.background; }
  bool is_bg(int y, int x) const { return original.at(y, x) == scene.background; }

  const std::string& param(std::string_view name) const {
    for (const auto& sp : semantics.parameters) {
      if (sp.name != name) continue;
      auto it = inst.params.find(sp.name);
      if (it == inst.params.end()) return sp.executable_values.front();
      return it->second;
    }
    throw Error(ErrorCode::SemanticsViolation, "no semantic parameter " + std::string(name));
  }

  /// Paints only cells that were background in the original grid.
  void paint_bg(int y, int x, Color color) {
    if (is_bg(y, x)) canvas.set(y, x, color);
  }
};

struct RowSpan {
  int lo = -1;
  int hi = -1;
  bool present() const { return lo >= 0; }
};

std::vector<RowSpan> row_spans(const GridObject& obj, int height) {
  std::vector<RowSpan> spans(static_cast<std::size_t>(height));
  for (const auto& px : obj.pixels) {
    auto& s = spans[static_cast<std::size_t>(px.pos.y)];
    if (!s.present()) s = {px.pos.x, px.pos.x};
    s.lo = std::min(s.lo, px.pos.x);
    s.hi = std::max(s.hi, px.pos.x);
  }
  return spans;
}

std::vector<RowSpan> col_spans(const GridObject& obj, int width) {
  std::vector<RowSpan> spans(static_cast<std::size_t>(width));
  for (const auto& px : obj.pixels) {
    auto& s = spans[static_cast<std::size_t>(px.pos.x)];
    if (!s.present()) s = {px.pos.y, px.pos.y};
    s.lo = std::min(s.lo, px.pos.y);
    s.hi = std::max(s.hi, px.pos.y);
  }
  return spans;
}

std::vector<char> pixel_mask(const GridObject& obj, const Grid& g) {
  std::vector<char> mask(g.size(), 0);
  for (const auto& px : obj.pixels) {
    mask[static_cast<std::size_t>(px.pos.y * g.width() + px.pos.x)] = 1;
  }
  return mask;
}

// Walks from `start` (exclusive) along (dy, dx) and paints according to the
// stop rule shared by the straight fills:
//   "another object" / "object obstruction" / "object": paint background
//       cells until the first non-background cell;
//   "grid boundary" / "hit grid boundary" / "boundary": paint background
//       cells up to the edge, passing behind other objects;
//   "specific color": paint the background cells between start and the
//       first cell of `stop_color`; nothing if no such cell exists.
// `fill` < 0 takes the color of the first non-background cell met.
enum class StopRule { FirstObstacle, Boundary, SpecificColor };

void walk_and_paint(StepContext& ctx, Coord start, int dy, int dx, StopRule rule, int fill,
                    Color stop_color, const std::vector<char>* transparent = nullptr) {
  auto& cells = ctx.walk;
  cells.clear();
  int hit = -1;
  bool found_stop = false;
  const int w = ctx.original.width();
  for (Coord c{start.y + dy, start.x + dx}; ctx.original.contains(c); c = {c.y + dy, c.x + dx}) {
    if (transparent != nullptr && (*transparent)[static_cast<std::size_t>(c.y * w + c.x)]) {
      continue;
    }
    const Color v = ctx.original.at(c);
    if (v == ctx.bg()) {
      cells.push_back(c);
      continue;
    }
    if (hit < 0) hit = v;
    if (rule == StopRule::FirstObstacle) break;
    if (rule == StopRule::SpecificColor && v == stop_color) {
      found_stop = true;
      break;
    }
  }
  if (rule == StopRule::SpecificColor && !found_stop) return;
  const int color = fill >= 0 ? fill : hit;
  if (color < 0) return;
  for (const auto& c : cells) ctx.canvas.set(c, static_cast<Color>(color));
}

StopRule stop_rule(const std::string& value) {
  if (value == "another object" || value == "object obstruction" || value == "object") {
    return StopRule::FirstObstacle;
  }
  if (value == "specific color") return StopRule::SpecificColor;
  return StopRule::Boundary;
}

// ---------------------------------------------------------------------------
// Pattern bodies. Each reads ctx.sources (already resolved) and paints into
// ctx.canvas. Pinned interpretations are listed in docs/semantics.md.

void apply_horizontal_fill(StepContext& ctx) {
  const int dir = ctx.param("column_index") == "right of an object" ? 1 : -1;
  const StopRule rule = stop_rule(ctx.param("stop_condition"));
  const bool from_source = ctx.param("fill_color") == "based on source";
  for (const auto* obj : ctx.sources) {
    const Color src = obj->dominant_color();
    const auto spans = row_spans(*obj, ctx.original.height());
    for (int y = 0; y < ctx.original.height(); ++y) {
      const auto& s = spans[static_cast<std::size_t>(y)];
      if (!s.present()) continue;
      walk_and_paint(ctx, {y, dir > 0 ? s.hi : s.lo}, 0, dir, rule, from_source ? src : -1, src);
    }
  }
}

void apply_vertical_fill(StepContext& ctx) {
  const int dir = ctx.param("row_index") == "below an object" ? 1 : -1;
  const StopRule rule = stop_rule(ctx.param("stop_condition"));
  for (const auto* obj : ctx.sources) {
    const Color src = obj->dominant_color();
    const auto spans = col_spans(*obj, ctx.original.width());
    for (int x = 0; x < ctx.original.width(); ++x) {
      const auto& s = spans[static_cast<std::size_t>(x)];
      if (!s.present()) continue;
      walk_and_paint(ctx, {dir > 0 ? s.hi : s.lo, x}, dir, 0, rule, src, src);
    }
  }
}

void apply_connecting_bridges(StepContext& ctx) {
  const bool from_start = ctx.param("bridge_color") == "based on bridge starting point";
  const bool diagonal = ctx.param("path_direction") == "diagonal";
  const int h = ctx.original.height();
  const int w = ctx.original.width();

  auto paint_if_clear = [&](const std::vector<Coord>& cells, Color color) {
    if (cells.empty()) return;
    for (const auto& c : cells) {
      if (!ctx.is_bg(c.y, c.x)) return;
    }
    for (const auto& c : cells) ctx.canvas.set(c, color);
  };

  for (std::size_t i = 0; i < ctx.sources.size(); ++i) {
    for (std::size_t j = i + 1; j < ctx.sources.size(); ++j) {
      const auto& a = *ctx.sources[i];
      const auto& b = *ctx.sources[j];
      const Color color = from_start ? a.dominant_color() : b.dominant_color();
      if (!diagonal) {
        const auto ra = row_spans(a, h);
        const auto rb = row_spans(b, h);
        for (int y = 0; y < h; ++y) {
          const auto& sa = ra[static_cast<std::size_t>(y)];
          const auto& sb = rb[static_cast<std::size_t>(y)];
          if (!sa.present() || !sb.present()) continue;
          std::vector<Coord> cells;
          if (sa.hi < sb.lo) {
            for (int x = sa.hi + 1; x < sb.lo; ++x) cells.push_back({y, x});
          } else if (sb.hi < sa.lo) {
            for (int x = sb.hi + 1; x < sa.lo; ++x) cells.push_back({y, x});
          }
          paint_if_clear(cells, color);
        }
        const auto ca = col_spans(a, w);
        const auto cb = col_spans(b, w);
        for (int x = 0; x < w; ++x) {
          const auto& sa = ca[static_cast<std::size_t>(x)];
          const auto& sb = cb[static_cast<std::size_t>(x)];
          if (!sa.present() || !sb.present()) continue;
          std::vector<Coord> cells;
          if (sa.hi < sb.lo) {
            for (int y = sa.hi + 1; y < sb.lo; ++y) cells.push_back({y, x});
          } else if (sb.hi < sa.lo) {
            for (int y = sb.hi + 1; y < sa.lo; ++y) cells.push_back({y, x});
          }
          paint_if_clear(cells, color);
        }
      } else {
        for (const auto& pa : a.pixels) {
          for (const auto& pb : b.pixels) {
            const int dy = pb.pos.y - pa.pos.y;
            const int dx = pb.pos.x - pa.pos.x;
            if (std::abs(dy) != std::abs(dx) || std::abs(dy) < 2) continue;
            const int sy = dy > 0 ? 1 : -1;
            const int sx = dx > 0 ? 1 : -1;
            std::vector<Coord> cells;
            for (int k = 1; k < std::abs(dy); ++k) cells.push_back({pa.pos.y + k * sy, pa.pos.x + k * sx});
            paint_if_clear(cells, color);
          }
        }
      }
    }
  }
}

void apply_boundary_attachment_fill(StepContext& ctx) {
  const bool to_rectangle = ctx.param("fill_logic") == "fits in space to form rectangle";
  const std::string& direction = ctx.param("attachment_direction");
  for (const auto* obj : ctx.sources) {
    const Color color = obj->dominant_color();
    const auto& bb = obj->bbox;
    const auto mask = pixel_mask(*obj, ctx.original);
    auto own = [&](int y, int x) {
      return mask[static_cast<std::size_t>(y * ctx.original.width() + x)] != 0;
    };
    for (int y = bb.y_min; y <= bb.y_max; ++y) {
      for (int x = bb.x_min; x <= bb.x_max; ++x) {
        if (!ctx.is_bg(y, x)) continue;
        bool fill = to_rectangle;
        if (!to_rectangle) {
          // A cell is laid on the object when an object pixel supports it
          // from the attachment side within the bounding box.
          if (direction == "bottom") {
            for (int yy = y + 1; yy <= bb.y_max && !fill; ++yy) fill = own(yy, x);
          } else if (direction == "top") {
            for (int yy = y - 1; yy >= bb.y_min && !fill; --yy) fill = own(yy, x);
          } else if (direction == "right") {
            for (int xx = x + 1; xx <= bb.x_max && !fill; ++xx) fill = own(y, xx);
          } else {
            for (int xx = x - 1; xx >= bb.x_min && !fill; --xx) fill = own(y, xx);
          }
        }
        if (fill) ctx.canvas.set(y, x, color);
      }
    }
  }
}

void apply_diagonal_fill(StepContext& ctx) {
  const std::string& direction = ctx.param("direction");
  const int dy = (direction == "bottom-right" || direction == "bottom-left") ? 1 : -1;
  const int dx = (direction == "bottom-right" || direction == "top-right") ? 1 : -1;
  const StopRule rule = stop_rule(ctx.param("stop_condition"));
  for (const auto* obj : ctx.sources) {
    // Corner = pixel furthest along the direction; first in scan order on ties.
    const Pixel* corner = &obj->pixels.front();
    for (const auto& px : obj->pixels) {
      if (dy * px.pos.y + dx * px.pos.x > dy * corner->pos.y + dx * corner->pos.x) corner = &px;
    }
    const Color src = obj->dominant_color();
    walk_and_paint(ctx, corner->pos, dy, dx, rule, src, src);
  }
}

bool matches_object_type(const GridObject& obj, const std::string& type) {
  if (type == "plus") return obj.shape == ShapeLabel::Plus;
  if (type == "irregular") return obj.shape == ShapeLabel::Irregular;
  if (type == "cell") return obj.size() == 1;
  if (type == "rectangle") return obj.is_filled_box() && obj.height() >= 2 && obj.width() >= 2;
  if (type == "horizontal bar") return obj.is_filled_box() && obj.height() == 1 && obj.width() >= 2;
  return false;
}

void apply_find_and_color(StepContext& ctx) {
  const std::string& type = ctx.param("object_type");
  const bool alternating = ctx.param("new_color") == "alternating pattern";
  int matched = 0;
  for (const auto& obj : ctx.scene.objects) {
    if (!matches_object_type(obj, type)) continue;
    const bool recolor = !alternating || matched % 2 == 0;
    ++matched;
    if (!recolor) continue;
    for (const auto& px : obj.pixels) ctx.canvas.set(px.pos, ctx.paint);
  }
}

void apply_remove_objects(StepContext& ctx) {
  for (const auto* obj : ctx.sources) {
    for (const auto& px : obj->pixels) ctx.canvas.set(px.pos, ctx.bg());
  }
}

void apply_alternating_fill(StepContext& ctx) {
  const int period = ctx.param("colors") == "[\"A\", \"B\"]" ? 2 : 3;
  const std::string& type = ctx.param("pattern_type");
  for (const auto* obj : ctx.sources) {
    for (const auto& px : obj->pixels) {
      const int dy = px.pos.y - obj->bbox.y_min;
      const int dx = px.pos.x - obj->bbox.x_min;
      const int idx = type == "checkerboard" ? dy + dx : (type == "stripe_vertical" ? dx : dy);
      // Sequence position period-1 takes color B, the rest keep color A.
      if (idx % period == period - 1) ctx.canvas.set(px.pos, ctx.paint);
    }
  }
}

void apply_cavity_fill(StepContext& ctx) {
  const bool arbitrary = ctx.param("fill_color") == "arbitrary";
  for (const auto* obj : ctx.sources) {
    const Color color = arbitrary ? ctx.paint : obj->dominant_color();
    for (const auto& cav : obj->cavities) {
      for (const auto& c : cav.pixels) ctx.canvas.set(c, color);
    }
  }
}

void apply_add_replace(StepContext& ctx) {
  const std::string& replacement = ctx.param("add_replacement_object");
  const bool add_boundary = ctx.param("additional_change") == "add a boundary to new object";
  for (const auto* obj : ctx.sources) {
    const Color color = obj->dominant_color();
    for (const auto& px : obj->pixels) ctx.canvas.set(px.pos, ctx.bg());
    const auto& bb = obj->bbox;
    const int cy = bb.y_min + (bb.height() - 1) / 2;
    const int cx = bb.x_min + (bb.width() - 1) / 2;
    BoundingBox drawn = bb;
    if (replacement == "horizontal bar") {
      drawn = {cy, bb.x_min, cy, bb.x_max};
    } else if (replacement == "vertical bar") {
      drawn = {bb.y_min, cx, bb.y_max, cx};
    } else if (replacement == "cell") {
      drawn = {cy, cx, cy, cx};
    }
    for (int y = drawn.y_min; y <= drawn.y_max; ++y) {
      for (int x = drawn.x_min; x <= drawn.x_max; ++x) ctx.canvas.set(y, x, color);
    }
    if (add_boundary) {
      for (int y = drawn.y_min - 1; y <= drawn.y_max + 1; ++y) {
        for (int x = drawn.x_min - 1; x <= drawn.x_max + 1; ++x) {
          if (drawn.contains({y, x}) || !ctx.canvas.contains(y, x)) continue;
          if (ctx.canvas.at(y, x) == ctx.bg()) ctx.canvas.set(y, x, ctx.paint);
        }
      }
    }
  }
}

// Shifts an object on the canvas by (dy, dx) per step until the next step
// would leave the grid or overlap a non-background cell. max_steps < 0 means
// unbounded.
void slide(StepContext& ctx, const GridObject& obj, int dy, int dx, int max_steps) {
  for (const auto& px : obj.pixels) ctx.canvas.set(px.pos, ctx.bg());
  int steps = 0;
  while (max_steps < 0 || steps < max_steps) {
    bool free = true;
    for (const auto& px : obj.pixels) {
      const Coord n{px.pos.y + (steps + 1) * dy, px.pos.x + (steps + 1) * dx};
      if (!ctx.canvas.contains(n) || ctx.canvas.at(n) != ctx.bg()) {
        free = false;
        break;
      }
    }
    if (!free) break;
    ++steps;
  }
  for (const auto& px : obj.pixels) {
    ctx.canvas.set(px.pos.y + steps * dy, px.pos.x + steps * dx, px.color);
  }
}

void apply_falling_down(StepContext& ctx) {
  auto order = ctx.sources;
  std::stable_sort(order.begin(), order.end(), [](const GridObject* a, const GridObject* b) {
    return a->bbox.y_max > b->bbox.y_max;
  });
  for (const auto* obj : order) slide(ctx, *obj, 1, 0, -1);
}

void apply_translate_to_goal(StepContext& ctx) {
  const bool to_largest = ctx.param("goal_location_or_object") == "square";
  const bool stop_on_goal = ctx.param("step_count_or_speed") == "stop on goal";

  std::set<int> movers;
  for (const auto* obj : ctx.sources) movers.insert(obj->object_id);

  const GridObject* largest = nullptr;
  for (const auto& obj : ctx.scene.objects) {
    if (movers.contains(obj.object_id)) continue;
    if (largest == nullptr || obj.size() > largest->size()) largest = &obj;
  }

  for (const auto* obj : ctx.sources) {
    const GridObject* goal = largest;
    if (!to_largest) {
      goal = nullptr;
      std::int64_t best = 0;
      for (const auto& other : ctx.scene.objects) {
        if (other.object_id == obj->object_id || other.dominant_color() != obj->dominant_color()) {
          continue;
        }
        // Compare centroid Manhattan distances exactly: scale by both
        // denominators.
        const auto dist = [&](const GridObject& o) {
          const auto ny = o.centroid_y.num * obj->centroid_y.den - obj->centroid_y.num * o.centroid_y.den;
          const auto nx = o.centroid_x.num * obj->centroid_x.den - obj->centroid_x.num * o.centroid_x.den;
          const auto dy = std::abs(ny) * o.centroid_x.den * obj->centroid_x.den;
          const auto dx = std::abs(nx) * o.centroid_y.den * obj->centroid_y.den;
          return dy + dx;  // common denominator o.den_y*obj.den_y*o.den_x*obj.den_x
        };
        const auto d = dist(other);
        if (goal == nullptr || d < best) {
          goal = &other;
          best = d;
        }
      }
    }
    if (goal == nullptr) continue;

    const auto& m = obj->bbox;
    const auto& g = goal->bbox;
    int dy = 0;
    int dx = 0;
    int gap = 0;
    if (m.y_min <= g.y_max && g.y_min <= m.y_max) {
      if (m.x_max < g.x_min) {
        dx = 1;
        gap = g.x_min - m.x_max - 1;
      } else if (g.x_max < m.x_min) {
        dx = -1;
        gap = m.x_min - g.x_max - 1;
      }
    } else if (m.x_min <= g.x_max && g.x_min <= m.x_max) {
      if (m.y_max < g.y_min) {
        dy = 1;
        gap = g.y_min - m.y_max - 1;
      } else if (g.y_max < m.y_min) {
        dy = -1;
        gap = m.y_min - g.y_max - 1;
      }
    }
    if (dy == 0 && dx == 0) continue;
    if (stop_on_goal) {
      for (const auto& px : obj->pixels) ctx.canvas.set(px.pos, ctx.bg());
      for (const auto& px : obj->pixels) {
        ctx.canvas.set(px.pos.y + gap * dy, px.pos.x + gap * dx, px.color);
      }
    } else {
      slide(ctx, *obj, dy, dx, -1);
    }
  }
}

void apply_symmetry(StepContext& ctx) {
  const std::string& type = ctx.param("symmetry_type");
  const bool mirror = ctx.param("copy_mode") == "mirror";
  const int h = ctx.original.height();
  const int w = ctx.original.width();

  std::vector<std::function<Coord(Coord)>> maps;
  if (type == "horizontal") {
    if (mirror) {
      maps.emplace_back([w](Coord c) { return Coord{c.y, w - 1 - c.x}; });
    } else {
      const int shift = (w + 1) / 2;
      maps.emplace_back([shift](Coord c) { return Coord{c.y, c.x + shift}; });
    }
  } else if (type == "vertical") {
    if (mirror) {
      maps.emplace_back([h](Coord c) { return Coord{h - 1 - c.y, c.x}; });
    } else {
      const int shift = (h + 1) / 2;
      maps.emplace_back([shift](Coord c) { return Coord{c.y + shift, c.x}; });
    }
  } else if (mirror) {
    maps.emplace_back([h, w](Coord c) { return Coord{h - 1 - c.y, w - 1 - c.x}; });
  } else {
    if (h != w) {
      throw Error(ErrorCode::SemanticsViolation, "quarter-turn duplication needs a square grid");
    }
    const int n = h;
    maps.emplace_back([n](Coord c) { return Coord{c.x, n - 1 - c.y}; });
    maps.emplace_back([n](Coord c) { return Coord{n - 1 - c.y, n - 1 - c.x}; });
    maps.emplace_back([n](Coord c) { return Coord{n - 1 - c.x, c.y}; });
  }

  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      const Color v = ctx.original.at(y, x);
      if (v == ctx.bg()) continue;
      // Duplication copies the leading half only.
      if (!mirror && type == "horizontal" && x >= w / 2) continue;
      if (!mirror && type == "vertical" && y >= h / 2) continue;
      for (const auto& f : maps) {
        const Coord t = f({y, x});
        if (ctx.original.contains(t)) ctx.paint_bg(t.y, t.x, v);
      }
    }
  }
}

void apply_ray_cast(StepContext& ctx) {
  const bool whole_object = ctx.param("ray_source") == "object";
  const std::string& direction = ctx.param("direction");
  const StopRule rule = stop_rule(ctx.param("stop_condition"));
  std::vector<Coord> dirs;
  if (direction == "horizontal") {
    dirs = {{0, 1}, {0, -1}};
  } else if (direction == "vertical") {
    dirs = {{1, 0}, {-1, 0}};
  } else {
    dirs = {{-1, -1}, {-1, 1}, {1, -1}, {1, 1}};
  }
  for (const auto* obj : ctx.sources) {
    const auto mask = pixel_mask(*obj, ctx.original);
    const std::size_t n = whole_object ? obj->pixels.size() : 1;
    for (std::size_t i = 0; i < n; ++i) {
      const Pixel& start = obj->pixels[i];
      for (const auto& d : dirs) {
        walk_and_paint(ctx, start.pos, d.y, d.x, rule, start.color, start.color, &mask);
      }
    }
  }
}

// ---------------------------------------------------------------------------

const std::vector<SemanticsEntry>& table() {
  static const std::vector<SemanticsEntry> entries = [] {
    std::vector<SemanticsEntry> t;
    auto add = [&t](std::string_view name, std::vector<SemanticParameter> params,
                    bool needs_source, ApplyFn fn) {
      t.push_back({PatternSemantics{name, std::move(params), needs_source}, fn});
    };
    add(p::kHorizontalFill,
        {{"column_index", {"left of an object", "right of an object"}},
         {"fill_color", {"based on source", "based on some different objects"}},
         {"stop_condition", {"another object", "grid boundary", "specific color"}}},
        true, apply_horizontal_fill);
    add(p::kVerticalFill,
        {{"row_index", {"top of an object", "below an object"}},
         {"fill_color", {"based on source color"}},
         {"stop_condition", {"another object", "grid boundary", "specific color"}}},
        true, apply_vertical_fill);
    add(p::kConnectingBridges,
        {{"bridge_color", {"based on bridge starting point", "based on bridge ending point"}},
         {"connection_shape", {"line"}},
         {"path_direction", {"orthogonal", "diagonal"}}},
        true, apply_connecting_bridges);
    add(p::kBoundaryAttachmentFill,
        {{"attachment_direction", {"left", "right", "top", "bottom"}},
         {"fill_logic", {"fits in space to form rectangle", "gets laid on the object"}}},
        true, apply_boundary_attachment_fill);
    add(p::kDiagonalFill,
        {{"direction", {"bottom-right", "top-left", "top-right", "bottom-left"}},
         {"fill_color", {"same as source"}},
         {"stop_condition", {"object obstruction", "hit grid boundary"}}},
        true, apply_diagonal_fill);
    add(p::kFindAndColor,
        {{"object_type", {"plus", "rectangle", "irregular", "cell", "horizontal bar"}},
         {"new_color", {"constant throughout", "alternating pattern"}}},
        false, apply_find_and_color);
    add(p::kRemoveObjects, {{"removal_method", {"replace with background"}}}, true,
        apply_remove_objects);
    add(p::kAlternatingFill,
        {{"colors", {"[\"A\", \"B\"]", "[\"A\", \"A\", \"B\"]"}},
         {"pattern_type", {"checkerboard", "stripe_vertical", "stripe_horizontal"}}},
        true, apply_alternating_fill);
    add(p::kCavityFill, {{"fill_color", {"based on material already present", "arbitrary"}}},
        true, apply_cavity_fill);
    add(p::kAddReplace,
        {{"add_replacement_object", {"horizontal bar", "vertical bar", "rectangle", "cell"}},
         {"additional_change", {"do nothing", "add a boundary to new object"}}},
        true, apply_add_replace);
    add(p::kFallingDown, {{"gravity_direction", {"downward"}}}, true, apply_falling_down);
    add(p::kTranslateToGoal,
        {{"goal_location_or_object", {"square", "matching pattern"}},
         {"pathfinding_method", {"straight-line"}},
         {"step_count_or_speed", {"stop on obstacle", "stop on goal"}}},
        true, apply_translate_to_goal);
    add(p::kSymmetry,
        {{"symmetry_type", {"horizontal", "vertical", "rotational"}},
         {"copy_mode", {"mirror", "duplicate"}}},
        false, apply_symmetry);
    add(p::kRayCast,
        {{"ray_source", {"starting cell", "object"}},
         {"direction", {"horizontal", "vertical", "diagonal"}},
         {"shape", {"line"}},
         {"stop_condition", {"object", "boundary"}},
         {"mark_color", {"same as starting point"}}},
        true, apply_ray_cast);
    return t;
  }();
  return entries;
}

const SemanticsEntry* find_entry(std::string_view pattern) {
  for (const auto& e : table()) {
    if (e.semantics.name == pattern) return &e;
  }
  return nullptr;
}

std::string_view param_or_default(const PatternSemantics& sem, const Params& params,
                                  std::string_view name) {
  for (const auto& sp : sem.parameters) {
    if (sp.name != name) continue;
    auto it = params.find(sp.name);
    return it == params.end() ? std::string_view(sp.executable_values.front())
                              : std::string_view(it->second);
  }
  return {};
}

}  // namespace

const PatternSemantics* find_semantics(std::string_view pattern) {
  const auto* e = find_entry(pattern);
  return e == nullptr ? nullptr : &e->semantics;
}

bool needs_paint(std::string_view pattern, const Params& params) {
  const auto* sem = find_semantics(pattern);
  if (sem == nullptr) return false;
  if (pattern == p::kFindAndColor || pattern == p::kAlternatingFill) return true;
  if (pattern == p::kCavityFill) return param_or_default(*sem, params, "fill_color") == "arbitrary";
  if (pattern == p::kAddReplace) {
    return param_or_default(*sem, params, "additional_change") == "add a boundary to new object";
  }
  return false;
}

std::vector<std::string_view> required_roles(const PatternInstance& inst) {
  std::vector<std::string_view> roles;
  const auto* sem = find_semantics(inst.pattern);
  if (sem == nullptr) return roles;
  if (sem->needs_source) roles.push_back(role::kSource);
  if (needs_paint(inst.pattern, inst.params)) roles.push_back(role::kPaint);
  return roles;
}

std::vector<Params> semantic_param_space(std::string_view pattern) {
  const auto* sem = find_semantics(pattern);
  if (sem == nullptr) return {};
  std::vector<Params> space{Params{}};
  for (const auto& sp : sem->parameters) {
    if (sp.executable_values.size() < 2) continue;
    std::vector<Params> next;
    next.reserve(space.size() * sp.executable_values.size());
    for (const auto& base : space) {
      for (const auto& v : sp.executable_values) {
        Params m = base;
        m[sp.name] = v;
        next.push_back(std::move(m));
      }
    }
    space = std::move(next);
  }
  // Drop parameters that cannot influence the result, then dedupe in order.
  std::vector<Params> out;
  for (auto& m : space) {
    if (pattern == p::kBoundaryAttachmentFill &&
        m["fill_logic"] == "fits in space to form rectangle") {
      m.erase("attachment_direction");
    }
    if (std::find(out.begin(), out.end(), m) == out.end()) out.push_back(std::move(m));
  }
  return out;
}

std::vector<Selector> selector_vocabulary(const SceneGraph& scene, bool include_ids) {
  std::vector<Selector> out;
  if (scene.objects.empty()) return out;
  out.push_back(Selector::all());
  std::array<bool, kNumColors> colors{};
  std::array<bool, 6> shapes{};
  for (const auto& obj : scene.objects) {
    colors[obj.dominant_color()] = true;
    shapes[static_cast<std::size_t>(obj.shape)] = true;
  }
  for (int c = 0; c < kNumColors; ++c) {
    if (colors[static_cast<std::size_t>(c)]) out.push_back(Selector::color(static_cast<Color>(c)));
  }
  for (int s = 0; s < 6; ++s) {
    if (shapes[static_cast<std::size_t>(s)]) out.push_back(Selector::shape(static_cast<ShapeLabel>(s)));
  }
  for (auto e : {Extremal::Leftmost, Extremal::Rightmost, Extremal::Topmost, Extremal::Bottommost}) {
    out.push_back(Selector::extremal(e));
  }
  out.push_back(Selector::size(SizeRank::Largest));
  out.push_back(Selector::size(SizeRank::Smallest));
  if (include_ids) {
    for (const auto& obj : scene.objects) out.push_back(Selector::id(obj.object_id));
  }
  return out;
}

std::vector<const GridObject*> resolve(const Selector& sel, const SceneGraph& scene) {
  std::vector<const GridObject*> out;
  auto pick = [&](auto better) {
    const GridObject* best = nullptr;
    for (const auto& obj : scene.objects) {
      if (best == nullptr || better(obj, *best)) best = &obj;
    }
    if (best != nullptr) out.push_back(best);
  };
  switch (sel.kind) {
    case SelectorKind::All:
      for (const auto& obj : scene.objects) out.push_back(&obj);
      break;
    case SelectorKind::Color:
      for (const auto& obj : scene.objects) {
        if (obj.dominant_color() == sel.value) out.push_back(&obj);
      }
      break;
    case SelectorKind::Shape:
      for (const auto& obj : scene.objects) {
        if (static_cast<int>(obj.shape) == sel.value) out.push_back(&obj);
      }
      break;
    case SelectorKind::Extremal:
      switch (static_cast<Extremal>(sel.value)) {
        case Extremal::Leftmost:
          pick([](const GridObject& a, const GridObject& b) { return a.bbox.x_min < b.bbox.x_min; });
          break;
        case Extremal::Rightmost:
          pick([](const GridObject& a, const GridObject& b) { return a.bbox.x_max > b.bbox.x_max; });
          break;
        case Extremal::Topmost:
          pick([](const GridObject& a, const GridObject& b) { return a.bbox.y_min < b.bbox.y_min; });
          break;
        case Extremal::Bottommost:
          pick([](const GridObject& a, const GridObject& b) { return a.bbox.y_max > b.bbox.y_max; });
          break;
      }
      break;
    case SelectorKind::Size:
      if (static_cast<SizeRank>(sel.value) == SizeRank::Largest) {
        pick([](const GridObject& a, const GridObject& b) { return a.size() > b.size(); });
      } else {
        pick([](const GridObject& a, const GridObject& b) { return a.size() < b.size(); });
      }
      break;
    case SelectorKind::Id:
      for (const auto& obj : scene.objects) {
        if (obj.object_id == sel.value) out.push_back(&obj);
      }
      break;
    case SelectorKind::Literal:
      throw Error(ErrorCode::BindingResolutionFailed, "literal does not select objects");
  }
  if (out.empty()) {
    throw Error(ErrorCode::BindingResolutionFailed, sel.to_string() + " matches no object");
  }
  return out;
}

Grid apply_step(const PatternInstance& inst, const SceneGraph& scene, const Grid& rendered) {
  const auto* schema = find_schema(inst.pattern);
  if (schema == nullptr) throw Error(ErrorCode::UnknownPattern, "\"" + inst.pattern + "\"");
  const auto* entry = find_entry(inst.pattern);
  if (entry == nullptr) {
    throw Error(ErrorCode::NotExecutable, inst.pattern + " is hint-only");
  }
  validate_instance(inst);
  for (const auto& sp : entry->semantics.parameters) {
    auto it = inst.params.find(sp.name);
    if (it == inst.params.end()) continue;
    if (std::find(sp.executable_values.begin(), sp.executable_values.end(), it->second) ==
        sp.executable_values.end()) {
      throw Error(ErrorCode::SemanticsViolation,
                  inst.pattern + "." + sp.name + " = \"" + it->second + "\" has no executable meaning");
    }
  }
  return apply_validated_step(inst, scene, rendered);
}

Grid apply_validated_step(const PatternInstance& inst, const SceneGraph& scene,
                          const Grid& rendered) {
  const auto* entry = find_entry(inst.pattern);
  if (entry == nullptr) throw Error(ErrorCode::NotExecutable, inst.pattern + " is hint-only");
  const auto& sem = entry->semantics;
  StepContext ctx{inst, sem, scene, rendered, rendered, {}, 0, {}};
  if (sem.needs_source) ctx.sources = resolve(inst.bindings.at(std::string(role::kSource)), scene);
  if (needs_paint(inst.pattern, inst.params)) {
    ctx.paint = static_cast<Color>(inst.bindings.at(std::string(role::kPaint)).value);
  }
  entry->apply(ctx);
  return std::move(ctx.canvas);
}

SceneGraph execute_step(const PatternInstance& inst, const SceneGraph& scene) {
  return abstract_scene(apply_step(inst, scene, render(scene)));
}

SceneGraph execute_program(const Program& p, const SceneGraph& scene) {
  if (p.steps.empty()) throw Error(ErrorCode::InvalidArgument, "program has no steps");
  SceneGraph current = scene;
  for (std::size_t i = 0; i < p.steps.size(); ++i) {
    try {
      current = execute_step(p.steps[i], current);
    } catch (const Error& e) {
      throw Error(e.code(), "step " + std::to_string(i) + ": " + e.what(), i);
    }
  }
  return current;
}

Grid run_program(const Program& p, const Grid& input) {
  if (p.steps.empty()) throw Error(ErrorCode::InvalidArgument, "program has no steps");
  Grid grid = input;
  for (std::size_t i = 0; i < p.steps.size(); ++i) {
    try {
      grid = apply_step(p.steps[i], abstract_scene(grid), grid);
    } catch (const Error& e) {
      throw Error(e.code(), "step " + std::to_string(i) + ": " + e.what(), i);
    }
  }
  return grid;
}

}  // namespace arc
