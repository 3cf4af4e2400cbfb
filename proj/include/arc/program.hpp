#pragma once

#include "arc/grid.hpp"
#include "arc/scene.hpp"

#include <nlohmann/json_fwd.hpp>

#include <compare>
#include <map>
#include <string>
#include <string_view>
#include <vector>

namespace arc {

enum class SelectorKind { All, Color, Shape, Extremal, Size, Id, Literal };
enum class Extremal { Leftmost, Rightmost, Topmost, Bottommost };
enum class SizeRank { Largest, Smallest };

/// Binding value for a role of a pattern instance. Object selectors resolve
/// to an ordered list of scene objects (the step applies to each match);
/// Literal carries a color constant.
///
/// Text form: "all", "color:3", "shape:rectangle", "extremal:leftmost",
/// "size:largest", "id:2", "literal:5".
struct Selector {
  SelectorKind kind = SelectorKind::All;
  int value = 0;

  static Selector all() { return {SelectorKind::All, 0}; }
  static Selector color(Color c) { return {SelectorKind::Color, c}; }
  static Selector shape(ShapeLabel s) { return {SelectorKind::Shape, static_cast<int>(s)}; }
  static Selector extremal(Extremal e) { return {SelectorKind::Extremal, static_cast<int>(e)}; }
  static Selector size(SizeRank r) { return {SelectorKind::Size, static_cast<int>(r)}; }
  static Selector id(int object_id) { return {SelectorKind::Id, object_id}; }
  static Selector literal(Color c) { return {SelectorKind::Literal, c}; }

  /// Throws Error(IllegalParameter) on unknown text.
  static Selector parse(std::string_view text);
  std::string to_string() const;

  bool selects_objects() const noexcept { return kind != SelectorKind::Literal; }

  friend auto operator<=>(const Selector&, const Selector&) = default;
};

using Params = std::map<std::string, std::string>;
using Bindings = std::map<std::string, Selector>;

namespace role {
inline constexpr std::string_view kSource = "source";
inline constexpr std::string_view kPaint = "paint";
}  // namespace role

/// One parameterized Unit Pattern. params may be partial: unspecified
/// parameters fall back to the documented default of the pattern.
struct PatternInstance {
  std::string pattern;
  Params params;
  Bindings bindings;

  friend bool operator==(const PatternInstance&, const PatternInstance&) = default;
};

/// Ordered composition; steps[0] runs first.
struct Program {
  std::vector<PatternInstance> steps;

  std::size_t depth() const noexcept { return steps.size(); }
  friend bool operator==(const Program&, const Program&) = default;
};

std::size_t program_depth(const Program& p) noexcept;

/// a's steps followed by b's.
Program concat(const Program& a, const Program& b);

/// Returns inst unchanged when the pattern exists, every parameter value is
/// in its enum, and every binding role the instance needs is present.
/// Errors: UnknownPattern, IllegalParameter, MissingBinding.
PatternInstance validate_instance(const PatternInstance& inst);

/// Validates each step; with require_executable, hint-only steps raise
/// NotExecutable tagged with the step index. Empty programs are rejected.
void validate_program(const Program& p, bool require_executable);

/// Stable identity: steps in order, params and bindings in sorted key order.
std::string canonical_id(const PatternInstance& inst);
std::string canonical_id(const Program& p);

nlohmann::json to_json(const PatternInstance& inst);
nlohmann::json to_json(const Program& p);
PatternInstance instance_from_json(const nlohmann::json& j);
Program program_from_json(const nlohmann::json& j);

}  // namespace arc
