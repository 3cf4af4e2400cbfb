#include "arc/patterns.hpp"

#include <algorithm>

namespace arc {
namespace {

std::vector<PatternSchema> build_registry() {
  namespace p = pattern;
  std::vector<PatternSchema> r;
  auto add = [&r](std::string_view name, std::string description,
                  std::vector<ParameterSpec> params, bool executable) {
    r.push_back({std::string(name), std::move(description), std::move(params), executable});
  };

  add(p::kHorizontalFill,
      "Extend or fill an object horizontally across contiguous empty or target cells.",
      {{"source_object", {"line", "square", "rectangle", "cavity"}},
       {"column_index", {"left of an object", "right of an object"}},
       {"fill_color", {"based on source", "based on some different objects"}},
       {"sequence", {"based on source width", "based on source height"}},
       {"stop_condition", {"another object", "grid boundary", "specific color"}},
       {"overlaps", {"keep the latest", "no overlaps possible"}}},
      true);
  add(p::kVerticalFill,
      "Extend or fill an object vertically across contiguous empty or target cells.",
      {{"source_object", {"line", "square", "rectangle", "cavity"}},
       {"row_index", {"top of an object", "below an object"}},
       {"fill_color", {"based on source color"}},
       {"sequence", {"based on source width", "based on source height"}},
       {"stop_condition", {"another object", "grid boundary", "specific color"}}},
      true);
  add(p::kConnectingBridges,
      "Draw a “bridge” (line/shape) between two objects in a specified color order.",
      {{"source_object", {"line", "square", "rectangle", "cavity"}},
       {"target_object", {"line", "square", "rectangle", "cavity"}},
       {"bridge_color",
        {"based on bridge starting point", "based on bridge ending point",
         "based on cavity inside an object"}},
       {"connection_shape", {"line", "triangle", "rectangle", "circle"}},
       {"path_direction", {"orthogonal", "diagonal", "based on color sequence"}},
       {"thickness", {"based on width of cavity", "based on width of starting object"}}},
      true);
  add(p::kBoundaryAttachmentFill,
      "Close holes or voids inside an object’s boundary bounding area.",
      {{"objects_with_holes", {"horizontally laid", "vertically laid", "diagonally laid"}},
       {"attachment_direction", {"left", "right", "top", "bottom"}},
       {"fill_logic", {"fits in space to form rectangle", "gets laid on the object"}},
       {"object_filled", {"irregular", "triangle", "rectangle", "square"}}},
      true);
  add(p::kDiagonalFill, "Propagate color or object along a diagonal axis.",
      {{"source_point_or_corner", {"L-shaped", "rectangle"}},
       {"direction", {"bottom-right", "top-left", "top-right", "bottom-left"}},
       {"fill_color", {"same as source", "complementary to source", "change on bounce"}},
       {"stop_condition", {"object obstruction", "hit grid boundary"}}},
      true);
  add(p::kPatternMatching, "Identify a repeating subpattern and either color it in or erase it.",
      {{"template_pattern", {"alternate objects", "similar objects", "symmetry via some axis"}},
       {"operation", {"remove cells to match pattern", "fill cells to match pattern"}},
       {"fill_color", {"boundary color", "pattern color"}},
       {"tolerance", {"no tolerance", "edges are exceptions"}},
       {"target_regions", {"inside a cavity", "outside an object"}}},
      false);
  add(p::kCreatingPatterns,
      "Generate a larger or repeated pattern seeded from one or more “starter” objects.",
      {{"seed_objects", {"colored cell", "rectangle", "diagonal"}},
       {"transformation_sequence", {"circular", "straight", "fill all", "towards an object"}},
       {"inter_object_spacing", {"none", "single", "multiple", "variable"}},
       {"repeat", {"till filling the cavity", "only once"}},
       {"stopping_condition",
        {"reached an object", "reached boundary", "filled object completely"}}},
      false);
  add(p::kFindAndColor, "Detects all instances of a certain object class and applies a new color.",
      {{"object_type", {"plus", "rectangle", "irregular", "circle", "cell", "horizontal bar"}},
       {"new_color",
        {"complements the original color", "constant throughout", "alternating pattern"}},
       {"detection_method", {"exact match", "fuzzy", "at some location"}},
       {"overlap_policy", {"all unique", "overlaps allowed"}}},
      true);
  add(p::kRemoveObjects, "Systematically delete objects one at a time in a defined order.",
      {{"object_list_ordered", {"all in the row", "all in a column", "same shape"}},
       {"removal_method", {"erase and color", "replace with background"}},
       {"trigger_condition", {"based on an object", "leftmost", "rightmost", "topmost", "overlaps"}}},
      true);
  add(p::kRearrange,
      "From a set of objects, only retain those in a given order, rearrange the rest.",
      {{"keep_sequence", {"ascending order of height", "descending order of height"}},
       {"color_of_object", {"same as in-place object", "original color"}},
       {"pattern", {"to a particular part of another object", "to a particular region"}}},
      false);
  add(p::kAlternatingFill,
      "Fill cells with two (or more) colors/objects in an alternating rhythm (checkerboard, "
      "stripes).",
      {{"colors", {"[\"A\", \"B\"]", "[\"A\", \"A\", \"B\"]"}},
       {"pattern_type", {"checkerboard", "stripe_vertical", "stripe_horizontal"}},
       {"internal_sequence_spacing", {"none", "singular"}}},
      true);
  add(p::kTranslateByEnvironment, "Move an object to a place based on the colors surrounding them.",
      {{"moving_object_shape", {"plus", "square", "rectangle", "all cells"}},
       {"target_environment_color", {"same as moving object", "complementary color"}},
       {"translation_vector",
        {"centroid of the environment colors", "on top of environment color"}},
       {"step_size", {"arbitrary", "fixed size"}}},
      false);
  add(p::kCavityFill, "Fill the cavities inside bigger objects.",
      {{"object_outline", {"U shaped", "V shaped", "rectangular", "triangle", "square"}},
       {"max_indent_depth", {"based on available filling material", "till complete object"}},
       {"fill_color", {"arbitrary", "based on material already present"}}},
      true);
  add(p::kAddReplace, "Swap out one object for another, preserving position or properties.",
      {{"source_object",
        {"horizontal bar", "vertical bar", "rectangle", "square", "circle", "triangle",
         "irregular"}},
       {"add_replacement_object",
        {"horizontal bar", "vertical bar", "rectangle", "square", "circle", "triangle", "cell"}},
       {"inherit_properties", {"same midpoint", "same centroid", "at some location"}},
       {"additional_change", {"add a boundary to new object", "do nothing"}}},
      true);
  add(p::kFallingDown,
      "Let objects “drop” vertically until they hit another object or the floor.",
      {{"object_list", {"cell", "square", "rectangle"}},
       {"gravity_direction", {"downward"}},
       {"collision_map", {"horizontal bar", "vertical bar"}}},
      true);
  add(p::kAttachToSimilar, "Move or grow an object until it contacts another of the same type.",
      {{"moving_object", {"plus", "U shaped", "V shaped", "square", "rectangle", "irregular"}},
       {"target_object_type", {"rectangle", "square", "irregular"}},
       {"attachment_rule", {"head on with common color side", "fit into cavity"}},
       {"movement_path", {"fixed numeric steps", "reach goal"}}},
      false);
  add(p::kTranslateToGoal,
      "Move objects toward a specified “goal” region or object.",
      {{"source_object", {"square", "rectangle", "irregular"}},
       {"goal_location_or_object", {"square", "matching pattern"}},
       {"pathfinding_method", {"straight-line", "fixed path"}},
       {"step_count_or_speed", {"stop on obstacle", "stop on goal", "fixed"}}},
      true);
  add(p::kDismantle, "Break an object into constituent parts or pixels.",
      {{"source_object", {"irregular", "rectangular", "square"}},
       {"fragment_shape", {"individual cells", "smaller tiles", "break at hit"}},
       {"dismantle_sequence", {"outer-to-inner", "when hit by other object", "symmetric"}},
       {"dispersion_pattern",
        {"momentum conserved", "toward hit object", "away from hit object"}}},
      false);
  add(p::kSymmetry, "Reflect or rotate objects/patterns around an axis or point.",
      {{"symmetry_type", {"horizontal", "vertical", "rotational"}},
       {"axis_or_center_point", {"horizontal bar", "vertical bar", "single cell"}},
       {"object_group", {"individual cells", "square"}},
       {"copy_mode", {"duplicate", "mirror"}}},
      true);
  add(p::kRayCast,
      "Project a “ray” from a source until it hits a wall or object, marking its path "
      "in a shape.",
      {{"ray_source", {"starting cell", "object"}},
       {"direction", {"horizontal", "vertical", "diagonal", "change on hit"}},
       {"shape", {"line", "triangle", "circle", "rectangle"}},
       {"stop_condition", {"object", "boundary"}},
       {"mark_color",
        {"same as starting point", "alternating pattern", "change on hit",
         "based on other objects"}}},
      true);
  add(p::kScattering,
      "Project a scatter-like pattern which is triangular in shape with staircase-like edges, "
      "and fills all the cells in its path.",
      {{"source", {"starting cell", "object"}},
       {"direction", {"horizontal", "vertical", "diagonal", "radially outwards"}},
       {"shape", {"triangle"}},
       {"stop_condition", {"object", "boundary"}},
       {"mark_color",
        {"same as starting point", "alternating pattern", "change on hit",
         "based on other objects"}},
       {"boundary",
        {"single cell thickness of different color than the pattern",
         "multi cell thickness of different color than the pattern"}},
       {"edge_pattern",
        {"staircase with a width 'w' and height 'h', where 'w' and 'h' are number of cells"}}},
      false);
  add(p::kSmallObjectPatterns, "Spatial patterns and color scheme formed by smaller objects.",
      {{"small_object_type", {"small adjacent objects", "parts of a bigger object"}},
       {"small_pattern_type",
        {"spatial pattern and/or color scheme pattern formed by smaller distinct objects",
         "coloring scheme pattern formed inside a object"}}},
      false);
  return r;
}

const std::vector<PatternSchema>& storage() {
  static const std::vector<PatternSchema> schemas = build_registry();
  return schemas;
}

}  // namespace

const ParameterSpec* PatternSchema::find_parameter(std::string_view param) const {
  auto it = std::find_if(parameters.begin(), parameters.end(),
                         [&](const ParameterSpec& p) { return p.name == param; });
  return it == parameters.end() ? nullptr : &*it;
}

bool PatternSchema::allows(std::string_view param, std::string_view value) const {
  const auto* spec = find_parameter(param);
  return spec != nullptr &&
         std::find(spec->values.begin(), spec->values.end(), value) != spec->values.end();
}

std::span<const PatternSchema> registry() { return storage(); }

const PatternSchema* find_schema(std::string_view name) {
  const auto& all = storage();
  auto it = std::find_if(all.begin(), all.end(),
                         [&](const PatternSchema& s) { return s.name == name; });
  return it == all.end() ? nullptr : &*it;
}

std::size_t registry_index(std::string_view name) {
  const auto& all = storage();
  auto it = std::find_if(all.begin(), all.end(),
                         [&](const PatternSchema& s) { return s.name == name; });
  return static_cast<std::size_t>(it - all.begin());
}

std::string registry_listing() {
  std::string out;
  for (const auto& schema : storage()) {
    out += schema.name;
    out += '\n';
    for (const auto& param : schema.parameters) {
      out += "  " + param.name + ": ";
      for (std::size_t i = 0; i < param.values.size(); ++i) {
        if (i != 0) out += " | ";
        const auto& v = param.values[i];
        // List-valued enums are printed raw, everything else quoted.
        out += v.starts_with('[') ? v : "\"" + v + "\"";
      }
      out += '\n';
    }
  }
  return out;
}

}  // namespace arc
