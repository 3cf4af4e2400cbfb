#pragma once

#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace arc {

struct ParameterSpec {
  std::string name;
  std::vector<std::string> values;  // allowed enum values, listing order
};

/// One Unit Pattern of the DSL. `executable` marks the core subset with
/// symbolic semantics; the rest only travel through hints.
struct PatternSchema {
  std::string name;
  std::string description;
  std::vector<ParameterSpec> parameters;
  bool executable = false;

  const ParameterSpec* find_parameter(std::string_view param) const;
  bool allows(std::string_view param, std::string_view value) const;
};

/// All 22 schemas in listing order. Immutable.
std::span<const PatternSchema> registry();

/// nullptr for unknown names.
const PatternSchema* find_schema(std::string_view name);

/// Position in registry(); registry().size() for unknown names.
std::size_t registry_index(std::string_view name);

/// Text dump of names and parameter enums used by the golden fixture test.
std::string registry_listing();

namespace pattern {
inline constexpr std::string_view kHorizontalFill = "Horizontal Fill";
inline constexpr std::string_view kVerticalFill = "Vertical Fill";
inline constexpr std::string_view kConnectingBridges = "Connecting Bridges";
inline constexpr std::string_view kBoundaryAttachmentFill = "Boundary Attachment Fill";
inline constexpr std::string_view kDiagonalFill = "Diagonal Fill";
inline constexpr std::string_view kPatternMatching = "Pattern Matching Fill / Remove";
inline constexpr std::string_view kCreatingPatterns = "Creating Patterns based on starting Objects";
inline constexpr std::string_view kFindAndColor = "Find Objects in the Input Image and Color Them";
inline constexpr std::string_view kRemoveObjects =
    "Remove Objects from the Output in a Particular Sequence";
inline constexpr std::string_view kRearrange =
    "Rearrange the Objects in the Output in a Particular Sequence/Pattern";
inline constexpr std::string_view kAlternatingFill = "Alternating Pattern Filling";
inline constexpr std::string_view kTranslateByEnvironment =
    "Object Translation Based on Environment Colors";
inline constexpr std::string_view kCavityFill = "Cavity Fill";
inline constexpr std::string_view kAddReplace = "Add/Replace an Object";
inline constexpr std::string_view kFallingDown = "Falling Down (Gravity-Effect)";
inline constexpr std::string_view kAttachToSimilar = "Get Attached to Similar Object";
inline constexpr std::string_view kTranslateToGoal = "Object Translation Based on Goal";
inline constexpr std::string_view kDismantle = "Object Dismantles";
inline constexpr std::string_view kSymmetry = "Symmetry-Based Pattern";
inline constexpr std::string_view kRayCast = "Ray-Cast / Ray-Trace Pattern";
inline constexpr std::string_view kScattering = "Scattering Pattern";
inline constexpr std::string_view kSmallObjectPatterns = "Patterns formed using small objects";
}  // namespace pattern

}  // namespace arc
