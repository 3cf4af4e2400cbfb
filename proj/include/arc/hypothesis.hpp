#pragma once

#include "arc/grid.hpp"
#include "arc/program.hpp"
#include "arc/scene.hpp"

#include <nlohmann/json_fwd.hpp>

#include <cstddef>
#include <limits>
#include <map>
#include <span>
#include <string>
#include <vector>

namespace arc {

enum class DetectionSource { Builtin, External };

std::string_view to_string(DetectionSource source);

/// One entry of a pattern-detection run.
struct Detection {
  std::string pattern_name;
  Params params;
  bool detected = false;
  std::string reason;
  DetectionSource source = DetectionSource::Builtin;
};

/// A detected pattern after aggregation over repetitions.
struct RankedPattern {
  std::string pattern_name;
  Params params;  // modal parameter map
  std::size_t count = 0;
};

/// Candidate programs for one training pair.
struct CandidateSet {
  std::size_t example_index = 0;
  std::vector<Program> candidates;
  std::vector<std::vector<Detection>> runs;  // one list per repetition
  std::map<std::string, std::size_t> detection_counts;
  std::vector<RankedPattern> ranked;
  bool budget_exceeded = false;
};

struct ProposerOptions {
  /// Distinct first-step results expanded when looking for two-step
  /// explanations.
  std::size_t expansion_width = 12;
  /// Additional first-step results expanded whose extra changes land only on
  /// cells that are background in the output (a later step may erase them).
  std::size_t tolerant_width = 8;
};

/// Deterministic matched filter over the difference between two scenes.
/// Every executable pattern instance (semantic parameters x selectors x
/// paint colors) is applied to the input; an instance explains part of the
/// pair when it changes at least one cell and only cells that differ between
/// input and output. Patterns with an explaining instance, directly or as the
/// second step after an explaining first step, are reported as detected. The
/// params of a detection are the semantic parameters on which all its
/// explaining instances agree. Scenes of different size yield no detections.
std::vector<Detection> propose_builtin(const SceneGraph& input, const SceneGraph& output,
                                       const ProposerOptions& options = {});

/// Counts detected entries per pattern across runs and keeps the k_top most
/// frequent, ties by registry order. Params are the most frequent map among
/// the detections of the pattern; ties go to the map that is smallest when
/// its values are compared by schema enum order.
std::vector<RankedPattern> aggregate_detections(std::span<const std::vector<Detection>> runs,
                                                std::size_t k_top);

/// Colors the output shows on cells where it differs from the input.
std::vector<Color> changed_colors(const Grid& input, const Grid& output);

struct InstantiateOptions {
  std::size_t max_depth = 2;
  std::size_t budget = 10'000;
  /// Literal colors enumerated for paint bindings; empty means all ten.
  std::vector<Color> paint_colors;
  /// When set, only programs that turn the input into this grid are emitted,
  /// first steps are limited to those that explain part of the difference,
  /// and paint colors are taken from the cells still to change.
  const Grid* target = nullptr;
  std::size_t expansion_width = 12;
  std::size_t tolerant_width = 8;
  bool include_id_selectors = false;
};

struct Enumeration {
  std::vector<Program> programs;
  bool budget_exceeded = false;
  bool hint_only = false;  // no executable pattern among the ranked ones
};

/// Programs of depth <= max_depth over the executable ranked patterns:
/// shallower first, then ranked-pattern order, then parameter and binding
/// order. Parameters fixed by a ranked pattern restrict its parameter space.
/// Stops at the budget and flags it.
Enumeration instantiate_candidates(std::span<const RankedPattern> ranked, const SceneGraph& input,
                                   const InstantiateOptions& options = {});

nlohmann::json to_json(const Detection& d);
/// Lenient parse of one wire entry ({"pattern_name", "pattern_detected",
/// "params", "reason"}). Throws Error(SchemaViolation) on unusable entries.
Detection detection_from_json(const nlohmann::json& j, DetectionSource source);

}  // namespace arc
