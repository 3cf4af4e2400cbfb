#pragma once

#include "arc/grid.hpp"
#include "arc/hypothesis.hpp"
#include "arc/program.hpp"
#include "arc/task.hpp"

#include <nlohmann/json_fwd.hpp>

#include <optional>
#include <span>
#include <string>
#include <vector>

namespace arc {

/// Structured consensus record handed to the hint path.
struct Hint {
  std::vector<RankedPattern> ranked_patterns;  // at most k_top entries
  std::string scene_summary;                   // digest of the test-input scene
  std::vector<std::string> consensus_notes;    // one line per ranked pattern
};

struct ConsistencyReport {
  /// Canonical ids of the candidates that reproduce pair i, in candidate order.
  std::vector<std::vector<std::string>> per_example_valid;
  /// Intersection of per_example_valid, in the candidate order of example 0.
  std::vector<std::string> surviving;
  std::optional<Program> selected;
  std::optional<Hint> hint;
  /// Patterns ranked over the detections of all examples (top k).
  std::vector<RankedPattern> ranked;
  /// Execution failures absorbed while validating, per example.
  std::vector<std::size_t> execution_failures;
};

struct ConsistencyOptions {
  std::size_t k_top = 3;
  /// Scene summarized into the hint; omitted when null.
  const Grid* test_input = nullptr;
};

/// True iff running p on pair.input reproduces pair.output exactly.
/// Execution errors count as false; their message goes to *cause if given.
bool validates(const Program& p, const TrainPair& pair, std::string* cause = nullptr);

/// Validates candidate set i against pair i, intersects by canonical id,
/// selects the shallowest survivor (first in example-0 order on ties), or
/// builds a hint when nothing survives. Candidate sets are matched to pairs
/// by position; mismatched lengths raise Error(InvalidArgument).
ConsistencyReport filter_consistent(std::span<const CandidateSet> candidates,
                                    std::span<const TrainPair> pairs,
                                    const ConsistencyOptions& options = {});

/// One-line-per-object digest of a scene.
std::string summarize_scene(const SceneGraph& scene);

nlohmann::json to_json(const Hint& hint);
nlohmann::json to_json(const ConsistencyReport& report);

}  // namespace arc
