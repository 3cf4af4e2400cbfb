#pragma once

#include "arc/consistency.hpp"
#include "arc/grid.hpp"
#include "arc/program.hpp"
#include "arc/task.hpp"

#include <cstddef>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace arc {

enum class Provenance { ExecutedProgram, SymmetrySolver, ExternalSolver, BestEffort };

std::string_view to_string(Provenance p);

struct SolutionCandidate {
  Grid grid;
  Provenance provenance;
};

struct SolveResult {
  std::vector<SolutionCandidate> candidates;
  Grid final_prediction{1, 1};
  Provenance provenance = Provenance::BestEffort;
  std::size_t votes_used = 0;
  double per_cell_agreement = 0.0;
  bool low_confidence = false;
  /// Why earlier routes were skipped or failed, in route order.
  std::vector<std::string> notes;
};

/// Candidate transforms in tie-break order. The quarter turn and the
/// transpose only apply to square grids.
enum class SymmetryTransform { HorizontalMirror, VerticalMirror, Rotate180, Rotate90, Transpose };

std::string_view to_string(SymmetryTransform t);

/// Image of c under t in an h x w grid.
Coord apply_transform(SymmetryTransform t, Coord c, int h, int w);

struct SymmetryAssessment {
  double score = 0.0;
  SymmetryTransform best_transform = SymmetryTransform::HorizontalMirror;
  std::vector<Coord> occluded_region;  // row-major
};

/// Runs the selected program on the test input. Step failures surface as
/// Error(ExecutionFailed) carrying the step index.
Grid solve_direct(const Program& t, const Grid& test_input);

/// Scores each transform as matching / comparable cell pairs (p, t(p)),
/// where a pair is comparable when p is not a fixed point, neither cell is
/// occluded and at least one of them is not background. The occlusion is
/// either empty or one solid rectangle of a color found nowhere else. The
/// best (transform, occlusion) wins; ties prefer an occlusion whose every
/// cell maps outside it, then no occlusion, then transform order, then lower
/// occlusion color.
SymmetryAssessment symmetry_score(const Grid& g);

/// Replaces occluded cells by their images under the best transform. Cells
/// whose image is itself occluded are taken from the first other transform
/// that maps them outside the occlusion and scores above the threshold, and
/// become background otherwise. Error(PreconditionViolation) unless
/// score > threshold; Error(NoOcclusion) when there is nothing to complete.
Grid solve_symmetry(const Grid& g, const SymmetryAssessment& assessment,
                    double threshold = 0.70);

struct VoteResult {
  Grid grid;
  std::size_t votes_used = 0;
  double per_cell_agreement = 0.0;
};

/// Cell-wise mode over the candidates sharing the most common dimensions (on
/// a tie, the dimensions of the earliest candidate among the tied groups).
/// Tied cells take the value that occurs first in submission order among the
/// tied values. Agreement is the mean over cells of the winner's share.
/// Error(NoCandidates) when empty.
VoteResult majority_vote(std::span<const Grid> candidates);

/// Samples one test output per call, conditioned on the demonstrations and
/// the hint. Implementations must be safe to call from several threads.
class ExternalSolver {
 public:
  virtual ~ExternalSolver() = default;
  virtual Grid sample(const TaskRecord& task, const Grid& test_input, const Hint& hint,
                      std::size_t sample_index) = 0;
};

struct SolveOptions {
  std::size_t attempts = 5;
  double symmetry_threshold = 0.70;
  /// Maximum external samples in flight.
  std::size_t concurrency = 5;
};

/// Routes one test input: (1) the selected program, (2) the symmetry solver
/// when the score exceeds the threshold, (3) `attempts` external samples
/// voted cell-wise, when a hint and a solver are present, (4) the first
/// ranked executable pattern bound greedily (low confidence). Throws
/// Error(Unsolvable) when every route fails. Error(InvalidArgument) when
/// attempts is outside 3-10.
SolveResult solve_task(const ConsistencyReport& report, const TaskRecord& task,
                       const Grid& test_input, const SolveOptions& options = {},
                       ExternalSolver* external = nullptr);

/// Route 4 on its own: the first executable ranked pattern, with its modal
/// params completed by defaults, under the first selector and paint color
/// (in vocabulary order) that executes and changes the grid.
Grid best_effort(std::span<const RankedPattern> ranked, const Grid& test_input);

}  // namespace arc
