#pragma once

#include "arc/consistency.hpp"
#include "arc/external.hpp"
#include "arc/hypothesis.hpp"
#include "arc/solution.hpp"
#include "arc/task.hpp"

#include <nlohmann/json_fwd.hpp>

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace arc {

enum class ProposerKind { Builtin, External };
enum class SelectionStrategy { TrainConsistency, Agreement, External };

std::string_view to_string(ProposerKind k);
std::string_view to_string(SelectionStrategy k);
/// Error(InvalidArgument) for unknown names.
ProposerKind parse_proposer_kind(std::string_view name);
SelectionStrategy parse_selection_strategy(std::string_view name);

struct Config {
  std::size_t repetitions = 5;  // external detection runs per example
  std::size_t top_k = 3;        // patterns forwarded to hints and external instantiation
  double symmetry_threshold = 0.70;
  std::size_t attempts = 5;     // solver samples per test input, 3-10
  std::size_t concurrency = 5;  // external calls in flight per test input
  std::size_t max_depth = 2;
  std::size_t budget = 10'000;  // programs enumerated per example
  ProposerKind proposer = ProposerKind::Builtin;
  SelectionStrategy selector = SelectionStrategy::TrainConsistency;
  std::uint64_t seed = 0;
  RetryPolicy retry;
  std::string endpoint;                // base URL of the external service
  bool selector_source_tags = false;  // send source tags to the external selector
};

/// Error(InvalidArgument) on out-of-range values.
void validate(const Config& config);
nlohmann::json to_json(const Config& config);

struct PoolEntry {
  Grid grid;
  std::string source_tag;
  /// Training pairs reproduced by the transformation behind this entry.
  std::size_t train_matches = 0;
};

struct CandidatePool {
  std::vector<PoolEntry> entries;
};

/// Meta-classifier behind the "external" strategy.
class ExternalSelector {
 public:
  virtual ~ExternalSelector() = default;
  /// Index into pool.entries, or nullopt when no usable answer came back.
  virtual std::optional<std::size_t> choose(const TaskRecord& task, const Grid& test_input,
                                            const CandidatePool& pool) = 0;
};

/// Meta-classifier through an external endpoint ("/select").
class HttpExternalSelector : public ExternalSelector {
 public:
  HttpExternalSelector(Transport& transport, RetryPolicy policy, bool with_tags,
                       Sleeper sleep = real_sleeper());
  std::optional<std::size_t> choose(const TaskRecord& task, const Grid& test_input,
                                    const CandidatePool& pool) override;

 private:
  Transport& transport_;
  RetryPolicy policy_;
  bool with_tags_;
  Sleeper sleep_;
};

/// Picks one grid from the pool. train_consistency: most train matches,
/// then agreement; agreement: most other entries with an equal grid;
/// external: the selector's choice, falling back to train_consistency when
/// it has no usable answer. Remaining ties go to pool order.
/// Error(NoCandidates) for an empty pool.
std::size_t meta_select_index(const CandidatePool& pool, const TaskRecord& task,
                              std::size_t test_index, SelectionStrategy strategy,
                              ExternalSelector* external = nullptr);
Grid meta_select(const CandidatePool& pool, const TaskRecord& task, std::size_t test_index,
                 SelectionStrategy strategy, ExternalSelector* external = nullptr);

struct Submission {
  Grid first{1, 1};
  Grid second{1, 1};
  std::string first_tag;
  std::string second_tag;
};

/// First pick from the full pool, second pick after removing every entry
/// equal to the first; the first is repeated when nothing else is left.
Submission assemble_pass2(const CandidatePool& pool, const TaskRecord& task,
                          std::size_t test_index, SelectionStrategy strategy,
                          ExternalSelector* external = nullptr);

/// True iff either submission equals the truth. Error(MissingGroundTruth)
/// without a truth grid.
bool score_pass2(const Grid& first, const Grid& second, const std::optional<Grid>& truth);

/// External components; null members fall back to builtin behavior.
struct Components {
  ExternalProposer* proposer = nullptr;
  ExternalSolver* solver = nullptr;
  ExternalSelector* selector = nullptr;
};

/// Candidate sets for every training pair. Detections of all pairs are
/// aggregated at task level (every detected pattern for the builtin
/// proposer, top_k for the external one) and instantiated per pair against
/// its output. Each set then also takes the programs found for other pairs
/// that reproduce its own pair, and is ordered by depth.
std::vector<CandidateSet> build_candidate_sets(const TaskRecord& task, const Config& config,
                                               ExternalProposer* proposer = nullptr,
                                               std::vector<std::string>* log = nullptr);

struct TaskAnalysis {
  std::vector<CandidateSet> sets;
  ConsistencyReport report;
  std::vector<std::string> log;
};

TaskAnalysis analyze_task(const TaskRecord& task, const Config& config,
                          const Components& components = {});

/// Pool for one test input: the solver's prediction, predictions of other
/// surviving programs, the symmetry completion and the best-effort guess,
/// without duplicates of the same source.
CandidatePool build_pool(const TaskRecord& task, std::size_t test_index,
                         const TaskAnalysis& analysis, const SolveResult* solved,
                         const Config& config);

struct TestOutcome {
  Submission submission;
  std::string route;  // provenance of the solver result, or "none"
  std::optional<bool> correct;
};

struct TaskOutcome {
  std::string task_id;
  std::vector<TestOutcome> tests;
  std::optional<bool> solved;  // unset without ground truth or on error
  std::size_t attempts_used = 0;
  std::string program;  // canonical id of the selected program, if any
  std::string error;
  std::vector<std::string> notes;
  double seconds = 0.0;
};

/// Full pipeline for one task. Errors are captured in the outcome.
TaskOutcome run_task(const TaskRecord& task, const Config& config,
                     const Components& components = {});

struct EvalReport {
  std::vector<TaskOutcome> tasks;  // sorted by task id
  std::size_t solved = 0;
  std::size_t errored = 0;
  double pass_at_2 = 0.0;
  bool pass_at_2_defined = false;  // false for an empty directory
  double seconds = 0.0;
};

/// Runs every *.json task file of a directory. Unreadable files become
/// errored tasks and count as unsolved.
EvalReport run_eval(const std::filesystem::path& dir, const Config& config,
                    const Components& components = {});

/// Stable JSON; timings only on request so that reports compare byte for byte.
nlohmann::json to_json(const EvalReport& report, bool with_timings = false);
nlohmann::json to_json(const TaskOutcome& outcome, bool with_timings = false);

/// One row per task plus a summary line. With grids, submissions are drawn.
std::string format_table(const EvalReport& report, bool with_grids = false);

}  // namespace arc
