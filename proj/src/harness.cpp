#include "arc/harness.hpp"

#include "arc/error.hpp"
#include "arc/scene.hpp"
#include "arc/semantics.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <chrono>
#include <iomanip>
#include <map>
#include <sstream>
#include <unordered_set>

namespace arc {
namespace {

using Json = nlohmann::json;
using Clock = std::chrono::steady_clock;

double since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

std::size_t agreement(const CandidatePool& pool, std::size_t i) {
  std::size_t n = 0;
  for (std::size_t j = 0; j < pool.entries.size(); ++j) {
    if (j != i && pool.entries[j].grid == pool.entries[i].grid) ++n;
  }
  return n;
}

std::size_t by_train_consistency(const CandidatePool& pool) {
  std::size_t best = 0;
  for (std::size_t i = 1; i < pool.entries.size(); ++i) {
    const auto& a = pool.entries[i];
    const auto& b = pool.entries[best];
    if (a.train_matches != b.train_matches) {
      if (a.train_matches > b.train_matches) best = i;
    } else if (agreement(pool, i) > agreement(pool, best)) {
      best = i;
    }
  }
  return best;
}

std::size_t by_agreement(const CandidatePool& pool) {
  std::size_t best = 0;
  for (std::size_t i = 1; i < pool.entries.size(); ++i) {
    if (agreement(pool, i) > agreement(pool, best)) best = i;
  }
  return best;
}

std::optional<Grid> try_symmetry(const Grid& g, double threshold) {
  const SymmetryAssessment a = symmetry_score(g);
  if (!(a.score > threshold)) return std::nullopt;
  try {
    return solve_symmetry(g, a, threshold);
  } catch (const Error&) {
    return std::nullopt;
  }
}

std::optional<Grid> try_best_effort(std::span<const RankedPattern> ranked, const Grid& g) {
  try {
    return best_effort(ranked, g);
  } catch (const Error&) {
    return std::nullopt;
  }
}

void add_entry(CandidatePool& pool, Grid grid, std::string tag, std::size_t matches) {
  for (const auto& e : pool.entries) {
    if (e.source_tag == tag && e.grid == grid) return;
  }
  pool.entries.push_back({std::move(grid), std::move(tag), matches});
}

std::string ascii_block(const Grid& g, const std::string& indent) {
  std::string out;
  std::istringstream rows(to_ascii(g));
  std::string line;
  while (std::getline(rows, line)) out += indent + line + "\n";
  return out;
}

}  // namespace

std::string_view to_string(ProposerKind k) {
  return k == ProposerKind::Builtin ? "builtin" : "external";
}

std::string_view to_string(SelectionStrategy k) {
  switch (k) {
    case SelectionStrategy::TrainConsistency: return "train_consistency";
    case SelectionStrategy::Agreement: return "agreement";
    case SelectionStrategy::External: return "external";
  }
  return "?";
}

ProposerKind parse_proposer_kind(std::string_view name) {
  if (name == "builtin") return ProposerKind::Builtin;
  if (name == "external") return ProposerKind::External;
  throw Error(ErrorCode::InvalidArgument, "unknown proposer: " + std::string(name));
}

SelectionStrategy parse_selection_strategy(std::string_view name) {
  for (auto k : {SelectionStrategy::TrainConsistency, SelectionStrategy::Agreement, SelectionStrategy::External}) {
    if (to_string(k) == name) return k;
  }
  throw Error(ErrorCode::InvalidArgument, "unknown selector: " + std::string(name));
}

void validate(const Config& c) {
  auto fail = [](const std::string& m) { throw Error(ErrorCode::InvalidArgument, m); };
  if (c.attempts < 3 || c.attempts > 10) fail("attempts must be within 3-10");
  if (c.repetitions < 1) fail("repetitions must be >= 1");
  if (c.top_k < 1) fail("top-k must be >= 1");
  if (c.max_depth < 1) fail("max-depth must be >= 1");
  if (c.concurrency < 1) fail("concurrency must be >= 1");
  if (c.budget < 1) fail("budget must be >= 1");
  if (!(c.symmetry_threshold >= 0.0 && c.symmetry_threshold <= 1.0)) {
    fail("symmetry threshold must be within [0, 1]");
  }
}

Json to_json(const Config& c) {
  return {{"repetitions", c.repetitions},
          {"top_k", c.top_k},
          {"symmetry_threshold", c.symmetry_threshold},
          {"attempts", c.attempts},
          {"concurrency", c.concurrency},
          {"max_depth", c.max_depth},
          {"budget", c.budget},
          {"proposer", to_string(c.proposer)},
          {"selector", to_string(c.selector)},
          {"seed", c.seed},
          {"endpoint", c.endpoint},
          {"selector_source_tags", c.selector_source_tags},
          {"retry",
           {{"max_retries", c.retry.max_retries},
            {"backoff_base_seconds", c.retry.backoff_base_seconds},
            {"backoff_cap_seconds", c.retry.backoff_cap_seconds},
            {"general_error_backoff_seconds", c.retry.general_error_backoff_seconds},
            {"request_timeout_seconds", c.retry.request_timeout_seconds}}}};
}

HttpExternalSelector::HttpExternalSelector(Transport& transport, RetryPolicy policy,
                                           bool with_tags, Sleeper sleep)
    : transport_(transport), policy_(policy), with_tags_(with_tags), sleep_(std::move(sleep)) {}

std::optional<std::size_t> HttpExternalSelector::choose(const TaskRecord& task,
                                                        const Grid& test_input,
                                                        const CandidatePool& pool) {
  std::vector<Grid> grids;
  std::vector<std::string> tags;
  for (const auto& e : pool.entries) {
    grids.push_back(e.grid);
    tags.push_back(e.source_tag);
  }
  try {
    const Json reply = post_json(transport_, "/select",
                                 selector_request(task, test_input, grids, tags, with_tags_),
                                 policy_, sleep_);
    const auto id = parse_solution_id(reply, grids.size());
    if (!id) return std::nullopt;
    return *id - 1;
  } catch (const Error&) {
    return std::nullopt;
  }
}

std::size_t meta_select_index(const CandidatePool& pool, const TaskRecord& task,
                              std::size_t test_index, SelectionStrategy strategy,
                              ExternalSelector* external) {
  if (pool.entries.empty()) throw Error(ErrorCode::NoCandidates, "empty candidate pool");
  if (pool.entries.size() == 1) return 0;
  switch (strategy) {
    case SelectionStrategy::Agreement: return by_agreement(pool);
    case SelectionStrategy::External:
      if (external != nullptr && test_index < task.test_inputs.size()) {
        if (auto pick = external->choose(task, task.test_inputs[test_index], pool)) return *pick;
      }
      return by_train_consistency(pool);
    case SelectionStrategy::TrainConsistency: break;
  }
  return by_train_consistency(pool);
}

Grid meta_select(const CandidatePool& pool, const TaskRecord& task, std::size_t test_index,
                 SelectionStrategy strategy, ExternalSelector* external) {
  return pool.entries[meta_select_index(pool, task, test_index, strategy, external)].grid;
}

Submission assemble_pass2(const CandidatePool& pool, const TaskRecord& task,
                          std::size_t test_index, SelectionStrategy strategy,
                          ExternalSelector* external) {
  const std::size_t i = meta_select_index(pool, task, test_index, strategy, external);
  const PoolEntry& first = pool.entries[i];
  CandidatePool rest;
  for (const auto& e : pool.entries) {
    if (e.grid != first.grid) rest.entries.push_back(e);
  }
  if (rest.entries.empty()) return {first.grid, first.grid, first.source_tag, first.source_tag};
  const PoolEntry& second =
      rest.entries[meta_select_index(rest, task, test_index, strategy, external)];
  return {first.grid, second.grid, first.source_tag, second.source_tag};
}

bool score_pass2(const Grid& first, const Grid& second, const std::optional<Grid>& truth) {
  if (!truth) throw Error(ErrorCode::MissingGroundTruth, "no ground truth for this test input");
  return grids_equal(first, *truth) || grids_equal(second, *truth);
}

std::vector<CandidateSet> build_candidate_sets(const TaskRecord& task, const Config& config,
                                               ExternalProposer* proposer,
                                               std::vector<std::string>* log) {
  const bool external = config.proposer == ProposerKind::External;
  if (external && proposer == nullptr) {
    throw Error(ErrorCode::InvalidArgument, "external proposer selected but not configured");
  }
  const std::size_t k = task.train.size();
  std::vector<SceneGraph> inputs;
  std::vector<CandidateSet> sets(k);
  std::vector<std::vector<Detection>> all_runs;
  for (std::size_t i = 0; i < k; ++i) {
    const auto& pair = task.train[i];
    inputs.push_back(abstract_scene(pair.input));
    const SceneGraph out = abstract_scene(pair.output);
    auto& cs = sets[i];
    cs.example_index = i;
    if (external) {
      cs.runs = propose_external(*proposer, pair, inputs.back(), out, config.repetitions,
                                 config.concurrency, log);
    } else {
      cs.runs = {propose_builtin(inputs.back(), out)};
    }
    for (const auto& run : cs.runs) {
      for (const auto& d : run) {
        if (d.detected) ++cs.detection_counts[d.pattern_name];
      }
    }
    all_runs.insert(all_runs.end(), cs.runs.begin(), cs.runs.end());
  }
  const auto ranked = aggregate_detections(all_runs, external ? config.top_k : SIZE_MAX);

  for (std::size_t i = 0; i < k; ++i) {
    InstantiateOptions io;
    io.max_depth = config.max_depth;
    io.budget = config.budget;
    io.target = &task.train[i].output;
    auto enumeration = instantiate_candidates(ranked, inputs[i], io);
    sets[i].ranked = ranked;
    sets[i].candidates = std::move(enumeration.programs);
    sets[i].budget_exceeded = enumeration.budget_exceeded;
    if (enumeration.budget_exceeded && log != nullptr) {
      log->push_back("example " + std::to_string(i) + ": enumeration budget reached");
    }
  }

  // Programs found for one pair are offered to the others.
  std::vector<std::unordered_set<std::string>> ids(k);
  for (std::size_t i = 0; i < k; ++i) {
    for (const auto& p : sets[i].candidates) ids[i].insert(canonical_id(p));
  }
  std::vector<std::vector<Program>> borrowed(k);
  for (std::size_t i = 0; i < k; ++i) {
    for (std::size_t j = 0; j < k; ++j) {
      if (j == i) continue;
      for (const auto& p : sets[j].candidates) {
        std::string id = canonical_id(p);
        if (ids[i].contains(id) || !validates(p, task.train[i])) continue;
        ids[i].insert(std::move(id));
        borrowed[i].push_back(p);
      }
    }
  }
  for (std::size_t i = 0; i < k; ++i) {
    auto& c = sets[i].candidates;
    c.insert(c.end(), borrowed[i].begin(), borrowed[i].end());
    std::stable_sort(c.begin(), c.end(),
                     [](const Program& a, const Program& b) { return a.depth() < b.depth(); });
  }
  return sets;
}

TaskAnalysis analyze_task(const TaskRecord& task, const Config& config,
                          const Components& components) {
  TaskAnalysis analysis;
  analysis.sets = build_candidate_sets(task, config, components.proposer, &analysis.log);
  ConsistencyOptions co;
  co.k_top = config.top_k;
  if (!task.test_inputs.empty()) co.test_input = &task.test_inputs.front();
  analysis.report = filter_consistent(analysis.sets, task.train, co);
  return analysis;
}

CandidatePool build_pool(const TaskRecord& task, std::size_t test_index,
                         const TaskAnalysis& analysis, const SolveResult* solved,
                         const Config& config) {
  const Grid& input = task.test_inputs.at(test_index);
  const std::size_t k = task.train.size();
  CandidatePool pool;

  if (solved != nullptr) {
    const std::size_t matches = solved->provenance == Provenance::ExecutedProgram ? k : 0;
    add_entry(pool, solved->final_prediction, std::string(to_string(solved->provenance)),
              matches);
  }

  // Further surviving programs, shallowest first.
  if (!analysis.sets.empty() && !analysis.report.surviving.empty()) {
    std::map<std::string, const Program*> by_id;
    for (const auto& p : analysis.sets.front().candidates) by_id.emplace(canonical_id(p), &p);
    std::vector<const Program*> survivors;
    for (const auto& id : analysis.report.surviving) survivors.push_back(by_id.at(id));
    std::stable_sort(survivors.begin(), survivors.end(),
                     [](const Program* a, const Program* b) { return a->depth() < b->depth(); });
    std::size_t added = 0;
    for (const Program* p : survivors) {
      if (added == 3) break;
      try {
        Grid g = run_program(*p, input);
        const std::size_t before = pool.entries.size();
        add_entry(pool, std::move(g), std::string(to_string(Provenance::ExecutedProgram)), k);
        added += pool.entries.size() - before;
      } catch (const Error&) {
      }
    }
  }

  if (solved == nullptr || solved->provenance != Provenance::SymmetrySolver) {
    if (auto g = try_symmetry(input, config.symmetry_threshold)) {
      std::size_t matches = 0;
      for (const auto& pair : task.train) {
        const auto r = try_symmetry(pair.input, config.symmetry_threshold);
        matches += r && *r == pair.output ? 1 : 0;
      }
      add_entry(pool, std::move(*g), std::string(to_string(Provenance::SymmetrySolver)), matches);
    }
  }

  if (solved != nullptr && solved->provenance == Provenance::ExternalSolver) {
    for (const auto& c : solved->candidates) {
      add_entry(pool, c.grid, std::string(to_string(Provenance::ExternalSolver)), 0);
    }
  }

  if (solved == nullptr || solved->provenance != Provenance::BestEffort) {
    if (auto g = try_best_effort(analysis.report.ranked, input)) {
      std::size_t matches = 0;
      for (const auto& pair : task.train) {
        const auto r = try_best_effort(analysis.report.ranked, pair.input);
        matches += r && *r == pair.output ? 1 : 0;
      }
      add_entry(pool, std::move(*g), std::string(to_string(Provenance::BestEffort)), matches);
    }
  }

  if (pool.entries.empty()) add_entry(pool, input, "input_copy", 0);
  return pool;
}

TaskOutcome run_task(const TaskRecord& task, const Config& config,
                     const Components& components) {
  const auto t0 = Clock::now();
  TaskOutcome outcome;
  outcome.task_id = task.task_id;
  try {
    validate(config);
    const TaskAnalysis analysis = analyze_task(task, config, components);
    outcome.notes = analysis.log;
    if (analysis.report.selected) outcome.program = canonical_id(*analysis.report.selected);
    SolveOptions so;
    so.attempts = config.attempts;
    so.symmetry_threshold = config.symmetry_threshold;
    so.concurrency = config.concurrency;

    bool all_correct = true;
    for (std::size_t t = 0; t < task.test_inputs.size(); ++t) {
      TestOutcome test;
      std::optional<SolveResult> solved;
      try {
        solved = solve_task(analysis.report, task, task.test_inputs[t], so, components.solver);
        outcome.attempts_used += solved->votes_used;
        test.route = std::string(to_string(solved->provenance));
      } catch (const Error& e) {
        test.route = "none";
        outcome.notes.push_back("test " + std::to_string(t) + ": " + e.what());
      }
      const CandidatePool pool =
          build_pool(task, t, analysis, solved ? &*solved : nullptr, config);
      test.submission = assemble_pass2(pool, task, t, config.selector, components.selector);
      if (task.test_outputs) {
        test.correct = score_pass2(test.submission.first, test.submission.second,
                                   task.test_outputs->at(t));
        all_correct = all_correct && *test.correct;
      }
      outcome.tests.push_back(std::move(test));
    }
    if (task.test_outputs) outcome.solved = all_correct;
  } catch (const std::exception& e) {
    outcome.error = e.what();
  }
  outcome.seconds = since(t0);
  return outcome;
}

EvalReport run_eval(const std::filesystem::path& dir, const Config& config,
                    const Components& components) {
  const auto t0 = Clock::now();
  validate(config);
  if (!std::filesystem::is_directory(dir)) {
    throw Error(ErrorCode::InvalidArgument, "not a directory: " + dir.string());
  }
  std::vector<std::filesystem::path> files;
  for (const auto& entry : std::filesystem::directory_iterator(dir)) {
    if (entry.is_regular_file() && entry.path().extension() == ".json") {
      files.push_back(entry.path());
    }
  }
  std::sort(files.begin(), files.end());

  EvalReport report;
  for (const auto& path : files) {
    TaskOutcome outcome;
    try {
      outcome = run_task(load_task_file(path), config, components);
    } catch (const std::exception& e) {
      outcome.task_id = path.stem().string();
      outcome.error = e.what();
    }
    if (outcome.error.empty() && !outcome.solved) {
      outcome.error = std::string(to_string(ErrorCode::MissingGroundTruth)) +
                      ": task has no test outputs";
    }
    report.tasks.push_back(std::move(outcome));
  }
  std::stable_sort(report.tasks.begin(), report.tasks.end(),
                   [](const TaskOutcome& a, const TaskOutcome& b) { return a.task_id < b.task_id; });
  for (const auto& t : report.tasks) {
    if (!t.error.empty()) ++report.errored;
    if (t.solved.value_or(false)) ++report.solved;
  }
  report.pass_at_2_defined = !report.tasks.empty();
  report.pass_at_2 = report.pass_at_2_defined ? static_cast<double>(report.solved) /
                                                    static_cast<double>(report.tasks.size())
                                              : 0.0;
  report.seconds = since(t0);
  return report;
}

Json to_json(const TaskOutcome& o, bool with_timings) {
  Json tests = Json::array();
  for (const auto& t : o.tests) {
    tests.push_back({{"route", t.route},
                     {"provenance", {t.submission.first_tag, t.submission.second_tag}},
                     {"submissions", {t.submission.first.to_rows(), t.submission.second.to_rows()}},
                     {"correct", t.correct ? Json(*t.correct) : Json(nullptr)}});
  }
  Json j = {{"task_id", o.task_id},
            {"solved", o.solved ? Json(*o.solved) : Json(nullptr)},
            {"attempts_used", o.attempts_used},
            {"program", o.program},
            {"tests", std::move(tests)},
            {"error", o.error},
            {"notes", o.notes}};
  if (with_timings) j["seconds"] = o.seconds;
  return j;
}

Json to_json(const EvalReport& r, bool with_timings) {
  Json tasks = Json::object();
  for (const auto& t : r.tasks) tasks[t.task_id] = to_json(t, with_timings);
  Json j = {{"task_count", r.tasks.size()},
            {"solved", r.solved},
            {"errored", r.errored},
            {"pass_at_2", r.pass_at_2},
            {"pass_at_2_defined", r.pass_at_2_defined},
            {"tasks", std::move(tasks)}};
  if (with_timings) j["seconds"] = r.seconds;
  return j;
}

std::string format_table(const EvalReport& r, bool with_grids) {
  std::ostringstream out;
  out << std::left << std::setw(24) << "task" << std::setw(9) << "solved" << std::setw(10)
      << "attempts" << std::setw(36) << "submissions" << " seconds\n";
  for (const auto& t : r.tasks) {
    std::string subs;
    for (const auto& test : t.tests) {
      if (!subs.empty()) subs += "; ";
      subs += test.submission.first_tag + "," + test.submission.second_tag;
    }
    const std::string solved = !t.error.empty() ? "error" : t.solved ? (*t.solved ? "yes" : "no")
                                                                      : "-";
    out << std::setw(24) << t.task_id << std::setw(9) << solved << std::setw(10)
        << t.attempts_used << std::setw(36) << subs << " " << std::fixed << std::setprecision(2)
        << t.seconds << "\n";
    if (!t.error.empty()) out << "  " << t.error << "\n";
    if (with_grids) {
      for (std::size_t i = 0; i < t.tests.size(); ++i) {
        out << "  test " << i << " first (" << t.tests[i].submission.first_tag << "):\n"
            << ascii_block(t.tests[i].submission.first, "    ");
        out << "  test " << i << " second (" << t.tests[i].submission.second_tag << "):\n"
            << ascii_block(t.tests[i].submission.second, "    ");
      }
    }
  }
  out << "tasks " << r.tasks.size() << ", solved " << r.solved << ", errored " << r.errored
      << ", pass@2 " << std::setprecision(4) << r.pass_at_2
      << (r.pass_at_2_defined ? "" : " (undefined: no tasks)") << ", " << std::setprecision(1)
      << r.seconds << " s\n";
  return out.str();
}

}  // namespace arc
