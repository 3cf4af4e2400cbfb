// Acceptance suite: one PASS/FAIL line per criterion. Exit status is the
// number of failed criteria.

#include "arc/consistency.hpp"
#include "arc/error.hpp"
#include "arc/harness.hpp"
#include "arc/patterns.hpp"
#include "arc/scene.hpp"
#include "arc/solution.hpp"
#include "arc/task.hpp"
#include "oracles.hpp"
#include "planted.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <sstream>
#include <string>

using namespace arc;
namespace fs = std::filesystem;

namespace {

using Clock = std::chrono::steady_clock;

double since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

struct Verdict {
  bool pass = false;
  std::string detail;
};

int failures = 0;

void report(int n, const std::string& name, const std::function<Verdict()>& check) {
  Verdict v;
  try {
    v = check();
  } catch (const std::exception& e) {
    v = {false, std::string("exception: ") + e.what()};
  }
  if (!v.pass) ++failures;
  std::cout << (v.pass ? "PASS" : "FAIL") << " [" << n << "] " << name << ": " << v.detail
            << std::endl;
}

std::string fmt(double v, int digits = 2) {
  std::ostringstream out;
  out.precision(digits);
  out << std::fixed << v;
  return out.str();
}

const fs::path kData = ARC_DATA_DIR;

// --- 1 -------------------------------------------------------------------

Verdict scene_oracles() {
  const auto t0 = Clock::now();
  std::mt19937_64 rng(1);
  std::size_t comp_mismatch = 0;
  std::size_t cav_mismatch = 0;
  std::size_t objects = 0;
  std::size_t cavities = 0;
  for (int i = 0; i < 1000; ++i) {
    const Grid g = testing::random_grid(rng, 10);
    const Color bg = find_background(g);
    auto comps = connected_components(g, bg);
    for (auto& c : comps) std::sort(c.begin(), c.end());
    if (comps != testing::union_find_components(g, bg)) ++comp_mismatch;
    for (const auto& comp : comps) {
      ++objects;
      const GridObject o = compute_features(comp, g, bg);
      std::vector<std::vector<Coord>> got;
      for (const auto& c : detect_cavities(comp, o.bbox, g, bg)) got.push_back(c.pixels);
      cavities += got.size();
      if (got != testing::flood_fill_cavities(o.bbox, g, bg)) ++cav_mismatch;
    }
  }
  const double s = since(t0);
  return {comp_mismatch == 0 && cav_mismatch == 0 && s < 10.0,
          "1000 grids, " + std::to_string(objects) + " objects, " + std::to_string(cavities) +
              " cavities, component mismatches " + std::to_string(comp_mismatch) +
              ", cavity mismatches " + std::to_string(cav_mismatch) + ", " + fmt(s) + " s"};
}

// --- 2 -------------------------------------------------------------------

Verdict round_trip() {
  std::size_t checked = 0;
  std::size_t failed = 0;
  auto check = [&](const Grid& g) {
    ++checked;
    if (render(abstract_scene(g), g.height(), g.width()) != g) ++failed;
  };
  std::size_t tasks = 0;
  for (const auto& entry : fs::directory_iterator(kData / "arc_training")) {
    if (entry.path().extension() != ".json") continue;
    ++tasks;
    const TaskRecord t = load_task_file(entry.path());
    for (const auto& p : t.train) {
      check(p.input);
      check(p.output);
    }
    for (const auto& g : t.test_inputs) check(g);
    if (t.test_outputs) {
      for (const auto& g : *t.test_outputs) check(g);
    }
  }
  const std::size_t arc_grids = checked;
  std::mt19937_64 rng(2);
  for (int i = 0; i < 10'000; ++i) check(testing::random_grid(rng, 30));
  return {failed == 0 && tasks == 400,
          std::to_string(arc_grids) + " grids from " + std::to_string(tasks) +
              " training tasks + 10000 random grids, " + std::to_string(failed) + " failures"};
}

// --- 3 -------------------------------------------------------------------

Verdict registry_golden() {
  std::ifstream in(kData / "unit_patterns.golden", std::ios::binary);
  std::stringstream buf;
  buf << in.rdbuf();
  const bool same = registry_listing() == buf.str();
  return {in && same && registry().size() == 22,
          std::to_string(registry().size()) + " schemas, listing " +
              (same ? "byte-identical" : "differs") + " to fixture"};
}

// --- 4 and 5 -------------------------------------------------------------

struct SuiteResult {
  std::size_t tasks = 0;
  std::size_t solved = 0;
  std::size_t deeper = 0;
  std::size_t no_program = 0;
  std::size_t wrong = 0;
  std::size_t survivors = 0;
  std::size_t violations = 0;
  double pipeline_seconds = 0.0;
  double generation_seconds = 0.0;
};

SuiteResult planted_suite() {
  SuiteResult r;
  std::mt19937_64 rng(1);
  const Config config;
  std::vector<testing::PlantedTask> suite;
  const auto g0 = Clock::now();
  for (int i = 0; i < 500; ++i) suite.push_back(testing::make_planted_task(rng));
  r.generation_seconds = since(g0);

  std::vector<TaskAnalysis> analyses;
  analyses.reserve(suite.size());
  const auto t0 = Clock::now();
  for (const auto& pt : suite) {
    ++r.tasks;
    analyses.push_back(analyze_task(pt.task, config));
    const auto& report = analyses.back().report;
    if (!report.selected) {
      ++r.no_program;
      continue;
    }
    bool ok = false;
    try {
      ok = solve_direct(*report.selected, pt.task.test_inputs[0]) == pt.task.test_outputs->at(0);
    } catch (const Error&) {
    }
    if (!ok) {
      ++r.wrong;
      continue;
    }
    ++r.solved;
    if (report.selected->depth() > pt.program.depth()) ++r.deeper;
  }
  r.pipeline_seconds = since(t0);

  // Re-validate every survivor on every training pair.
  for (std::size_t i = 0; i < suite.size(); ++i) {
    const auto& a = analyses[i];
    std::map<std::string, const Program*> by_id;
    for (const auto& cs : a.sets) {
      for (const auto& p : cs.candidates) by_id.emplace(canonical_id(p), &p);
    }
    for (const auto& id : a.report.surviving) {
      ++r.survivors;
      const auto it = by_id.find(id);
      if (it == by_id.end()) {
        ++r.violations;
        continue;
      }
      for (const auto& pair : suite[i].task.train) {
        if (!validates(*it->second, pair)) {
          ++r.violations;
          break;
        }
      }
    }
  }
  return r;
}

// --- 6 -------------------------------------------------------------------

/// Per-cell vote computed independently: counts per value, highest count
/// wins, ties to the value whose first occurrence is earliest.
Grid oracle_vote(const std::vector<Grid>& cs, double* agreement) {
  Grid out(2, 2);
  double total = 0.0;
  for (int y = 0; y < 2; ++y) {
    for (int x = 0; x < 2; ++x) {
      std::vector<std::pair<int, int>> tally;  // value, count, in first-seen order
      for (const auto& g : cs) {
        const int v = g.at(y, x);
        auto it = std::find_if(tally.begin(), tally.end(), [&](const auto& t) { return t.first == v; });
        if (it == tally.end()) {
          tally.push_back({v, 1});
        } else {
          ++it->second;
        }
      }
      auto best = tally.begin();
      for (auto it = tally.begin(); it != tally.end(); ++it) {
        if (it->second > best->second) best = it;
      }
      out.set(y, x, static_cast<Color>(best->first));
      total += static_cast<double>(best->second) / static_cast<double>(cs.size());
    }
  }
  *agreement = total / 4.0;
  return out;
}

Verdict voting_properties() {
  std::vector<Grid> grids;
  for (int code = 0; code < 81; ++code) {
    Grid g(2, 2);
    int c = code;
    for (int i = 0; i < 4; ++i, c /= 3) g.set(i / 2, i % 2, static_cast<Color>(c % 3));
    grids.push_back(g);
  }
  std::size_t cases = 0;
  std::size_t idem = 0;
  std::size_t copies = 0;
  std::size_t majority = 0;
  std::size_t tie = 0;

  for (const auto& g : grids) {
    ++cases;
    for (std::size_t m = 1; m <= 3; ++m) {
      const std::vector<Grid> same(m, g);
      const auto v = majority_vote(same);
      if (v.grid != g || v.per_cell_agreement != 1.0 || v.votes_used != m) ++idem;
    }
  }
  auto check_list = [&](const std::vector<Grid>& list) {
    ++cases;
    const auto v = majority_vote(list);
    double agreement = 0.0;
    const Grid expect = oracle_vote(list, &agreement);
    if (v.grid != expect || std::abs(v.per_cell_agreement - agreement) > 1e-12) ++tie;
    // Any value held by two of three candidates wins its cell.
    if (list.size() == 3) {
      for (int y = 0; y < 2; ++y) {
        for (int x = 0; x < 2; ++x) {
          const int a = list[0].at(y, x), b = list[1].at(y, x), c = list[2].at(y, x);
          const int two = a == b || a == c ? a : (b == c ? b : -1);
          if (two >= 0 && v.grid.at(y, x) != two) ++majority;
        }
      }
    }
    // Repeating the whole list m times changes nothing.
    for (std::size_t m = 2; m <= 3; ++m) {
      std::vector<Grid> rep;
      for (std::size_t k = 0; k < m; ++k) rep.insert(rep.end(), list.begin(), list.end());
      if (majority_vote(rep).grid != v.grid) ++copies;
    }
  };
  for (const auto& a : grids) {
    for (const auto& b : grids) {
      check_list({a, b});
      for (const auto& c : grids) check_list({a, b, c});
    }
  }
  const bool ok = idem + copies + majority + tie == 0;
  return {ok, std::to_string(cases) + " candidate lists over 2x2 grids in 3 colors; violations: "
                  "idempotence " + std::to_string(idem) + ", m-copy " + std::to_string(copies) +
                  ", 2-of-3 " + std::to_string(majority) + ", tie rule " + std::to_string(tie)};
}

// --- 7 -------------------------------------------------------------------

Verdict symmetry_solver() {
  std::mt19937_64 rng(7);
  std::size_t exact = 0;
  for (int i = 0; i < 200; ++i) {
    const auto f = testing::mask_fixture(rng);
    const auto a = symmetry_score(f.masked);
    try {
      if (a.score > 0.70 && solve_symmetry(f.masked, a, 0.70) == f.original) ++exact;
    } catch (const Error&) {
    }
  }
  std::size_t quiet = 0;
  double worst = 0.0;
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    std::mt19937_64 r(1000 + seed);
    Grid g(10, 10);
    for (int y = 0; y < 10; ++y) {
      for (int x = 0; x < 10; ++x) {
        g.set(y, x, static_cast<Color>(std::uniform_int_distribution<int>(0, 9)(r)));
      }
    }
    const double s = symmetry_score(g).score;
    worst = std::max(worst, s);
    if (s < 0.70) ++quiet;
  }
  return {exact == 200 && quiet >= 99,
          std::to_string(exact) + "/200 fixtures restored exactly; " + std::to_string(quiet) +
              "/100 random grids below 0.70 (max score " + fmt(worst, 3) + ")"};
}

// --- 8 -------------------------------------------------------------------

Verdict pass2_protocol() {
  // score_pass2 against a two-disjunct oracle on rows.
  std::vector<Grid> small;
  for (int c = 0; c < 3; ++c) small.push_back(Grid(1, 1, static_cast<Color>(c)));
  for (int a = 0; a < 2; ++a) {
    for (int b = 0; b < 2; ++b) {
      small.push_back(Grid::from_rows({{a, b}}));
      small.push_back(Grid::from_rows({{a}, {b}}));
    }
  }
  std::size_t score_cases = 0;
  std::size_t score_bad = 0;
  for (const auto& f : small) {
    for (const auto& s : small) {
      for (const auto& t : small) {
        ++score_cases;
        const bool oracle = f.to_rows() == t.to_rows() || s.to_rows() == t.to_rows();
        if (score_pass2(f, s, t) != oracle) ++score_bad;
      }
      ++score_cases;
      try {
        score_pass2(f, s, std::nullopt);
        ++score_bad;
      } catch (const Error& e) {
        if (e.code() != ErrorCode::MissingGroundTruth) ++score_bad;
      }
    }
  }

  // assemble_pass2 on every ordering of [A, A, B, C] and every train-match
  // assignment, against a ranking oracle.
  const Grid A(1, 1, 1), B(1, 1, 2), C(1, 1, 3);
  TaskRecord task;
  task.task_id = "fixture";
  task.train.push_back({A, A});
  task.test_inputs.push_back(A);
  std::vector<int> order{0, 0, 1, 2};
  const Grid* names[] = {&A, &B, &C};
  std::size_t assemble_cases = 0;
  std::size_t assemble_bad = 0;
  auto oracle_pick = [](const std::vector<PoolEntry>& es, bool use_matches) {
    std::size_t best = 0;
    auto key = [&](std::size_t i) {
      std::size_t agree = 0;
      for (std::size_t j = 0; j < es.size(); ++j) agree += (j != i && es[j].grid == es[i].grid);
      return std::pair<std::size_t, std::size_t>{use_matches ? es[i].train_matches : 0, agree};
    };
    for (std::size_t i = 1; i < es.size(); ++i) {
      if (key(i) > key(best)) best = i;
    }
    return best;
  };
  do {
    for (int mask = 0; mask < 16; ++mask) {
      CandidatePool pool;
      for (std::size_t i = 0; i < 4; ++i) {
        pool.entries.push_back({*names[order[i]], "e" + std::to_string(i),
                                static_cast<std::size_t>((mask >> i) & 1)});
      }
      for (auto strategy : {SelectionStrategy::TrainConsistency, SelectionStrategy::Agreement}) {
        ++assemble_cases;
        const bool use_matches = strategy == SelectionStrategy::TrainConsistency;
        const std::size_t fi = oracle_pick(pool.entries, use_matches);
        std::vector<PoolEntry> rest;
        for (const auto& e : pool.entries) {
          if (e.grid != pool.entries[fi].grid) rest.push_back(e);
        }
        const std::size_t si = oracle_pick(rest, use_matches);
        const Submission s = assemble_pass2(pool, task, 0, strategy);
        const bool ok = s.first == pool.entries[fi].grid && s.first_tag == pool.entries[fi].source_tag &&
                        s.second == rest[si].grid && s.second_tag == rest[si].source_tag &&
                        s.second != s.first;
        if (!ok) ++assemble_bad;
      }
    }
  } while (std::next_permutation(order.begin(), order.end()));
  // A pool of copies repeats its only grid.
  CandidatePool copies;
  copies.entries = {{A, "x", 0}, {A, "y", 0}};
  const Submission dup = assemble_pass2(copies, task, 0, SelectionStrategy::TrainConsistency);
  ++assemble_cases;
  if (dup.first != A || dup.second != A) ++assemble_bad;

  // Two builtin-mode evaluations of the training set serialize identically.
  const Config config;
  const auto t0 = Clock::now();
  const EvalReport r1 = run_eval(kData / "arc_training", config);
  const EvalReport r2 = run_eval(kData / "arc_training", config);
  const std::string j1 = to_json(r1).dump();
  const std::string j2 = to_json(r2).dump();
  const bool same = j1 == j2;

  return {score_bad == 0 && assemble_bad == 0 && same,
          "score_pass2 " + std::to_string(score_cases - score_bad) + "/" +
              std::to_string(score_cases) + ", assemble_pass2 " +
              std::to_string(assemble_cases - assemble_bad) + "/" + std::to_string(assemble_cases) +
              ", run_eval reports " + (same ? "identical" : "differ") + " (" +
              std::to_string(j1.size()) + " bytes, " + std::to_string(r1.tasks.size()) +
              " tasks, pass@2 " + fmt(r1.pass_at_2, 4) + ", " + fmt(since(t0), 1) + " s)"};
}

// --- 9 -------------------------------------------------------------------

Verdict config_snapshot() {
  const nlohmann::json expected = {
      {"repetitions", 5},
      {"top_k", 3},
      {"symmetry_threshold", 0.70},
      {"attempts", 5},
      {"concurrency", 5},
      {"retry",
       {{"max_retries", 3},
        {"backoff_base_seconds", 0.5},
        {"backoff_cap_seconds", 8.0},
        {"general_error_backoff_seconds", 0.1},
        {"request_timeout_seconds", 72000.0}}}};
  const nlohmann::json actual = to_json(Config{});
  std::vector<std::string> diffs;
  for (const auto& [k, v] : expected.items()) {
    if (!actual.contains(k) || actual[k] != v) diffs.push_back(k);
  }
  // Attempts accepted exactly within 3-10.
  std::size_t range_bad = 0;
  for (std::size_t a = 0; a <= 12; ++a) {
    Config c;
    c.attempts = a;
    bool accepted = true;
    try {
      validate(c);
    } catch (const Error&) {
      accepted = false;
    }
    if (accepted != (a >= 3 && a <= 10)) ++range_bad;
  }
  const SolveOptions so;
  if (so.attempts != 5 || so.symmetry_threshold != 0.70 || so.concurrency != 5) {
    diffs.push_back("solve options");
  }
  std::string detail = "repetitions 5, top-k 3, threshold 0.70, attempts 5 in [3,10], "
                       "concurrency 5, retries 3, backoff cap 8 s, general backoff 0.1 s, "
                       "timeout 72000 s";
  if (!diffs.empty()) {
    detail = "mismatched:";
    for (const auto& d : diffs) detail += " " + d;
  }
  if (range_bad != 0) detail += "; attempts range violations " + std::to_string(range_bad);
  return {diffs.empty() && range_bad == 0, detail};
}

}  // namespace

int main() {
  report(1, "scene abstraction oracles", scene_oracles);
  report(2, "render/abstract round trip", round_trip);
  report(3, "registry golden listing", registry_golden);

  SuiteResult suite;
  bool suite_ok = true;
  std::string suite_error;
  try {
    suite = planted_suite();
  } catch (const std::exception& e) {
    suite_ok = false;
    suite_error = e.what();
  }
  report(4, "planted program recovery", [&]() -> Verdict {
    if (!suite_ok) return {false, "exception: " + suite_error};
    const double rate = static_cast<double>(suite.solved) / static_cast<double>(suite.tasks);
    return {rate >= 0.95 && suite.deeper == 0 && suite.pipeline_seconds < 120.0,
            std::to_string(suite.solved) + "/" + std::to_string(suite.tasks) + " solved (" +
                fmt(100.0 * rate, 1) + "%), " + std::to_string(suite.wrong) + " wrong, " +
                std::to_string(suite.no_program) + " without program, deeper than planted " +
                std::to_string(suite.deeper) + ", pipeline " + fmt(suite.pipeline_seconds, 1) +
                " s (generation " + fmt(suite.generation_seconds, 1) + " s)"};
  });
  report(5, "consistency soundness", [&]() -> Verdict {
    if (!suite_ok) return {false, "exception: " + suite_error};
    return {suite.violations == 0 && suite.survivors > 0,
            std::to_string(suite.survivors) + " surviving programs re-validated, " +
                std::to_string(suite.violations) + " violations"};
  });
  report(6, "voting properties", voting_properties);
  report(7, "symmetry solver", symmetry_solver);
  report(8, "pass@2 protocol", pass2_protocol);
  report(9, "configuration snapshot", config_snapshot);
  std::cout << (failures == 0 ? "all criteria passed" : std::to_string(failures) + " criteria failed")
            << std::endl;
  return failures;
}
