#include "arc/solution.hpp"

#include "arc/error.hpp"
#include "arc/scene.hpp"
#include "arc/semantics.hpp"

#include <algorithm>
#include <array>
#include <future>
#include <map>
#include <optional>

namespace arc {
namespace {

constexpr std::array<SymmetryTransform, 5> kTransforms{
    SymmetryTransform::HorizontalMirror, SymmetryTransform::VerticalMirror,
    SymmetryTransform::Rotate180, SymmetryTransform::Rotate90, SymmetryTransform::Transpose};

bool applies(SymmetryTransform t, const Grid& g) {
  if (t == SymmetryTransform::Rotate90 || t == SymmetryTransform::Transpose) {
    return g.height() == g.width();
  }
  return true;
}

/// Colors other than bg whose cells exactly fill their bounding box.
std::vector<std::vector<Coord>> occlusion_candidates(const Grid& g, Color bg) {
  std::array<std::vector<Coord>, kNumColors> cells;
  for (int y = 0; y < g.height(); ++y) {
    for (int x = 0; x < g.width(); ++x) cells[g.at(y, x)].push_back({y, x});
  }
  std::vector<std::vector<Coord>> out;
  for (int c = 0; c < kNumColors; ++c) {
    const auto& pts = cells[static_cast<std::size_t>(c)];
    if (c == bg || pts.empty()) continue;
    int y0 = g.height();
    int x0 = g.width();
    int y1 = -1;
    int x1 = -1;
    for (const auto& p : pts) {
      y0 = std::min(y0, p.y);
      x0 = std::min(x0, p.x);
      y1 = std::max(y1, p.y);
      x1 = std::max(x1, p.x);
    }
    const auto area = static_cast<std::size_t>((y1 - y0 + 1) * (x1 - x0 + 1));
    if (area == pts.size()) out.push_back(pts);
  }
  return out;
}

struct Score {
  std::size_t matching = 0;
  std::size_t comparable = 0;
  bool restorable = true;  // every occluded cell maps outside the occlusion

  double value() const {
    return comparable == 0 ? 0.0 : static_cast<double>(matching) / static_cast<double>(comparable);
  }
};

Score score_transform(const Grid& g, Color bg, SymmetryTransform t,
                      const std::vector<char>& occluded) {
  Score s;
  const int h = g.height();
  const int w = g.width();
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      const Coord q = apply_transform(t, {y, x}, h, w);
      const bool p_occ = occluded[static_cast<std::size_t>(y * w + x)] != 0;
      const bool q_occ = occluded[static_cast<std::size_t>(q.y * w + q.x)] != 0;
      if (p_occ && q_occ) s.restorable = false;
      if (p_occ || q_occ || (q.y == y && q.x == x)) continue;
      const Color a = g.at(y, x);
      const Color b = g.at(q);
      if (a == bg && b == bg) continue;
      ++s.comparable;
      if (a == b) ++s.matching;
    }
  }
  return s;
}

std::vector<char> mask_of(const Grid& g, const std::vector<Coord>& region) {
  std::vector<char> mask(g.size(), 0);
  for (const auto& c : region) mask[static_cast<std::size_t>(c.y * g.width() + c.x)] = 1;
  return mask;
}

std::vector<Grid> sample_external(ExternalSolver& solver, const TaskRecord& task,
                                  const Grid& test_input, const Hint& hint,
                                  const SolveOptions& options, std::vector<std::string>& notes) {
  std::vector<std::optional<Grid>> slots(options.attempts);
  const std::size_t cap = std::max<std::size_t>(1, options.concurrency);
  for (std::size_t begin = 0; begin < slots.size(); begin += cap) {
    const std::size_t end = std::min(slots.size(), begin + cap);
    std::vector<std::future<Grid>> inflight;
    for (std::size_t i = begin; i < end; ++i) {
      inflight.push_back(std::async(std::launch::async, [&, i] {
        return solver.sample(task, test_input, hint, i);
      }));
    }
    for (std::size_t i = begin; i < end; ++i) {
      try {
        slots[i] = inflight[i - begin].get();
      } catch (const std::exception& e) {
        notes.push_back("external sample " + std::to_string(i) + ": " + e.what());
      }
    }
  }
  std::vector<Grid> out;
  for (auto& s : slots) {
    if (s) out.push_back(std::move(*s));
  }
  return out;
}

}  // namespace

std::string_view to_string(Provenance p) {
  switch (p) {
    case Provenance::ExecutedProgram: return "executed_program";
    case Provenance::SymmetrySolver: return "symmetry_solver";
    case Provenance::ExternalSolver: return "external_solver";
    case Provenance::BestEffort: return "best_effort";
  }
  return "?";
}

std::string_view to_string(SymmetryTransform t) {
  switch (t) {
    case SymmetryTransform::HorizontalMirror: return "horizontal mirror";
    case SymmetryTransform::VerticalMirror: return "vertical mirror";
    case SymmetryTransform::Rotate180: return "180 rotation";
    case SymmetryTransform::Rotate90: return "90 rotation";
    case SymmetryTransform::Transpose: return "transpose";
  }
  return "?";
}

Coord apply_transform(SymmetryTransform t, Coord c, int h, int w) {
  switch (t) {
    case SymmetryTransform::HorizontalMirror: return {c.y, w - 1 - c.x};
    case SymmetryTransform::VerticalMirror: return {h - 1 - c.y, c.x};
    case SymmetryTransform::Rotate180: return {h - 1 - c.y, w - 1 - c.x};
    case SymmetryTransform::Rotate90: return {c.x, h - 1 - c.y};
    case SymmetryTransform::Transpose: return {c.x, c.y};
  }
  return c;
}

Grid solve_direct(const Program& t, const Grid& test_input) {
  try {
    return run_program(t, test_input);
  } catch (const Error& e) {
    throw Error(ErrorCode::ExecutionFailed, e.what(), e.step());
  }
}

SymmetryAssessment symmetry_score(const Grid& g) {
  const Color bg = find_background(g);
  std::vector<std::vector<Coord>> occlusions{{}};
  for (auto& region : occlusion_candidates(g, bg)) occlusions.push_back(std::move(region));

  SymmetryAssessment best;
  bool have = false;
  bool best_restorable = false;
  for (const auto& region : occlusions) {
    const auto mask = mask_of(g, region);
    for (auto t : kTransforms) {
      if (!applies(t, g)) continue;
      const Score s = score_transform(g, bg, t, mask);
      const bool restorable = !region.empty() && s.restorable;
      const double v = s.value();
      const bool better = !have || v > best.score ||
                          (v == best.score && restorable && !best_restorable);
      if (!better) continue;
      best.score = v;
      best.best_transform = t;
      best.occluded_region = region;
      best_restorable = restorable;
      have = true;
    }
  }
  std::sort(best.occluded_region.begin(), best.occluded_region.end());
  return best;
}

Grid solve_symmetry(const Grid& g, const SymmetryAssessment& assessment, double threshold) {
  if (!(assessment.score > threshold)) {
    throw Error(ErrorCode::PreconditionViolation, "symmetry score does not exceed the threshold");
  }
  if (assessment.occluded_region.empty()) {
    throw Error(ErrorCode::NoOcclusion, "no occluded region to complete");
  }
  const Color bg = find_background(g);
  const auto mask = mask_of(g, assessment.occluded_region);
  const int h = g.height();
  const int w = g.width();
  auto occluded = [&](Coord c) { return mask[static_cast<std::size_t>(c.y * w + c.x)] != 0; };

  std::vector<SymmetryTransform> order{assessment.best_transform};
  for (auto t : kTransforms) {
    if (t == assessment.best_transform || !applies(t, g)) continue;
    if (score_transform(g, bg, t, mask).value() > threshold) order.push_back(t);
  }
  Grid out = g;
  for (const auto& c : assessment.occluded_region) {
    Color v = bg;
    for (auto t : order) {
      const Coord q = apply_transform(t, c, h, w);
      if (!occluded(q)) {
        v = g.at(q);
        break;
      }
    }
    out.set(c, v);
  }
  return out;
}

VoteResult majority_vote(std::span<const Grid> candidates) {
  if (candidates.empty()) throw Error(ErrorCode::NoCandidates, "nothing to vote on");

  // Dimension groups keyed by first appearance.
  std::vector<std::pair<std::pair<int, int>, std::vector<const Grid*>>> groups;
  for (const auto& g : candidates) {
    const std::pair<int, int> dims{g.height(), g.width()};
    auto it = std::find_if(groups.begin(), groups.end(),
                           [&](const auto& gr) { return gr.first == dims; });
    if (it == groups.end()) {
      groups.push_back({dims, {&g}});
    } else {
      it->second.push_back(&g);
    }
  }
  const auto* group = &groups.front();
  for (const auto& gr : groups) {
    if (gr.second.size() > group->second.size()) group = &gr;
  }
  const auto& members = group->second;

  VoteResult result{Grid(group->first.first, group->first.second), members.size(), 0.0};
  double agreement = 0.0;
  for (int y = 0; y < result.grid.height(); ++y) {
    for (int x = 0; x < result.grid.width(); ++x) {
      std::array<std::size_t, kNumColors> counts{};
      for (const auto* m : members) ++counts[m->at(y, x)];
      Color winner = members.front()->at(y, x);
      for (const auto* m : members) {
        if (counts[m->at(y, x)] > counts[winner]) winner = m->at(y, x);
      }
      result.grid.set(y, x, winner);
      agreement += static_cast<double>(counts[winner]) / static_cast<double>(members.size());
    }
  }
  result.per_cell_agreement = agreement / static_cast<double>(result.grid.size());
  return result;
}

Grid best_effort(std::span<const RankedPattern> ranked, const Grid& test_input) {
  const SceneGraph scene = abstract_scene(test_input);
  std::vector<Color> paints;
  for (int c = 0; c < kNumColors; ++c) {
    if (c != scene.background) paints.push_back(static_cast<Color>(c));
  }
  std::optional<Grid> unchanged;
  for (const auto& r : ranked) {
    const auto* sem = find_semantics(r.pattern_name);
    if (sem == nullptr) continue;
    Params params;
    for (const auto& sp : sem->parameters) {
      auto it = r.params.find(sp.name);
      const bool usable =
          it != r.params.end() && std::find(sp.executable_values.begin(),
                                            sp.executable_values.end(),
                                            it->second) != sp.executable_values.end();
      params[sp.name] = usable ? it->second : sp.executable_values.front();
    }
    std::vector<Selector> sources{Selector::all()};
    if (sem->needs_source) sources = selector_vocabulary(scene);
    const bool paint = needs_paint(r.pattern_name, params);
    for (const auto& source : sources) {
      for (std::size_t pi = 0; pi < (paint ? paints.size() : 1); ++pi) {
        PatternInstance inst{r.pattern_name, params, {}};
        if (sem->needs_source) inst.bindings.emplace(role::kSource, source);
        if (paint) inst.bindings.emplace(role::kPaint, Selector::literal(paints[pi]));
        try {
          Grid out = apply_step(inst, scene, test_input);
          if (out != test_input) return out;
          if (!unchanged) unchanged = std::move(out);
        } catch (const Error&) {
        }
      }
    }
  }
  if (unchanged) return *unchanged;
  throw Error(ErrorCode::Unsolvable, "no ranked executable pattern applies to the test input");
}

SolveResult solve_task(const ConsistencyReport& report, const TaskRecord& task,
                       const Grid& test_input, const SolveOptions& options,
                       ExternalSolver* external) {
  if (options.attempts < 3 || options.attempts > 10) {
    throw Error(ErrorCode::InvalidArgument, "attempts must be within 3-10");
  }
  SolveResult result;
  auto finish = [&](Grid g, Provenance p) {
    result.candidates.push_back({g, p});
    result.final_prediction = std::move(g);
    result.provenance = p;
    result.votes_used = 1;
    result.per_cell_agreement = 1.0;
    return result;
  };

  if (report.selected) {
    try {
      return finish(solve_direct(*report.selected, test_input), Provenance::ExecutedProgram);
    } catch (const Error& e) {
      result.notes.push_back(std::string("program: ") + e.what());
    }
  } else {
    result.notes.push_back("program: no consistent program");
  }

  const SymmetryAssessment sym = symmetry_score(test_input);
  if (sym.score > options.symmetry_threshold) {
    try {
      return finish(solve_symmetry(test_input, sym, options.symmetry_threshold),
                    Provenance::SymmetrySolver);
    } catch (const Error& e) {
      result.notes.push_back(std::string("symmetry: ") + e.what());
    }
  } else {
    result.notes.push_back("symmetry: score " + std::to_string(sym.score) +
                           " does not exceed the threshold");
  }

  if (report.hint && external != nullptr) {
    auto samples = sample_external(*external, task, test_input, *report.hint, options,
                                   result.notes);
    if (!samples.empty()) {
      VoteResult vote = majority_vote(samples);
      for (auto& s : samples) result.candidates.push_back({std::move(s), Provenance::ExternalSolver});
      result.final_prediction = std::move(vote.grid);
      result.provenance = Provenance::ExternalSolver;
      result.votes_used = vote.votes_used;
      result.per_cell_agreement = vote.per_cell_agreement;
      return result;
    }
    result.notes.push_back("external: no usable sample");
  } else {
    result.notes.push_back("external: no hint or no solver");
  }

  try {
    finish(best_effort(report.ranked, test_input), Provenance::BestEffort);
    result.low_confidence = true;
    return result;
  } catch (const Error& e) {
    result.notes.push_back(std::string("best effort: ") + e.what());
  }
  std::string why;
  for (const auto& n : result.notes) why += (why.empty() ? "" : "; ") + n;
  throw Error(ErrorCode::Unsolvable, why);
}

}  // namespace arc
