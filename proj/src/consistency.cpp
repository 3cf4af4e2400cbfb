#include "arc/consistency.hpp"

#include "arc/error.hpp"
#include "arc/semantics.hpp"

#include <nlohmann/json.hpp>

#include <map>
#include <memory>
#include <set>
#include <sstream>
#include <unordered_map>
#include <unordered_set>

namespace arc {
namespace {

/// Grid after a program prefix, or the error that stopped it.
struct PrefixState {
  std::optional<Grid> grid;
  std::optional<SceneGraph> scene;  // abstracted lazily
  std::string error;
};

/// Runs programs on one input, sharing work between programs with a common
/// prefix.
class PrefixRunner {
 public:
  explicit PrefixRunner(const Grid& input) : input_(input) {}

  const PrefixState& run(const Program& p) {
    PrefixState* state = nullptr;
    std::string key;
    for (std::size_t i = 0; i < p.steps.size(); ++i) {
      if (i != 0) key += " >> ";
      key += canonical_id(p.steps[i]);
      auto it = cache_.find(key);
      if (it != cache_.end()) {
        state = it->second.get();
        continue;
      }
      auto next = std::make_unique<PrefixState>();
      if (state != nullptr && !state->grid) {
        next->error = state->error;
      } else {
        const Grid& before = state == nullptr ? input_ : *state->grid;
        try {
          const SceneGraph& scene = scene_of(state);
          next->grid = apply_step(p.steps[i], scene, before);
        } catch (const Error& e) {
          next->error = "step " + std::to_string(i) + ": " + e.what();
        }
      }
      state = cache_.emplace(key, std::move(next)).first->second.get();
    }
    return *state;
  }

 private:
  const SceneGraph& scene_of(PrefixState* state) {
    if (state == nullptr) {
      if (!input_scene_) input_scene_ = abstract_scene(input_);
      return *input_scene_;
    }
    if (!state->scene) state->scene = abstract_scene(*state->grid);
    return *state->scene;
  }

  const Grid& input_;
  std::optional<SceneGraph> input_scene_;
  std::unordered_map<std::string, std::unique_ptr<PrefixState>> cache_;
};

}  // namespace

bool validates(const Program& p, const TrainPair& pair, std::string* cause) {
  try {
    validate_program(p, true);
    return run_program(p, pair.input) == pair.output;
  } catch (const Error& e) {
    if (cause != nullptr) *cause = e.what();
    return false;
  }
}

std::string summarize_scene(const SceneGraph& scene) {
  std::ostringstream out;
  out << "background " << int(scene.background) << ", " << scene.height << "x" << scene.width
      << ", " << scene.objects.size() << " objects";
  for (const auto& obj : scene.objects) {
    out << "\n#" << obj.object_id << " color " << int(obj.dominant_color()) << " "
        << to_string(obj.shape) << " " << obj.height() << "x" << obj.width() << " at ("
        << obj.bbox.y_min << "," << obj.bbox.x_min << "), " << obj.size() << " cells";
    if (!obj.cavities.empty()) out << ", " << obj.cavities.size() << " cavities";
  }
  return out.str();
}

ConsistencyReport filter_consistent(std::span<const CandidateSet> candidates,
                                    std::span<const TrainPair> pairs,
                                    const ConsistencyOptions& options) {
  if (candidates.size() != pairs.size()) {
    throw Error(ErrorCode::InvalidArgument, "need one candidate set per training pair");
  }
  ConsistencyReport report;
  std::vector<std::unordered_set<std::string>> valid_sets;
  std::vector<std::vector<const Program*>> valid_programs;
  for (std::size_t i = 0; i < pairs.size(); ++i) {
    const auto& pair = pairs[i];
    PrefixRunner runner(pair.input);
    std::vector<std::string> ids;
    std::unordered_set<std::string> set;
    std::vector<const Program*> progs;
    std::size_t failures = 0;
    for (const auto& p : candidates[i].candidates) {
      if (p.steps.empty()) continue;
      std::string id = canonical_id(p);
      if (set.contains(id)) continue;
      const auto& state = runner.run(p);
      if (!state.grid) {
        ++failures;
        continue;
      }
      if (*state.grid != pair.output) continue;
      set.insert(id);
      ids.push_back(std::move(id));
      progs.push_back(&p);
    }
    report.per_example_valid.push_back(std::move(ids));
    report.execution_failures.push_back(failures);
    valid_sets.push_back(std::move(set));
    valid_programs.push_back(std::move(progs));
  }

  if (!pairs.empty()) {
    const Program* best = nullptr;
    const auto& first_ids = report.per_example_valid.front();
    for (std::size_t j = 0; j < first_ids.size(); ++j) {
      bool everywhere = true;
      for (std::size_t i = 1; i < valid_sets.size() && everywhere; ++i) {
        everywhere = valid_sets[i].contains(first_ids[j]);
      }
      if (!everywhere) continue;
      report.surviving.push_back(first_ids[j]);
      const Program* p = valid_programs.front()[j];
      if (best == nullptr || p->depth() < best->depth()) best = p;
    }
    if (best != nullptr) report.selected = *best;
  }

  std::vector<std::vector<Detection>> all_runs;
  for (const auto& cs : candidates) {
    all_runs.insert(all_runs.end(), cs.runs.begin(), cs.runs.end());
  }
  report.ranked = aggregate_detections(all_runs, options.k_top);

  if (!report.selected) {
    Hint hint;
    hint.ranked_patterns = report.ranked;
    if (options.test_input != nullptr) {
      hint.scene_summary = summarize_scene(abstract_scene(*options.test_input));
    }
    for (const auto& r : report.ranked) {
      std::size_t examples = 0;
      std::size_t agreeing = 0;
      for (const auto& cs : candidates) {
        bool seen = false;
        bool same = false;
        for (const auto& run : cs.runs) {
          for (const auto& d : run) {
            if (!d.detected || d.pattern_name != r.pattern_name) continue;
            seen = true;
            same = same || d.params == r.params;
          }
        }
        examples += seen ? 1 : 0;
        agreeing += same ? 1 : 0;
      }
      std::ostringstream note;
      note << r.pattern_name << ": detected in " << examples << " of " << candidates.size()
           << " examples, " << r.count << " detections, modal params in " << agreeing
           << " examples";
      hint.consensus_notes.push_back(note.str());
    }
    report.hint = std::move(hint);
  }
  return report;
}

nlohmann::json to_json(const Hint& hint) {
  nlohmann::json ranked = nlohmann::json::array();
  for (const auto& r : hint.ranked_patterns) {
    ranked.push_back({{"pattern_name", r.pattern_name}, {"params", r.params}, {"count", r.count}});
  }
  return {{"ranked_patterns", std::move(ranked)},
          {"scene_summary", hint.scene_summary},
          {"consensus_notes", hint.consensus_notes}};
}

nlohmann::json to_json(const ConsistencyReport& report) {
  nlohmann::json j;
  j["per_example_valid"] = report.per_example_valid;
  j["surviving"] = report.surviving;
  j["selected"] = report.selected ? to_json(*report.selected) : nlohmann::json(nullptr);
  j["selected_id"] = report.selected ? canonical_id(*report.selected) : std::string();
  j["hint"] = report.hint ? to_json(*report.hint) : nlohmann::json(nullptr);
  j["execution_failures"] = report.execution_failures;
  return j;
}

}  // namespace arc
