#include "arc/hypothesis.hpp"

#include "arc/error.hpp"
#include "arc/patterns.hpp"
#include "arc/semantics.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <map>
#include <numeric>
#include <optional>
#include <set>
#include <unordered_map>

namespace arc {
namespace {

/// How a step's result relates to the grid it started from and the target.
struct Fit {
  std::size_t changed = 0;
  std::size_t hits = 0;   // changed cells that now have their target color
  bool explains = false;  // changes something, and only cells that must change
  bool exact = false;     // every changed cell already has its target color
  bool complete = false;  // result equals the target
  bool tolerable = false;  // like explains, but also allows cells that end as background
};

Fit assess(const Grid& before, const Grid& after, const Grid& target, Color bg) {
  Fit fit;
  bool inside = true;
  bool tolerable = true;
  bool complete = true;
  const auto b = before.cells();
  const auto a = after.cells();
  const auto t = target.cells();
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (a[i] != t[i]) complete = false;
    if (a[i] == b[i]) continue;
    ++fit.changed;
    if (a[i] == t[i]) ++fit.hits;
    if (b[i] == t[i]) {
      inside = false;
      if (t[i] != bg) tolerable = false;
    }
  }
  fit.explains = fit.changed > 0 && inside;
  fit.exact = fit.explains && fit.hits == fit.changed;
  fit.complete = complete;
  fit.tolerable = fit.changed > 0 && tolerable;
  return fit;
}

const std::vector<Params>& cached_param_space(std::string_view pattern) {
  static std::map<std::string, std::vector<Params>, std::less<>> cache;
  auto it = cache.find(pattern);
  if (it == cache.end()) it = cache.emplace(std::string(pattern), semantic_param_space(pattern)).first;
  return it->second;
}

bool param_conflicts(const PatternSemantics& sem, const Params& candidate, const Params& fixed) {
  for (const auto& [k, v] : fixed) {
    auto it = candidate.find(k);
    if (it == candidate.end() || it->second == v) continue;
    // Only executable values restrict the space; others are hint material.
    for (const auto& sp : sem.parameters) {
      if (sp.name != k) continue;
      if (std::find(sp.executable_values.begin(), sp.executable_values.end(), v) !=
          sp.executable_values.end()) {
        return true;
      }
    }
  }
  return false;
}

/// Parameter maps of one pattern left after applying fixed values.
struct PatternPlan {
  std::string name;
  const PatternSemantics* semantics = nullptr;
  std::vector<const Params*> params;
  std::vector<char> paint;  // per entry of params
};

std::vector<PatternPlan> make_plans(const std::vector<std::pair<std::string, Params>>& patterns) {
  std::vector<PatternPlan> plans;
  for (const auto& [name, fixed] : patterns) {
    PatternPlan plan;
    plan.name = name;
    plan.semantics = find_semantics(name);
    if (plan.semantics == nullptr) continue;
    for (const auto& params : cached_param_space(name)) {
      if (param_conflicts(*plan.semantics, params, fixed)) continue;
      plan.params.push_back(&params);
      plan.paint.push_back(needs_paint(name, params) ? 1 : 0);
    }
    plans.push_back(std::move(plan));
  }
  return plans;
}

/// One enumerated pattern instance, stored as indices.
struct Trial {
  std::uint32_t plan = 0;
  std::uint32_t params = 0;
  std::uint32_t selector = 0;
  Color paint = 0;
  std::uint32_t result = 0;  // index into Enumerator results
};

/// Applies every instance of the planned patterns to one scene, executing
/// each distinct (params, resolved objects, paint) combination once.
class Enumerator {
 public:
  Enumerator(const SceneGraph& scene, const Grid& rendered, const std::vector<PatternPlan>& plans,
             bool include_ids, std::vector<Color> paints)
      : scene_(scene), rendered_(rendered), plans_(plans), paints_(std::move(paints)) {
    vocab_ = selector_vocabulary(scene, include_ids);
    std::map<std::vector<int>, std::uint32_t> seen;
    for (const auto& sel : vocab_) {
      std::vector<int> ids;
      for (const auto* obj : resolve(sel, scene)) ids.push_back(obj->object_id);
      auto it = seen.emplace(std::move(ids), static_cast<std::uint32_t>(seen.size())).first;
      group_of_.push_back(it->second);
    }
  }

  /// Trials of all plans in plan, parameter, selector, paint order.
  std::vector<Trial> run() {
    std::vector<Trial> out;
    const std::vector<Color> no_paint{0};
    for (std::uint32_t pi = 0; pi < plans_.size(); ++pi) {
      const auto& plan = plans_[pi];
      const bool sourced = plan.semantics->needs_source;
      const std::size_t selectors = sourced ? vocab_.size() : 1;
      for (std::uint32_t mi = 0; mi < plan.params.size(); ++mi) {
        const auto& paints = plan.paint[mi] ? paints_ : no_paint;
        std::map<std::pair<std::uint32_t, Color>, std::optional<std::uint32_t>> memo;
        for (std::uint32_t s = 0; s < selectors; ++s) {
          for (Color c : paints) {
            Trial t{pi, mi, s, c, 0};
            auto [it, fresh] = memo.try_emplace({sourced ? group_of_[s] : 0U, c});
            if (fresh) it->second = execute(instance(t));
            if (!it->second) continue;
            t.result = *it->second;
            out.push_back(t);
          }
        }
      }
    }
    return out;
  }

  PatternInstance instance(const Trial& t) const {
    const auto& plan = plans_[t.plan];
    PatternInstance inst{plan.name, *plan.params[t.params], {}};
    if (plan.semantics->needs_source) {
      inst.bindings.emplace(role::kSource, vocab_[t.selector]);
    }
    if (plan.paint[t.params]) inst.bindings.emplace(role::kPaint, Selector::literal(t.paint));
    return inst;
  }

  const Grid& result(std::size_t i) const { return results_[i]; }

 private:
  std::optional<std::uint32_t> execute(const PatternInstance& inst) {
    try {
      results_.push_back(apply_validated_step(inst, scene_, rendered_));
      return static_cast<std::uint32_t>(results_.size() - 1);
    } catch (const Error&) {
      return std::nullopt;
    }
  }

  const SceneGraph& scene_;
  const Grid& rendered_;
  const std::vector<PatternPlan>& plans_;
  std::vector<Color> paints_;
  std::vector<Selector> vocab_;
  std::vector<std::uint32_t> group_of_;
  std::vector<Grid> results_;
};

std::vector<Color> all_colors() {
  std::vector<Color> out(kNumColors);
  std::iota(out.begin(), out.end(), Color{0});
  return out;
}

/// Marks the trials whose results are among the intermediates worth a second
/// step: the `width` best distinct explaining results (exact first, then more
/// changed cells), plus the `tolerant_width` best results that only overshoot
/// onto cells ending as background (more target hits first). Within each
/// tier patterns take turns, best result first. Ties keep enumeration order.
std::vector<char> expansion_set(const std::vector<Trial>& trials, const std::vector<Fit>& fits,
                                const Enumerator& e, std::size_t width,
                                std::size_t tolerant_width) {
  std::vector<std::size_t> reps;  // trial index of each distinct intermediate
  std::vector<std::size_t> rep_of(trials.size(), SIZE_MAX);
  std::unordered_map<std::uint32_t, std::size_t> rep_of_result;
  std::unordered_map<std::uint64_t, std::vector<std::size_t>> by_hash;
  for (std::size_t i = 0; i < trials.size(); ++i) {
    if (!fits[i].tolerable) continue;
    auto known = rep_of_result.find(trials[i].result);
    if (known != rep_of_result.end()) {
      rep_of[i] = known->second;
      continue;
    }
    const Grid& g = e.result(trials[i].result);
    auto& bucket = by_hash[grid_hash(g)];
    std::size_t found = SIZE_MAX;
    for (std::size_t r : bucket) {
      if (e.result(trials[reps[r]].result) == g) found = r;
    }
    if (found == SIZE_MAX) {
      found = reps.size();
      reps.push_back(i);
      bucket.push_back(found);
    }
    rep_of_result[trials[i].result] = found;
    rep_of[i] = found;
  }

  std::vector<std::size_t> strict;
  std::vector<std::size_t> tolerant;
  for (std::size_t r = 0; r < reps.size(); ++r) {
    (fits[reps[r]].explains ? strict : tolerant).push_back(r);
  }
  std::stable_sort(strict.begin(), strict.end(), [&](std::size_t a, std::size_t b) {
    const Fit& fa = fits[reps[a]];
    const Fit& fb = fits[reps[b]];
    if (fa.exact != fb.exact) return fa.exact;
    return fa.changed > fb.changed;
  });
  std::stable_sort(tolerant.begin(), tolerant.end(), [&](std::size_t a, std::size_t b) {
    return fits[reps[a]].hits > fits[reps[b]].hits;
  });
  // Interleave patterns so one prolific pattern cannot fill a tier alone.
  auto interleave = [&](std::vector<std::size_t>& tier) {
    std::map<std::uint32_t, std::size_t> seen;
    std::vector<std::pair<std::size_t, std::size_t>> keyed;  // (round, position)
    for (std::size_t i = 0; i < tier.size(); ++i) {
      keyed.emplace_back(seen[trials[reps[tier[i]]].plan]++, i);
    }
    std::stable_sort(keyed.begin(), keyed.end());
    std::vector<std::size_t> out;
    for (const auto& [round, pos] : keyed) out.push_back(tier[pos]);
    tier = std::move(out);
  };
  interleave(strict);
  interleave(tolerant);
  std::vector<char> keep_rep(reps.size(), 0);
  for (std::size_t i = 0; i < std::min(width, strict.size()); ++i) keep_rep[strict[i]] = 1;
  for (std::size_t i = 0; i < std::min(tolerant_width, tolerant.size()); ++i) {
    keep_rep[tolerant[i]] = 1;
  }
  std::vector<char> keep(trials.size(), 0);
  for (std::size_t i = 0; i < trials.size(); ++i) {
    if (rep_of[i] != SIZE_MAX) keep[i] = keep_rep[rep_of[i]];
  }
  return keep;
}

/// Semantic parameters shared by all instances, or dropped where they differ.
void merge_agreement(std::optional<Params>& agreed, const Params& params) {
  if (!agreed) {
    agreed = params;
    return;
  }
  for (auto it = agreed->begin(); it != agreed->end();) {
    auto other = params.find(it->first);
    if (other == params.end() || other->second != it->second) {
      it = agreed->erase(it);
    } else {
      ++it;
    }
  }
}

std::vector<std::pair<std::string, Params>> all_executable() {
  std::vector<std::pair<std::string, Params>> out;
  for (const auto& schema : registry()) {
    if (find_semantics(schema.name) != nullptr) out.emplace_back(schema.name, Params{});
  }
  return out;
}

}  // namespace

std::string_view to_string(DetectionSource source) {
  return source == DetectionSource::Builtin ? "builtin" : "external";
}

std::vector<Color> changed_colors(const Grid& input, const Grid& output) {
  std::array<bool, kNumColors> seen{};
  if (input.height() == output.height() && input.width() == output.width()) {
    const auto a = input.cells();
    const auto b = output.cells();
    for (std::size_t i = 0; i < a.size(); ++i) {
      if (a[i] != b[i]) seen[b[i]] = true;
    }
  }
  std::vector<Color> out;
  for (int c = 0; c < kNumColors; ++c) {
    if (seen[static_cast<std::size_t>(c)]) out.push_back(static_cast<Color>(c));
  }
  return out;
}

std::vector<Detection> propose_builtin(const SceneGraph& input, const SceneGraph& output,
                                       const ProposerOptions& options) {
  if (input.height != output.height || input.width != output.width) return {};
  const Grid in = render(input);
  const Grid out = render(output);
  if (in == out) return {};

  struct Evidence {
    std::optional<Params> agreed;
    std::size_t level = 0;
    std::size_t changed = 0;
    std::string partner;
  };
  std::map<std::string, Evidence> evidence;
  auto credit = [&](const PatternInstance& inst, std::size_t level, std::size_t changed,
                    const std::string& partner) {
    auto& ev = evidence[inst.pattern];
    merge_agreement(ev.agreed, inst.params);
    if (ev.level == 0 || level < ev.level) {
      ev.level = level;
      ev.partner = partner;
    }
    ev.changed = std::max(ev.changed, changed);
  };

  const auto plans = make_plans(all_executable());
  Enumerator first(input, in, plans, true, changed_colors(in, out));
  const auto trials = first.run();
  std::vector<Fit> fits;
  fits.reserve(trials.size());
  bool solved = false;
  for (const auto& t : trials) {
    fits.push_back(assess(in, first.result(t.result), out, input.background));
    const Fit& f = fits.back();
    if (!f.explains) continue;
    solved = solved || f.complete;
    credit(first.instance(t), 1, f.changed, {});
  }

  if (!solved) {
    const auto keep =
        expansion_set(trials, fits, first, options.expansion_width, options.tolerant_width);
    std::map<std::uint32_t, std::vector<PatternInstance>> completions;
    for (std::size_t i = 0; i < trials.size(); ++i) {
      if (!keep[i]) continue;
      auto [it, fresh] = completions.try_emplace(trials[i].result);
      if (fresh) {
        const Grid& mid = first.result(trials[i].result);
        const SceneGraph mid_scene = abstract_scene(mid);
        Enumerator second(mid_scene, mid, plans, true, changed_colors(mid, out));
        for (const auto& t : second.run()) {
          const Grid& r = second.result(t.result);
          if (r == out) it->second.push_back(second.instance(t));
        }
      }
      if (it->second.empty()) continue;
      const auto step1 = first.instance(trials[i]);
      credit(step1, 2, fits[i].changed, it->second.front().pattern);
      for (const auto& step2 : it->second) credit(step2, 2, 0, step1.pattern);
    }
  }

  std::vector<Detection> detections;
  for (const auto& schema : registry()) {
    auto it = evidence.find(schema.name);
    if (it == evidence.end()) continue;
    Detection d;
    d.pattern_name = schema.name;
    d.params = it->second.agreed.value_or(Params{});
    d.detected = true;
    d.source = DetectionSource::Builtin;
    d.reason = it->second.level == 1
                   ? "changes " + std::to_string(it->second.changed) + " differing cells"
                   : "reproduces the output together with " + it->second.partner;
    detections.push_back(std::move(d));
  }
  return detections;
}

std::vector<RankedPattern> aggregate_detections(std::span<const std::vector<Detection>> runs,
                                                std::size_t k_top) {
  struct Tally {
    std::size_t count = 0;
    std::vector<std::pair<Params, std::size_t>> maps;  // first-seen order
  };
  std::map<std::size_t, Tally> tallies;  // keyed by registry index
  for (const auto& run : runs) {
    for (const auto& d : run) {
      if (!d.detected) continue;
      const std::size_t idx = registry_index(d.pattern_name);
      if (idx >= registry().size()) continue;
      auto& t = tallies[idx];
      ++t.count;
      auto it = std::find_if(t.maps.begin(), t.maps.end(),
                             [&](const auto& m) { return m.first == d.params; });
      if (it == t.maps.end()) {
        t.maps.emplace_back(d.params, 1);
      } else {
        ++it->second;
      }
    }
  }

  // Enum-order key of a parameter map: per schema parameter, the index of
  // its value (unset sorts last).
  auto enum_key = [](const PatternSchema& schema, const Params& params) {
    std::vector<std::size_t> key;
    for (const auto& spec : schema.parameters) {
      auto it = params.find(spec.name);
      std::size_t pos = spec.values.size();
      if (it != params.end()) {
        pos = static_cast<std::size_t>(
            std::find(spec.values.begin(), spec.values.end(), it->second) - spec.values.begin());
      }
      key.push_back(pos);
    }
    return key;
  };

  std::vector<RankedPattern> ranked;
  for (auto& [idx, t] : tallies) {
    const auto& schema = registry()[idx];
    const auto* best = &t.maps.front();
    for (const auto& m : t.maps) {
      if (m.second > best->second ||
          (m.second == best->second && enum_key(schema, m.first) < enum_key(schema, best->first))) {
        best = &m;
      }
    }
    ranked.push_back({schema.name, best->first, t.count});
  }
  std::stable_sort(ranked.begin(), ranked.end(),
                   [](const RankedPattern& a, const RankedPattern& b) { return a.count > b.count; });
  if (ranked.size() > k_top) ranked.resize(k_top);
  return ranked;
}

Enumeration instantiate_candidates(std::span<const RankedPattern> ranked, const SceneGraph& input,
                                   const InstantiateOptions& options) {
  if (options.max_depth < 1) throw Error(ErrorCode::InvalidArgument, "max_depth must be >= 1");
  Enumeration result;
  std::vector<std::pair<std::string, Params>> usable;
  for (const auto& r : ranked) {
    if (find_semantics(r.pattern_name) != nullptr) usable.emplace_back(r.pattern_name, r.params);
  }
  if (usable.empty()) {
    result.hint_only = true;
    return result;
  }
  const Grid in = render(input);
  const Grid* target = options.target;
  if (target != nullptr && (target->height() != in.height() || target->width() != in.width())) {
    return result;
  }
  const auto plans = make_plans(usable);

  auto emit = [&](Program p) {
    if (result.programs.size() >= options.budget) {
      result.budget_exceeded = true;
      return false;
    }
    result.programs.push_back(std::move(p));
    return true;
  };
  auto palette = [&](const Grid& from) {
    if (target != nullptr) return changed_colors(from, *target);
    return options.paint_colors.empty() ? all_colors() : options.paint_colors;
  };

  Enumerator first(input, in, plans, options.include_id_selectors, palette(in));
  const auto trials = first.run();
  std::vector<Fit> fits;
  fits.reserve(trials.size());
  for (const auto& t : trials) {
    if (target != nullptr) {
      fits.push_back(assess(in, first.result(t.result), *target, input.background));
    } else {
      Fit any;
      any.explains = any.tolerable = true;
      fits.push_back(any);
    }
  }

  for (std::size_t i = 0; i < trials.size(); ++i) {
    if (target != nullptr ? !fits[i].complete : !fits[i].explains) continue;
    if (!emit(Program{{first.instance(trials[i])}})) return result;
  }
  if (options.max_depth < 2) return result;

  const auto keep = target != nullptr ? expansion_set(trials, fits, first, options.expansion_width,
                                                      options.tolerant_width)
                                      : std::vector<char>(trials.size(), 1);
  // Second steps per distinct intermediate, computed once.
  std::map<std::uint32_t, std::vector<PatternInstance>> seconds;
  for (std::size_t i = 0; i < trials.size(); ++i) {
    if (!keep[i]) continue;
    auto [it, fresh] = seconds.try_emplace(trials[i].result);
    if (fresh) {
      const Grid& mid = first.result(trials[i].result);
      const SceneGraph mid_scene = abstract_scene(mid);
      Enumerator second(mid_scene, mid, plans, options.include_id_selectors, palette(mid));
      for (const auto& t : second.run()) {
        if (target != nullptr && second.result(t.result) != *target) continue;
        it->second.push_back(second.instance(t));
      }
    }
    if (it->second.empty()) continue;
    const auto step1 = first.instance(trials[i]);
    for (const auto& step : it->second) {
      if (!emit(Program{{step1, step}})) return result;
    }
  }
  return result;
}

nlohmann::json to_json(const Detection& d) {
  return {{"pattern_name", d.pattern_name},
          {"pattern_detected", d.detected},
          {"params", d.params},
          {"reason", d.reason},
          {"source", std::string(to_string(d.source))}};
}

Detection detection_from_json(const nlohmann::json& j, DetectionSource source) {
  if (!j.is_object()) throw Error(ErrorCode::SchemaViolation, "detection must be an object");
  auto name = j.find("pattern_name");
  if (name == j.end() || !name->is_string()) {
    throw Error(ErrorCode::SchemaViolation, "detection lacks \"pattern_name\"");
  }
  Detection d;
  d.pattern_name = name->get<std::string>();
  d.source = source;
  const auto* schema = find_schema(d.pattern_name);
  if (schema == nullptr) throw Error(ErrorCode::UnknownPattern, "\"" + d.pattern_name + "\"");
  auto flag = j.find("pattern_detected");
  if (flag != j.end()) {
    if (flag->is_boolean()) {
      d.detected = flag->get<bool>();
    } else if (flag->is_string()) {
      d.detected = flag->get<std::string>() == "true";
    } else {
      throw Error(ErrorCode::SchemaViolation, "\"pattern_detected\" must be a boolean");
    }
  }
  if (auto reason = j.find("reason"); reason != j.end() && reason->is_string()) {
    d.reason = reason->get<std::string>();
  }
  if (auto params = j.find("params"); params != j.end() && !params->is_null()) {
    if (!params->is_object()) throw Error(ErrorCode::SchemaViolation, "\"params\" must be an object");
    for (const auto& [k, v] : params->items()) {
      if (!v.is_string()) continue;  // unmatched values are reported as lists or null
      d.params[k] = v.get<std::string>();
    }
  }
  if (d.detected) {
    for (const auto& [k, v] : d.params) {
      if (!schema->allows(k, v)) {
        throw Error(ErrorCode::IllegalParameter, d.pattern_name + "." + k + " = \"" + v + "\"");
      }
    }
  }
  return d;
}

}  // namespace arc
