#include "arc/error.hpp"
#include "arc/hypothesis.hpp"
#include "arc/patterns.hpp"
#include "arc/semantics.hpp"

#include <doctest.h>
#include <nlohmann/json.hpp>

#include <algorithm>

using namespace arc;

namespace {

const Grid kIn = Grid::from_rows({
    {0, 0, 0, 0, 0, 0},
    {0, 3, 3, 3, 0, 0},
    {0, 3, 0, 3, 0, 0},
    {0, 3, 3, 3, 0, 0},
    {0, 0, 0, 0, 0, 0},
    {0, 0, 0, 0, 0, 0},
});

Grid filled(Color c) {
  Grid g = kIn;
  g.set(2, 2, c);
  return g;
}

Detection detected(std::string_view name, Params params = {}) {
  Detection d;
  d.pattern_name = std::string(name);
  d.params = std::move(params);
  d.detected = true;
  return d;
}

bool has(const std::vector<Detection>& ds, std::string_view name) {
  return std::any_of(ds.begin(), ds.end(), [&](const Detection& d) { return d.pattern_name == name; });
}

}  // namespace

TEST_CASE("builtin proposer detects a cavity fill") {
  const auto ds = propose_builtin(abstract_scene(kIn), abstract_scene(filled(4)));
  REQUIRE(has(ds, pattern::kCavityFill));
  const auto& d = *std::find_if(ds.begin(), ds.end(),
                                [](const Detection& x) { return x.pattern_name == pattern::kCavityFill; });
  CHECK(d.detected);
  CHECK(d.source == DetectionSource::Builtin);
  // Both fill modes change only the differing cell, so no value is agreed.
  CHECK(d.params.empty());
  CHECK(d.reason == "changes 1 differing cells");
  // Registry order.
  for (std::size_t i = 1; i < ds.size(); ++i) {
    CHECK(registry_index(ds[i - 1].pattern_name) < registry_index(ds[i].pattern_name));
  }
}

TEST_CASE("builtin proposer is silent on identical or resized pairs") {
  CHECK(propose_builtin(abstract_scene(kIn), abstract_scene(kIn)).empty());
  CHECK(propose_builtin(abstract_scene(kIn), abstract_scene(Grid(3, 3))).empty());
}

TEST_CASE("builtin proposer finds two-step explanations") {
  // Fill the cavity, then drop the object to the floor.
  Grid out(6, 6, 0);
  for (int y = 3; y <= 5; ++y) {
    for (int x = 1; x <= 3; ++x) out.set(y, x, 3);
  }
  const auto ds = propose_builtin(abstract_scene(kIn), abstract_scene(out));
  CHECK(has(ds, pattern::kFallingDown));
  CHECK(has(ds, pattern::kCavityFill));
}

TEST_CASE("aggregation counts, ranks and picks modal params") {
  const std::vector<std::vector<Detection>> runs = {
      {detected(pattern::kCavityFill, {{"fill_color", "arbitrary"}}), detected(pattern::kFallingDown)},
      {detected(pattern::kCavityFill, {{"fill_color", "based on material already present"}}),
       detected(pattern::kHorizontalFill)},
      {detected(pattern::kCavityFill, {{"fill_color", "arbitrary"}})},
  };
  const auto ranked = aggregate_detections(runs, 3);
  REQUIRE(ranked.size() == 3);
  CHECK(ranked[0].pattern_name == pattern::kCavityFill);
  CHECK(ranked[0].count == 3);
  CHECK(ranked[0].params.at("fill_color") == "arbitrary");
  // Equal counts keep registry order.
  CHECK(ranked[1].pattern_name == pattern::kHorizontalFill);
  CHECK(ranked[2].pattern_name == pattern::kFallingDown);
  CHECK(aggregate_detections(runs, 1).size() == 1);
}

TEST_CASE("aggregation ties on params go to enum order") {
  const std::vector<std::vector<Detection>> runs = {
      {detected(pattern::kCavityFill, {{"fill_color", "arbitrary"}})},
      {detected(pattern::kCavityFill, {{"fill_color", "based on material already present"}})},
  };
  const auto ranked = aggregate_detections(runs, 3);
  REQUIRE(ranked.size() == 1);
  CHECK(ranked[0].params.at("fill_color") == "arbitrary");

  Detection off = detected(pattern::kCavityFill);
  off.detected = false;
  const std::vector<std::vector<Detection>> none = {{off}};
  CHECK(aggregate_detections(none, 3).empty());
}

TEST_CASE("instantiation against a target emits only reproducing programs") {
  const std::vector<RankedPattern> ranked = {{std::string(pattern::kCavityFill), {}, 1}};
  const Grid target = filled(4);
  InstantiateOptions opts;
  opts.target = &target;
  const auto e = instantiate_candidates(ranked, abstract_scene(kIn), opts);
  REQUIRE_FALSE(e.programs.empty());
  CHECK_FALSE(e.hint_only);
  for (const auto& p : e.programs) CHECK(run_program(p, kIn) == target);
}

TEST_CASE("instantiation without a target, ordering and budget") {
  const std::vector<RankedPattern> ranked = {{std::string(pattern::kRemoveObjects), {}, 2},
                                             {std::string(pattern::kFallingDown), {}, 1}};
  const SceneGraph scene = abstract_scene(kIn);
  const auto all = instantiate_candidates(ranked, scene);
  REQUIRE_FALSE(all.programs.empty());
  CHECK(all.programs.front().steps.front().pattern == pattern::kRemoveObjects);
  for (std::size_t i = 1; i < all.programs.size(); ++i) {
    CHECK(all.programs[i - 1].depth() <= all.programs[i].depth());
  }
  InstantiateOptions small;
  small.budget = 3;
  const auto capped = instantiate_candidates(ranked, scene, small);
  CHECK(capped.programs.size() == 3);
  CHECK(capped.budget_exceeded);

  const std::vector<RankedPattern> hint_only = {{std::string(pattern::kScattering), {}, 4}};
  CHECK(instantiate_candidates(hint_only, scene).hint_only);
  InstantiateOptions zero;
  zero.max_depth = 0;
  CHECK_THROWS_AS(instantiate_candidates(ranked, scene, zero), Error);
}

TEST_CASE("fixed params restrict the parameter space") {
  const std::vector<RankedPattern> ranked = {
      {std::string(pattern::kCavityFill), {{"fill_color", "based on material already present"}}, 1}};
  InstantiateOptions opts;
  opts.max_depth = 1;
  const auto e = instantiate_candidates(ranked, abstract_scene(kIn), opts);
  REQUIRE_FALSE(e.programs.empty());
  for (const auto& p : e.programs) {
    CHECK(p.steps[0].params.at("fill_color") == "based on material already present");
  }
}

TEST_CASE("changed colors") {
  CHECK(changed_colors(kIn, filled(4)) == std::vector<Color>{4});
  CHECK(changed_colors(kIn, kIn).empty());
  CHECK(changed_colors(kIn, Grid(2, 2)).empty());
}

TEST_CASE("detection wire format") {
  const nlohmann::json j = {{"pattern_name", "Cavity Fill"},
                            {"pattern_detected", "true"},
                            {"params", {{"fill_color", "arbitrary"}, {"other", nullptr}}},
                            {"reason", "hole"}};
  const Detection d = detection_from_json(j, DetectionSource::External);
  CHECK(d.detected);
  CHECK(d.params.size() == 1);
  CHECK(d.reason == "hole");
  CHECK(to_json(d)["source"] == "external");
  CHECK(detection_from_json(to_json(d), DetectionSource::External).params == d.params);

  CHECK_THROWS_AS(detection_from_json(nlohmann::json::array(), DetectionSource::External), Error);
  CHECK_THROWS_AS(detection_from_json({{"pattern_name", "Nope"}}, DetectionSource::External), Error);
  CHECK_THROWS_AS(detection_from_json({{"pattern_name", "Cavity Fill"},
                                       {"pattern_detected", true},
                                       {"params", {{"fill_color", "purple"}}}},
                                      DetectionSource::External),
                  Error);
}
