#include "arc/error.hpp"
#include "arc/patterns.hpp"
#include "arc/program.hpp"
#include "arc/semantics.hpp"

#include <doctest.h>
#include <nlohmann/json.hpp>

using namespace arc;

namespace {

PatternInstance step(std::string_view name, Params params, Bindings bindings) {
  return {std::string(name), std::move(params), std::move(bindings)};
}

Bindings source(Selector s) { return {{std::string(role::kSource), s}}; }

Bindings source_paint(Selector s, Color c) {
  return {{std::string(role::kSource), s}, {std::string(role::kPaint), Selector::literal(c)}};
}

ErrorCode code_of(auto&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("no error raised");
  return ErrorCode::InvalidArgument;
}

const Grid kRing = Grid::from_rows({
    {0, 0, 0, 0, 0},
    {0, 3, 3, 3, 0},
    {0, 3, 0, 3, 0},
    {0, 3, 3, 3, 0},
    {0, 0, 0, 0, 0},
});

}  // namespace

TEST_CASE("selector text round trip") {
  for (const char* text : {"all", "color:3", "shape:rectangle", "shape:L-shape", "extremal:leftmost",
                           "extremal:bottommost", "size:largest", "size:smallest", "id:12",
                           "literal:0"}) {
    CHECK(Selector::parse(text).to_string() == text);
  }
  CHECK(Selector::parse("color:4") == Selector::color(4));
  CHECK_FALSE(Selector::literal(2).selects_objects());
  for (const char* bad : {"", "color", "color:10", "color:x", "shape:blob", "size:medium", "nope:1"}) {
    CHECK(code_of([&] { Selector::parse(bad); }) == ErrorCode::IllegalParameter);
  }
}

TEST_CASE("instance validation") {
  CHECK(code_of([] { validate_instance(step("Nope", {}, {})); }) == ErrorCode::UnknownPattern);
  CHECK(code_of([] {
          validate_instance(step(pattern::kCavityFill, {{"fill_color", "purple"}}, source(Selector::all())));
        }) == ErrorCode::IllegalParameter);
  CHECK(code_of([] {
          validate_instance(step(pattern::kCavityFill, {{"fill_color", "arbitrary"}}, source(Selector::all())));
        }) == ErrorCode::MissingBinding);
  CHECK(code_of([] { validate_instance(step(pattern::kCavityFill, {}, {})); }) ==
        ErrorCode::MissingBinding);
  CHECK(code_of([] {
          validate_instance(step(pattern::kCavityFill, {}, source(Selector::literal(2))));
        }) == ErrorCode::IllegalParameter);
  CHECK(code_of([] {
          validate_instance(step(pattern::kCavityFill, {},
                                 {{"source", Selector::all()}, {"target", Selector::all()}}));
        }) == ErrorCode::IllegalParameter);
  const auto ok = step(pattern::kCavityFill, {{"fill_color", "arbitrary"}}, source_paint(Selector::all(), 4));
  CHECK(validate_instance(ok) == ok);
}

TEST_CASE("program validation tags the failing step") {
  Program p{{step(pattern::kRemoveObjects, {}, source(Selector::color(3))),
             step(pattern::kScattering, {}, {})}};
  CHECK_NOTHROW(validate_program(p, false));
  try {
    validate_program(p, true);
    FAIL("expected NotExecutable");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::NotExecutable);
    CHECK(e.step() == 1);
  }
  CHECK(code_of([] { validate_program(Program{}, false); }) == ErrorCode::InvalidArgument);
}

TEST_CASE("canonical ids and json round trip") {
  const Program p{{step(pattern::kCavityFill, {{"fill_color", "arbitrary"}}, source_paint(Selector::all(), 4)),
                   step(pattern::kFallingDown, {}, source(Selector::size(SizeRank::Largest)))}};
  CHECK(canonical_id(p) ==
        "Cavity Fill{fill_color=arbitrary}[paint=literal:4;source=all] >> "
        "Falling Down (Gravity-Effect){}[source=size:largest]");
  CHECK(program_from_json(to_json(p)) == p);
  CHECK(to_json(p)["depth"] == 2);
  CHECK(program_depth(concat(p, p)) == 4);
  CHECK(code_of([] { program_from_json(nlohmann::json::object()); }) == ErrorCode::SchemaViolation);
  CHECK(code_of([] { instance_from_json({{"pattern_name", 3}}); }) == ErrorCode::SchemaViolation);
}

TEST_CASE("selector resolution") {
  const Grid g = Grid::from_rows({
      {1, 0, 0, 2, 2},
      {0, 0, 0, 2, 2},
      {0, 0, 0, 0, 0},
      {0, 3, 0, 0, 0},
  });
  const SceneGraph s = abstract_scene(g);
  REQUIRE(s.objects.size() == 3);
  CHECK(resolve(Selector::all(), s).size() == 3);
  CHECK(resolve(Selector::color(2), s).front()->object_id == 1);
  CHECK(resolve(Selector::extremal(Extremal::Rightmost), s).front()->object_id == 1);
  CHECK(resolve(Selector::extremal(Extremal::Bottommost), s).front()->object_id == 2);
  CHECK(resolve(Selector::size(SizeRank::Largest), s).front()->object_id == 1);
  // Ties go to the earliest object.
  CHECK(resolve(Selector::size(SizeRank::Smallest), s).front()->object_id == 0);
  CHECK(resolve(Selector::shape(ShapeLabel::Square), s).size() == 3);
  CHECK(code_of([&] { resolve(Selector::color(7), s); }) == ErrorCode::BindingResolutionFailed);
  CHECK(code_of([&] { resolve(Selector::literal(7), s); }) == ErrorCode::BindingResolutionFailed);
  const auto vocab = selector_vocabulary(s);
  CHECK(vocab.front() == Selector::all());
  CHECK(vocab.size() == 1 + 3 + 1 + 4 + 2);
  CHECK(selector_vocabulary(s, true).size() == vocab.size() + 3);
}

TEST_CASE("cavity fill with own color or a literal") {
  const auto own = run_program({{step(pattern::kCavityFill, {}, source(Selector::all()))}}, kRing);
  CHECK(own.at(2, 2) == 3);
  const auto lit = run_program(
      {{step(pattern::kCavityFill, {{"fill_color", "arbitrary"}}, source_paint(Selector::all(), 4))}}, kRing);
  CHECK(lit.at(2, 2) == 4);
  Grid expected = kRing;
  expected.set(2, 2, 4);
  CHECK(lit == expected);
}

TEST_CASE("remove, fall and fill") {
  const Grid g = Grid::from_rows({
      {0, 5, 0, 0},
      {0, 0, 0, 0},
      {0, 0, 0, 0},
      {6, 0, 0, 0},
  });
  const auto removed = run_program({{step(pattern::kRemoveObjects, {}, source(Selector::color(5)))}}, g);
  CHECK(removed == Grid::from_rows({{0, 0, 0, 0}, {0, 0, 0, 0}, {0, 0, 0, 0}, {6, 0, 0, 0}}));

  const auto fallen = run_program({{step(pattern::kFallingDown, {}, source(Selector::color(5)))}}, g);
  CHECK(fallen.at(0, 1) == 0);
  CHECK(fallen.at(3, 1) == 5);

  const auto filled = run_program(
      {{step(pattern::kHorizontalFill,
             {{"column_index", "right of an object"}, {"stop_condition", "grid boundary"}},
             source(Selector::color(6)))}},
      g);
  CHECK(filled.to_rows()[3] == std::vector<int>{6, 6, 6, 6});
}

TEST_CASE("mirror symmetry completes a half") {
  const Grid g = Grid::from_rows({{2, 0, 0}, {2, 2, 0}});
  const auto out = run_program(
      {{step(pattern::kSymmetry, {{"symmetry_type", "horizontal"}, {"copy_mode", "mirror"}}, {})}}, g);
  CHECK(out == Grid::from_rows({{2, 0, 2}, {2, 2, 2}}));
}

TEST_CASE("execution errors carry the step index") {
  const Program p{{step(pattern::kRemoveObjects, {}, source(Selector::color(3))),
                   step(pattern::kRemoveObjects, {}, source(Selector::color(3)))}};
  try {
    run_program(p, kRing);
    FAIL("expected a resolution failure");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::BindingResolutionFailed);
    CHECK(e.step() == 1);
  }
  CHECK(code_of([] {
          run_program({{step(pattern::kCavityFill, {{"fill_color", "arbitrary"}}, source_paint(Selector::all(), 2)),
                        step(pattern::kScattering, {}, {})}},
                      kRing);
        }) == ErrorCode::NotExecutable);
  CHECK(code_of([] {
          run_program({{step(pattern::kDiagonalFill, {{"fill_color", "change on bounce"}}, source(Selector::all()))}},
                      kRing);
        }) == ErrorCode::SemanticsViolation);
}

TEST_CASE("execute_program agrees with run_program") {
  const Program p{{step(pattern::kCavityFill, {}, source(Selector::all())),
                   step(pattern::kFallingDown, {}, source(Selector::all()))}};
  const SceneGraph in = abstract_scene(kRing);
  const SceneGraph before = in;
  CHECK(render(execute_program(p, in)) == run_program(p, kRing));
  CHECK(in == before);
}

TEST_CASE("semantic parameter spaces") {
  CHECK(semantic_param_space(pattern::kCavityFill).size() == 2);
  CHECK(semantic_param_space(pattern::kFallingDown) == std::vector<Params>{Params{}});
  // Direction is irrelevant when the fill forms a rectangle.
  CHECK(semantic_param_space(pattern::kBoundaryAttachmentFill).size() == 5);
  CHECK(needs_paint(pattern::kCavityFill, {{"fill_color", "arbitrary"}}));
  CHECK_FALSE(needs_paint(pattern::kCavityFill, {}));
  CHECK(required_roles(step(pattern::kSymmetry, {}, {})).empty());
}
