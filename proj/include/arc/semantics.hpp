#pragma once

#include "arc/grid.hpp"
#include "arc/program.hpp"
#include "arc/scene.hpp"

#include <span>
#include <string_view>
#include <vector>

namespace arc {

/// Parameters an executable pattern actually reads, with the values it can
/// execute. Parameters not listed here are accepted and ignored.
struct SemanticParameter {
  std::string name;
  std::vector<std::string> executable_values;  // first entry is the default
};

/// Execution contract of one executable Unit Pattern.
struct PatternSemantics {
  std::string_view name;
  std::vector<SemanticParameter> parameters;
  bool needs_source = true;
};

/// nullptr for hint-only or unknown patterns.
const PatternSemantics* find_semantics(std::string_view pattern);

/// Binding roles an instance needs given its parameter values.
std::vector<std::string_view> required_roles(const PatternInstance& inst);

/// Whether the instance needs a paint literal given its parameters.
bool needs_paint(std::string_view pattern, const Params& params);

/// Distinct semantic parameter maps of a pattern (cartesian product of the
/// executable values, with parameters that cannot matter dropped), in
/// enumeration order. Empty for hint-only patterns.
std::vector<Params> semantic_param_space(std::string_view pattern);

/// Selector vocabulary used for enumeration against a scene: every
/// scene-independent selector that resolves to at least one object, in a
/// fixed order (all, colors, shapes, extremal, size). With include_ids the
/// absolute id selectors are appended.
std::vector<Selector> selector_vocabulary(const SceneGraph& scene, bool include_ids = false);

/// Objects matched by an object selector, in scene order.
/// Errors: BindingResolutionFailed (literal selector or no match).
std::vector<const GridObject*> resolve(const Selector& sel, const SceneGraph& scene);

/// Applies one step and returns the painted grid without re-abstraction.
/// `rendered` must equal render(scene). Errors: NotExecutable,
/// BindingResolutionFailed, SemanticsViolation, plus validation errors.
Grid apply_step(const PatternInstance& inst, const SceneGraph& scene, const Grid& rendered);

/// apply_step for an instance that already passed validate_instance and
/// only uses executable parameter values. Skips those checks.
Grid apply_validated_step(const PatternInstance& inst, const SceneGraph& scene,
                          const Grid& rendered);

/// p_r : scenes -> scenes. Input is not modified; the result is the
/// re-abstraction of the painted grid.
SceneGraph execute_step(const PatternInstance& inst, const SceneGraph& scene);

/// Left-to-right fold of execute_step. Step errors are rethrown with the
/// step index attached.
SceneGraph execute_program(const Program& p, const SceneGraph& scene);

/// render(execute_program(p, abstract_scene(input))) without the final
/// re-abstraction (render o abstract is the identity on grids).
Grid run_program(const Program& p, const Grid& input);

}  // namespace arc
