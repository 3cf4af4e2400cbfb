#include "arc/program.hpp"

#include "arc/error.hpp"
#include "arc/patterns.hpp"
#include "arc/semantics.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <array>
#include <charconv>

namespace arc {
namespace {

constexpr std::array<std::string_view, 4> kExtremalNames{"leftmost", "rightmost", "topmost",
                                                         "bottommost"};
constexpr std::array<std::string_view, 2> kSizeNames{"largest", "smallest"};
constexpr std::array<ShapeLabel, 6> kShapes{ShapeLabel::Rectangle, ShapeLabel::Square,
                                            ShapeLabel::Line,      ShapeLabel::Plus,
                                            ShapeLabel::LShape,    ShapeLabel::Irregular};

int parse_int(std::string_view text, std::string_view whole) {
  int v = 0;
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (ec != std::errc() || ptr != text.data() + text.size()) {
    throw Error(ErrorCode::IllegalParameter, "bad selector \"" + std::string(whole) + "\"");
  }
  return v;
}

template <std::size_t N>
int index_of(const std::array<std::string_view, N>& names, std::string_view value,
             std::string_view whole) {
  for (std::size_t i = 0; i < N; ++i) {
    if (names[i] == value) return static_cast<int>(i);
  }
  throw Error(ErrorCode::IllegalParameter, "bad selector \"" + std::string(whole) + "\"");
}

}  // namespace

Selector Selector::parse(std::string_view text) {
  if (text == "all") return all();
  const auto colon = text.find(':');
  if (colon == std::string_view::npos) {
    throw Error(ErrorCode::IllegalParameter, "bad selector \"" + std::string(text) + "\"");
  }
  const auto kind = text.substr(0, colon);
  const auto arg = text.substr(colon + 1);
  auto color_arg = [&] {
    const int v = parse_int(arg, text);
    if (v < 0 || v >= kNumColors) {
      throw Error(ErrorCode::IllegalParameter, "selector color out of range: " + std::string(text));
    }
    return static_cast<Color>(v);
  };
  if (kind == "color") return color(color_arg());
  if (kind == "literal") return literal(color_arg());
  if (kind == "id") return id(parse_int(arg, text));
  if (kind == "extremal") return extremal(static_cast<Extremal>(index_of(kExtremalNames, arg, text)));
  if (kind == "size") return size(static_cast<SizeRank>(index_of(kSizeNames, arg, text)));
  if (kind == "shape") {
    for (auto s : kShapes) {
      if (arc::to_string(s) == arg) return shape(s);
    }
  }
  throw Error(ErrorCode::IllegalParameter, "bad selector \"" + std::string(text) + "\"");
}

std::string Selector::to_string() const {
  switch (kind) {
    case SelectorKind::All: return "all";
    case SelectorKind::Color: return "color:" + std::to_string(value);
    case SelectorKind::Shape:
      return "shape:" + std::string(arc::to_string(static_cast<ShapeLabel>(value)));
    case SelectorKind::Extremal:
      return "extremal:" + std::string(kExtremalNames[static_cast<std::size_t>(value)]);
    case SelectorKind::Size:
      return "size:" + std::string(kSizeNames[static_cast<std::size_t>(value)]);
    case SelectorKind::Id: return "id:" + std::to_string(value);
    case SelectorKind::Literal: return "literal:" + std::to_string(value);
  }
  return "all";
}

std::size_t program_depth(const Program& p) noexcept { return p.depth(); }

Program concat(const Program& a, const Program& b) {
  Program out = a;
  out.steps.insert(out.steps.end(), b.steps.begin(), b.steps.end());
  return out;
}

PatternInstance validate_instance(const PatternInstance& inst) {
  const auto* schema = find_schema(inst.pattern);
  if (schema == nullptr) {
    throw Error(ErrorCode::UnknownPattern, "\"" + inst.pattern + "\"");
  }
  for (const auto& [name, value] : inst.params) {
    if (schema->find_parameter(name) == nullptr) {
      throw Error(ErrorCode::IllegalParameter,
                  inst.pattern + " has no parameter \"" + name + "\"");
    }
    if (!schema->allows(name, value)) {
      throw Error(ErrorCode::IllegalParameter,
                  inst.pattern + "." + name + " does not allow \"" + value + "\"");
    }
  }
  const auto roles = required_roles(inst);
  for (const auto& [role_name, sel] : inst.bindings) {
    const bool is_source = role_name == role::kSource;
    const bool is_paint = role_name == role::kPaint;
    if (!is_source && !is_paint) {
      throw Error(ErrorCode::IllegalParameter, "unknown binding role \"" + role_name + "\"");
    }
    if (is_source != sel.selects_objects()) {
      throw Error(ErrorCode::IllegalParameter,
                  "binding \"" + role_name + "\" cannot take " + sel.to_string());
    }
  }
  for (auto r : roles) {
    if (!inst.bindings.contains(std::string(r))) {
      throw Error(ErrorCode::MissingBinding,
                  inst.pattern + " needs binding \"" + std::string(r) + "\"");
    }
  }
  return inst;
}

void validate_program(const Program& p, bool require_executable) {
  if (p.steps.empty()) throw Error(ErrorCode::InvalidArgument, "program has no steps");
  for (std::size_t i = 0; i < p.steps.size(); ++i) {
    try {
      validate_instance(p.steps[i]);
    } catch (const Error& e) {
      throw Error(e.code(), "step " + std::to_string(i) + ": " + e.what(), i);
    }
    if (require_executable && find_semantics(p.steps[i].pattern) == nullptr) {
      throw Error(ErrorCode::NotExecutable, "step " + std::to_string(i) + " (" +
                                                p.steps[i].pattern + ") is hint-only",
                  i);
    }
  }
}

std::string canonical_id(const PatternInstance& inst) {
  std::string id = inst.pattern;
  id += '{';
  bool first = true;
  for (const auto& [k, v] : inst.params) {
    if (!first) id += ';';
    first = false;
    id += k + '=' + v;
  }
  id += "}[";
  first = true;
  for (const auto& [k, v] : inst.bindings) {
    if (!first) id += ';';
    first = false;
    id += k + '=' + v.to_string();
  }
  id += ']';
  return id;
}

std::string canonical_id(const Program& p) {
  std::string id;
  for (std::size_t i = 0; i < p.steps.size(); ++i) {
    if (i != 0) id += " >> ";
    id += canonical_id(p.steps[i]);
  }
  return id;
}

nlohmann::json to_json(const PatternInstance& inst) {
  nlohmann::json bindings = nlohmann::json::object();
  for (const auto& [k, v] : inst.bindings) bindings[k] = v.to_string();
  return {{"pattern_name", inst.pattern}, {"params", inst.params}, {"bindings", bindings}};
}

nlohmann::json to_json(const Program& p) {
  nlohmann::json steps = nlohmann::json::array();
  for (const auto& s : p.steps) steps.push_back(to_json(s));
  return {{"steps", std::move(steps)}, {"depth", p.depth()}};
}

PatternInstance instance_from_json(const nlohmann::json& j) {
  if (!j.is_object() || !j.contains("pattern_name") || !j["pattern_name"].is_string()) {
    throw Error(ErrorCode::SchemaViolation, "pattern instance needs \"pattern_name\"");
  }
  PatternInstance inst;
  inst.pattern = j["pattern_name"].get<std::string>();
  if (auto it = j.find("params"); it != j.end() && !it->is_null()) {
    if (!it->is_object()) throw Error(ErrorCode::SchemaViolation, "\"params\" must be an object");
    for (const auto& [k, v] : it->items()) {
      if (!v.is_string()) {
        throw Error(ErrorCode::SchemaViolation, "param \"" + k + "\" must be a string");
      }
      inst.params[k] = v.get<std::string>();
    }
  }
  if (auto it = j.find("bindings"); it != j.end() && !it->is_null()) {
    if (!it->is_object()) {
      throw Error(ErrorCode::SchemaViolation, "\"bindings\" must be an object");
    }
    for (const auto& [k, v] : it->items()) {
      if (!v.is_string()) {
        throw Error(ErrorCode::SchemaViolation, "binding \"" + k + "\" must be a string");
      }
      inst.bindings[k] = Selector::parse(v.get<std::string>());
    }
  }
  return inst;
}

Program program_from_json(const nlohmann::json& j) {
  if (!j.is_object() || !j.contains("steps") || !j["steps"].is_array()) {
    throw Error(ErrorCode::SchemaViolation, "program needs a \"steps\" list");
  }
  Program p;
  for (const auto& s : j["steps"]) p.steps.push_back(instance_from_json(s));
  return p;
}

}  // namespace arc
