#include "arc/patterns.hpp"
#include "arc/semantics.hpp"

#include <doctest.h>

#include <fstream>
#include <set>
#include <sstream>

using namespace arc;

TEST_CASE("registry holds 22 distinct schemas") {
  const auto reg = registry();
  CHECK(reg.size() == 22);
  std::set<std::string> names;
  for (const auto& s : reg) names.insert(s.name);
  CHECK(names.size() == 22);
  CHECK(reg.front().name == pattern::kHorizontalFill);
  CHECK(reg.back().name == pattern::kSmallObjectPatterns);
}

TEST_CASE("registry listing matches the golden fixture") {
  std::ifstream in(std::string(ARC_DATA_DIR) + "/unit_patterns.golden", std::ios::binary);
  REQUIRE(in);
  std::stringstream buf;
  buf << in.rdbuf();
  CHECK(registry_listing() == buf.str());
}

TEST_CASE("schema lookup") {
  const PatternSchema* cavity = find_schema(pattern::kCavityFill);
  REQUIRE(cavity != nullptr);
  CHECK(cavity->executable);
  CHECK(cavity->allows("fill_color", "arbitrary"));
  CHECK_FALSE(cavity->allows("fill_color", "purple"));
  CHECK_FALSE(cavity->allows("no_such_param", "arbitrary"));
  CHECK(cavity->find_parameter("no_such_param") == nullptr);
  CHECK(find_schema("Nope") == nullptr);
  CHECK(registry_index(pattern::kHorizontalFill) == 0);
  CHECK(registry_index("Nope") == registry().size());
}

TEST_CASE("executable flags agree with the semantics table") {
  std::size_t executable = 0;
  for (const auto& s : registry()) {
    CHECK(s.executable == (find_semantics(s.name) != nullptr));
    if (s.executable) {
      ++executable;
      CHECK_FALSE(semantic_param_space(s.name).empty());
      for (const auto& p : find_semantics(s.name)->parameters) {
        for (const auto& v : p.executable_values) CHECK(s.allows(p.name, v));
      }
    } else {
      CHECK(semantic_param_space(s.name).empty());
    }
  }
  CHECK(executable == 14);
}
