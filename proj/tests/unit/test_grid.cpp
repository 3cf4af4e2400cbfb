#include "arc/error.hpp"
#include "arc/grid.hpp"
#include "arc/task.hpp"

#include <doctest.h>

#include <filesystem>

using namespace arc;

namespace {

ErrorCode code_of(auto&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("no error raised");
  return ErrorCode::InvalidArgument;
}

}  // namespace

TEST_CASE("grid construction validates size and palette") {
  CHECK(code_of([] { Grid(0, 3); }) == ErrorCode::EmptyGrid);
  CHECK(code_of([] { Grid(3, 0); }) == ErrorCode::EmptyGrid);
  CHECK(code_of([] { Grid(31, 1); }) == ErrorCode::SchemaViolation);
  CHECK(code_of([] { Grid(2, 2, 10); }) == ErrorCode::ColorOutOfRange);
  Grid g(30, 30, 9);
  CHECK(g.size() == 900);
  CHECK(g.at(29, 29) == 9);
}

TEST_CASE("from_rows checks ragged rows and colors") {
  const Grid g = Grid::from_rows({{1, 2, 3}, {4, 5, 6}});
  CHECK(g.height() == 2);
  CHECK(g.width() == 3);
  CHECK(g.at(1, 0) == 4);
  CHECK(g.to_rows() == std::vector<std::vector<int>>{{1, 2, 3}, {4, 5, 6}});
  CHECK_THROWS_AS(Grid::from_rows({{1, 2}, {3}}), Error);
  CHECK(code_of([] { Grid::from_rows({{1, -1}}); }) == ErrorCode::ColorOutOfRange);
  CHECK(code_of([] { Grid::from_rows({}); }) == ErrorCode::EmptyGrid);
}

TEST_CASE("set rejects bad colors") {
  Grid g(2, 2);
  g.set(1, 1, 7);
  CHECK(g.at(Coord{1, 1}) == 7);
  CHECK(code_of([&] { g.set(0, 0, 12); }) == ErrorCode::ColorOutOfRange);
}

TEST_CASE("equality, hash and ascii") {
  const Grid a = Grid::from_rows({{0, 1}, {2, 3}});
  Grid b = a;
  CHECK(grids_equal(a, b));
  CHECK(grid_hash(a) == grid_hash(b));
  b.set(0, 0, 5);
  CHECK_FALSE(grids_equal(a, b));
  CHECK(grid_hash(a) != grid_hash(b));
  CHECK_FALSE(grids_equal(Grid(1, 4), Grid(4, 1)));
  CHECK(grid_hash(Grid(1, 4)) != grid_hash(Grid(4, 1)));
  CHECK(to_ascii(a) == "01\n23\n");
}

TEST_CASE("task parsing and serialization") {
  const std::string raw =
      R"({"test":[{"input":[[2,2]],"output":[[3,3]]}],"train":[{"input":[[1,0]],"output":[[0,1]]}]})";
  const TaskRecord task = parse_task(raw, "t1");
  CHECK(task.task_id == "t1");
  REQUIRE(task.train.size() == 1);
  CHECK(task.train[0].output == Grid::from_rows({{0, 1}}));
  REQUIRE(task.test_outputs.has_value());
  CHECK(task.test_outputs->at(0) == Grid::from_rows({{3, 3}}));
  CHECK(serialize_task(task) == raw);
  CHECK(parse_task(serialize_task(task), "t1") == task);

  const TaskRecord no_truth =
      parse_task(R"({"train":[{"input":[[1]],"output":[[2]]}],"test":[{"input":[[1]]}]})");
  CHECK_FALSE(no_truth.test_outputs.has_value());
}

TEST_CASE("task parsing errors") {
  CHECK(code_of([] { parse_task("{"); }) == ErrorCode::MalformedJson);
  CHECK(code_of([] { parse_task(R"({"train":[]})"); }) == ErrorCode::SchemaViolation);
  CHECK(code_of([] { parse_task(R"({"train":[],"test":[]})"); }) == ErrorCode::SchemaViolation);
  CHECK(code_of([] {
          parse_task(R"({"train":[{"input":[[1]],"output":[[12]]}],"test":[{"input":[[1]]}]})");
        }) == ErrorCode::ColorOutOfRange);
  CHECK(code_of([] {
          parse_task(R"({"train":[{"input":[[]],"output":[[1]]}],"test":[{"input":[[1]]}]})");
        }) == ErrorCode::EmptyGrid);
  CHECK(code_of([] {
          parse_task(
              R"({"train":[{"input":[[1]],"output":[[1]]}],"test":[{"input":[[1]]},{"input":[[1]],"output":[[1]]}]})");
        }) == ErrorCode::SchemaViolation);
}

TEST_CASE("task files load with their stem as id") {
  const auto path = std::filesystem::path(ARC_DATA_DIR) / "arc_training" / "00d62c1b.json";
  const TaskRecord task = load_task_file(path);
  CHECK(task.task_id == "00d62c1b");
  CHECK(task.train.size() == 5);
  CHECK(code_of([] { load_task_file("/nonexistent/x.json"); }) == ErrorCode::InvalidArgument);
}
