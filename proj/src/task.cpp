#include "arc/task.hpp"

#include "arc/error.hpp"

#include <nlohmann/json.hpp>

#include <fstream>
#include <sstream>

namespace arc {
namespace {

using Json = nlohmann::json;

Grid grid_from_json(const Json& j, std::string_view where) {
  if (!j.is_array()) {
    throw Error(ErrorCode::SchemaViolation, std::string(where) + " is not a list of rows");
  }
  if (j.empty()) throw Error(ErrorCode::EmptyGrid, std::string(where) + " has no rows");
  std::vector<std::vector<int>> rows;
  rows.reserve(j.size());
  for (const auto& row : j) {
    if (!row.is_array()) {
      throw Error(ErrorCode::SchemaViolation, std::string(where) + " row is not a list");
    }
    if (row.empty()) throw Error(ErrorCode::EmptyGrid, std::string(where) + " has an empty row");
    std::vector<int> cells;
    cells.reserve(row.size());
    for (const auto& cell : row) {
      if (!cell.is_number_integer()) {
        throw Error(ErrorCode::SchemaViolation, std::string(where) + " cell is not an integer");
      }
      const auto v = cell.get<std::int64_t>();
      if (v < 0 || v >= kNumColors) {
        throw Error(ErrorCode::ColorOutOfRange,
                    std::string(where) + " cell value " + std::to_string(v));
      }
      cells.push_back(static_cast<int>(v));
    }
    rows.push_back(std::move(cells));
  }
  return Grid::from_rows(rows);
}

Json grid_to_json(const Grid& g) {
  Json rows = Json::array();
  for (int y = 0; y < g.height(); ++y) {
    Json row = Json::array();
    for (int x = 0; x < g.width(); ++x) row.push_back(static_cast<int>(g.at(y, x)));
    rows.push_back(std::move(row));
  }
  return rows;
}

const Json& require(const Json& obj, const char* key, std::string_view where) {
  if (!obj.is_object()) {
    throw Error(ErrorCode::SchemaViolation, std::string(where) + " is not an object");
  }
  auto it = obj.find(key);
  if (it == obj.end()) {
    throw Error(ErrorCode::SchemaViolation,
                std::string(where) + " is missing \"" + key + "\"");
  }
  return *it;
}

}  // namespace

TaskRecord parse_task(std::string_view raw, std::string task_id) {
  Json doc;
  try {
    doc = Json::parse(raw.begin(), raw.end());
  } catch (const Json::parse_error& e) {
    throw Error(ErrorCode::MalformedJson, e.what());
  }

  TaskRecord task;
  task.task_id = std::move(task_id);

  const Json& train = require(doc, "train", "task");
  const Json& test = require(doc, "test", "task");
  if (!train.is_array() || !test.is_array()) {
    throw Error(ErrorCode::SchemaViolation, "\"train\" and \"test\" must be lists");
  }
  if (train.empty()) throw Error(ErrorCode::SchemaViolation, "no training pairs");

  for (std::size_t i = 0; i < train.size(); ++i) {
    const std::string where = "train[" + std::to_string(i) + "]";
    task.train.push_back({grid_from_json(require(train[i], "input", where), where + ".input"),
                          grid_from_json(require(train[i], "output", where), where + ".output")});
  }

  std::vector<Grid> outputs;
  std::size_t with_output = 0;
  for (std::size_t i = 0; i < test.size(); ++i) {
    const std::string where = "test[" + std::to_string(i) + "]";
    task.test_inputs.push_back(grid_from_json(require(test[i], "input", where), where + ".input"));
    if (auto it = test[i].find("output"); it != test[i].end()) {
      outputs.push_back(grid_from_json(*it, where + ".output"));
      ++with_output;
    }
  }
  if (with_output != 0 && with_output != test.size()) {
    throw Error(ErrorCode::SchemaViolation, "only some test entries carry an output");
  }
  if (with_output != 0) task.test_outputs = std::move(outputs);
  return task;
}

std::string serialize_task(const TaskRecord& task) {
  Json train = Json::array();
  for (const auto& pair : task.train) {
    train.push_back({{"input", grid_to_json(pair.input)}, {"output", grid_to_json(pair.output)}});
  }
  Json test = Json::array();
  for (std::size_t i = 0; i < task.test_inputs.size(); ++i) {
    Json entry = {{"input", grid_to_json(task.test_inputs[i])}};
    if (task.test_outputs) entry["output"] = grid_to_json(task.test_outputs->at(i));
    test.push_back(std::move(entry));
  }
  // nlohmann::json objects are std::map backed, so keys come out sorted.
  return Json{{"train", std::move(train)}, {"test", std::move(test)}}.dump();
}

TaskRecord load_task_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::InvalidArgument, "cannot open " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_task(buf.str(), path.stem().string());
}

}  // namespace arc
