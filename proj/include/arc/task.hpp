#pragma once

#include "arc/grid.hpp"

#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace arc {

struct TrainPair {
  Grid input;
  Grid output;

  friend bool operator==(const TrainPair&, const TrainPair&) = default;
};

/// One ARC task. test_outputs is present only when every test entry carried
/// an "output" (evaluation mode).
struct TaskRecord {
  std::string task_id;
  std::vector<TrainPair> train;
  std::vector<Grid> test_inputs;
  std::optional<std::vector<Grid>> test_outputs;

  friend bool operator==(const TaskRecord&, const TaskRecord&) = default;
};

/// Parses the public ARC task JSON. Errors: MalformedJson, SchemaViolation,
/// ColorOutOfRange, EmptyGrid.
TaskRecord parse_task(std::string_view raw, std::string task_id = {});

/// Compact JSON with sorted keys; byte-stable for a fixed record.
std::string serialize_task(const TaskRecord& task);

/// Reads and parses a task file; the task id is the file stem.
TaskRecord load_task_file(const std::filesystem::path& path);

}  // namespace arc
