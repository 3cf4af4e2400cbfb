#include "arc/grid.hpp"

#include "arc/error.hpp"

#include <array>

namespace arc {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::MalformedJson: return "MalformedJson";
    case ErrorCode::SchemaViolation: return "SchemaViolation";
    case ErrorCode::ColorOutOfRange: return "ColorOutOfRange";
    case ErrorCode::EmptyGrid: return "EmptyGrid";
    case ErrorCode::PixelOutOfBounds: return "PixelOutOfBounds";
    case ErrorCode::UnknownPattern: return "UnknownPattern";
    case ErrorCode::IllegalParameter: return "IllegalParameter";
    case ErrorCode::MissingBinding: return "MissingBinding";
    case ErrorCode::NotExecutable: return "NotExecutable";
    case ErrorCode::BindingResolutionFailed: return "BindingResolutionFailed";
    case ErrorCode::SemanticsViolation: return "SemanticsViolation";
    case ErrorCode::TransportFailure: return "TransportFailure";
    case ErrorCode::EmptyResponse: return "EmptyResponse";
    case ErrorCode::ExecutionFailed: return "ExecutionFailed";
    case ErrorCode::NoOcclusion: return "NoOcclusion";
    case ErrorCode::NoCandidates: return "NoCandidates";
    case ErrorCode::Unsolvable: return "Unsolvable";
    case ErrorCode::MissingGroundTruth: return "MissingGroundTruth";
    case ErrorCode::PreconditionViolation: return "PreconditionViolation";
    case ErrorCode::InvalidArgument: return "InvalidArgument";
  }
  return "Unknown";
}

Error::Error(ErrorCode code, const std::string& message,
             std::optional<std::size_t> step)
    : std::runtime_error(std::string(to_string(code)) + ": " + message),
      code_(code),
      step_(step) {}

Grid::Grid(int height, int width, Color fill) : height_(height), width_(width) {
  if (height <= 0 || width <= 0) {
    throw Error(ErrorCode::EmptyGrid, "grid must have at least one row and column");
  }
  if (height > kMaxGridSide || width > kMaxGridSide) {
    throw Error(ErrorCode::SchemaViolation,
                "grid " + std::to_string(height) + "x" + std::to_string(width) +
                    " exceeds 30x30");
  }
  if (fill >= kNumColors) {
    throw Error(ErrorCode::ColorOutOfRange, "fill color " + std::to_string(fill));
  }
  cells_.assign(static_cast<std::size_t>(height) * static_cast<std::size_t>(width), fill);
}

Grid Grid::from_rows(const std::vector<std::vector<int>>& rows) {
  if (rows.empty() || rows.front().empty()) {
    throw Error(ErrorCode::EmptyGrid, "grid has no cells");
  }
  const auto width = rows.front().size();
  for (const auto& row : rows) {
    if (row.size() != width) {
      throw Error(ErrorCode::SchemaViolation, "ragged rows");
    }
  }
  Grid g(static_cast<int>(rows.size()), static_cast<int>(width));
  for (std::size_t y = 0; y < rows.size(); ++y) {
    for (std::size_t x = 0; x < width; ++x) {
      const int v = rows[y][x];
      if (v < 0 || v >= kNumColors) {
        throw Error(ErrorCode::ColorOutOfRange,
                    "cell value " + std::to_string(v) + " outside 0-9");
      }
      g.set(static_cast<int>(y), static_cast<int>(x), static_cast<Color>(v));
    }
  }
  return g;
}

void Grid::set(int y, int x, Color color) {
  if (!contains(y, x)) {
    throw Error(ErrorCode::PixelOutOfBounds,
                "(" + std::to_string(y) + "," + std::to_string(x) + ") outside " +
                    std::to_string(height_) + "x" + std::to_string(width_));
  }
  if (color >= kNumColors) {
    throw Error(ErrorCode::ColorOutOfRange, "color " + std::to_string(color));
  }
  cells_[index(y, x)] = color;
}

std::vector<std::vector<int>> Grid::to_rows() const {
  std::vector<std::vector<int>> rows(static_cast<std::size_t>(height_));
  for (int y = 0; y < height_; ++y) {
    auto& row = rows[static_cast<std::size_t>(y)];
    row.reserve(static_cast<std::size_t>(width_));
    for (int x = 0; x < width_; ++x) row.push_back(at(y, x));
  }
  return rows;
}

bool grids_equal(const Grid& a, const Grid& b) noexcept { return a == b; }

std::string to_ascii(const Grid& g) {
  std::string out;
  out.reserve(g.size() + static_cast<std::size_t>(g.height()));
  for (int y = 0; y < g.height(); ++y) {
    for (int x = 0; x < g.width(); ++x) out.push_back(static_cast<char>('0' + g.at(y, x)));
    out.push_back('\n');
  }
  return out;
}

std::uint64_t grid_hash(const Grid& g) noexcept {
  std::uint64_t h = 1469598103934665603ULL;
  auto mix = [&h](std::uint64_t v) {
    h ^= v;
    h *= 1099511628211ULL;
  };
  mix(static_cast<std::uint64_t>(g.height()));
  mix(static_cast<std::uint64_t>(g.width()));
  for (Color c : g.cells()) mix(c);
  return h;
}

}  // namespace arc
