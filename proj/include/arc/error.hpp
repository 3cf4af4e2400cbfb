#pragma once

#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>

namespace arc {

enum class ErrorCode {
  MalformedJson,
  SchemaViolation,
  ColorOutOfRange,
  EmptyGrid,
  PixelOutOfBounds,
  UnknownPattern,
  IllegalParameter,
  MissingBinding,
  NotExecutable,
  BindingResolutionFailed,
  SemanticsViolation,
  TransportFailure,
  EmptyResponse,
  ExecutionFailed,
  NoOcclusion,
  NoCandidates,
  Unsolvable,
  MissingGroundTruth,
  PreconditionViolation,
  InvalidArgument,
};

std::string_view to_string(ErrorCode code);

/// Single exception type for the engine. Callers branch on code(); the
/// optional step index is set when the failure came from one step of a
/// multi-step program.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message,
        std::optional<std::size_t> step = std::nullopt);

  ErrorCode code() const noexcept { return code_; }
  std::optional<std::size_t> step() const noexcept { return step_; }

 private:
  ErrorCode code_;
  std::optional<std::size_t> step_;
};

}  // namespace arc
