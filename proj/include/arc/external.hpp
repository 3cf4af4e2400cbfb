#pragma once

#include "arc/consistency.hpp"
#include "arc/grid.hpp"
#include "arc/hypothesis.hpp"
#include "arc/scene.hpp"
#include "arc/solution.hpp"
#include "arc/task.hpp"

#include <nlohmann/json.hpp>

#include <cstddef>
#include <functional>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

namespace arc {

/// Bounded retries with capped exponential backoff and no jitter.
struct RetryPolicy {
  std::size_t max_retries = 3;
  double backoff_base_seconds = 0.5;
  double backoff_cap_seconds = 8.0;
  double general_error_backoff_seconds = 0.1;
  double request_timeout_seconds = 72'000.0;

  /// Delay before retry number `retry` (0-based). Retryable failures
  /// (transport errors, HTTP 429 and 5xx) back off exponentially up to the
  /// cap; anything else waits the general-error delay.
  double delay(std::size_t retry, bool retryable) const;
};

struct HttpResponse {
  int status = 0;
  std::string body;
};

/// Posts a JSON body to a path of some endpoint. Connection-level failures
/// throw Error(TransportFailure).
class Transport {
 public:
  virtual ~Transport() = default;
  virtual HttpResponse post(const std::string& path, const std::string& body) = 0;
};

/// Transport over HTTP(S). The bearer token, if any, is read from the
/// environment variable named by `token_env`.
class HttpTransport : public Transport {
 public:
  HttpTransport(std::string base_url, double timeout_seconds,
                std::string token_env = "ARC_SOLVER_API_KEY");
  HttpResponse post(const std::string& path, const std::string& body) override;

 private:
  std::string base_url_;
  double timeout_seconds_;
  std::string token_;
};

using Sleeper = std::function<void(double seconds)>;

/// Sleeper that blocks the calling thread.
Sleeper real_sleeper();

/// Posts `request` and returns the parsed response body, retrying per the
/// policy. Non-2xx statuses, transport errors, empty bodies and bodies that
/// are not JSON count as failed attempts. Throws Error(EmptyResponse) when
/// the last attempt returned an empty body and Error(TransportFailure)
/// otherwise once retries are exhausted.
nlohmann::json post_json(Transport& transport, const std::string& path,
                         const nlohmann::json& request, const RetryPolicy& policy,
                         const Sleeper& sleep);

/// Pulls the JSON value out of a model reply: the body itself when it is
/// not a string, else the first fenced or bracketed JSON text inside it.
std::optional<nlohmann::json> extract_json(const nlohmann::json& body);

/// Detection request for one pair: both grids, both object lists and all 22
/// pattern specifications.
nlohmann::json detection_request(const TrainPair& pair, const SceneGraph& input,
                                 const SceneGraph& output);

struct ParsedDetections {
  std::vector<Detection> detections;
  std::vector<std::string> warnings;  // one per dropped entry
};

/// Lenient parse of a detection reply (a JSON array of entries).
/// Error(SchemaViolation) when no array can be found; Error(EmptyResponse)
/// when the array is empty.
ParsedDetections parse_detections(const nlohmann::json& body);

/// Pattern detection through an external endpoint ("/detect").
class ExternalProposer {
 public:
  ExternalProposer(Transport& transport, RetryPolicy policy, Sleeper sleep = real_sleeper());

  /// One detection run for one pair. Dropped entries are logged to warnings().
  std::vector<Detection> propose(const TrainPair& pair, const SceneGraph& input,
                                 const SceneGraph& output);

  std::vector<std::string> warnings() const;

 private:
  Transport& transport_;
  RetryPolicy policy_;
  Sleeper sleep_;
  mutable std::mutex mutex_;
  std::vector<std::string> warnings_;
};

/// Runs `repetitions` detection runs for one pair with at most `concurrency`
/// requests in flight. Runs come back in repetition order; failed runs are
/// empty and their error is appended to *errors when given.
std::vector<std::vector<Detection>> propose_external(ExternalProposer& proposer,
                                                     const TrainPair& pair,
                                                     const SceneGraph& input,
                                                     const SceneGraph& output,
                                                     std::size_t repetitions,
                                                     std::size_t concurrency,
                                                     std::vector<std::string>* errors = nullptr);

/// Solver request: demonstrations, test input, hint, sample index and seed.
nlohmann::json solver_request(const TaskRecord& task, const Grid& test_input, const Hint& hint,
                              std::size_t sample_index, std::uint64_t seed);

/// A grid from a reply: a list of lists of ints, or an object holding one
/// under "grid" or "output". Error(SchemaViolation) otherwise.
Grid parse_grid_reply(const nlohmann::json& body);

/// Test-output sampling through an external endpoint ("/solve").
class HttpExternalSolver : public ExternalSolver {
 public:
  HttpExternalSolver(Transport& transport, RetryPolicy policy, std::uint64_t seed = 0,
                     Sleeper sleep = real_sleeper());
  Grid sample(const TaskRecord& task, const Grid& test_input, const Hint& hint,
              std::size_t sample_index) override;

 private:
  Transport& transport_;
  RetryPolicy policy_;
  std::uint64_t seed_;
  Sleeper sleep_;
};

/// Meta-classifier request: training pairs, test input and the numbered
/// possible solutions (ids from 1, in pool order). Source tags are included
/// only when `with_tags` is set.
nlohmann::json selector_request(const TaskRecord& task, const Grid& test_input,
                                const std::vector<Grid>& solutions,
                                const std::vector<std::string>& tags, bool with_tags);

/// Solution id from a reply: "***3***", a bare number, or an object with
/// "solution_id". nullopt when absent or outside 1..count.
std::optional<std::size_t> parse_solution_id(const nlohmann::json& body, std::size_t count);

}  // namespace arc
