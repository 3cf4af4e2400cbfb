#include "arc/external.hpp"

#include "arc/error.hpp"
#include "arc/patterns.hpp"

#include <httplib.h>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <future>
#include <regex>
#include <thread>

namespace arc {
namespace {

using Json = nlohmann::json;

Json rows(const Grid& g) { return g.to_rows(); }

Json objects_json(const SceneGraph& scene) { return scene_to_json(scene)["objects"]; }

Json pattern_specifications() {
  Json out = Json::array();
  for (const auto& schema : registry()) {
    Json params = Json::object();
    for (const auto& p : schema.parameters) params[p.name] = p.values;
    out.push_back({{"name", schema.name},
                   {"description", schema.description},
                   {"params", std::move(params)}});
  }
  return out;
}

Json demonstrations(const TaskRecord& task) {
  Json out = Json::array();
  for (const auto& pair : task.train) {
    out.push_back({{"input", rows(pair.input)}, {"output", rows(pair.output)}});
  }
  return out;
}

bool retryable_status(int status) { return status == 429 || status >= 500; }

}  // namespace

double RetryPolicy::delay(std::size_t retry, bool retryable) const {
  if (!retryable) return general_error_backoff_seconds;
  const double d = backoff_base_seconds * std::pow(2.0, static_cast<double>(retry));
  return std::min(d, backoff_cap_seconds);
}

HttpTransport::HttpTransport(std::string base_url, double timeout_seconds, std::string token_env)
    : base_url_(std::move(base_url)), timeout_seconds_(timeout_seconds) {
  if (const char* token = std::getenv(token_env.c_str())) token_ = token;
}

HttpResponse HttpTransport::post(const std::string& path, const std::string& body) {
  httplib::Client client(base_url_);
  const auto seconds = static_cast<time_t>(timeout_seconds_);
  client.set_connection_timeout(seconds);
  client.set_read_timeout(seconds);
  client.set_write_timeout(seconds);
  httplib::Headers headers;
  if (!token_.empty()) headers.emplace("Authorization", "Bearer " + token_);
  auto res = client.Post(path, headers, body, "application/json");
  if (!res) {
    throw Error(ErrorCode::TransportFailure,
                base_url_ + path + ": " + httplib::to_string(res.error()));
  }
  return {res->status, res->body};
}

Sleeper real_sleeper() {
  return [](double seconds) {
    std::this_thread::sleep_for(std::chrono::duration<double>(seconds));
  };
}

Json post_json(Transport& transport, const std::string& path, const Json& request,
               const RetryPolicy& policy, const Sleeper& sleep) {
  const std::string body = request.dump();
  std::string last_error;
  bool last_empty = false;
  for (std::size_t attempt = 0; attempt <= policy.max_retries; ++attempt) {
    bool retryable = false;
    try {
      const HttpResponse res = transport.post(path, body);
      last_empty = false;
      if (res.status < 200 || res.status >= 300) {
        retryable = retryable_status(res.status);
        last_error = "HTTP " + std::to_string(res.status);
      } else if (res.body.find_first_not_of(" \t\r\n") == std::string::npos) {
        last_empty = true;
        last_error = "empty body";
      } else {
        auto parsed = Json::parse(res.body, nullptr, false);
        if (!parsed.is_discarded()) return parsed;
        last_error = "body is not JSON";
      }
    } catch (const Error& e) {
      retryable = true;
      last_empty = false;
      last_error = e.what();
    }
    if (attempt < policy.max_retries) sleep(policy.delay(attempt, retryable));
  }
  const std::string msg = path + " failed after " + std::to_string(policy.max_retries + 1) +
                          " attempts: " + last_error;
  throw Error(last_empty ? ErrorCode::EmptyResponse : ErrorCode::TransportFailure, msg);
}

std::optional<Json> extract_json(const Json& body) {
  if (!body.is_string()) return std::optional<Json>(body);
  const std::string& text = body.get_ref<const std::string&>();
  static const std::regex fenced("```(?:json)?\\s*([\\s\\S]*?)```");
  std::smatch m;
  if (std::regex_search(text, m, fenced)) {
    auto parsed = Json::parse(m[1].str(), nullptr, false);
    if (!parsed.is_discarded()) return parsed;
  }
  for (const auto& [open, close] : {std::pair{'[', ']'}, std::pair{'{', '}'}}) {
    const auto a = text.find(open);
    const auto b = text.rfind(close);
    if (a == std::string::npos || b == std::string::npos || b < a) continue;
    auto parsed = Json::parse(text.substr(a, b - a + 1), nullptr, false);
    if (!parsed.is_discarded()) return parsed;
  }
  return std::nullopt;
}

Json detection_request(const TrainPair& pair, const SceneGraph& input, const SceneGraph& output) {
  return {{"input_grid", rows(pair.input)},
          {"output_grid", rows(pair.output)},
          {"input_objects", objects_json(input)},
          {"output_objects", objects_json(output)},
          {"pattern_specifications", pattern_specifications()}};
}

ParsedDetections parse_detections(const Json& body) {
  auto value = extract_json(body);
  if (value && value->is_object()) {
    for (const char* key : {"detections", "content"}) {
      if (value->contains(key)) {
        value = extract_json((*value)[key]);
        break;
      }
    }
  }
  if (!value || !value->is_array()) {
    throw Error(ErrorCode::SchemaViolation, "detection reply is not a JSON array");
  }
  if (value->empty()) throw Error(ErrorCode::EmptyResponse, "detection reply is empty");
  ParsedDetections out;
  for (std::size_t i = 0; i < value->size(); ++i) {
    try {
      out.detections.push_back(detection_from_json((*value)[i], DetectionSource::External));
    } catch (const Error& e) {
      out.warnings.push_back("entry " + std::to_string(i) + " dropped: " + e.what());
    }
  }
  return out;
}

ExternalProposer::ExternalProposer(Transport& transport, RetryPolicy policy, Sleeper sleep)
    : transport_(transport), policy_(policy), sleep_(std::move(sleep)) {}

std::vector<Detection> ExternalProposer::propose(const TrainPair& pair, const SceneGraph& input,
                                                 const SceneGraph& output) {
  const Json reply =
      post_json(transport_, "/detect", detection_request(pair, input, output), policy_, sleep_);
  ParsedDetections parsed = parse_detections(reply);
  if (!parsed.warnings.empty()) {
    std::lock_guard lock(mutex_);
    warnings_.insert(warnings_.end(), parsed.warnings.begin(), parsed.warnings.end());
  }
  return std::move(parsed.detections);
}

std::vector<std::string> ExternalProposer::warnings() const {
  std::lock_guard lock(mutex_);
  return warnings_;
}

std::vector<std::vector<Detection>> propose_external(ExternalProposer& proposer,
                                                     const TrainPair& pair,
                                                     const SceneGraph& input,
                                                     const SceneGraph& output,
                                                     std::size_t repetitions,
                                                     std::size_t concurrency,
                                                     std::vector<std::string>* errors) {
  std::vector<std::vector<Detection>> runs(repetitions);
  const std::size_t cap = std::max<std::size_t>(1, concurrency);
  for (std::size_t begin = 0; begin < repetitions; begin += cap) {
    const std::size_t end = std::min(repetitions, begin + cap);
    std::vector<std::future<std::vector<Detection>>> inflight;
    for (std::size_t r = begin; r < end; ++r) {
      inflight.push_back(std::async(std::launch::async,
                                    [&] { return proposer.propose(pair, input, output); }));
    }
    for (std::size_t r = begin; r < end; ++r) {
      try {
        runs[r] = inflight[r - begin].get();
      } catch (const std::exception& e) {
        if (errors != nullptr) errors->push_back("run " + std::to_string(r) + ": " + e.what());
      }
    }
  }
  return runs;
}

Json solver_request(const TaskRecord& task, const Grid& test_input, const Hint& hint,
                    std::size_t sample_index, std::uint64_t seed) {
  return {{"demonstrations", demonstrations(task)},
          {"test_input", rows(test_input)},
          {"hint", to_json(hint)},
          {"sample_index", sample_index},
          {"seed", seed + sample_index}};
}

Grid parse_grid_reply(const Json& body) {
  auto value = extract_json(body);
  if (value && value->is_object()) {
    for (const char* key : {"grid", "output"}) {
      if (value->contains(key)) {
        value = extract_json((*value)[key]);
        break;
      }
    }
  }
  if (!value) throw Error(ErrorCode::SchemaViolation, "reply holds no grid");
  try {
    return Grid::from_rows(value->get<std::vector<std::vector<int>>>());
  } catch (const Json::exception&) {
    throw Error(ErrorCode::SchemaViolation, "reply grid is not a list of lists of ints");
  }
}

HttpExternalSolver::HttpExternalSolver(Transport& transport, RetryPolicy policy,
                                       std::uint64_t seed, Sleeper sleep)
    : transport_(transport), policy_(policy), seed_(seed), sleep_(std::move(sleep)) {}

Grid HttpExternalSolver::sample(const TaskRecord& task, const Grid& test_input, const Hint& hint,
                                std::size_t sample_index) {
  return parse_grid_reply(post_json(transport_, "/solve",
                                    solver_request(task, test_input, hint, sample_index, seed_),
                                    policy_, sleep_));
}

Json selector_request(const TaskRecord& task, const Grid& test_input,
                      const std::vector<Grid>& solutions, const std::vector<std::string>& tags,
                      bool with_tags) {
  Json list = Json::array();
  for (std::size_t i = 0; i < solutions.size(); ++i) {
    Json entry = {{"id", i + 1}, {"grid", rows(solutions[i])}};
    if (with_tags && i < tags.size()) entry["source_tag"] = tags[i];
    list.push_back(std::move(entry));
  }
  return {{"train", demonstrations(task)},
          {"test_input", rows(test_input)},
          {"solutions", std::move(list)}};
}

std::optional<std::size_t> parse_solution_id(const Json& body, std::size_t count) {
  long long id = -1;
  if (body.is_number_integer()) {
    id = body.get<long long>();
  } else if (body.is_object() && body.contains("solution_id")) {
    return parse_solution_id(body["solution_id"], count);
  } else if (body.is_string()) {
    const std::string& text = body.get_ref<const std::string&>();
    static const std::regex starred("\\*\\*\\*\\s*(\\d+)\\s*\\*\\*\\*");
    static const std::regex bare("^\\s*(\\d+)\\s*$");
    std::smatch m;
    if (std::regex_search(text, m, starred) || std::regex_search(text, m, bare)) {
      id = std::stoll(m[1].str());
    }
  }
  if (id < 1 || static_cast<std::size_t>(id) > count) return std::nullopt;
  return static_cast<std::size_t>(id);
}

}  // namespace arc
