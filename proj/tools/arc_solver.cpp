#include "arc/consistency.hpp"
#include "arc/error.hpp"
#include "arc/external.hpp"
#include "arc/harness.hpp"
#include "arc/hypothesis.hpp"
#include "arc/scene.hpp"
#include "arc/task.hpp"

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include <fstream>
#include <iostream>
#include <memory>

namespace {

using Json = nlohmann::json;

struct Options {
  arc::Config config;
  std::string proposer = "builtin";
  std::string selector = "train_consistency";
  std::string report;
  std::string path;
  bool verbose = false;
};

void write_report(const std::string& path, const Json& j) {
  if (path.empty()) return;
  std::ofstream out(path);
  if (!out) throw arc::Error(arc::ErrorCode::InvalidArgument, "cannot write " + path);
  out << j.dump(2) << "\n";
}

/// Owns the external components a configuration asks for.
struct External {
  std::unique_ptr<arc::HttpTransport> transport;
  std::unique_ptr<arc::ExternalProposer> proposer;
  std::unique_ptr<arc::HttpExternalSolver> solver;
  std::unique_ptr<arc::HttpExternalSelector> selector;

  arc::Components components() const {
    return {proposer.get(), solver.get(), selector.get()};
  }
};

External connect(const arc::Config& c) {
  External ext;
  if (c.endpoint.empty()) {
    if (c.proposer == arc::ProposerKind::External || c.selector == arc::SelectionStrategy::External) {
      throw arc::Error(arc::ErrorCode::InvalidArgument,
                       "external components need --endpoint");
    }
    return ext;
  }
  ext.transport = std::make_unique<arc::HttpTransport>(c.endpoint, c.retry.request_timeout_seconds);
  if (c.proposer == arc::ProposerKind::External) {
    ext.proposer = std::make_unique<arc::ExternalProposer>(*ext.transport, c.retry);
  }
  ext.solver = std::make_unique<arc::HttpExternalSolver>(*ext.transport, c.retry, c.seed);
  if (c.selector == arc::SelectionStrategy::External) {
    ext.selector = std::make_unique<arc::HttpExternalSelector>(*ext.transport, c.retry,
                                                               c.selector_source_tags);
  }
  return ext;
}

int cmd_solve(const Options& o) {
  const arc::TaskRecord task = arc::load_task_file(o.path);
  const External ext = connect(o.config);
  const arc::TaskOutcome outcome = arc::run_task(task, o.config, ext.components());
  if (!outcome.error.empty()) {
    std::cerr << task.task_id << ": " << outcome.error << "\n";
    return 1;
  }
  std::cout << task.task_id;
  if (!outcome.program.empty()) std::cout << "  program: " << outcome.program;
  std::cout << "\n";
  for (std::size_t t = 0; t < outcome.tests.size(); ++t) {
    const auto& test = outcome.tests[t];
    std::cout << "test " << t << " route " << test.route;
    if (test.correct) std::cout << (*test.correct ? "  correct" : "  incorrect");
    std::cout << "\nfirst (" << test.submission.first_tag << "):\n"
              << arc::to_ascii(test.submission.first) << "second ("
              << test.submission.second_tag << "):\n"
              << arc::to_ascii(test.submission.second);
  }
  if (o.verbose) {
    for (const auto& n : outcome.notes) std::cout << "note: " << n << "\n";
  }
  write_report(o.report, arc::to_json(outcome));
  return 0;
}

int cmd_eval(const Options& o) {
  const External ext = connect(o.config);
  const arc::EvalReport report = arc::run_eval(o.path, o.config, ext.components());
  std::cout << arc::format_table(report, o.verbose);
  write_report(o.report, arc::to_json(report));
  return 0;
}

int cmd_abstract(const Options& o) {
  const arc::TaskRecord task = arc::load_task_file(o.path);
  Json j = {{"task_id", task.task_id}, {"train", Json::array()}, {"test", Json::array()}};
  for (const auto& pair : task.train) {
    j["train"].push_back({{"input", arc::scene_to_json(arc::abstract_scene(pair.input))},
                          {"output", arc::scene_to_json(arc::abstract_scene(pair.output))}});
  }
  for (const auto& g : task.test_inputs) {
    j["test"].push_back({{"input", arc::scene_to_json(arc::abstract_scene(g))}});
  }
  std::cout << j.dump(2) << "\n";
  write_report(o.report, j);
  return 0;
}

int cmd_detect(const Options& o) {
  const arc::TaskRecord task = arc::load_task_file(o.path);
  const External ext = connect(o.config);
  const arc::TaskAnalysis analysis = arc::analyze_task(task, o.config, ext.components());
  Json examples = Json::array();
  for (const auto& cs : analysis.sets) {
    Json runs = Json::array();
    for (const auto& run : cs.runs) {
      Json entries = Json::array();
      for (const auto& d : run) entries.push_back(arc::to_json(d));
      runs.push_back(std::move(entries));
    }
    examples.push_back({{"example", cs.example_index},
                        {"runs", std::move(runs)},
                        {"candidates", cs.candidates.size()}});
  }
  Json ranked = Json::array();
  for (const auto& r : analysis.report.ranked) {
    ranked.push_back({{"pattern_name", r.pattern_name}, {"params", r.params}, {"count", r.count}});
  }
  Json j = {{"task_id", task.task_id},
            {"examples", std::move(examples)},
            {"ranked", std::move(ranked)},
            {"consistency", arc::to_json(analysis.report)}};
  std::cout << j.dump(2) << "\n";
  write_report(o.report, j);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Compositional ARC solver"};
  app.require_subcommand(1);
  Options o;

  auto add_common = [&](CLI::App* sub, const std::string& what) {
    sub->add_option("path", o.path, what)->required();
    sub->add_option("--attempts", o.config.attempts, "Solver samples per test input (3-10)")
        ->check(CLI::Range(3, 10));
    sub->add_option("--top-k", o.config.top_k, "Patterns forwarded by detection count");
    sub->add_option("--repetitions", o.config.repetitions, "External detection runs per example");
    sub->add_option("--max-depth", o.config.max_depth, "Maximum program depth");
    sub->add_option("--symmetry-threshold", o.config.symmetry_threshold,
                    "Score above which the symmetry solver runs")
        ->check(CLI::Range(0.0, 1.0));
    sub->add_option("--proposer", o.proposer, "Pattern proposer")
        ->check(CLI::IsMember({"builtin", "external"}));
    sub->add_option("--selector", o.selector, "Meta-selection strategy")
        ->check(CLI::IsMember({"train_consistency", "agreement", "external"}));
    sub->add_option("--seed", o.config.seed, "Seed passed to external sampling");
    sub->add_option("--endpoint", o.config.endpoint, "Base URL of the external service");
    sub->add_flag("--selector-tags", o.config.selector_source_tags,
                  "Send source tags to the external selector");
    sub->add_option("--report", o.report, "Write a JSON report to this path");
    sub->add_flag("--verbose", o.verbose, "Print grids and notes");
  };
  add_common(app.add_subcommand("solve", "Solve one task file"), "Task JSON file");
  add_common(app.add_subcommand("eval", "Evaluate a directory of task files"), "Task directory");
  add_common(app.add_subcommand("abstract", "Dump scene graphs of a task"), "Task JSON file");
  add_common(app.add_subcommand("detect", "Dump detections and candidates of a task"),
             "Task JSON file");

  CLI11_PARSE(app, argc, argv);
  try {
    o.config.proposer = arc::parse_proposer_kind(o.proposer);
    o.config.selector = arc::parse_selection_strategy(o.selector);
    arc::validate(o.config);
    const std::string name = app.get_subcommands().front()->get_name();
    if (name == "solve") return cmd_solve(o);
    if (name == "eval") return cmd_eval(o);
    if (name == "abstract") return cmd_abstract(o);
    return cmd_detect(o);
  } catch (const arc::Error& e) {
    std::cerr << "error [" << arc::to_string(e.code()) << "]: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
}
