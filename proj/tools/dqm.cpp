// dqm: estimate remaining data errors from crowd vote logs, run synthetic
// crowd scenarios, and build entity-resolution candidate pairs.

#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "dqm/cli.hpp"

namespace {

// Opens `path` for writing, or returns stdout for "-".
class Output {
public:
  explicit Output(const std::string& path) {
    if (path == "-") return;
    file_ = std::make_unique<std::ofstream>(path, std::ios::binary);
    if (!*file_) throw dqm::InputError("cannot open '" + path + "' for writing");
  }
  std::ostream& stream() { return file_ ? *file_ : std::cout; }

private:
  std::unique_ptr<std::ofstream> file_;
};

std::ifstream open_input(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw dqm::InputError("cannot open '" + path + "'");
  return in;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Remaining-error estimation for crowd-cleaned data"};
  app.require_subcommand(1);

  std::string out_path = "-";
  std::size_t shift = 1;
  std::size_t trend_window = 10;

  auto* estimate = app.add_subcommand("estimate", "Replay a vote log and emit per-task estimates");
  std::string votes_path;
  std::size_t n_items = 0;
  std::string truth_path;
  estimate->add_option("votes", votes_path, "Vote CSV (task_id,worker_id,item_id,label)")
      ->required();
  estimate->add_option("--n-items", n_items, "Size of the item universe")->required();
  estimate->add_option("--shift", shift, "vChao92 shift")->capture_default_str();
  estimate->add_option("--trend-window", trend_window, "Tasks between majority trend samples")
      ->capture_default_str();
  estimate->add_option("--truth", truth_path, "CSV of true-dirty item ids");
  estimate->add_option("--out", out_path, "Output path ('-' for stdout)")->capture_default_str();

  auto* simulate = app.add_subcommand("simulate", "Run a synthetic crowd scenario");
  std::string scenario_path;
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> permutations;
  std::optional<double> epsilon;
  std::string votes_out_path;
  std::string truth_out_path;
  simulate->add_option("scenario", scenario_path, "Scenario JSON")->required();
  simulate->add_option("--seed", seed, "Override the scenario seed");
  simulate->add_option("--permutations", permutations, "Override the permutation count");
  simulate->add_option("--epsilon", epsilon, "Override the exploration probability");
  simulate->add_option("--shift", shift, "vChao92 shift")->capture_default_str();
  simulate->add_option("--trend-window", trend_window, "Tasks between majority trend samples")
      ->capture_default_str();
  simulate->add_option("--votes-out", votes_out_path, "Also write the simulated votes CSV");
  simulate->add_option("--truth-out", truth_out_path, "Also write the true-dirty item ids");
  simulate->add_option("--out", out_path, "Output path ('-' for stdout)")->capture_default_str();

  auto* pairs = app.add_subcommand("pairs", "Score and classify all record pairs");
  std::string records_path;
  double alpha = 0.5;
  double beta = 0.9;
  pairs->add_option("records", records_path, "Records CSV (record_id,field1,...)")->required();
  pairs->add_option("--alpha", alpha, "Lower similarity threshold")->capture_default_str();
  pairs->add_option("--beta", beta, "Upper similarity threshold")->capture_default_str();
  pairs->add_option("--out", out_path, "Output path ('-' for stdout)")->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::Success& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return dqm::cli::kInputError;
  }

  const dqm::TrajectoryOptions opt{shift, trend_window};
  return dqm::cli::guarded(std::cerr, [&] {
    if (estimate->parsed()) {
      auto votes = open_input(votes_path);
      std::optional<std::ifstream> truth;
      if (!truth_path.empty()) truth = open_input(truth_path);
      Output out(out_path);
      dqm::cli::run_estimate(votes, n_items, opt, truth ? &*truth : nullptr, out.stream());
    } else if (simulate->parsed()) {
      auto in = open_input(scenario_path);
      auto sc = dqm::io::read_scenario_json(in);
      if (seed) sc.seed = *seed;
      if (permutations) sc.permutations = *permutations;
      if (epsilon) sc.epsilon = *epsilon;
      try {
        sc.validate();
      } catch (const dqm::DomainError& e) {
        throw dqm::InputError(std::string("invalid scenario: ") + e.what());
      }
      Output out(out_path);
      std::optional<Output> votes_out;
      std::optional<Output> truth_out;
      if (!votes_out_path.empty()) votes_out.emplace(votes_out_path);
      if (!truth_out_path.empty()) truth_out.emplace(truth_out_path);
      dqm::cli::run_simulate(sc, opt, out.stream(), votes_out ? &votes_out->stream() : nullptr,
                             truth_out ? &truth_out->stream() : nullptr);
    } else if (pairs->parsed()) {
      auto in = open_input(records_path);
      Output out(out_path);
      dqm::cli::run_pairs(in, alpha, beta, out.stream());
    }
  });
}
