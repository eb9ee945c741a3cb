#pragma once

// Subcommand bodies behind the `dqm` executable, stream-based so they can be
// driven directly from tests.

#include <exception>
#include <istream>
#include <optional>
#include <ostream>
#include <stdexcept>
#include <string>

#include "dqm/io.hpp"
#include "dqm/sim.hpp"
#include "dqm/trajectory.hpp"

namespace dqm::cli {

enum ExitCode : int { kOk = 0, kInputError = 2, kInternalError = 3 };

// Runs `body`, mapping input/domain errors to exit code 2 and anything else
// to 3. Error text goes to `err`.
template <typename Body>
int guarded(std::ostream& err, Body&& body) {
  try {
    body();
    return kOk;
  } catch (const InputError& e) {
    err << "error: " << e.what() << '\n';
    return kInputError;
  } catch (const DomainError& e) {
    err << "error: " << e.what() << '\n';
    return kInputError;
  } catch (const std::exception& e) {
    err << "internal error: " << e.what() << '\n';
    return kInternalError;
  }
}

inline bool stream_is_empty(std::istream& in) {
  return in.peek() == std::char_traits<char>::eof();
}

// Replays the vote log task by task and writes one trajectory row per task.
inline void run_estimate(std::istream& votes, std::size_t n_items, const TrajectoryOptions& opt,
                         std::istream* truth_csv, std::ostream& out) {
  if (n_items == 0) throw InputError("--n-items must be positive");
  const VoteLog log = stream_is_empty(votes) ? VoteLog(n_items) : io::read_votes_csv(votes, n_items);
  std::optional<TruthLabels> truth;
  if (truth_csv) truth = io::read_truth_csv(*truth_csv, n_items);
  io::write_trajectory_csv(out, evaluate_trajectory(log, opt, truth ? &*truth : nullptr));
}

// Simulates the scenario, averages every estimator over its permutations
// and writes the long-format summary. Optionally exports the raw votes and
// the true dirty set for later replay with run_estimate.
inline void run_simulate(const SimScenario& sc, const TrajectoryOptions& opt, std::ostream& out,
                         std::ostream* votes_out = nullptr, std::ostream* truth_out = nullptr) {
  const SimResult sim = simulate(sc);
  const auto runs = permuted_trajectories(sim.log, sc.permutations, sc.seed ^ 0x9e3779b97f4a7c15ULL,
                                          opt, &sim.truth.labels);
  io::write_summary_csv(out, runs);
  if (votes_out) io::write_votes_csv(*votes_out, sim.log);
  if (truth_out) io::write_truth_csv(*truth_out, sim.truth.labels);
}

inline void run_pairs(std::istream& records, double alpha, double beta, std::ostream& out) {
  try {
    check_thresholds(alpha, beta);
  } catch (const DomainError& e) {
    throw InputError(e.what());
  }
  const RecordTable table = io::read_records_csv(records);
  io::write_pairs_csv(out, table, alpha, beta);
}

}  // namespace dqm::cli
