#pragma once

// Seeded synthetic crowd. One fresh worker per task; every vote flips the
// item's true label with the configured false-negative (dirty items) or
// false-positive (clean items) rate. Tasks are drawn through the heuristic
// partition with epsilon exploration.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <numeric>
#include <random>
#include <span>
#include <vector>

#include "dqm/core.hpp"
#include "dqm/priority.hpp"
#include "dqm/trajectory.hpp"

namespace dqm {

struct SimScenario {
  std::size_t n_items = 1000;
  std::size_t n_dirty = 100;
  std::size_t task_size = 15;
  std::size_t n_tasks = 50;
  double fp_rate = 0.0;
  double fn_rate = 0.0;
  double epsilon = 0.1;
  // Probability that a dirty item is scored below alpha (missed by the
  // heuristic), and that an out-of-band clean item is scored above beta.
  double heuristic_error = 0.0;
  // Target share of items scored inside [alpha, beta]. At 1 every item is
  // ambiguous and tasks sample the whole universe uniformly.
  double ambiguous_fraction = 1.0;
  double alpha = 0.5;
  double beta = 0.9;
  std::size_t permutations = 10;
  std::uint64_t seed = 0;

  void validate() const {
    auto rate = [](double r) { return r >= 0.0 && r <= 1.0; };
    if (n_dirty > n_items) throw DomainError("n_dirty exceeds n_items");
    if (task_size > n_items) throw DomainError("task_size exceeds n_items");
    if (!rate(fp_rate) || !rate(fn_rate) || !rate(epsilon) || !rate(heuristic_error) ||
        !rate(ambiguous_fraction)) {
      throw DomainError("rates must lie in [0, 1]");
    }
    check_thresholds(alpha, beta);
    if (permutations == 0) throw DomainError("permutations must be at least 1");
  }
};

struct GroundTruth {
  TruthLabels labels;
  std::vector<SwitchesNeeded> switches_needed;  // after each task, arrival order

  std::size_t dirty_count() const noexcept { return labels.dirty_count(); }
};

struct SimResult {
  VoteLog log;
  GroundTruth truth;
  HeuristicPartition heuristic;
};

namespace detail {

inline std::vector<double> synth_scores(const SimScenario& sc, const std::vector<bool>& dirty,
                                        std::mt19937_64& rng) {
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  auto in_band = [&] { return sc.alpha + (sc.beta - sc.alpha) * unit(rng); };
  auto below = [&] { return sc.alpha * unit(rng) * (1.0 - 1e-12); };
  auto above = [&] { return std::nextafter(sc.beta, 2.0) + (1.0 - sc.beta) * unit(rng) * (1.0 - 1e-12); };

  const double h = sc.heuristic_error;
  const double n_clean = static_cast<double>(sc.n_items - sc.n_dirty);
  double clean_in_band = 1.0;
  if (n_clean > 0) {
    const double target = sc.ambiguous_fraction * static_cast<double>(sc.n_items) -
                          (1.0 - h) * static_cast<double>(sc.n_dirty);
    clean_in_band = std::clamp(target / n_clean, 0.0, 1.0);
  }
  std::vector<double> scores(sc.n_items);
  for (std::size_t i = 0; i < sc.n_items; ++i) {
    if (dirty[i]) {
      scores[i] = unit(rng) < h ? below() : in_band();
    } else if (unit(rng) < clean_in_band) {
      scores[i] = in_band();
    } else {
      scores[i] = unit(rng) < h ? std::min(above(), 1.0) : below();
    }
  }
  return scores;
}

}  // namespace detail

// Deterministic under sc.seed.
inline SimResult simulate(const SimScenario& sc) {
  sc.validate();
  std::mt19937_64 rng(sc.seed);

  std::vector<ItemId> ids(sc.n_items);
  std::iota(ids.begin(), ids.end(), ItemId{0});
  std::shuffle(ids.begin(), ids.end(), rng);
  TruthLabels truth{std::vector<bool>(sc.n_items, false)};
  for (std::size_t i = 0; i < sc.n_dirty; ++i) truth.dirty[ids[i]] = true;

  auto scores = detail::synth_scores(sc, truth.dirty, rng);
  auto heuristic = partition(scores, sc.alpha, sc.beta);
  TaskSampler sampler(heuristic, EpsilonPolicy{sc.epsilon, rng()});

  VoteLog log(sc.n_items, sc.task_size);
  SwitchReplayer replayer(sc.n_items);
  std::vector<SwitchesNeeded> needed;
  needed.reserve(sc.n_tasks);
  std::bernoulli_distribution miss(sc.fn_rate);
  std::bernoulli_distribution false_alarm(sc.fp_rate);
  for (std::size_t task = 0; task < sc.n_tasks; ++task) {
    const auto draw = sampler.draw(sc.task_size);
    const auto worker = static_cast<WorkerId>(task);
    for (ItemId item : draw.items) {
      Label label = Label::Clean;
      if (truth.dirty[item]) {
        label = miss(rng) ? Label::Clean : Label::Dirty;
      } else {
        label = false_alarm(rng) ? Label::Dirty : Label::Clean;
      }
      log.append(item, worker, static_cast<TaskId>(task), label);
      replayer.push(log.votes().back());
    }
    needed.push_back(switches_needed(replayer.stats(), truth));
  }
  return SimResult{std::move(log), GroundTruth{std::move(truth), std::move(needed)},
                   std::move(heuristic)};
}

// Scaled root-mean-square error of repeated estimates against the truth.
inline double srmse(std::span<const double> estimates, double truth) {
  if (!(truth > 0.0)) throw DomainError("SRMSE needs a positive true count");
  if (estimates.empty()) throw DomainError("SRMSE needs at least one estimate");
  double sq = 0.0;
  for (double e : estimates) sq += (e - truth) * (e - truth);
  return std::sqrt(sq / static_cast<double>(estimates.size())) / truth;
}

// Tasks needed for three workers to review each of `sample_size` items with
// `task_size` items per task: ceil(3 S / p).
inline std::size_t scm(std::size_t sample_size, std::size_t task_size) {
  if (task_size == 0) throw DomainError("task size must be positive");
  return (3 * sample_size + task_size - 1) / task_size;
}

// Reorders whole tasks; votes keep their worker and task ids, seq is
// reassigned by arrival.
inline VoteLog permute_tasks(const VoteLog& log, std::span<const std::size_t> order) {
  const auto tasks = log.tasks();
  if (order.size() != tasks.size()) throw DomainError("task order has the wrong length");
  VoteLog out(log.item_count(), log.task_size());
  for (std::size_t t : order) {
    for (const Vote& v : tasks.at(t)) out.append(v);
  }
  return out;
}

// Trajectories of r task orders: the arrival order first, then r - 1 seeded
// shuffles.
inline std::vector<std::vector<TrajectoryRow>> permuted_trajectories(
    const VoteLog& log, std::size_t r, std::uint64_t seed, const TrajectoryOptions& opt = {},
    const TruthLabels* truth = nullptr) {
  if (r == 0) throw DomainError("need at least one permutation");
  std::mt19937_64 rng(seed);
  std::vector<std::size_t> order(log.task_count());
  std::vector<std::vector<TrajectoryRow>> runs;
  runs.reserve(r);
  for (std::size_t k = 0; k < r; ++k) {
    std::iota(order.begin(), order.end(), std::size_t{0});
    if (k == 0) {
      runs.push_back(evaluate_trajectory(log, opt, truth));
      continue;
    }
    std::shuffle(order.begin(), order.end(), rng);
    runs.push_back(evaluate_trajectory(permute_tasks(log, order), opt, truth));
  }
  return runs;
}

struct SeriesPoint {
  double mean = 0.0;
  double std = 0.0;         // population standard deviation over defined runs
  std::size_t defined = 0;  // runs with a non-NaN value
};

// Per-task mean and spread of one trajectory column across runs.
template <typename Extract>
std::vector<SeriesPoint> average(const std::vector<std::vector<TrajectoryRow>>& runs,
                                 Extract&& extract) {
  if (runs.empty()) return {};
  const std::size_t len = runs.front().size();
  std::vector<SeriesPoint> out(len);
  for (std::size_t k = 0; k < len; ++k) {
    // shifted by the first defined value, so identical runs give exactly 0
    double shift = 0.0, sum = 0.0, sq = 0.0;
    std::size_t count = 0;
    for (const auto& run : runs) {
      const double v = extract(run.at(k));
      if (std::isnan(v)) continue;
      if (count == 0) shift = v;
      sum += v - shift;
      sq += (v - shift) * (v - shift);
      ++count;
    }
    auto& p = out[k];
    p.defined = count;
    if (count == 0) {
      p.mean = p.std = std::numeric_limits<double>::quiet_NaN();
      continue;
    }
    const double n = static_cast<double>(count);
    p.mean = shift + sum / n;
    p.std = std::sqrt(std::max(sq / n - (sum / n) * (sum / n), 0.0));
  }
  return out;
}

template <typename Extract>
std::vector<SeriesPoint> permute_and_average(const VoteLog& log, std::size_t r, Extract&& extract,
                                             std::uint64_t seed,
                                             const TrajectoryOptions& opt = {}) {
  return average(permuted_trajectories(log, r, seed, opt), std::forward<Extract>(extract));
}

}  // namespace dqm
