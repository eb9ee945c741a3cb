#pragma once

// Replays a vote log task by task and snapshots every estimator after each
// completed task.

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "dqm/core.hpp"
#include "dqm/estimators.hpp"
#include "dqm/switches.hpp"

namespace dqm {

struct TrajectoryOptions {
  std::size_t shift = 1;         // vChao92 shift s
  std::size_t trend_window = 10;  // tasks between majority samples for the trend
};

// Ground-truth labels of the item universe (true = dirty).
struct TruthLabels {
  std::vector<bool> dirty;

  std::size_t dirty_count() const noexcept {
    std::size_t n = 0;
    for (bool d : dirty) n += d ? 1 : 0;
    return n;
  }
};

struct SwitchesNeeded {
  std::size_t positive = 0;  // consensus clean, truth dirty
  std::size_t negative = 0;  // consensus dirty, truth clean
};

// Flips the current consensus would still need to match the truth.
inline SwitchesNeeded switches_needed(const SwitchStats& stats, const TruthLabels& truth) {
  if (truth.dirty.size() != stats.consensus.size()) {
    throw InputError("truth labels do not match the item universe");
  }
  SwitchesNeeded out;
  for (std::size_t i = 0; i < truth.dirty.size(); ++i) {
    const bool consensus_dirty = stats.consensus[i].label == Label::Dirty;
    if (truth.dirty[i] && !consensus_dirty) ++out.positive;
    if (!truth.dirty[i] && consensus_dirty) ++out.negative;
  }
  return out;
}

struct TrajectoryRow {
  std::size_t task_index = 0;  // tasks completed, 1-based
  std::size_t nominal = 0;
  std::size_t majority = 0;
  double chao92_total = 0.0;
  double vchao92_total = 0.0;  // NaN when the shifted sample is empty
  double switch_total = 0.0;
  double xi_pos = 0.0;
  double xi_neg = 0.0;
  double coverage_hat = 1.0;
  Trend trend = Trend::Flat;
  std::optional<double> truth;
  std::optional<SwitchesNeeded> truth_switches;

  EstimateFlags chao92_flags;
  EstimateFlags vchao92_flags;
  EstimateFlags xi_pos_flags;
  EstimateFlags xi_neg_flags;
  bool switch_fell_back = false;

  // '|'-separated markers, empty when nothing is flagged.
  std::string flags() const {
    std::string out;
    auto add = [&out](const char* s) {
      if (!out.empty()) out += '|';
      out += s;
    };
    if (chao92_flags.low_coverage) add("chao92_low_coverage");
    if (vchao92_flags.low_coverage) add("vchao92_low_coverage");
    if (vchao92_flags.insufficient_data) add("vchao92_insufficient");
    if (xi_pos_flags.low_coverage) add("xi_pos_low_coverage");
    if (xi_neg_flags.low_coverage) add("xi_neg_low_coverage");
    if (switch_fell_back) add("switch_fallback");
    return out;
  }
};

inline Trend trend_of(std::size_t now, std::size_t before) noexcept {
  if (now > before) return Trend::Increasing;
  if (now < before) return Trend::Decreasing;
  return Trend::Flat;
}

// One row per completed task, in arrival order. The trend compares the
// majority count now against its value trend_window tasks earlier (or
// before the first task, while fewer tasks have completed).
inline std::vector<TrajectoryRow> evaluate_trajectory(const VoteLog& log,
                                                      const TrajectoryOptions& opt = {},
                                                      const TruthLabels* truth = nullptr) {
  if (opt.trend_window == 0) throw DomainError("trend window must be at least 1");
  if (truth && truth->dirty.size() != log.item_count()) {
    throw InputError("truth labels do not match the item universe");
  }
  const std::size_t universe = log.item_count();
  TallyState state(universe);
  SwitchReplayer replayer(universe);
  std::vector<std::size_t> majority_history{0};
  std::vector<TrajectoryRow> rows;
  rows.reserve(log.task_count());

  std::size_t next = 0;
  const auto votes = log.votes();
  for (std::size_t end : log.task_ends()) {
    for (; next < end; ++next) {
      state.apply(votes[next]);
      replayer.push(votes[next]);
    }
    TrajectoryRow row;
    row.task_index = rows.size() + 1;
    row.nominal = nominal(state);
    row.majority = majority(state);
    majority_history.push_back(row.majority);

    const auto f = error_fstats(state);
    const auto chao = chao92(f, universe);
    row.chao92_total = chao.total_errors_hat;
    row.coverage_hat = chao.coverage_hat;
    row.chao92_flags = chao.flags;

    const auto vchao = shifted_chao92(f, row.majority, opt.shift, universe);
    row.vchao92_total = vchao.total_errors_hat;
    row.vchao92_flags = vchao.flags;

    const std::size_t k = row.task_index;
    const std::size_t ref = k >= opt.trend_window ? k - opt.trend_window : 0;
    row.trend = trend_of(row.majority, majority_history[ref]);

    const auto& stats = replayer.stats();
    const auto total = switch_total_errors(state, stats, row.trend, universe);
    row.switch_total = total.total;
    row.switch_fell_back = total.fell_back;
    const auto pos = remaining_switches(stats, DirectionFilter::Positive, universe);
    const auto neg = remaining_switches(stats, DirectionFilter::Negative, universe);
    row.xi_pos = pos.xi;
    row.xi_neg = neg.xi;
    row.xi_pos_flags = pos.flags;
    row.xi_neg_flags = neg.flags;

    if (truth) {
      row.truth = static_cast<double>(truth->dirty_count());
      row.truth_switches = switches_needed(stats, *truth);
    }
    rows.push_back(row);
  }
  return rows;
}

}  // namespace dqm
