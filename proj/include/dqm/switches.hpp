#pragma once

// Consensus-switch accounting and the switch species estimator.
//
// A switch is an event on one item: its first vote being dirty, or any later
// vote that ties the dirty and clean counts. Each event is a species; every
// later vote on the item re-discovers the item's most recent event until the
// next event occurs. Votes before an item's first event are no-ops and do not
// count towards the sample size.

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <vector>

#include "dqm/core.hpp"
#include "dqm/estimators.hpp"

namespace dqm {

enum class SwitchDirection : std::uint8_t {
  Positive,  // clean -> dirty
  Negative,  // dirty -> clean
};

enum class DirectionFilter : std::uint8_t { All, Positive, Negative };

struct SwitchEvent {
  ItemId item = 0;
  std::size_t seq = 0;
  SwitchDirection direction = SwitchDirection::Positive;
  std::size_t multiplicity = 1;

  friend bool operator==(const SwitchEvent&, const SwitchEvent&) = default;
};

// Running majority consensus of one item. The label follows the strict
// majority; on a tie it becomes the opposite of the label held before the tie.
struct ConsensusItem {
  Label label = Label::Clean;
  std::uint32_t pos = 0;
  std::uint32_t neg = 0;
  std::optional<std::size_t> last_event;  // index into SwitchStats::events
};

struct SwitchStats {
  std::vector<SwitchEvent> events;
  std::vector<ConsensusItem> consensus;
  std::size_t total_votes = 0;
  std::size_t noop_votes = 0;

  std::size_t c_switch() const noexcept { return events.size(); }
  std::size_t n_switch() const noexcept { return total_votes - noop_votes; }

  std::size_t count(DirectionFilter filter) const noexcept {
    if (filter == DirectionFilter::All) return events.size();
    const auto want = filter == DirectionFilter::Positive ? SwitchDirection::Positive
                                                          : SwitchDirection::Negative;
    return static_cast<std::size_t>(std::count_if(
        events.begin(), events.end(), [want](const SwitchEvent& e) { return e.direction == want; }));
  }
};

// Incremental fold of votes into switch statistics.
class SwitchReplayer {
public:
  explicit SwitchReplayer(std::size_t item_count) { stats_.consensus.resize(item_count); }

  // Returns the direction of the switch this vote caused, if any.
  std::optional<SwitchDirection> push(const Vote& v) {
    if (v.item >= stats_.consensus.size()) {
      throw InputError("item_id " + std::to_string(v.item) + " outside switch universe");
    }
    auto& item = stats_.consensus[v.item];
    const Label before = item.label;
    const bool first_vote = item.pos + item.neg == 0;
    if (v.label == Label::Dirty) {
      ++item.pos;
    } else {
      ++item.neg;
    }
    ++stats_.total_votes;

    std::optional<SwitchDirection> dir;
    if (first_vote) {
      item.label = v.label;
      if (v.label == Label::Dirty) dir = SwitchDirection::Positive;
    } else if (item.pos == item.neg) {
      item.label = flip(before);
      dir = before == Label::Dirty ? SwitchDirection::Negative : SwitchDirection::Positive;
    } else {
      item.label = item.pos > item.neg ? Label::Dirty : Label::Clean;
    }

    if (dir) {
      item.last_event = stats_.events.size();
      stats_.events.push_back(SwitchEvent{v.item, v.seq, *dir, 1});
    } else if (item.last_event) {
      ++stats_.events[*item.last_event].multiplicity;
    } else {
      ++stats_.noop_votes;
    }
    return dir;
  }

  const SwitchStats& stats() const noexcept { return stats_; }

private:
  SwitchStats stats_;
};

inline SwitchStats replay_switches(const VoteLog& log, std::size_t upto_seq) {
  if (upto_seq > log.size()) {
    throw InputError("prefix length exceeds log size");
  }
  SwitchReplayer replayer(log.item_count());
  for (const Vote& v : log.votes().first(upto_seq)) replayer.push(v);
  return replayer.stats();
}

inline SwitchStats replay_switches(const VoteLog& log) { return replay_switches(log, log.size()); }

inline std::size_t switch_count(const SwitchStats& stats) noexcept { return stats.c_switch(); }

// Fingerprint of (direction-filtered) switch multiplicities. The sample size
// is always the global n_switch, whatever the filter.
inline FStatistics switch_fstats(const SwitchStats& stats, DirectionFilter filter) {
  std::map<std::size_t, std::size_t> freq;
  for (const auto& e : stats.events) {
    if (filter == DirectionFilter::Positive && e.direction != SwitchDirection::Positive) continue;
    if (filter == DirectionFilter::Negative && e.direction != SwitchDirection::Negative) continue;
    ++freq[e.multiplicity];
  }
  return FStatistics(std::move(freq), stats.n_switch());
}

// Estimated total number of switch events as sampling continues.
inline EstimatorOutput d_switch(const FStatistics& f, std::size_t universe) {
  if (f.n() == 0) {
    EstimatorOutput out;
    out.total_errors_hat = static_cast<double>(f.distinct());
    out.flags.insufficient_data = true;
    return out;
  }
  return detail::coverage_estimate(f, static_cast<double>(f.distinct()), universe);
}

struct RemainingSwitches {
  double xi = 0.0;
  EstimateFlags flags;
};

// Switches still expected before the consensus reaches the truth, >= 0.
inline RemainingSwitches remaining_switches(const SwitchStats& stats, DirectionFilter filter,
                                            std::size_t universe) {
  const auto f = switch_fstats(stats, filter);
  const auto est = d_switch(f, universe);
  return {std::max(est.total_errors_hat - static_cast<double>(f.distinct()), 0.0), est.flags};
}

inline RemainingSwitches remaining_switches(const SwitchStats& stats, DirectionFilter filter) {
  return remaining_switches(stats, filter, stats.consensus.size());
}

enum class Trend : std::uint8_t { Increasing, Decreasing, Flat };

struct SwitchTotal {
  double total = 0.0;
  double xi_pos = 0.0;
  double xi_neg = 0.0;
  // Set when a one-sided estimate the trend asked for was unavailable and
  // the majority count was returned unchanged.
  bool fell_back = false;
};

// Total error estimate: majority consensus corrected by the remaining
// positive and/or negative switches, chosen by the majority trend.
inline SwitchTotal switch_total_errors(const TallyState& t, const SwitchStats& stats, Trend trend,
                                       std::size_t universe) {
  const double base = static_cast<double>(majority(t));
  const auto pos = remaining_switches(stats, DirectionFilter::Positive, universe);
  const auto neg = remaining_switches(stats, DirectionFilter::Negative, universe);
  SwitchTotal out;
  out.xi_pos = pos.xi;
  out.xi_neg = neg.xi;
  double total = base;
  switch (trend) {
    case Trend::Increasing:
      if (pos.flags.insufficient_data) {
        out.fell_back = true;
      } else {
        total = base + pos.xi;
      }
      break;
    case Trend::Decreasing:
      if (neg.flags.insufficient_data) {
        out.fell_back = true;
      } else {
        total = base - neg.xi;
      }
      break;
    case Trend::Flat:
      if (pos.flags.insufficient_data || neg.flags.insufficient_data) {
        out.fell_back = true;
      } else {
        total = base + pos.xi - neg.xi;
      }
      break;
  }
  out.total = std::clamp(total, 0.0, static_cast<double>(universe));
  return out;
}

inline SwitchTotal switch_total_errors(const TallyState& t, const SwitchStats& stats, Trend trend) {
  return switch_total_errors(t, stats, trend, t.size());
}

}  // namespace dqm
