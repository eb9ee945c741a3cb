#pragma once

// Worker-response data model: votes, vote logs, per-item tallies and the
// frequency-of-frequencies fingerprint that every estimator consumes.

#include <cstddef>
#include <cstdint>
#include <map>
#include <span>
#include <stdexcept>
#include <string>
#include <unordered_set>
#include <vector>

namespace dqm {

// Raised for input that violates the data model (bad ids, duplicate votes,
// non-contiguous tasks, malformed files).
class InputError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

// Raised when a numeric argument is outside the operation's domain.
class DomainError : public std::domain_error {
public:
  using std::domain_error::domain_error;
};

using ItemId = std::uint32_t;
using WorkerId = std::uint32_t;
using TaskId = std::uint32_t;

// An unseen item has no vote at all; there is no in-band "unseen" label.
enum class Label : std::uint8_t { Clean = 0, Dirty = 1 };

constexpr Label flip(Label l) noexcept {
  return l == Label::Dirty ? Label::Clean : Label::Dirty;
}

struct Vote {
  ItemId item = 0;
  WorkerId worker = 0;
  TaskId task = 0;
  Label label = Label::Clean;
  std::size_t seq = 0;

  friend bool operator==(const Vote&, const Vote&) = default;
};

// Ordered, validated sequence of votes over an item universe [0, N).
// seq is assigned on append and equals the vote's position in the log.
class VoteLog {
public:
  explicit VoteLog(std::size_t item_count, std::size_t task_size = 0)
      : item_count_(item_count), task_size_(task_size) {}

  // Appends one vote. Throws InputError if the item is out of range, the
  // worker already voted on the item, or the task was already closed.
  void append(ItemId item, WorkerId worker, TaskId task, Label label) {
    if (item >= item_count_) {
      throw InputError("item_id " + std::to_string(item) +
                       " outside item universe of size " +
                       std::to_string(item_count_));
    }
    const bool new_task = votes_.empty() || votes_.back().task != task;
    if (new_task && closed_tasks_.contains(task)) {
      throw InputError("votes for task " + std::to_string(task) +
                       " are not contiguous");
    }
    const std::uint64_t key =
        (static_cast<std::uint64_t>(worker) << 32) | static_cast<std::uint64_t>(item);
    if (seen_pairs_.contains(key)) {
      throw InputError("worker " + std::to_string(worker) +
                       " voted twice on item " + std::to_string(item));
    }
    seen_pairs_.insert(key);
    if (new_task) {
      if (!votes_.empty()) closed_tasks_.insert(votes_.back().task);
      task_ends_.push_back(votes_.size());
    }
    votes_.push_back(Vote{item, worker, task, label, votes_.size()});
    task_ends_.back() = votes_.size();
  }

  void append(const Vote& v) { append(v.item, v.worker, v.task, v.label); }

  std::span<const Vote> votes() const noexcept { return votes_; }
  std::size_t size() const noexcept { return votes_.size(); }
  bool empty() const noexcept { return votes_.empty(); }
  std::size_t item_count() const noexcept { return item_count_; }
  std::size_t task_size() const noexcept { return task_size_; }
  std::size_t task_count() const noexcept { return task_ends_.size(); }

  // Exclusive seq bound of each task, in arrival order. "After k tasks"
  // means the prefix [0, task_ends()[k-1]).
  std::span<const std::size_t> task_ends() const noexcept { return task_ends_; }

  // Votes grouped by task, in arrival order.
  std::vector<std::span<const Vote>> tasks() const {
    std::vector<std::span<const Vote>> out;
    out.reserve(task_ends_.size());
    std::size_t begin = 0;
    for (std::size_t end : task_ends_) {
      out.push_back(std::span<const Vote>(votes_).subspan(begin, end - begin));
      begin = end;
    }
    return out;
  }

private:
  std::size_t item_count_;
  std::size_t task_size_;
  std::vector<Vote> votes_;
  std::vector<std::size_t> task_ends_;
  std::unordered_set<TaskId> closed_tasks_;
  std::unordered_set<std::uint64_t> seen_pairs_;
};

struct ItemTally {
  std::uint32_t pos = 0;  // dirty votes
  std::uint32_t neg = 0;  // clean votes

  std::uint32_t total() const noexcept { return pos + neg; }
  friend bool operator==(const ItemTally&, const ItemTally&) = default;
};

// Per-item (n+, n-) counters over a vote-log prefix.
class TallyState {
public:
  TallyState() = default;
  explicit TallyState(std::size_t item_count) : items_(item_count) {}
  explicit TallyState(std::vector<ItemTally> items) : items_(std::move(items)) {}

  void apply(const Vote& v) {
    if (v.item >= items_.size()) {
      throw InputError("item_id " + std::to_string(v.item) + " outside tally universe");
    }
    auto& t = items_[v.item];
    if (v.label == Label::Dirty) {
      ++t.pos;
    } else {
      ++t.neg;
    }
  }

  const ItemTally& operator[](std::size_t i) const { return items_[i]; }
  std::span<const ItemTally> items() const noexcept { return items_; }
  std::size_t size() const noexcept { return items_.size(); }

  std::size_t total_votes() const noexcept {
    std::size_t n = 0;
    for (const auto& t : items_) n += t.total();
    return n;
  }

  friend bool operator==(const TallyState&, const TallyState&) = default;

private:
  std::vector<ItemTally> items_;
};

inline TallyState tally(const VoteLog& log, std::size_t upto_seq) {
  if (upto_seq > log.size()) {
    throw InputError("prefix length " + std::to_string(upto_seq) +
                     " exceeds log size " + std::to_string(log.size()));
  }
  TallyState state(log.item_count());
  for (const Vote& v : log.votes().first(upto_seq)) state.apply(v);
  return state;
}

inline TallyState tally(const VoteLog& log) { return tally(log, log.size()); }

// Frequency-of-frequencies fingerprint: freq[j] = number of species observed
// exactly j times. n is the effective sample size, which for switch
// statistics is supplied by the caller rather than derived from freq.
class FStatistics {
public:
  FStatistics() = default;
  FStatistics(std::map<std::size_t, std::size_t> freq, std::size_t n)
      : freq_(std::move(freq)), n_(n) {
    for (auto it = freq_.begin(); it != freq_.end();) {
      if (it->first == 0) throw DomainError("f-statistics multiplicity must be >= 1");
      if (it->second == 0) {
        it = freq_.erase(it);
      } else {
        c_ += it->second;
        ++it;
      }
    }
  }

  // Builds the fingerprint of a list of multiplicities with n = sum.
  static FStatistics from_multiplicities(std::span<const std::size_t> mult) {
    std::map<std::size_t, std::size_t> freq;
    std::size_t n = 0;
    for (std::size_t m : mult) {
      if (m == 0) continue;
      ++freq[m];
      n += m;
    }
    return FStatistics(std::move(freq), n);
  }

  std::size_t f(std::size_t j) const {
    auto it = freq_.find(j);
    return it == freq_.end() ? 0 : it->second;
  }

  const std::map<std::size_t, std::size_t>& freq() const noexcept { return freq_; }
  std::size_t n() const noexcept { return n_; }
  std::size_t distinct() const noexcept { return c_; }

  // sum_j j * f_j
  std::size_t weighted_sum() const noexcept {
    std::size_t s = 0;
    for (auto [j, fj] : freq_) s += j * fj;
    return s;
  }

  friend bool operator==(const FStatistics&, const FStatistics&) = default;

private:
  std::map<std::size_t, std::size_t> freq_;
  std::size_t n_ = 0;
  std::size_t c_ = 0;
};

// Discovery fingerprint: species are items with at least one dirty vote,
// multiplicity is the item's dirty-vote count, n = n+.
inline FStatistics error_fstats(const TallyState& t) {
  std::map<std::size_t, std::size_t> freq;
  std::size_t n = 0;
  for (const auto& it : t.items()) {
    if (it.pos == 0) continue;
    ++freq[it.pos];
    n += it.pos;
  }
  return FStatistics(std::move(freq), n);
}

inline FStatistics error_fstats(const VoteLog& log, std::size_t upto_seq) {
  return error_fstats(tally(log, upto_seq));
}

inline FStatistics error_fstats(const VoteLog& log) { return error_fstats(log, log.size()); }

}  // namespace dqm
