#pragma once

// Heuristic prioritisation: split the universe by a confidence score into
// auto-clean / ambiguous / auto-dirty strata and draw crowd tasks mostly from
// the ambiguous stratum, exploring the rest with probability epsilon.

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <random>
#include <span>
#include <string_view>
#include <unordered_set>
#include <vector>

#include "dqm/core.hpp"

namespace dqm {

enum class Stratum : std::uint8_t { AutoClean, Ambiguous, AutoDirty };

constexpr std::string_view to_string(Stratum s) noexcept {
  switch (s) {
    case Stratum::AutoClean:
      return "auto_clean";
    case Stratum::Ambiguous:
      return "ambiguous";
    case Stratum::AutoDirty:
      return "auto_dirty";
  }
  return "?";
}

// Closed band: scores equal to alpha or beta are ambiguous.
constexpr Stratum classify(double score, double alpha, double beta) noexcept {
  if (score > beta) return Stratum::AutoDirty;
  if (score < alpha) return Stratum::AutoClean;
  return Stratum::Ambiguous;
}

inline void check_thresholds(double alpha, double beta) {
  if (!(alpha >= 0.0 && beta <= 1.0 && alpha <= beta)) {
    throw DomainError("thresholds must satisfy 0 <= alpha <= beta <= 1");
  }
}

struct HeuristicPartition {
  std::vector<double> scores;
  double alpha = 0.0;
  double beta = 1.0;
  std::vector<ItemId> ambiguous;
  std::vector<ItemId> auto_dirty;
  std::vector<ItemId> auto_clean;

  Stratum stratum(ItemId item) const { return classify(scores.at(item), alpha, beta); }
  std::size_t universe() const noexcept { return scores.size(); }
};

inline HeuristicPartition partition(std::span<const double> scores, double alpha, double beta) {
  check_thresholds(alpha, beta);
  HeuristicPartition p;
  p.scores.assign(scores.begin(), scores.end());
  p.alpha = alpha;
  p.beta = beta;
  for (std::size_t i = 0; i < scores.size(); ++i) {
    const auto id = static_cast<ItemId>(i);
    switch (classify(scores[i], alpha, beta)) {
      case Stratum::AutoDirty:
        p.auto_dirty.push_back(id);
        break;
      case Stratum::AutoClean:
        p.auto_clean.push_back(id);
        break;
      case Stratum::Ambiguous:
        p.ambiguous.push_back(id);
        break;
    }
  }
  return p;
}

struct EpsilonPolicy {
  double epsilon = 0.1;  // probability of drawing a slot outside the ambiguous stratum
  std::uint64_t seed = 0;
};

struct TaskDraw {
  std::vector<ItemId> items;
  // A slot asked for an empty (or exhausted) stratum and took the other one.
  bool fell_back = false;
};

// Draws tasks from a partition. Each slot picks the ambiguous stratum with
// probability 1 - epsilon, else its complement, then an item uniformly among
// that stratum's items not yet in the task. Owns its PRNG stream.
class TaskSampler {
public:
  TaskSampler(const HeuristicPartition& p, EpsilonPolicy policy)
      : policy_(policy), rng_(policy.seed), ambiguous_(p.ambiguous) {
    if (!(policy.epsilon >= 0.0 && policy.epsilon <= 1.0)) {
      throw DomainError("epsilon must lie in [0, 1]");
    }
    outside_.reserve(p.auto_dirty.size() + p.auto_clean.size());
    outside_.insert(outside_.end(), p.auto_clean.begin(), p.auto_clean.end());
    outside_.insert(outside_.end(), p.auto_dirty.begin(), p.auto_dirty.end());
    std::sort(outside_.begin(), outside_.end());
  }

  TaskDraw draw(std::size_t size) {
    if (size > ambiguous_.size() + outside_.size()) {
      throw DomainError("task size exceeds the item universe");
    }
    TaskDraw out;
    out.items.reserve(size);
    std::unordered_set<ItemId> taken;
    std::size_t taken_inside = 0;
    std::size_t taken_outside = 0;
    std::bernoulli_distribution explore(policy_.epsilon);
    for (std::size_t slot = 0; slot < size; ++slot) {
      bool inside = !explore(rng_);
      const bool inside_left = taken_inside < ambiguous_.size();
      const bool outside_left = taken_outside < outside_.size();
      if (inside && !inside_left) {
        inside = false;
        out.fell_back = true;
      } else if (!inside && !outside_left) {
        inside = true;
        out.fell_back = true;
      }
      const auto& pool = inside ? ambiguous_ : outside_;
      const std::size_t free_count = pool.size() - (inside ? taken_inside : taken_outside);
      // Uniform over the pool's untaken items: rejection while most of the
      // pool is free, otherwise walk to the k-th free item.
      std::uniform_int_distribution<std::size_t> pick(0, pool.size() - 1);
      ItemId item = 0;
      if (free_count * 4 >= pool.size()) {
        do {
          item = pool[pick(rng_)];
        } while (taken.contains(item));
      } else {
        std::uniform_int_distribution<std::size_t> kth(0, free_count - 1);
        std::size_t k = kth(rng_);
        for (ItemId candidate : pool) {
          if (taken.contains(candidate)) continue;
          if (k-- == 0) {
            item = candidate;
            break;
          }
        }
      }
      taken.insert(item);
      (inside ? taken_inside : taken_outside) += 1;
      out.items.push_back(item);
    }
    return out;
  }

  const EpsilonPolicy& policy() const noexcept { return policy_; }

private:
  EpsilonPolicy policy_;
  std::mt19937_64 rng_;
  std::vector<ItemId> ambiguous_;
  std::vector<ItemId> outside_;
};

// One-shot draw with a fresh stream seeded from the policy.
inline TaskDraw draw_task(const HeuristicPartition& p, const EpsilonPolicy& policy,
                          std::size_t size) {
  TaskSampler sampler(p, policy);
  return sampler.draw(size);
}

// Perfect heuristic: nothing outside the band is misclassified, so the total
// is the estimate over the ambiguous stratum plus the auto-dirty items.
inline double total_with_perfect_heuristic(double d_hat_on_ambiguous, const HeuristicPartition& p) {
  return d_hat_on_ambiguous + static_cast<double>(p.auto_dirty.size());
}

// Imperfect heuristic with epsilon exploration: the whole-universe estimate
// already covers both strata.
inline double total_with_imperfect_heuristic(double d_hat_on_universe) { return d_hat_on_universe; }

}  // namespace dqm
