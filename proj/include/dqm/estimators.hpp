#pragma once

// Descriptive baselines and sample-coverage species estimators over the
// discovery fingerprint of dirty votes.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <map>

#include "dqm/core.hpp"

namespace dqm {

struct EstimateFlags {
  bool low_coverage = false;       // coverage hit 0; total capped at the universe size
  bool insufficient_data = false;  // sample size too small for the formula

  friend bool operator==(const EstimateFlags&, const EstimateFlags&) = default;
};

struct EstimatorOutput {
  double total_errors_hat = 0.0;
  double remaining_hat = 0.0;
  double coverage_hat = 1.0;
  double cv2_hat = 0.0;
  EstimateFlags flags;

  // False when the estimate is undefined (insufficient data, NaN total).
  bool defined() const noexcept { return !std::isnan(total_errors_hat); }
};

// Items with at least one dirty vote.
inline std::size_t nominal(const TallyState& t) {
  return static_cast<std::size_t>(
      std::count_if(t.items().begin(), t.items().end(),
                    [](const ItemTally& it) { return it.pos > 0; }));
}

// Items whose dirty votes are a strict majority; ties count as clean.
inline std::size_t majority(const TallyState& t) {
  return static_cast<std::size_t>(
      std::count_if(t.items().begin(), t.items().end(),
                    [](const ItemTally& it) { return it.pos > it.neg; }));
}

struct Extrapolation {
  double total = 0.0;
  double remaining = 0.0;
};

// Scales the error count of a perfectly cleaned sample up to the full data.
inline Extrapolation extrapolate(double sample_fraction, std::size_t sample_errors) {
  if (!(sample_fraction > 0.0) || sample_fraction > 1.0) {
    throw DomainError("sample fraction must lie in (0, 1]");
  }
  const double errs = static_cast<double>(sample_errors);
  const double total = errs / sample_fraction;
  return {total, total - errs};
}

// Good-Turing sample coverage 1 - f1/n; an empty sample has full coverage.
inline double coverage(const FStatistics& f) {
  if (f.n() == 0) return 1.0;
  const double c = 1.0 - static_cast<double>(f.f(1)) / static_cast<double>(f.n());
  return std::clamp(c, 0.0, 1.0);
}

// Squared coefficient of variation of species detection probabilities,
// floored at 0. d_noskew is the skew-free estimate c / C.
inline double cv2(const FStatistics& f, double d_noskew) {
  if (f.n() < 2) return 0.0;
  double pair_sum = 0.0;
  for (auto [j, fj] : f.freq()) {
    pair_sum += static_cast<double>(j) * static_cast<double>(j - 1) * static_cast<double>(fj);
  }
  const double n = static_cast<double>(f.n());
  return std::max(d_noskew * pair_sum / (n * (n - 1.0)) - 1.0, 0.0);
}

namespace detail {

// Coverage-based estimate with an explicit observed count. Shared by
// Chao92 (c = nominal), vChao92 (c = majority over shifted statistics) and
// the switch estimator (c = switch events).
inline EstimatorOutput coverage_estimate(const FStatistics& f, double observed,
                                         std::size_t universe) {
  EstimatorOutput out;
  out.coverage_hat = coverage(f);
  if (f.n() == 0) {
    out.total_errors_hat = observed;
    out.remaining_hat = 0.0;
    return out;
  }
  if (out.coverage_hat <= 0.0) {
    out.flags.low_coverage = true;
    out.total_errors_hat = std::max(static_cast<double>(universe), observed);
    out.remaining_hat = std::max(out.total_errors_hat - observed, 0.0);
    return out;
  }
  const double d_noskew = observed / out.coverage_hat;
  out.cv2_hat = cv2(f, d_noskew);
  out.total_errors_hat =
      d_noskew + static_cast<double>(f.f(1)) * out.cv2_hat / out.coverage_hat;
  out.remaining_hat = std::max(out.total_errors_hat - observed, 0.0);
  return out;
}

// Drops multiplicities 1..s and relabels f_{j+s} as f_j; the sample size
// becomes n - sum_{i<=s} f_i.
struct ShiftedStatistics {
  FStatistics stats;
  long long shifted_n = 0;  // may be <= 0, which signals insufficient data
};

inline ShiftedStatistics shift_statistics(const FStatistics& f, std::size_t shift) {
  std::map<std::size_t, std::size_t> freq;
  long long removed = 0;
  for (auto [j, fj] : f.freq()) {
    if (j <= shift) {
      removed += static_cast<long long>(fj);
    } else {
      freq[j - shift] = fj;
    }
  }
  const long long n = static_cast<long long>(f.n()) - removed;
  return {FStatistics(std::move(freq), n > 0 ? static_cast<std::size_t>(n) : 0), n};
}

}  // namespace detail

// Chao92 total error estimate over the discovery fingerprint. The universe
// size caps the estimate when every observation is a singleton.
inline EstimatorOutput chao92(const FStatistics& f, std::size_t universe) {
  return detail::coverage_estimate(f, static_cast<double>(f.distinct()), universe);
}

// Chao92 on statistics shifted by `shift`, seeded with an explicit observed
// count. Coverage and the skew term both use the shifted statistics.
inline EstimatorOutput shifted_chao92(const FStatistics& f, std::size_t observed,
                                      std::size_t shift, std::size_t universe) {
  const auto shifted = detail::shift_statistics(f, shift);
  if (shifted.shifted_n <= 0) {
    EstimatorOutput out;
    out.total_errors_hat = std::numeric_limits<double>::quiet_NaN();
    out.remaining_hat = std::numeric_limits<double>::quiet_NaN();
    out.flags.insufficient_data = true;
    return out;
  }
  return detail::coverage_estimate(shifted.stats, static_cast<double>(observed), universe);
}

// Voting Chao92: majority consensus as the observed count, fingerprint
// shifted by s to discount single-vote discoveries.
inline EstimatorOutput vchao92(const TallyState& t, const FStatistics& f, std::size_t shift,
                               std::size_t universe) {
  return shifted_chao92(f, majority(t), shift, universe);
}

inline EstimatorOutput vchao92(const TallyState& t, std::size_t shift) {
  return vchao92(t, error_fstats(t), shift, t.size());
}

}  // namespace dqm
