#pragma once

// Entity-resolution front end. A record table is expanded into its unordered
// pair universe (i < j, no self pairs); each pair is scored with a normalised
// edit-distance similarity and classified against the [alpha, beta] band.

#include <algorithm>
#include <cctype>
#include <cstddef>
#include <cstdint>
#include <string>
#include <string_view>
#include <unordered_set>
#include <vector>

#include "dqm/core.hpp"
#include "dqm/priority.hpp"

namespace dqm {

struct Record {
  std::string id;
  std::vector<std::string> fields;
};

class RecordTable {
public:
  RecordTable() = default;
  explicit RecordTable(std::vector<Record> rows) {
    for (auto& r : rows) add(std::move(r));
  }

  void add(Record r) {
    if (!ids_.insert(r.id).second) {
      throw InputError("duplicate record_id '" + r.id + "'");
    }
    rows_.push_back(std::move(r));
  }

  const std::vector<Record>& rows() const noexcept { return rows_; }
  std::size_t size() const noexcept { return rows_.size(); }
  const Record& operator[](std::size_t i) const { return rows_[i]; }

private:
  std::vector<Record> rows_;
  std::unordered_set<std::string> ids_;
};

struct NormalizeOptions {
  std::string separator = " ";
  bool lowercase = true;
  bool collapse_whitespace = true;
};

// Joins the fields, lowercases and collapses whitespace runs to one space
// (trimming both ends).
inline std::string normalize(const Record& r, const NormalizeOptions& opt = {}) {
  std::string joined;
  for (std::size_t i = 0; i < r.fields.size(); ++i) {
    if (i) joined += opt.separator;
    joined += r.fields[i];
  }
  std::string out;
  out.reserve(joined.size());
  bool pending_space = false;
  for (unsigned char ch : joined) {
    if (opt.collapse_whitespace && std::isspace(ch)) {
      pending_space = !out.empty();
      continue;
    }
    if (pending_space) {
      out += ' ';
      pending_space = false;
    }
    out += static_cast<char>(opt.lowercase ? std::tolower(ch) : ch);
  }
  return out;
}

// Unit-cost Levenshtein distance, two-row dynamic programme over bytes.
inline std::size_t levenshtein(std::string_view a, std::string_view b) {
  if (a.size() < b.size()) std::swap(a, b);
  std::vector<std::size_t> prev(b.size() + 1);
  std::vector<std::size_t> cur(b.size() + 1);
  for (std::size_t j = 0; j <= b.size(); ++j) prev[j] = j;
  for (std::size_t i = 1; i <= a.size(); ++i) {
    cur[0] = i;
    for (std::size_t j = 1; j <= b.size(); ++j) {
      const std::size_t subst = prev[j - 1] + (a[i - 1] == b[j - 1] ? 0 : 1);
      cur[j] = std::min({prev[j] + 1, cur[j - 1] + 1, subst});
    }
    std::swap(prev, cur);
  }
  return prev[b.size()];
}

// 1 - distance / max length; two empty strings are identical.
inline double string_similarity(std::string_view a, std::string_view b) {
  const std::size_t len = std::max(a.size(), b.size());
  if (len == 0) return 1.0;
  return 1.0 - static_cast<double>(levenshtein(a, b)) / static_cast<double>(len);
}

inline double similarity(const Record& a, const Record& b, const NormalizeOptions& opt = {}) {
  return string_similarity(normalize(a, opt), normalize(b, opt));
}

// N (N - 1) / 2
constexpr std::uint64_t all_pairs_count(std::uint64_t n) noexcept {
  return n < 2 ? 0 : n * (n - 1) / 2;
}

inline std::uint64_t all_pairs(const RecordTable& t) { return all_pairs_count(t.size()); }

struct CandidatePair {
  std::uint32_t left = 0;   // row index, left < right
  std::uint32_t right = 0;
  double similarity = 0.0;

  friend bool operator==(const CandidatePair&, const CandidatePair&) = default;
};

// Streams every unordered pair in canonical (left, right) order to `sink`
// without materialising the pair universe. Records are normalised once.
template <typename Sink>
void for_each_pair(const RecordTable& t, Sink&& sink, const NormalizeOptions& opt = {}) {
  std::vector<std::string> norm;
  norm.reserve(t.size());
  for (const auto& r : t.rows()) norm.push_back(normalize(r, opt));
  for (std::size_t i = 0; i < norm.size(); ++i) {
    for (std::size_t j = i + 1; j < norm.size(); ++j) {
      sink(CandidatePair{static_cast<std::uint32_t>(i), static_cast<std::uint32_t>(j),
                         string_similarity(norm[i], norm[j])});
    }
  }
}

// Result of classifying the pair universe. Only the ambiguous and auto-dirty
// pairs are kept; auto-clean pairs are counted.
struct CandidateSet {
  double alpha = 0.0;
  double beta = 1.0;
  std::vector<CandidatePair> ambiguous;
  std::vector<CandidatePair> auto_dirty;
  std::uint64_t auto_clean_count = 0;

  std::uint64_t universe() const noexcept {
    return ambiguous.size() + auto_dirty.size() + auto_clean_count;
  }

  // Partition over the kept pairs (ambiguous first, then auto-dirty), the
  // item universe handed to the crowd. Item id k is the k-th kept pair.
  HeuristicPartition kept_partition() const {
    std::vector<double> scores;
    scores.reserve(ambiguous.size() + auto_dirty.size());
    for (const auto& p : ambiguous) scores.push_back(p.similarity);
    for (const auto& p : auto_dirty) scores.push_back(p.similarity);
    return partition(scores, alpha, beta);
  }
};

inline CandidateSet candidates(const RecordTable& t, double alpha, double beta,
                               const NormalizeOptions& opt = {}) {
  check_thresholds(alpha, beta);
  CandidateSet out;
  out.alpha = alpha;
  out.beta = beta;
  for_each_pair(
      t,
      [&](const CandidatePair& p) {
        switch (classify(p.similarity, alpha, beta)) {
          case Stratum::Ambiguous:
            out.ambiguous.push_back(p);
            break;
          case Stratum::AutoDirty:
            out.auto_dirty.push_back(p);
            break;
          case Stratum::AutoClean:
            ++out.auto_clean_count;
            break;
        }
      },
      opt);
  return out;
}

}  // namespace dqm
