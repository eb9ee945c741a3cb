#pragma once

// File formats: vote logs, truth lists, heuristic scores, record tables,
// scenario configs and trajectory tables.

#include <cstdint>
#include <istream>
#include <limits>
#include <ostream>
#include <string>
#include <vector>

#include <json.hpp>

#include "dqm/core.hpp"
#include "dqm/csv.hpp"
#include "dqm/pairs.hpp"
#include "dqm/sim.hpp"
#include "dqm/trajectory.hpp"

namespace dqm::io {

namespace detail {

inline std::uint32_t narrow_id(unsigned long long v, const csv::Row& row, const char* what) {
  if (v > std::numeric_limits<std::uint32_t>::max()) {
    throw InputError("line " + std::to_string(row.line) + ": " + what + " out of range");
  }
  return static_cast<std::uint32_t>(v);
}

}  // namespace detail

// `task_id,worker_id,item_id,label` with a header; label 1 = dirty, 0 = clean.
// Rows must be grouped by task; file order is arrival order.
inline VoteLog read_votes_csv(std::istream& in, std::size_t n_items, std::size_t task_size = 0) {
  const auto rows = csv::read_all(in);
  if (rows.empty()) throw InputError("line 1: missing header");
  const auto& header = rows.front();
  const std::size_t c_task = csv::column(header, "task_id");
  const std::size_t c_worker = csv::column(header, "worker_id");
  const std::size_t c_item = csv::column(header, "item_id");
  const std::size_t c_label = csv::column(header, "label");
  VoteLog log(n_items, task_size);
  for (std::size_t r = 1; r < rows.size(); ++r) {
    const auto& row = rows[r];
    if (row.fields.size() != header.fields.size()) {
      throw InputError("line " + std::to_string(row.line) + ": expected " +
                       std::to_string(header.fields.size()) + " fields");
    }
    const auto task = detail::narrow_id(csv::parse_unsigned(row, c_task, "task_id"), row, "task_id");
    const auto worker =
        detail::narrow_id(csv::parse_unsigned(row, c_worker, "worker_id"), row, "worker_id");
    const auto item = detail::narrow_id(csv::parse_unsigned(row, c_item, "item_id"), row, "item_id");
    const auto label = csv::parse_unsigned(row, c_label, "label");
    if (label > 1) {
      throw InputError("line " + std::to_string(row.line) + ": label must be 0 or 1");
    }
    try {
      log.append(item, worker, task, label == 1 ? Label::Dirty : Label::Clean);
    } catch (const InputError& e) {
      throw InputError("line " + std::to_string(row.line) + ": " + e.what());
    }
  }
  return log;
}

inline void write_votes_csv(std::ostream& out, const VoteLog& log) {
  out << "task_id,worker_id,item_id,label\n";
  for (const Vote& v : log.votes()) {
    out << v.task << ',' << v.worker << ',' << v.item << ',' << (v.label == Label::Dirty ? 1 : 0)
        << '\n';
  }
}

// One true-dirty item_id per line; an `item_id` header line is optional.
inline TruthLabels read_truth_csv(std::istream& in, std::size_t n_items) {
  TruthLabels truth{std::vector<bool>(n_items, false)};
  const auto rows = csv::read_all(in);
  for (std::size_t r = 0; r < rows.size(); ++r) {
    const auto& row = rows[r];
    if (r == 0 && !row.fields.empty() && row.fields[0] == "item_id") continue;
    if (row.fields.size() != 1) {
      throw InputError("line " + std::to_string(row.line) + ": expected a single item_id");
    }
    const auto item = csv::parse_unsigned(row, 0, "item_id");
    if (item >= n_items) {
      throw InputError("line " + std::to_string(row.line) + ": item_id outside item universe");
    }
    truth.dirty[item] = true;
  }
  return truth;
}

inline void write_truth_csv(std::ostream& out, const TruthLabels& truth) {
  out << "item_id\n";
  for (std::size_t i = 0; i < truth.dirty.size(); ++i) {
    if (truth.dirty[i]) out << i << '\n';
  }
}

// `item_id,score` with a header. Every item in [0, n_items) must be scored
// exactly once.
inline std::vector<double> read_scores_csv(std::istream& in, std::size_t n_items) {
  const auto rows = csv::read_all(in);
  if (rows.empty()) throw InputError("line 1: missing header");
  const std::size_t c_item = csv::column(rows.front(), "item_id");
  const std::size_t c_score = csv::column(rows.front(), "score");
  std::vector<double> scores(n_items, std::numeric_limits<double>::quiet_NaN());
  for (std::size_t r = 1; r < rows.size(); ++r) {
    const auto& row = rows[r];
    const auto item = csv::parse_unsigned(row, c_item, "item_id");
    const double score = csv::parse_double(row, c_score, "score");
    if (item >= n_items) {
      throw InputError("line " + std::to_string(row.line) + ": item_id outside item universe");
    }
    if (!std::isnan(scores[item])) {
      throw InputError("line " + std::to_string(row.line) + ": item scored twice");
    }
    if (score < 0.0 || score > 1.0) {
      throw InputError("line " + std::to_string(row.line) + ": score outside [0, 1]");
    }
    scores[item] = score;
  }
  for (std::size_t i = 0; i < n_items; ++i) {
    if (std::isnan(scores[i])) throw InputError("item " + std::to_string(i) + " has no score");
  }
  return scores;
}

// `record_id,field1,field2,...` with a header.
inline RecordTable read_records_csv(std::istream& in) {
  const auto rows = csv::read_all(in);
  if (rows.empty()) throw InputError("line 1: missing header");
  if (rows.front().fields.empty() || rows.front().fields[0] != "record_id") {
    throw InputError("line 1: first column must be 'record_id'");
  }
  RecordTable table;
  for (std::size_t r = 1; r < rows.size(); ++r) {
    const auto& row = rows[r];
    Record rec;
    rec.id = row.fields.at(0);
    rec.fields.assign(row.fields.begin() + 1, row.fields.end());
    try {
      table.add(std::move(rec));
    } catch (const InputError& e) {
      throw InputError("line " + std::to_string(row.line) + ": " + e.what());
    }
  }
  return table;
}

// `left_id,right_id,similarity,stratum`, one line per unordered pair in
// canonical order.
inline void write_pairs_csv(std::ostream& out, const RecordTable& table, double alpha, double beta,
                            const NormalizeOptions& opt = {}) {
  check_thresholds(alpha, beta);
  out << "left_id,right_id,similarity,stratum\n";
  for_each_pair(
      table,
      [&](const CandidatePair& p) {
        out << csv::quote(table[p.left].id) << ',' << csv::quote(table[p.right].id) << ','
            << csv::number(p.similarity) << ',' << to_string(classify(p.similarity, alpha, beta))
            << '\n';
      },
      opt);
}

// Flat JSON object whose keys are SimScenario fields. Unknown keys and
// mistyped values are rejected with the key's name.
inline SimScenario parse_scenario(const nlohmann::json& j) {
  if (!j.is_object()) throw InputError("scenario must be a JSON object");
  SimScenario sc;
  for (const auto& [key, value] : j.items()) {
    auto count = [&](std::size_t& dst) {
      if (!value.is_number_unsigned()) {
        throw InputError("scenario key '" + key + "' must be a non-negative integer");
      }
      dst = value.get<std::size_t>();
    };
    auto real = [&](double& dst) {
      if (!value.is_number()) throw InputError("scenario key '" + key + "' must be a number");
      dst = value.get<double>();
    };
    if (key == "n_items") {
      count(sc.n_items);
    } else if (key == "n_dirty") {
      count(sc.n_dirty);
    } else if (key == "task_size") {
      count(sc.task_size);
    } else if (key == "n_tasks") {
      count(sc.n_tasks);
    } else if (key == "fp_rate") {
      real(sc.fp_rate);
    } else if (key == "fn_rate") {
      real(sc.fn_rate);
    } else if (key == "epsilon") {
      real(sc.epsilon);
    } else if (key == "heuristic_error") {
      real(sc.heuristic_error);
    } else if (key == "ambiguous_fraction") {
      real(sc.ambiguous_fraction);
    } else if (key == "alpha") {
      real(sc.alpha);
    } else if (key == "beta") {
      real(sc.beta);
    } else if (key == "permutations") {
      count(sc.permutations);
    } else if (key == "seed") {
      if (!value.is_number_unsigned()) {
        throw InputError("scenario key 'seed' must be a non-negative integer");
      }
      sc.seed = value.get<std::uint64_t>();
    } else {
      throw InputError("unknown scenario key '" + key + "'");
    }
  }
  try {
    sc.validate();
  } catch (const DomainError& e) {
    throw InputError(std::string("invalid scenario: ") + e.what());
  }
  return sc;
}

inline SimScenario read_scenario_json(std::istream& in) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw InputError(std::string("scenario JSON: ") + e.what());
  }
  return parse_scenario(j);
}

inline void write_trajectory_csv(std::ostream& out, const std::vector<TrajectoryRow>& rows) {
  out << "task_index,nominal,majority,chao92_total,vchao92_total,switch_total,xi_pos,xi_neg,"
         "coverage_hat,truth,flags\n";
  for (const auto& r : rows) {
    csv::write_row(out, {csv::number(r.task_index), csv::number(r.nominal),
                         csv::number(r.majority), csv::number(r.chao92_total),
                         csv::number(r.vchao92_total), csv::number(r.switch_total),
                         csv::number(r.xi_pos), csv::number(r.xi_neg),
                         csv::number(r.coverage_hat), csv::number(r.truth), r.flags()});
  }
}

// Long-format summary `task_index,estimator,mean,std,truth` of r runs.
inline void write_summary_csv(std::ostream& out,
                              const std::vector<std::vector<TrajectoryRow>>& runs) {
  struct Column {
    const char* name;
    double (*value)(const TrajectoryRow&);
    double (*truth)(const TrajectoryRow&);
  };
  static constexpr auto total_truth = [](const TrajectoryRow& r) {
    return r.truth ? *r.truth : std::numeric_limits<double>::quiet_NaN();
  };
  static constexpr Column columns[] = {
      {"nominal", [](const TrajectoryRow& r) { return static_cast<double>(r.nominal); }, total_truth},
      {"majority", [](const TrajectoryRow& r) { return static_cast<double>(r.majority); },
       total_truth},
      {"chao92", [](const TrajectoryRow& r) { return r.chao92_total; }, total_truth},
      {"vchao92", [](const TrajectoryRow& r) { return r.vchao92_total; }, total_truth},
      {"switch", [](const TrajectoryRow& r) { return r.switch_total; }, total_truth},
      {"xi_pos", [](const TrajectoryRow& r) { return r.xi_pos; },
       [](const TrajectoryRow& r) {
         return r.truth_switches ? static_cast<double>(r.truth_switches->positive)
                                 : std::numeric_limits<double>::quiet_NaN();
       }},
      {"xi_neg", [](const TrajectoryRow& r) { return r.xi_neg; },
       [](const TrajectoryRow& r) {
         return r.truth_switches ? static_cast<double>(r.truth_switches->negative)
                                 : std::numeric_limits<double>::quiet_NaN();
       }},
  };
  out << "task_index,estimator,mean,std,truth\n";
  if (runs.empty()) return;
  std::vector<std::vector<SeriesPoint>> values;
  std::vector<std::vector<SeriesPoint>> truths;
  for (const auto& c : columns) {
    values.push_back(average(runs, c.value));
    truths.push_back(average(runs, c.truth));
  }
  for (std::size_t k = 0; k < runs.front().size(); ++k) {
    for (std::size_t c = 0; c < std::size(columns); ++c) {
      csv::write_row(out, {csv::number(runs.front()[k].task_index), columns[c].name,
                           csv::number(values[c][k].mean), csv::number(values[c][k].std),
                           csv::number(truths[c][k].mean)});
    }
  }
}

}  // namespace dqm::io
