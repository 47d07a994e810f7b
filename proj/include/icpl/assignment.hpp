#pragma once

#include <map>
#include <set>
#include <utility>
#include <vector>

#include "icpl/types.hpp"

namespace icpl::assign {

enum class Objective { Minimize, Maximize };

/// Optimal one-to-one assignment of min(rows, cols) pairs. Ties between
/// optima resolve to the lexicographically smallest pair list (sorted by
/// row, then column), so results are stable across runs.
std::vector<std::pair<int, int>> hungarian(const Matrix& cost, Objective objective);

Scalar assignment_cost(const Matrix& cost,
                       const std::vector<std::pair<int, int>>& pairs);

/// Append-only injective map from classifier output units to ground-truth
/// class ids. Entries are fixed once added; each task appends its own block.
class EncodingTable {
 public:
  bool has_unit(int unit) const { return unit_to_class_.count(unit) != 0; }
  bool has_class(int class_id) const { return classes_.count(class_id) != 0; }
  int class_of(int unit) const;  // ConsistencyError on unknown unit

  const std::vector<std::pair<int, int>>& entries() const { return entries_; }
  const std::vector<std::vector<int>>& task_units() const { return task_units_; }
  std::size_t size() const { return entries_.size(); }

  /// The one mutator: appends a task's unit->class block. Re-mapping an
  /// existing unit or class is a ConsistencyError.
  void append_task(const std::vector<std::pair<int, int>>& pairs);

 private:
  std::vector<std::pair<int, int>> entries_;  // append order
  std::map<int, int> unit_to_class_;
  std::set<int> classes_;
  std::vector<std::vector<int>> task_units_;
};

/// Matches new clusters to new classes by maximize-agreement Hungarian on
/// the contingency table (contingency(i, j) = training samples in cluster i
/// whose true class is new_class_ids[j]) and appends the resulting pairs.
EncodingTable extend_encoding(const EncodingTable& table, const Matrix& contingency,
                              const std::vector<int>& new_unit_ids,
                              const std::vector<int>& new_class_ids);

/// Supervised tasks: unit i maps straight to class_ids[i].
EncodingTable extend_identity(const EncodingTable& table,
                              const std::vector<int>& new_unit_ids,
                              const std::vector<int>& new_class_ids);

/// Element-wise unit -> class lookup; unknown unit is a ConsistencyError.
Labels encode_predictions(const EncodingTable& table, const Labels& raw_predictions);

}  // namespace icpl::assign
