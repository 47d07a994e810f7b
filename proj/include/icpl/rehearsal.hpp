#pragma once

#include <map>
#include <vector>

#include "icpl/types.hpp"

namespace icpl::rehearsal {

/// Greedy herding order: step t picks the index whose inclusion keeps the
/// running mean of chosen embeddings closest to the full class mean.
/// Returns `count` distinct indices in selection order (ties -> lowest index).
std::vector<Eigen::Index> herding_select(const Matrix& embeddings, Eigen::Index count);

struct ClassStore {
  Matrix samples;  // rows in herding order
};

/// Fixed-budget exemplar store keyed by classifier unit id. Per-class lists
/// are prefixes of their herding order; shrinking keeps the prefix.
class ExemplarMemory {
 public:
  ExemplarMemory() = default;
  explicit ExemplarMemory(int budget);

  int budget() const { return budget_; }
  Eigen::Index total_stored() const;
  const std::map<int, ClassStore>& per_class() const { return per_class_; }
  bool empty() const { return per_class_.empty(); }

  /// All exemplars flattened: samples stacked row-wise with their unit ids.
  std::pair<Matrix, Labels> as_training_set() const;

  friend ExemplarMemory rebalance(const ExemplarMemory& memory,
                                  const std::vector<int>& new_class_ids,
                                  const std::vector<Matrix>& their_samples,
                                  const std::vector<Matrix>& their_embeddings);
  friend struct MemoryAccess;

 private:
  int budget_ = 0;
  std::map<int, ClassStore> per_class_;
};

/// Splits the budget evenly over all classes (floor quota, remainder to the
/// lowest class ids), truncates old classes to their herding prefix, and
/// fills each new class by herding over its embeddings.
ExemplarMemory rebalance(const ExemplarMemory& memory,
                         const std::vector<int>& new_class_ids,
                         const std::vector<Matrix>& their_samples,
                         const std::vector<Matrix>& their_embeddings);

// Serialization backdoor for checkpoints; not part of the training API.
struct MemoryAccess {
  static ExemplarMemory build(int budget, std::map<int, ClassStore> per_class);
};

}  // namespace icpl::rehearsal
