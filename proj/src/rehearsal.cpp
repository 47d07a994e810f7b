#include "icpl/rehearsal.hpp"

#include <algorithm>
#include <string>

#include "icpl/errors.hpp"

namespace icpl::rehearsal {

std::vector<Eigen::Index> herding_select(const Matrix& embeddings, Eigen::Index count) {
  const Eigen::Index n = embeddings.rows();
  if (count < 0 || count > n)
    throw ArgumentError("herding_select: count " + std::to_string(count) +
                        " out of range for " + std::to_string(n) + " samples");

  const RowVector mu = embeddings.colwise().mean();
  std::vector<Eigen::Index> order;
  order.reserve(static_cast<std::size_t>(count));
  std::vector<char> taken(static_cast<std::size_t>(n), 0);
  RowVector chosen_sum = RowVector::Zero(embeddings.cols());

  for (Eigen::Index t = 1; t <= count; ++t) {
    Eigen::Index best = -1;
    Scalar best_d = 0.0;
    for (Eigen::Index i = 0; i < n; ++i) {
      if (taken[static_cast<std::size_t>(i)]) continue;
      const Scalar d =
          (mu - (chosen_sum + embeddings.row(i)) / static_cast<Scalar>(t))
              .squaredNorm();
      if (best < 0 || d < best_d) {
        best = i;
        best_d = d;
      }
    }
    taken[static_cast<std::size_t>(best)] = 1;
    chosen_sum += embeddings.row(best);
    order.push_back(best);
  }
  return order;
}

ExemplarMemory::ExemplarMemory(int budget) : budget_(budget) {
  if (budget < 0) throw ArgumentError("memory: budget must be >= 0");
}

Eigen::Index ExemplarMemory::total_stored() const {
  Eigen::Index total = 0;
  for (const auto& [id, store] : per_class_) total += store.samples.rows();
  return total;
}

std::pair<Matrix, Labels> ExemplarMemory::as_training_set() const {
  const Eigen::Index total = total_stored();
  Eigen::Index dim = 0;
  for (const auto& [id, store] : per_class_) dim = store.samples.cols();
  Matrix samples(total, dim);
  Labels labels;
  labels.reserve(static_cast<std::size_t>(total));
  Eigen::Index row = 0;
  for (const auto& [id, store] : per_class_) {
    samples.middleRows(row, store.samples.rows()) = store.samples;
    row += store.samples.rows();
    labels.insert(labels.end(), static_cast<std::size_t>(store.samples.rows()), id);
  }
  return {std::move(samples), std::move(labels)};
}

ExemplarMemory rebalance(const ExemplarMemory& memory,
                         const std::vector<int>& new_class_ids,
                         const std::vector<Matrix>& their_samples,
                         const std::vector<Matrix>& their_embeddings) {
  if (new_class_ids.size() != their_samples.size() ||
      new_class_ids.size() != their_embeddings.size())
    throw ShapeError("rebalance: per-class input lists differ in length");

  ExemplarMemory out;
  out.budget_ = memory.budget_;

  std::vector<int> all_ids;
  for (const auto& [id, store] : memory.per_class_) all_ids.push_back(id);
  for (int id : new_class_ids) {
    if (memory.per_class_.count(id))
      throw ConsistencyError("rebalance: class " + std::to_string(id) +
                             " already stored");
    all_ids.push_back(id);
  }
  if (all_ids.empty()) return out;
  std::sort(all_ids.begin(), all_ids.end());

  // floor quota for everyone, remainder to the lowest class ids
  const auto n_classes = static_cast<Eigen::Index>(all_ids.size());
  const Eigen::Index quota = memory.budget_ / n_classes;
  Eigen::Index remainder = memory.budget_ % n_classes;
  std::map<int, Eigen::Index> quotas;
  for (int id : all_ids) {
    quotas[id] = quota + (remainder > 0 ? 1 : 0);
    if (remainder > 0) --remainder;
  }

  for (const auto& [id, store] : memory.per_class_) {
    const Eigen::Index keep = std::min<Eigen::Index>(quotas[id], store.samples.rows());
    out.per_class_[id].samples = store.samples.topRows(keep);
  }
  for (std::size_t i = 0; i < new_class_ids.size(); ++i) {
    const int id = new_class_ids[i];
    const Matrix& samples = their_samples[i];
    const Matrix& embeddings = their_embeddings[i];
    if (samples.rows() != embeddings.rows())
      throw ShapeError("rebalance: sample/embedding row mismatch for class " +
                       std::to_string(id));
    const Eigen::Index take = std::min<Eigen::Index>(quotas[id], samples.rows());
    const auto order = herding_select(embeddings, take);
    Matrix kept(take, samples.cols());
    for (Eigen::Index r = 0; r < take; ++r)
      kept.row(r) = samples.row(order[static_cast<std::size_t>(r)]);
    out.per_class_[id].samples = std::move(kept);
  }
  return out;
}

ExemplarMemory MemoryAccess::build(int budget, std::map<int, ClassStore> per_class) {
  ExemplarMemory m(budget);
  m.per_class_ = std::move(per_class);
  return m;
}

}  // namespace icpl::rehearsal
