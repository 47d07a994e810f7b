#include "icpl/evaluation.hpp"

#include <algorithm>
#include <cmath>
#include <map>

#include "icpl/errors.hpp"

namespace icpl::metrics {

namespace {

// Dense re-indexing of arbitrary label values, in sorted value order.
std::map<int, int> dense_index(const Labels& labels) {
  std::map<int, int> idx;
  for (int v : labels) idx.emplace(v, 0);
  int next = 0;
  for (auto& [value, index] : idx) index = next++;
  return idx;
}

Matrix contingency_table(const Labels& u, const Labels& v,
                         const std::map<int, int>& ui, const std::map<int, int>& vi) {
  Matrix table = Matrix::Zero(static_cast<Eigen::Index>(ui.size()),
                              static_cast<Eigen::Index>(vi.size()));
  for (std::size_t i = 0; i < u.size(); ++i)
    table(ui.at(u[i]), vi.at(v[i])) += 1.0;
  return table;
}

Scalar entropy(const Vector& counts, Scalar n) {
  Scalar h = 0.0;
  for (Eigen::Index i = 0; i < counts.size(); ++i) {
    if (counts(i) > 0) {
      const Scalar p = counts(i) / n;
      h -= p * std::log(p);
    }
  }
  return h;
}

Scalar choose2(Scalar m) { return m * (m - 1.0) / 2.0; }

}  // namespace

Scalar top1_static(const Labels& predicted_units, const assign::EncodingTable& table,
                   const Labels& truth) {
  if (predicted_units.size() != truth.size())
    throw ShapeError("top1_static: prediction/truth length mismatch");
  if (predicted_units.empty())
    throw ArgumentError("top1_static: empty input");
  const Labels encoded = assign::encode_predictions(table, predicted_units);
  std::size_t hits = 0;
  for (std::size_t i = 0; i < encoded.size(); ++i)
    if (encoded[i] == truth[i]) ++hits;
  return 100.0 * static_cast<Scalar>(hits) / static_cast<Scalar>(truth.size());
}

Scalar cluster_accuracy(const Labels& predictions, const Labels& truth) {
  if (predictions.size() != truth.size())
    throw ShapeError("cluster_accuracy: prediction/truth length mismatch");
  if (predictions.empty())
    throw ArgumentError("cluster_accuracy: empty input");
  const auto pi = dense_index(predictions);
  const auto ti = dense_index(truth);
  const Matrix table = contingency_table(predictions, truth, pi, ti);
  const auto pairs = assign::hungarian(table, assign::Objective::Maximize);
  const Scalar agreement = assign::assignment_cost(table, pairs);
  return 100.0 * agreement / static_cast<Scalar>(truth.size());
}

Scalar nmi(const Labels& u, const Labels& v) {
  if (u.size() != v.size()) throw ShapeError("nmi: length mismatch");
  if (u.empty()) throw ArgumentError("nmi: empty input");

  const auto ui = dense_index(u);
  const auto vi = dense_index(v);
  const Matrix table = contingency_table(u, v, ui, vi);
  const Scalar n = static_cast<Scalar>(u.size());
  const Vector row_sums = table.rowwise().sum();
  const Vector col_sums = table.colwise().sum().transpose();

  const Scalar hu = entropy(row_sums, n);
  const Scalar hv = entropy(col_sums, n);
  if (hu == 0.0 && hv == 0.0) return 1.0;  // both constant
  if (hu == 0.0 || hv == 0.0) return 0.0;

  Scalar mi = 0.0;
  for (Eigen::Index i = 0; i < table.rows(); ++i) {
    for (Eigen::Index j = 0; j < table.cols(); ++j) {
      const Scalar nij = table(i, j);
      if (nij > 0)
        mi += (nij / n) * std::log(n * nij / (row_sums(i) * col_sums(j)));
    }
  }
  return mi / std::sqrt(hu * hv);
}

Scalar ari(const Labels& u, const Labels& v) {
  if (u.size() != v.size()) throw ShapeError("ari: length mismatch");
  if (u.size() < 2) throw ArgumentError("ari: need at least 2 samples");

  const auto ui = dense_index(u);
  const auto vi = dense_index(v);
  const Matrix table = contingency_table(u, v, ui, vi);
  const Vector row_sums = table.rowwise().sum();
  const Vector col_sums = table.colwise().sum().transpose();
  const Scalar n = static_cast<Scalar>(u.size());

  Scalar sum_ij = 0.0;
  for (Eigen::Index i = 0; i < table.rows(); ++i)
    for (Eigen::Index j = 0; j < table.cols(); ++j) sum_ij += choose2(table(i, j));
  Scalar sum_a = 0.0, sum_b = 0.0;
  for (Eigen::Index i = 0; i < row_sums.size(); ++i) sum_a += choose2(row_sums(i));
  for (Eigen::Index j = 0; j < col_sums.size(); ++j) sum_b += choose2(col_sums(j));

  const Scalar expected = sum_a * sum_b / choose2(n);
  const Scalar maximum = 0.5 * (sum_a + sum_b);
  if (maximum == expected) {
    // Degenerate partitions (all singletons or one block on both sides):
    // identical labelings score 1, anything else 0.
    return sum_ij == sum_a && sum_a == sum_b ? 1.0 : 0.0;
  }
  return (sum_ij - expected) / (maximum - expected);
}

void MetricsReport::finalize() {
  if (per_task_top1.empty()) {
    final_accuracy = 0.0;
    average_accuracy = 0.0;
    return;
  }
  final_accuracy = per_task_top1.back();
  Scalar total = 0.0;
  for (Scalar t : per_task_top1) total += t;
  average_accuracy = total / static_cast<Scalar>(per_task_top1.size());
}

}  // namespace icpl::metrics
