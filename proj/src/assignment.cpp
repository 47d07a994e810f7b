#include "icpl/assignment.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "icpl/errors.hpp"

namespace icpl::assign {

namespace {

constexpr Scalar kInf = std::numeric_limits<Scalar>::infinity();

// Shortest-augmenting-path Kuhn-Munkres on a square matrix; returns row->col.
std::vector<int> solve_square(const Matrix& a) {
  const int n = static_cast<int>(a.rows());
  std::vector<Scalar> u(n + 1, 0.0), v(n + 1, 0.0), minv(n + 1);
  std::vector<int> p(n + 1, 0), way(n + 1, 0);
  std::vector<char> used(n + 1);

  for (int i = 1; i <= n; ++i) {
    p[0] = i;
    int j0 = 0;
    std::fill(minv.begin(), minv.end(), kInf);
    std::fill(used.begin(), used.end(), char{0});
    do {
      used[j0] = 1;
      const int i0 = p[j0];
      int j1 = 0;
      Scalar delta = kInf;
      for (int j = 1; j <= n; ++j) {
        if (used[j]) continue;
        const Scalar cur = a(i0 - 1, j - 1) - u[i0] - v[j];
        if (cur < minv[j]) {
          minv[j] = cur;
          way[j] = j0;
        }
        if (minv[j] < delta) {
          delta = minv[j];
          j1 = j;
        }
      }
      for (int j = 0; j <= n; ++j) {
        if (used[j]) {
          u[p[j]] += delta;
          v[j] -= delta;
        } else {
          minv[j] -= delta;
        }
      }
      j0 = j1;
    } while (p[j0] != 0);
    do {
      const int j1 = way[j0];
      p[j0] = p[j1];
      j0 = j1;
    } while (j0 != 0);
  }

  std::vector<int> row_to_col(n, -1);
  for (int j = 1; j <= n; ++j)
    if (p[j] > 0) row_to_col[p[j] - 1] = j - 1;
  return row_to_col;
}

// Minimal total cost over assignments of min(r,c) pairs; rectangular
// matrices are padded with zero-cost dummies.
Scalar optimal_value(const Matrix& w) {
  const int r = static_cast<int>(w.rows());
  const int c = static_cast<int>(w.cols());
  if (r == 0 || c == 0) return 0.0;
  const int n = std::max(r, c);
  Matrix sq = Matrix::Zero(n, n);
  sq.topLeftCorner(r, c) = w;
  const auto sol = solve_square(sq);
  Scalar total = 0.0;
  for (int i = 0; i < r; ++i)
    if (sol[i] < c) total += w(i, sol[i]);
  return total;
}

// Optimal value of the remaining subproblem: rows row_begin..r-1, columns
// not in `used_col` and not `skip_col`.
Scalar optimal_tail(const Matrix& w, int row_begin, const std::vector<char>& used_col,
                    int skip_col) {
  const int r = static_cast<int>(w.rows());
  const int c = static_cast<int>(w.cols());
  std::vector<int> cols;
  for (int j = 0; j < c; ++j)
    if (!used_col[j] && j != skip_col) cols.push_back(j);
  const int rr = r - row_begin;
  if (rr <= 0 || cols.empty()) return 0.0;
  Matrix sub(rr, static_cast<Eigen::Index>(cols.size()));
  for (int i = 0; i < rr; ++i)
    for (std::size_t j = 0; j < cols.size(); ++j)
      sub(i, static_cast<Eigen::Index>(j)) = w(row_begin + i, cols[j]);
  return optimal_value(sub);
}

}  // namespace

std::vector<std::pair<int, int>> hungarian(const Matrix& cost, Objective objective) {
  if (!cost.allFinite())
    throw ArgumentError("hungarian: cost matrix must be finite");
  const int r = static_cast<int>(cost.rows());
  const int c = static_cast<int>(cost.cols());
  if (r == 0 || c == 0) return {};

  const Matrix w = objective == Objective::Minimize ? cost : Matrix(-cost);
  const Scalar best = optimal_value(w);
  const Scalar eps = 1e-9 * std::max<Scalar>(1.0, std::abs(best));

  // Greedy forcing pass: match the smallest row to the smallest column that
  // still admits an optimal completion. Rows can only go unmatched when
  // r > c, and only if no column choice stays optimal.
  std::vector<std::pair<int, int>> pairs;
  std::vector<char> used_col(c, 0);
  Scalar forced = 0.0;
  const int needed = std::min(r, c);
  for (int i = 0; i < r && static_cast<int>(pairs.size()) < needed; ++i) {
    int chosen = -1;
    for (int j = 0; j < c; ++j) {
      if (used_col[j]) continue;
      const Scalar total = forced + w(i, j) + optimal_tail(w, i + 1, used_col, j);
      if (std::abs(total - best) <= eps) {
        chosen = j;
        break;
      }
    }
    if (chosen >= 0) {
      pairs.emplace_back(i, chosen);
      used_col[chosen] = 1;
      forced += w(i, chosen);
    }
  }
  return pairs;
}

Scalar assignment_cost(const Matrix& cost,
                       const std::vector<std::pair<int, int>>& pairs) {
  Scalar total = 0.0;
  for (const auto& [i, j] : pairs) total += cost(i, j);
  return total;
}

int EncodingTable::class_of(int unit) const {
  const auto it = unit_to_class_.find(unit);
  if (it == unit_to_class_.end())
    throw ConsistencyError("encoding: unknown unit " + std::to_string(unit));
  return it->second;
}

void EncodingTable::append_task(const std::vector<std::pair<int, int>>& pairs) {
  for (const auto& [unit, class_id] : pairs) {
    if (has_unit(unit))
      throw ConsistencyError("encoding: unit " + std::to_string(unit) +
                             " is already mapped");
    if (has_class(class_id))
      throw ConsistencyError("encoding: class " + std::to_string(class_id) +
                             " is already mapped");
  }
  std::vector<int> units;
  for (const auto& [unit, class_id] : pairs) {
    entries_.emplace_back(unit, class_id);
    unit_to_class_[unit] = class_id;
    classes_.insert(class_id);
    units.push_back(unit);
  }
  task_units_.push_back(std::move(units));
}

EncodingTable extend_encoding(const EncodingTable& table, const Matrix& contingency,
                              const std::vector<int>& new_unit_ids,
                              const std::vector<int>& new_class_ids) {
  if (contingency.rows() != static_cast<Eigen::Index>(new_unit_ids.size()) ||
      contingency.cols() != static_cast<Eigen::Index>(new_class_ids.size()))
    throw ShapeError("extend_encoding: contingency shape does not match id lists");
  if ((contingency.array() < 0).any())
    throw ArgumentError("extend_encoding: negative contingency count");

  const auto matches = hungarian(contingency, Objective::Maximize);
  std::vector<std::pair<int, int>> pairs;
  pairs.reserve(matches.size());
  for (const auto& [row, col] : matches)
    pairs.emplace_back(new_unit_ids[row], new_class_ids[col]);
  std::sort(pairs.begin(), pairs.end());

  EncodingTable out = table;
  out.append_task(pairs);
  return out;
}

EncodingTable extend_identity(const EncodingTable& table,
                              const std::vector<int>& new_unit_ids,
                              const std::vector<int>& new_class_ids) {
  if (new_unit_ids.size() != new_class_ids.size())
    throw ShapeError("extend_identity: id list length mismatch");
  std::vector<std::pair<int, int>> pairs;
  for (std::size_t i = 0; i < new_unit_ids.size(); ++i)
    pairs.emplace_back(new_unit_ids[i], new_class_ids[i]);
  EncodingTable out = table;
  out.append_task(pairs);
  return out;
}

Labels encode_predictions(const EncodingTable& table, const Labels& raw_predictions) {
  Labels out;
  out.reserve(raw_predictions.size());
  for (int unit : raw_predictions) out.push_back(table.class_of(unit));
  return out;
}

}  // namespace icpl::assign
