#include <doctest.h>

#include <vector>

#include "icpl/errors.hpp"
#include "icpl/rehearsal.hpp"

using namespace icpl;

namespace {

// Independent greedy herding oracle.
std::vector<Eigen::Index> herding_oracle(const Matrix& emb, Eigen::Index count) {
  const RowVector mu = emb.colwise().mean();
  std::vector<Eigen::Index> order;
  std::vector<bool> used(static_cast<std::size_t>(emb.rows()), false);
  RowVector sum = RowVector::Zero(emb.cols());
  for (Eigen::Index t = 1; t <= count; ++t) {
    Eigen::Index best = -1;
    double best_val = 0;
    for (Eigen::Index i = 0; i < emb.rows(); ++i) {
      if (used[static_cast<std::size_t>(i)]) continue;
      const double val = (mu - (sum + emb.row(i)) / static_cast<double>(t)).norm();
      if (best < 0 || val < best_val) {
        best = i;
        best_val = val;
      }
    }
    used[static_cast<std::size_t>(best)] = true;
    sum += emb.row(best);
    order.push_back(best);
  }
  return order;
}

Matrix random_embeddings(Eigen::Index n, Eigen::Index d, Rng& rng) {
  Matrix m(n, d);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < d; ++j) m(i, j) = uniform_in(rng, -2.0, 2.0);
  return m;
}

}  // namespace

TEST_CASE("herding: first pick is the point at the class mean") {
  Matrix emb(3, 2);
  emb << 0.0, 0.0, 2.0, 0.0, 1.0, 0.0;  // mean is (1,0), attained by row 2
  const auto order = rehearsal::herding_select(emb, 3);
  CHECK(order[0] == 2);
}

TEST_CASE("herding: count equal to n returns all indices in herding order") {
  Rng rng = make_rng(1);
  const Matrix emb = random_embeddings(6, 3, rng);
  const auto order = rehearsal::herding_select(emb, 6);
  CHECK(order.size() == 6);
  std::vector<bool> seen(6, false);
  for (auto idx : order) seen[static_cast<std::size_t>(idx)] = true;
  for (bool s : seen) CHECK(s);
  // prefix of the full order equals a shorter selection
  const auto prefix = rehearsal::herding_select(emb, 3);
  for (int i = 0; i < 3; ++i) CHECK(prefix[static_cast<std::size_t>(i)] == order[static_cast<std::size_t>(i)]);
}

TEST_CASE("herding: matches an independently coded greedy oracle") {
  Rng rng = make_rng(2);
  for (int trial = 0; trial < 40; ++trial) {
    const Eigen::Index n = 8;
    const Matrix emb = random_embeddings(n, 2, rng);
    const auto got = rehearsal::herding_select(emb, 3);
    const auto want = herding_oracle(emb, 3);
    CHECK(got == want);
  }
}

TEST_CASE("herding: count out of range") {
  Rng rng = make_rng(3);
  const Matrix emb = random_embeddings(4, 2, rng);
  CHECK_THROWS_AS(rehearsal::herding_select(emb, 5), ArgumentError);
}

TEST_CASE("rebalance: quota splits the budget with remainder to low ids") {
  rehearsal::ExemplarMemory memory(10);
  Rng rng = make_rng(4);
  std::vector<int> ids{2, 0, 1};
  std::vector<Matrix> samples, embeddings;
  for (int i = 0; i < 3; ++i) {
    samples.push_back(random_embeddings(8, 2, rng));
    embeddings.push_back(samples.back());
  }
  const auto out = rehearsal::rebalance(memory, ids, samples, embeddings);
  CHECK(out.per_class().at(0).samples.rows() == 4);  // 10/3 = 3 rem 1 -> class 0
  CHECK(out.per_class().at(1).samples.rows() == 3);
  CHECK(out.per_class().at(2).samples.rows() == 3);
  CHECK(out.total_stored() == 10);
}

TEST_CASE("rebalance: budget 2000 over 100 classes gives 20 each") {
  rehearsal::ExemplarMemory memory(2000);
  Rng rng = make_rng(5);
  std::vector<int> ids;
  std::vector<Matrix> samples, embeddings;
  for (int c = 0; c < 100; ++c) {
    ids.push_back(c);
    samples.push_back(random_embeddings(25, 2, rng));
    embeddings.push_back(samples.back());
  }
  const auto out = rehearsal::rebalance(memory, ids, samples, embeddings);
  for (int c = 0; c < 100; ++c)
    CHECK(out.per_class().at(c).samples.rows() == 20);
  CHECK(out.total_stored() == 2000);
}

TEST_CASE("rebalance: repeated shrinking keeps herding prefixes") {
  Rng rng = make_rng(6);
  rehearsal::ExemplarMemory memory(12);

  const Matrix first_samples = random_embeddings(12, 2, rng);
  memory = rehearsal::rebalance(memory, {0}, {first_samples}, {first_samples});
  const Matrix full_order = memory.per_class().at(0).samples;  // 12 exemplars
  CHECK(full_order.rows() == 12);

  // add classes one by one; class 0 must always hold a prefix of full_order
  for (int c = 1; c <= 4; ++c) {
    const Matrix s = random_embeddings(12, 2, rng);
    memory = rehearsal::rebalance(memory, {c}, {s}, {s});
    const Matrix& kept = memory.per_class().at(0).samples;
    const Eigen::Index quota = 12 / (c + 1) + (12 % (c + 1) > 0 ? 1 : 0);
    CHECK(kept.rows() == quota);  // remainder goes to the lowest class id
    CHECK(kept == full_order.topRows(kept.rows()));
    CHECK(memory.total_stored() <= 12);
  }
}

TEST_CASE("rebalance: re-adding a stored class is rejected") {
  Rng rng = make_rng(7);
  rehearsal::ExemplarMemory memory(8);
  const Matrix s = random_embeddings(4, 2, rng);
  memory = rehearsal::rebalance(memory, {0}, {s}, {s});
  CHECK_THROWS_AS(rehearsal::rebalance(memory, {0}, {s}, {s}), ConsistencyError);
}

TEST_CASE("memory: flattened training set pairs samples with unit ids") {
  Rng rng = make_rng(8);
  rehearsal::ExemplarMemory memory(6);
  const Matrix a = random_embeddings(5, 3, rng);
  const Matrix b = random_embeddings(5, 3, rng);
  memory = rehearsal::rebalance(memory, {7, 3}, {a, b}, {a, b});
  const auto [samples, ids] = memory.as_training_set();
  CHECK(samples.rows() == 6);
  CHECK(ids.size() == 6);
  // map iteration is ordered by unit id
  CHECK(ids.front() == 3);
  CHECK(ids.back() == 7);
}
