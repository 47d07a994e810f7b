#include <doctest.h>

#include <cmath>
#include <map>
#include <vector>

#include "icpl/errors.hpp"
#include "icpl/evaluation.hpp"

using namespace icpl;

namespace {

// Independent NMI oracle working in log2; the ratio is base-free, so it
// must agree with the natural-log implementation.
double nmi_oracle(const Labels& u, const Labels& v) {
  const double n = static_cast<double>(u.size());
  std::map<int, double> cu, cv;
  std::map<std::pair<int, int>, double> cuv;
  for (std::size_t i = 0; i < u.size(); ++i) {
    cu[u[i]] += 1;
    cv[v[i]] += 1;
    cuv[{u[i], v[i]}] += 1;
  }
  double hu = 0, hv = 0, mi = 0;
  for (auto& [key, c] : cu) hu -= c / n * std::log2(c / n);
  for (auto& [key, c] : cv) hv -= c / n * std::log2(c / n);
  for (auto& [key, c] : cuv)
    mi += c / n * std::log2(n * c / (cu[key.first] * cv[key.second]));
  return mi / std::sqrt(hu * hv);
}

}  // namespace

TEST_CASE("top1_static: all-correct predictions under identity encoding") {
  assign::EncodingTable identity;
  identity = assign::extend_identity(identity, {0, 1, 2}, {0, 1, 2});
  CHECK(metrics::top1_static({0, 1, 2, 1}, identity, {0, 1, 2, 1}) == 100.0);
  CHECK_THROWS_AS(metrics::top1_static({0}, identity, {0, 1}), ShapeError);
}

TEST_CASE("old/new class swap: cluster accuracy says perfect, static encoding says zero") {
  // Old classes {0,1} (task 1), new classes {2,3} (task 2); the model
  // predicts every old sample as a new unit and vice versa.
  assign::EncodingTable table;
  table = assign::extend_identity(table, {0, 1}, {0, 1});
  table = assign::extend_identity(table, {2, 3}, {2, 3});

  Labels truth, predictions;
  for (int rep = 0; rep < 25; ++rep) {
    for (int c = 0; c < 4; ++c) {
      truth.push_back(c);
      predictions.push_back((c + 2) % 4);  // exact old<->new swap
    }
  }
  CHECK(metrics::cluster_accuracy(predictions, truth) == 100.0);
  CHECK(metrics::top1_static(predictions, table, truth) == 0.0);
}

TEST_CASE("top1_static: random predictions score about 100/C percent") {
  const int n = 100000;
  const int classes = 7;
  assign::EncodingTable identity;
  {
    std::vector<int> ids(classes);
    for (int i = 0; i < classes; ++i) ids[static_cast<std::size_t>(i)] = i;
    identity = assign::extend_identity(identity, ids, ids);
  }
  Rng rng = make_rng(99);
  Labels truth(n), predictions(n);
  for (int i = 0; i < n; ++i) {
    truth[static_cast<std::size_t>(i)] = static_cast<int>(uniform_index(rng, classes));
    predictions[static_cast<std::size_t>(i)] =
        static_cast<int>(uniform_index(rng, classes));
  }
  const double expected = 100.0 / classes;
  const double p = 1.0 / classes;
  const double sigma = 100.0 * std::sqrt(p * (1 - p) / n);
  CHECK(std::abs(metrics::top1_static(predictions, identity, truth) - expected) <
        3 * sigma);
}

TEST_CASE("cluster accuracy dominates static top-1 on random pairs") {
  Rng rng = make_rng(5);
  for (int trial = 0; trial < 300; ++trial) {
    const int units = 2 + static_cast<int>(uniform_index(rng, 5));
    const int n = 10 + static_cast<int>(uniform_index(rng, 40));

    // random injective unit -> class encoding over a permuted class set
    const auto perm = shuffled_indices(static_cast<std::size_t>(units), rng);
    std::vector<int> unit_ids(static_cast<std::size_t>(units));
    std::vector<int> class_ids(static_cast<std::size_t>(units));
    for (int u = 0; u < units; ++u) {
      unit_ids[static_cast<std::size_t>(u)] = u;
      class_ids[static_cast<std::size_t>(u)] = static_cast<int>(perm[static_cast<std::size_t>(u)]);
    }
    assign::EncodingTable table;
    table = assign::extend_identity(table, unit_ids, class_ids);

    Labels predictions(static_cast<std::size_t>(n)), truth(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) {
      predictions[static_cast<std::size_t>(i)] =
          static_cast<int>(uniform_index(rng, units));
      truth[static_cast<std::size_t>(i)] = static_cast<int>(uniform_index(rng, units));
    }
    CHECK(metrics::cluster_accuracy(predictions, truth) >=
          metrics::top1_static(predictions, table, truth) - 1e-9);
  }
}

TEST_CASE("cluster accuracy: identical labelings and permutations") {
  CHECK(metrics::cluster_accuracy({0, 1, 2, 0}, {0, 1, 2, 0}) == 100.0);
  CHECK(metrics::cluster_accuracy({2, 0, 1, 2}, {0, 1, 2, 0}) == 100.0);
}

TEST_CASE("nmi: reference cases") {
  CHECK(metrics::nmi({0, 1, 0, 1}, {0, 1, 0, 1}) == doctest::Approx(1.0));
  CHECK(metrics::nmi({1, 1, 1, 1}, {0, 1, 0, 1}) == 0.0);
  CHECK(metrics::nmi({2, 2, 2}, {5, 5, 5}) == 1.0);  // both constant
  CHECK_THROWS_AS(metrics::nmi({}, {}), ArgumentError);

  const Labels u{0, 0, 1, 1};
  const Labels v{0, 1, 1, 1};
  CHECK(metrics::nmi(u, v) == doctest::Approx(nmi_oracle(u, v)).epsilon(1e-12));
}

TEST_CASE("nmi: symmetric and relabeling-invariant") {
  Rng rng = make_rng(31);
  for (int trial = 0; trial < 50; ++trial) {
    const int n = 20;
    Labels u(n), v(n), u_relabeled(n);
    for (int i = 0; i < n; ++i) {
      u[static_cast<std::size_t>(i)] = static_cast<int>(uniform_index(rng, 4));
      v[static_cast<std::size_t>(i)] = static_cast<int>(uniform_index(rng, 3));
      u_relabeled[static_cast<std::size_t>(i)] = 7 - u[static_cast<std::size_t>(i)];
    }
    CHECK(metrics::nmi(u, v) == doctest::Approx(metrics::nmi(v, u)).epsilon(1e-12));
    CHECK(metrics::nmi(u, v) ==
          doctest::Approx(metrics::nmi(u_relabeled, v)).epsilon(1e-12));
    CHECK(metrics::nmi(u, v) >= 0.0);
    CHECK(metrics::nmi(u, v) <= 1.0 + 1e-12);
  }
}

TEST_CASE("ari: identical clusterings reach exactly 1") {
  CHECK(metrics::ari({0, 0, 1, 1, 2}, {0, 0, 1, 1, 2}) == doctest::Approx(1.0));
  // identical up to relabeling
  CHECK(metrics::ari({0, 0, 1, 1, 2}, {4, 4, 9, 9, 1}) == doctest::Approx(1.0));
  CHECK_THROWS_AS(metrics::ari({0}, {0}), ArgumentError);
}

TEST_CASE("ari: near zero for random labelings") {
  Rng rng = make_rng(12345);
  const int n = 60;
  Labels fixed(n);
  for (int i = 0; i < n; ++i)
    fixed[static_cast<std::size_t>(i)] = static_cast<int>(uniform_index(rng, 4));

  const int draws = 10000;
  double sum = 0.0, sum_sq = 0.0;
  for (int d = 0; d < draws; ++d) {
    Labels random(n);
    for (int i = 0; i < n; ++i)
      random[static_cast<std::size_t>(i)] = static_cast<int>(uniform_index(rng, 4));
    const double a = metrics::ari(fixed, random);
    CHECK(a >= -0.5 - 1e-12);
    CHECK(a <= 1.0 + 1e-12);
    sum += a;
    sum_sq += a * a;
  }
  const double mean = sum / draws;
  const double var = sum_sq / draws - mean * mean;
  const double sem = std::sqrt(var / draws);
  CHECK(std::abs(mean) < 3 * sem + 1e-6);
}

TEST_CASE("ari: symmetric") {
  const Labels u{0, 0, 1, 2, 2, 1};
  const Labels v{1, 1, 0, 0, 2, 2};
  CHECK(metrics::ari(u, v) == doctest::Approx(metrics::ari(v, u)).epsilon(1e-12));
}

TEST_CASE("metrics report: averages recomputed from the theta vector") {
  metrics::MetricsReport report;
  report.per_task_top1 = {90.0, 80.0, 70.0};
  report.finalize();
  CHECK(report.final_accuracy == 70.0);
  CHECK(std::abs(report.average_accuracy - 80.0) < 1e-12);
}
