#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <set>
#include <vector>

#include "icpl/clustering.hpp"
#include "icpl/errors.hpp"
#include "icpl/evaluation.hpp"

using namespace icpl;

namespace {

// Independent plain-Lloyd oracle: uniform random distinct seeds, mean
// updates until assignments settle. Used only to bound the inertia our
// implementation must reach.
double lloyd_oracle_inertia(const Matrix& points, int k, Rng& rng) {
  const Eigen::Index n = points.rows();
  std::set<std::size_t> seed_set;
  while (static_cast<int>(seed_set.size()) < k)
    seed_set.insert(uniform_index(rng, static_cast<std::size_t>(n)));
  Matrix centers(k, points.cols());
  int c = 0;
  for (auto idx : seed_set) centers.row(c++) = points.row(static_cast<Eigen::Index>(idx));

  std::vector<int> assign(static_cast<std::size_t>(n), -1);
  for (int it = 0; it < 200; ++it) {
    bool changed = false;
    for (Eigen::Index i = 0; i < n; ++i) {
      int best = 0;
      double best_d = (points.row(i) - centers.row(0)).squaredNorm();
      for (int j = 1; j < k; ++j) {
        const double d = (points.row(i) - centers.row(j)).squaredNorm();
        if (d < best_d) {
          best_d = d;
          best = j;
        }
      }
      if (assign[static_cast<std::size_t>(i)] != best) changed = true;
      assign[static_cast<std::size_t>(i)] = best;
    }
    if (!changed && it > 0) break;
    for (int j = 0; j < k; ++j) {
      RowVector sum = RowVector::Zero(points.cols());
      int count = 0;
      for (Eigen::Index i = 0; i < n; ++i)
        if (assign[static_cast<std::size_t>(i)] == j) {
          sum += points.row(i);
          ++count;
        }
      if (count > 0) centers.row(j) = sum / count;
    }
  }
  double inertia = 0;
  for (Eigen::Index i = 0; i < n; ++i)
    inertia += (points.row(i) - centers.row(assign[static_cast<std::size_t>(i)])).squaredNorm();
  return inertia;
}

Matrix gaussian_blobs(const Matrix& centers, int per_blob, double noise, Rng& rng,
                      Labels* truth = nullptr) {
  const Eigen::Index k = centers.rows();
  Matrix points(k * per_blob, centers.cols());
  for (Eigen::Index b = 0; b < k; ++b) {
    for (int i = 0; i < per_blob; ++i) {
      for (Eigen::Index j = 0; j < centers.cols(); ++j)
        points(b * per_blob + i, j) = centers(b, j) + noise * normal01(rng);
      if (truth) truth->push_back(static_cast<int>(b));
    }
  }
  return points;
}

}  // namespace

TEST_CASE("kmeans: two separated pairs settle on the pair means") {
  Matrix points(4, 2);
  points << 0.0, 0.0, 0.2, 0.0, 10.0, 1.0, 10.2, 1.0;
  Rng rng = make_rng(1);
  const auto result = cluster::kmeans(points, 2, 100, 5, rng);

  const int low = result.centers(0, 0) < result.centers(1, 0) ? 0 : 1;
  CHECK(result.centers(low, 0) == doctest::Approx(0.1));
  CHECK(result.centers(low, 1) == doctest::Approx(0.0));
  CHECK(result.centers(1 - low, 0) == doctest::Approx(10.1));
  CHECK(result.centers(1 - low, 1) == doctest::Approx(1.0));
  CHECK(result.inertia == doctest::Approx(4 * 0.01).epsilon(1e-9));
}

TEST_CASE("kmeans: k equal to n gives zero inertia") {
  Rng rng = make_rng(2);
  Matrix points(5, 3);
  for (Eigen::Index i = 0; i < points.size(); ++i)
    points(i / 3, i % 3) = uniform_in(rng, -4.0, 4.0);
  const auto result = cluster::kmeans(points, 5, 100, 3, rng);
  CHECK(result.inertia == doctest::Approx(0.0));
}

TEST_CASE("kmeans: argument validation") {
  Rng rng = make_rng(3);
  const Matrix points = Matrix::Random(3, 2);
  CHECK_THROWS_AS(cluster::kmeans(points, 4, 100, 1, rng), ArgumentError);
  CHECK_THROWS_AS(cluster::kmeans(points, 0, 100, 1, rng), ArgumentError);
  CHECK_THROWS_AS(cluster::kmeans(points, 2, 0, 1, rng), ArgumentError);
}

TEST_CASE("kmeans: beats 500 restarts of an independent Lloyd oracle") {
  Rng data_rng = make_rng(4);
  Matrix points(40, 2);
  for (Eigen::Index i = 0; i < 40; ++i)
    for (Eigen::Index j = 0; j < 2; ++j) points(i, j) = uniform_in(data_rng, 0.0, 10.0);

  Rng rng = make_rng(5);
  const auto result = cluster::kmeans(points, 3, 100, 10, rng);

  Rng oracle_rng = make_rng(6);
  double best = std::numeric_limits<double>::infinity();
  for (int restart = 0; restart < 500; ++restart)
    best = std::min(best, lloyd_oracle_inertia(points, 3, oracle_rng));
  CHECK(result.inertia <= best + 1e-9);
}

TEST_CASE("kmeans: result internals are consistent") {
  Rng rng = make_rng(7);
  Matrix points(30, 4);
  for (Eigen::Index i = 0; i < points.rows(); ++i)
    for (Eigen::Index j = 0; j < points.cols(); ++j)
      points(i, j) = uniform_in(rng, -3.0, 3.0);
  const auto result = cluster::kmeans(points, 4, 100, 5, rng);

  double inertia = 0.0;
  for (Eigen::Index i = 0; i < points.rows(); ++i) {
    Eigen::Index argmin = 0;
    result.distances.row(i).minCoeff(&argmin);
    CHECK(result.assignments[static_cast<std::size_t>(i)] == static_cast<int>(argmin));
    inertia += result.distances(i, argmin) * result.distances(i, argmin);
  }
  CHECK(result.inertia == doctest::Approx(inertia).epsilon(1e-9));
  CHECK(result.iterations_run <= 100);
}

TEST_CASE("kmeans: bit-deterministic under a fixed generator seed") {
  Matrix points(25, 3);
  Rng data_rng = make_rng(8);
  for (Eigen::Index i = 0; i < points.rows(); ++i)
    for (Eigen::Index j = 0; j < points.cols(); ++j)
      points(i, j) = uniform_in(data_rng, 0.0, 1.0);

  Rng rng_a = make_rng(9), rng_b = make_rng(9);
  const auto a = cluster::kmeans(points, 3, 100, 7, rng_a);
  const auto b = cluster::kmeans(points, 3, 100, 7, rng_b);
  CHECK(a.centers == b.centers);
  CHECK(a.assignments == b.assignments);
  CHECK(a.inertia == b.inertia);
}

TEST_CASE("confidence: equidistant row scores exactly 1/k") {
  Matrix d(2, 4);
  d << 2.0, 2.0, 2.0, 2.0, 1.0, 2.0, 3.0, 4.0;  // row 0 equidistant
  const auto scores = cluster::confidence_scores(d);
  CHECK(scores.confidence(0) == doctest::Approx(0.25).epsilon(1e-12));
}

TEST_CASE("confidence: single row [1,2] evaluates the closed form") {
  Matrix d(1, 2);
  d << 1.0, 2.0;
  const auto scores = cluster::confidence_scores(d);
  CHECK(scores.sigma == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(scores.confidence(0) ==
        doctest::Approx(1.0 / (1.0 + std::exp(-6.0))).epsilon(1e-12));
}

TEST_CASE("confidence: invariant under uniform distance scaling") {
  Rng rng = make_rng(10);
  for (int trial = 0; trial < 100; ++trial) {
    const int n = 2 + static_cast<int>(uniform_index(rng, 20));
    const int k = 2 + static_cast<int>(uniform_index(rng, 5));
    Matrix d(n, k);
    for (Eigen::Index i = 0; i < d.rows(); ++i)
      for (Eigen::Index j = 0; j < d.cols(); ++j) d(i, j) = uniform_in(rng, 0.1, 5.0);
    const double s = uniform_in(rng, 0.01, 100.0);
    const auto base = cluster::confidence_scores(d);
    const auto scaled = cluster::confidence_scores(s * d);
    CHECK((base.confidence - scaled.confidence).cwiseAbs().maxCoeff() < 1e-9);
  }
}

TEST_CASE("confidence: bounded by [1/k, 1]") {
  Rng rng = make_rng(11);
  for (int trial = 0; trial < 50; ++trial) {
    const int k = 2 + static_cast<int>(uniform_index(rng, 6));
    Matrix d(10, k);
    for (Eigen::Index i = 0; i < d.rows(); ++i)
      for (Eigen::Index j = 0; j < d.cols(); ++j) d(i, j) = uniform_in(rng, 0.0, 3.0);
    const auto scores = cluster::confidence_scores(d);
    for (Eigen::Index i = 0; i < scores.confidence.size(); ++i) {
      CHECK(scores.confidence(i) >= 1.0 / k - 1e-12);
      CHECK(scores.confidence(i) <= 1.0 + 1e-12);
    }
  }
}

TEST_CASE("confidence: degenerate and undersized inputs") {
  CHECK_THROWS_AS(cluster::confidence_scores(Matrix::Ones(3, 3)), DegenerateError);
  CHECK_THROWS_AS(cluster::confidence_scores(Matrix::Ones(3, 1)), ArgumentError);
}

TEST_CASE("pseudo labels: alpha below 1/k selects everything") {
  Rng rng = make_rng(12);
  Matrix points(40, 3);
  for (Eigen::Index i = 0; i < points.rows(); ++i)
    for (Eigen::Index j = 0; j < points.cols(); ++j)
      points(i, j) = uniform_in(rng, -1.0, 1.0);
  const auto pls = cluster::generate_pseudo_labels(points, 4, 0.2, rng);
  CHECK(pls.selected_fraction() == 1.0);
}

TEST_CASE("pseudo labels: alpha outside (0,1) is rejected") {
  Rng rng = make_rng(13);
  const Matrix points = Matrix::Random(10, 2);
  CHECK_THROWS_AS(cluster::generate_pseudo_labels(points, 2, 1.0, rng), ArgumentError);
  CHECK_THROWS_AS(cluster::generate_pseudo_labels(points, 2, 0.0, rng), ArgumentError);
  CHECK_THROWS_AS(cluster::generate_pseudo_labels(points, 2, -0.2, rng), ArgumentError);
}

TEST_CASE("pseudo labels: separable blobs are fully selected and recovered") {
  Rng rng = make_rng(14);
  Matrix centers(3, 2);
  centers << 0.0, 0.0, 10.0, 0.0, 0.0, 10.0;
  Labels truth;
  const Matrix points = gaussian_blobs(centers, 30, 0.1, rng, &truth);

  const auto pls = cluster::generate_pseudo_labels(points, 3, 0.85, rng);
  CHECK(pls.selected_fraction() == 1.0);
  CHECK(metrics::cluster_accuracy(pls.labels, truth) == 100.0);
}

TEST_CASE("align_clusters: identity, transposition, planted permutation") {
  Rng rng = make_rng(15);
  Matrix centers(5, 3);
  for (Eigen::Index i = 0; i < centers.rows(); ++i)
    for (Eigen::Index j = 0; j < centers.cols(); ++j)
      centers(i, j) = uniform_in(rng, -20.0, 20.0);

  SUBCASE("identical centers") {
    const auto perm = cluster::align_clusters(centers, centers);
    for (int i = 0; i < 5; ++i) CHECK(perm[static_cast<std::size_t>(i)] == i);
  }
  SUBCASE("swapped pair") {
    Matrix swapped = centers;
    swapped.row(0) = centers.row(1);
    swapped.row(1) = centers.row(0);
    const auto perm = cluster::align_clusters(centers, swapped);
    CHECK(perm[0] == 1);
    CHECK(perm[1] == 0);
    CHECK(perm[2] == 2);
  }
  SUBCASE("noisy planted permutation") {
    const auto planted = shuffled_indices(5, rng);
    Matrix permuted(5, 3);
    for (int j = 0; j < 5; ++j) {
      permuted.row(j) = centers.row(static_cast<Eigen::Index>(planted[static_cast<std::size_t>(j)]));
      for (Eigen::Index c = 0; c < 3; ++c) permuted(j, c) += 0.01 * normal01(rng);
    }
    // new center j carries old identity planted[j]
    const auto perm = cluster::align_clusters(centers, permuted);
    for (int j = 0; j < 5; ++j)
      CHECK(perm[static_cast<std::size_t>(j)] ==
            static_cast<int>(planted[static_cast<std::size_t>(j)]));
  }
}

TEST_CASE("align_clusters: shape mismatch rejected") {
  CHECK_THROWS_AS(cluster::align_clusters(Matrix::Zero(2, 2), Matrix::Zero(3, 2)),
                  ShapeError);
}
