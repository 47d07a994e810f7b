#include "icpl/clustering.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "icpl/assignment.hpp"
#include "icpl/errors.hpp"

namespace icpl::cluster {

namespace {

// Squared Euclidean distances of every point to every center.
Matrix squared_distances(const Matrix& points, const Matrix& centers) {
  const Vector pn = points.rowwise().squaredNorm();
  const Vector cn = centers.rowwise().squaredNorm();
  Matrix d2 = -2.0 * (points * centers.transpose());
  d2.colwise() += pn;
  d2.rowwise() += cn.transpose();
  return d2.cwiseMax(0.0);
}

// argmin per row, lowest index on ties; also accumulates inertia.
void assign_points(const Matrix& d2, Labels& assignments, Scalar& inertia) {
  const Eigen::Index n = d2.rows();
  assignments.resize(static_cast<std::size_t>(n));
  inertia = 0.0;
  for (Eigen::Index i = 0; i < n; ++i) {
    int best = 0;
    Scalar best_d = d2(i, 0);
    for (Eigen::Index j = 1; j < d2.cols(); ++j) {
      if (d2(i, j) < best_d) {
        best_d = d2(i, j);
        best = static_cast<int>(j);
      }
    }
    assignments[static_cast<std::size_t>(i)] = best;
    inertia += best_d;
  }
}

Matrix kmeanspp_seed(const Matrix& points, int k, Rng& rng) {
  const Eigen::Index n = points.rows();
  Matrix centers(k, points.cols());
  centers.row(0) = points.row(static_cast<Eigen::Index>(
      uniform_index(rng, static_cast<std::size_t>(n))));
  Vector min_d2 =
      (points.rowwise() - centers.row(0)).rowwise().squaredNorm();
  for (int c = 1; c < k; ++c) {
    const Scalar total = min_d2.sum();
    Eigen::Index pick = 0;
    if (total > 0.0) {
      // Inverse-CDF draw proportional to squared distance.
      Scalar target = uniform01(rng) * total;
      for (; pick < n - 1; ++pick) {
        target -= min_d2(pick);
        if (target <= 0.0) break;
      }
    } else {
      pick = static_cast<Eigen::Index>(uniform_index(rng, static_cast<std::size_t>(n)));
    }
    centers.row(c) = points.row(pick);
    min_d2 = min_d2.cwiseMin(
        (points.rowwise() - centers.row(c)).rowwise().squaredNorm());
  }
  return centers;
}

struct LloydRun {
  Matrix centers;
  Labels assignments;
  Scalar inertia = 0.0;
  int iterations = 0;
};

LloydRun lloyd(const Matrix& points, int k, int max_iter, Rng& rng) {
  const Eigen::Index n = points.rows();
  LloydRun run;
  run.centers = kmeanspp_seed(points, k, rng);

  Scalar prev_inertia = std::numeric_limits<Scalar>::infinity();
  assign_points(squared_distances(points, run.centers), run.assignments, run.inertia);

  for (int it = 0; it < max_iter; ++it) {
    // Mean update.
    Matrix sums = Matrix::Zero(k, points.cols());
    std::vector<Eigen::Index> counts(static_cast<std::size_t>(k), 0);
    for (Eigen::Index i = 0; i < n; ++i) {
      const int c = run.assignments[static_cast<std::size_t>(i)];
      sums.row(c) += points.row(i);
      ++counts[static_cast<std::size_t>(c)];
    }
    for (int c = 0; c < k; ++c)
      if (counts[static_cast<std::size_t>(c)] > 0)
        run.centers.row(c) =
            sums.row(c) / static_cast<Scalar>(counts[static_cast<std::size_t>(c)]);

    // Re-seed empty clusters at the point farthest from its own center.
    for (int c = 0; c < k; ++c) {
      if (counts[static_cast<std::size_t>(c)] > 0) continue;
      Eigen::Index far = 0;
      Scalar far_d = -1.0;
      for (Eigen::Index i = 0; i < n; ++i) {
        const int a = run.assignments[static_cast<std::size_t>(i)];
        const Scalar d =
            (points.row(i) - run.centers.row(a)).squaredNorm();
        if (d > far_d) {
          far_d = d;
          far = i;
        }
      }
      run.centers.row(c) = points.row(far);
      run.assignments[static_cast<std::size_t>(far)] = c;
    }

    prev_inertia = run.inertia;
    Labels next;
    Scalar next_inertia = 0.0;
    assign_points(squared_distances(points, run.centers), next, next_inertia);
    run.iterations = it + 1;

    if (next_inertia > prev_inertia + 1e-9 * std::max<Scalar>(1.0, prev_inertia))
      throw NumericError("kmeans: inertia increased during Lloyd iteration");

    const bool converged = next == run.assignments;
    run.assignments = std::move(next);
    run.inertia = next_inertia;
    if (converged) break;
  }
  return run;
}

}  // namespace

KMeansResult kmeans(const Matrix& points, int k, int max_iter, int n_init, Rng& rng) {
  const Eigen::Index n = points.rows();
  if (k < 1) throw ArgumentError("kmeans: k must be >= 1");
  if (n < k)
    throw ArgumentError("kmeans: need at least k points, got " + std::to_string(n));
  if (max_iter < 1 || n_init < 1)
    throw ArgumentError("kmeans: max_iter and n_init must be >= 1");

  LloydRun best;
  bool have_best = false;
  for (int r = 0; r < n_init; ++r) {
    LloydRun run = lloyd(points, k, max_iter, rng);
    if (!have_best || run.inertia < best.inertia) {
      best = std::move(run);
      have_best = true;
    }
  }

  KMeansResult out;
  out.centers = std::move(best.centers);
  out.assignments = std::move(best.assignments);
  out.inertia = best.inertia;
  out.iterations_run = best.iterations;
  out.distances = squared_distances(points, out.centers).cwiseSqrt();
  return out;
}

ConfidenceScores confidence_scores(const Matrix& distances) {
  if (distances.cols() < 2)
    throw ArgumentError("confidence_scores: need k >= 2 clusters");
  if (distances.rows() < 1)
    throw ArgumentError("confidence_scores: empty distance matrix");

  const Scalar mean = distances.mean();
  const Scalar var = (distances.array() - mean).square().mean();
  const Scalar sigma = std::sqrt(var);
  if (sigma <= 0.0)
    throw DegenerateError("confidence_scores: all distances equal (sigma = 0)");

  // Row max of softmax(-D^2 / (2 sigma^2)), stabilized by the row minimum.
  const Matrix neg = (-distances.array().square() / (2.0 * sigma * sigma)).matrix();
  ConfidenceScores out;
  out.sigma = sigma;
  out.confidence.resize(distances.rows());
  for (Eigen::Index i = 0; i < neg.rows(); ++i) {
    const Scalar m = neg.row(i).maxCoeff();
    const Scalar denom = (neg.row(i).array() - m).exp().sum();
    out.confidence(i) = 1.0 / denom;  // exp(0) over the sum
  }
  return out;
}

std::size_t PseudoLabelSet::selected_count() const {
  std::size_t count = 0;
  for (bool s : selected)
    if (s) ++count;
  return count;
}

Scalar PseudoLabelSet::selected_fraction() const {
  if (selected.empty()) return 0.0;
  return static_cast<Scalar>(selected_count()) / static_cast<Scalar>(selected.size());
}

PseudoLabelSet generate_pseudo_labels(const Matrix& embeddings, int k, Scalar alpha,
                                      Rng& rng, int max_iter, int n_init) {
  if (alpha <= 0.0 || alpha >= 1.0)
    throw ArgumentError("generate_pseudo_labels: alpha must lie in (0,1)");

  PseudoLabelSet out;
  out.clustering = kmeans(embeddings, k, max_iter, n_init, rng);
  const ConfidenceScores scores = confidence_scores(out.clustering.distances);
  out.labels = out.clustering.assignments;
  out.confidence = scores.confidence;
  out.sigma = scores.sigma;
  out.alpha = alpha;
  out.selected.resize(out.labels.size());
  for (std::size_t i = 0; i < out.labels.size(); ++i)
    out.selected[i] = out.confidence(static_cast<Eigen::Index>(i)) >= alpha;
  return out;
}

std::vector<int> align_clusters(const Matrix& prev_centers, const Matrix& new_centers) {
  if (prev_centers.rows() != new_centers.rows() ||
      prev_centers.cols() != new_centers.cols())
    throw ShapeError("align_clusters: center matrices must have equal shape");
  const int k = static_cast<int>(prev_centers.rows());
  Matrix cost(k, k);
  for (int i = 0; i < k; ++i)
    for (int j = 0; j < k; ++j)
      cost(i, j) = (prev_centers.row(i) - new_centers.row(j)).norm();
  const auto pairs = assign::hungarian(cost, assign::Objective::Minimize);
  std::vector<int> relabel(static_cast<std::size_t>(k), -1);
  for (const auto& [prev, next] : pairs) relabel[static_cast<std::size_t>(next)] = prev;
  return relabel;
}

}  // namespace icpl::cluster
