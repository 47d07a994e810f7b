#pragma once

#include <vector>

#include "icpl/types.hpp"

namespace icpl::cluster {

struct KMeansResult {
  Matrix centers;        // [k x d]
  Labels assignments;    // [n], argmin over distance rows (lowest index on ties)
  Scalar inertia = 0.0;  // sum of squared point-to-assigned-center distances
  int iterations_run = 0;
  Matrix distances;  // [n x k] Euclidean distances to the final centers
};

/// Lloyd's algorithm with k-means++ seeding, best of n_init restarts by
/// inertia (ties -> earlier restart). Empty clusters are re-seeded at the
/// point farthest from its assigned center.
KMeansResult kmeans(const Matrix& points, int k, int max_iter, int n_init, Rng& rng);

struct ConfidenceScores {
  Vector confidence;  // [n], row max of the Gaussian-kernel softmax
  Scalar sigma = 0.0; // population std over all distance entries
};

/// Confidence of each row of a distance matrix: softmax over
/// exp(-D_ij^2 / (2 sigma^2)), reduced to its row maximum. Requires k >= 2;
/// an all-equal matrix (sigma = 0) is a DegenerateError.
ConfidenceScores confidence_scores(const Matrix& distances);

struct PseudoLabelSet {
  Labels labels;              // cluster ids, all n samples
  Vector confidence;          // in (0,1], >= 1/k
  Scalar sigma = 0.0;
  std::vector<bool> selected; // confidence >= alpha
  Scalar alpha = 0.0;
  KMeansResult clustering;

  std::size_t selected_count() const;
  Scalar selected_fraction() const;
};

/// Cluster embeddings, score every sample, and mark the confident subset
/// (unselected samples stay in the set, just unmarked). alpha must lie in
/// (0,1).
PseudoLabelSet generate_pseudo_labels(const Matrix& embeddings, int k, Scalar alpha,
                                      Rng& rng, int max_iter = 100, int n_init = 10);

/// Minimum-total-distance matching of new centers onto previous ones;
/// result[j] is the previous-center index that new center j should take.
std::vector<int> align_clusters(const Matrix& prev_centers, const Matrix& new_centers);

}  // namespace icpl::cluster
