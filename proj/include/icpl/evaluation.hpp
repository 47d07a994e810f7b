#pragma once

#include <vector>

#include "icpl/assignment.hpp"
#include "icpl/types.hpp"

namespace icpl::metrics {

/// Top-1 accuracy in percent under the static encoding: predictions are
/// unit ids, mapped through the table before comparing with ground truth.
Scalar top1_static(const Labels& predicted_units, const assign::EncodingTable& table,
                   const Labels& truth);

/// Accuracy in percent after re-optimizing the prediction->class mapping
/// over the whole evaluation set (the protocol this toolkit's static
/// encoding is designed to replace; kept for side-by-side reporting).
Scalar cluster_accuracy(const Labels& predictions, const Labels& truth);

/// Normalized mutual information in [0,1] (natural log; the normalization
/// cancels the base). Both-constant labelings give 1, a single constant
/// side gives 0.
Scalar nmi(const Labels& u, const Labels& v);

/// Adjusted Rand index in [-0.5, 1] via the pair-counting contingency form.
Scalar ari(const Labels& u, const Labels& v);

/// One pseudo-label regeneration event inside an unsupervised task.
struct RegenRecord {
  int task = 0;   // 1-based task index
  int epoch = 0;  // epoch at which labels were (re)generated
  Scalar nmi = 0.0;
  Scalar ari = 0.0;
  Scalar selected_fraction = 0.0;
};

struct MetricsReport {
  std::vector<Scalar> per_task_top1;       // Theta_k, percent
  Scalar final_accuracy = 0.0;             // Theta_N
  Scalar average_accuracy = 0.0;           // mean of per_task_top1
  std::vector<Scalar> cluster_accuracy;    // same checkpoints, flexible mapping
  std::vector<RegenRecord> regenerations;  // one entry per regeneration event

  void finalize();  // recomputes final/average from per_task_top1
};

}  // namespace icpl::metrics
