#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <vector>

#include "icpl/assignment.hpp"
#include "icpl/clustering.hpp"
#include "icpl/dataio.hpp"
#include "icpl/evaluation.hpp"
#include "icpl/nncore.hpp"
#include "icpl/rehearsal.hpp"
#include "icpl/strategies.hpp"
#include "icpl/types.hpp"

namespace icpl::pipeline {

/// Ground-truth labels of an unlabeled task. Training-side modules never
/// see these; the two accessors mark the only legitimate consumers.
class HiddenLabels {
 public:
  HiddenLabels() = default;
  explicit HiddenLabels(Labels labels) : labels_(std::move(labels)) {}

  /// Metrics and encoding extension only.
  const Labels& for_evaluation() const { return labels_; }
  /// Base task and supervised baseline runs only.
  const Labels& for_supervised_training() const { return labels_; }
  std::size_t size() const { return labels_.size(); }

 private:
  Labels labels_;
};

struct Task {
  Matrix train_samples;
  HiddenLabels train_truth;
  Matrix test_samples;
  Labels test_truth;
  std::vector<int> class_ids;  // Y^k in unit order
  bool labeled = false;        // true only for the base task
};

struct TaskStream {
  std::vector<Task> tasks;
  int base_classes = 0;
  int inc_classes = 0;
  std::uint64_t shuffle_seed = 0;
};

/// Shuffles class ids with the seeded generator, then slices: the first
/// base_classes form the labeled task (or the first inc_classes when
/// base_classes = 0), followed by chunks of inc_classes.
TaskStream build_stream(const data::LabeledDataset& train,
                        const data::LabeledDataset& test, int base_classes,
                        int inc_classes, std::uint64_t seed);

struct PseudoLabelParams {
  Scalar alpha = 0.85;
  std::optional<int> tau = 10;  // nullopt: generate labels once per task
  int kmeans_max_iter = 100;
  int kmeans_n_init = 10;
};

struct RunConfig {
  int base_classes = 0;
  int inc_classes = 0;
  std::uint64_t shuffle_seed = 1993;
  nn::NetworkSpec network;
  nn::TrainConfig train;
  strategy::StrategySpec strategy;
  PseudoLabelParams pseudo;
  int memory_budget = 2000;
  bool supervised = false;  // labeled baseline for degradation comparisons

  void validate() const;
};

struct RunResult {
  metrics::MetricsReport report;
  assign::EncodingTable encoding;
  nn::Model model;
  rehearsal::ExemplarMemory memory;
  int completed_tasks = 0;
};

/// Called after every completed task with the state so far; used by the CLI
/// to persist resumable checkpoints.
using CheckpointHook = std::function<void(const RunResult&)>;

/// Full incremental protocol: supervised base task, then for each further
/// task pseudo-label generation (regenerated every tau epochs with cluster
/// re-alignment), strategy training on the confident subset plus rehearsal
/// memory, encoding extension, memory rebalance, and evaluation over all
/// seen classes.
RunResult run_incremental(const TaskStream& stream, const RunConfig& config,
                          const CheckpointHook& on_task_end = {});

/// Regeneration events for a task: one at epoch 0 plus one before every
/// tau-th epoch below `epochs`.
int regeneration_events(int epochs, std::optional<int> tau);

}  // namespace icpl::pipeline
