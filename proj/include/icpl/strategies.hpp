#pragma once

#include <optional>
#include <string>

#include "icpl/nncore.hpp"
#include "icpl/rehearsal.hpp"
#include "icpl/types.hpp"

namespace icpl::strategy {

enum class Kind { Replay, Icarl, Wa };

Kind kind_from_string(const std::string& name);
std::string to_string(Kind kind);

struct StrategySpec {
  Kind kind = Kind::Replay;
  bool use_mixup = true;
  bool use_class_weights = true;
  Scalar distill_temperature = 2.0;  // icarl only
  Scalar distill_weight = 1.0;       // icarl only

  /// Replay and iCaRL default to mixup + class weights ON, WA to OFF.
  static StrategySpec defaults(Kind kind);
};

struct TrainSet {
  Matrix samples;
  Labels unit_ids;  // targets in classifier-unit space
};

TrainSet concat(const TrainSet& a, const TrainSet& b);

/// Scales every new-class classifier row (and bias) by
/// mean(|w_old|) / mean(|w_new|); old rows are untouched.
nn::Model weight_align(const nn::Model& model, int old_unit_count);

/// Strategy-specific training over an epoch range, so callers can interleave
/// pseudo-label regeneration between segments. The iCaRL snapshot for
/// distillation is taken at construction (restricted to old-unit columns).
class TaskTrainer {
 public:
  TaskTrainer(nn::Model& model, const StrategySpec& spec, const nn::TrainConfig& cfg,
              int old_unit_count, Rng& rng);

  /// Trains epochs [epoch_begin, epoch_end) on `data`; returns mean loss of
  /// the last epoch.
  Scalar train_epochs(const TrainSet& data, int epoch_begin, int epoch_end);

  /// End-of-task hook: applies weight alignment for the WA strategy.
  void finish_task();

 private:
  nn::Model& model_;
  StrategySpec spec_;
  nn::TrainConfig cfg_;
  int old_unit_count_;
  Rng& rng_;
  nn::SgdOptimizer opt_;
  std::optional<nn::Model> old_model_;
};

/// Whole-task convenience path: train on task data plus rehearsal memory
/// for cfg.epochs, then run the strategy's end-of-task step.
nn::Model run_task_training(nn::Model model, const TrainSet& task_data,
                            const rehearsal::ExemplarMemory& memory,
                            const StrategySpec& spec, const nn::TrainConfig& cfg,
                            Rng& rng, int old_unit_count);

}  // namespace icpl::strategy
