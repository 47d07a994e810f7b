#include "icpl/strategies.hpp"

#include <algorithm>
#include <cmath>

#include "icpl/errors.hpp"

namespace icpl::strategy {

Kind kind_from_string(const std::string& name) {
  if (name == "replay") return Kind::Replay;
  if (name == "icarl") return Kind::Icarl;
  if (name == "wa") return Kind::Wa;
  throw ArgumentError("strategy: unknown kind '" + name + "'");
}

std::string to_string(Kind kind) {
  switch (kind) {
    case Kind::Replay: return "replay";
    case Kind::Icarl: return "icarl";
    case Kind::Wa: return "wa";
  }
  return "?";
}

StrategySpec StrategySpec::defaults(Kind kind) {
  StrategySpec spec;
  spec.kind = kind;
  const bool strong_aug = kind == Kind::Replay || kind == Kind::Icarl;
  spec.use_mixup = strong_aug;
  spec.use_class_weights = strong_aug;
  return spec;
}

TrainSet concat(const TrainSet& a, const TrainSet& b) {
  if (a.samples.rows() == 0) return b;
  if (b.samples.rows() == 0) return a;
  if (a.samples.cols() != b.samples.cols())
    throw ShapeError("concat: feature width mismatch");
  TrainSet out;
  out.samples.resize(a.samples.rows() + b.samples.rows(), a.samples.cols());
  out.samples.topRows(a.samples.rows()) = a.samples;
  out.samples.bottomRows(b.samples.rows()) = b.samples;
  out.unit_ids = a.unit_ids;
  out.unit_ids.insert(out.unit_ids.end(), b.unit_ids.begin(), b.unit_ids.end());
  return out;
}

nn::Model weight_align(const nn::Model& model, int old_unit_count) {
  const int total = model.out_units();
  if (old_unit_count <= 0 || old_unit_count >= total)
    throw ArgumentError("weight_align: old_unit_count must be in (0, out_units)");

  const int new_count = total - old_unit_count;
  Scalar old_norm = 0.0, new_norm = 0.0;
  for (int i = 0; i < old_unit_count; ++i)
    old_norm += model.classifier.weight.row(i).norm();
  for (int i = old_unit_count; i < total; ++i)
    new_norm += model.classifier.weight.row(i).norm();
  old_norm /= static_cast<Scalar>(old_unit_count);
  new_norm /= static_cast<Scalar>(new_count);
  if (new_norm <= 0.0)
    throw NumericError("weight_align: new-class rows have zero norm");

  const Scalar gamma = old_norm / new_norm;
  nn::Model out = model;
  out.classifier.weight.bottomRows(new_count) *= gamma;
  out.classifier.bias.tail(new_count) *= gamma;
  return out;
}

TaskTrainer::TaskTrainer(nn::Model& model, const StrategySpec& spec,
                         const nn::TrainConfig& cfg, int old_unit_count, Rng& rng)
    : model_(model),
      spec_(spec),
      cfg_(cfg),
      old_unit_count_(old_unit_count),
      rng_(rng),
      opt_(model) {
  cfg_.distill_temperature = spec.distill_temperature;
  cfg_.distill_weight = spec.distill_weight;
  cfg_.validate();
  if (spec_.kind == Kind::Icarl && old_unit_count_ > 0) {
    // Frozen pre-task snapshot; growth preserved old rows bitwise, so the
    // first old_unit_count columns equal the pre-growth model's logits.
    old_model_ = model;
    old_model_->classifier.weight =
        model.classifier.weight.topRows(old_unit_count_);
    old_model_->classifier.bias = model.classifier.bias.head(old_unit_count_);
  }
}

Scalar TaskTrainer::train_epochs(const TrainSet& data, int epoch_begin, int epoch_end) {
  const Eigen::Index n = data.samples.rows();
  if (n == 0) throw ArgumentError("train_epochs: empty training set");
  if (data.unit_ids.size() != static_cast<std::size_t>(n))
    throw ShapeError("train_epochs: sample/label count mismatch");

  Vector weights;
  const Vector* weights_ptr = nullptr;
  if (spec_.use_class_weights) {
    std::vector<int> counts(static_cast<std::size_t>(model_.out_units()), 0);
    for (int id : data.unit_ids) ++counts[static_cast<std::size_t>(id)];
    weights = nn::class_weights(counts);
    weights_ptr = &weights;
  }
  const nn::Model* old_ptr = old_model_ ? &*old_model_ : nullptr;

  Scalar epoch_loss = 0.0;
  for (int epoch = epoch_begin; epoch < epoch_end; ++epoch) {
    const Scalar lr = nn::lr_at_epoch(cfg_, epoch);
    const auto order = shuffled_indices(static_cast<std::size_t>(n), rng_);
    epoch_loss = 0.0;
    Eigen::Index batches = 0;
    for (Eigen::Index start = 0; start < n; start += cfg_.batch_size) {
      const Eigen::Index len = std::min<Eigen::Index>(cfg_.batch_size, n - start);
      Matrix batch(len, data.samples.cols());
      Labels ids(static_cast<std::size_t>(len));
      for (Eigen::Index r = 0; r < len; ++r) {
        const auto src = order[static_cast<std::size_t>(start + r)];
        batch.row(r) = data.samples.row(static_cast<Eigen::Index>(src));
        ids[static_cast<std::size_t>(r)] = data.unit_ids[src];
      }
      if (cfg_.augment_noise_std > 0)
        batch = nn::gaussian_jitter(batch, cfg_.augment_noise_std, rng_);

      Matrix targets = nn::one_hot(ids, model_.out_units());
      if (spec_.use_mixup && cfg_.mixup_alpha > 0) {
        auto mixed = nn::mixup(batch, targets, cfg_.mixup_alpha, rng_);
        batch = std::move(mixed.batch);
        targets = std::move(mixed.targets);
      }
      epoch_loss += nn::train_step(model_, opt_, batch, targets, old_ptr, cfg_,
                                   weights_ptr, lr);
      ++batches;
    }
    epoch_loss /= static_cast<Scalar>(batches);
  }
  return epoch_loss;
}

void TaskTrainer::finish_task() {
  if (spec_.kind == Kind::Wa && old_unit_count_ > 0 &&
      old_unit_count_ < model_.out_units())
    model_ = weight_align(model_, old_unit_count_);
}

nn::Model run_task_training(nn::Model model, const TrainSet& task_data,
                            const rehearsal::ExemplarMemory& memory,
                            const StrategySpec& spec, const nn::TrainConfig& cfg,
                            Rng& rng, int old_unit_count) {
  TrainSet full = task_data;
  if (!memory.empty()) {
    auto [samples, ids] = memory.as_training_set();
    full = concat(task_data, TrainSet{std::move(samples), std::move(ids)});
  }
  TaskTrainer trainer(model, spec, cfg, old_unit_count, rng);
  trainer.train_epochs(full, 0, cfg.epochs);
  trainer.finish_task();
  return model;
}

}  // namespace icpl::strategy
