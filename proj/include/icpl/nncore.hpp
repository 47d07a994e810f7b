#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "icpl/types.hpp"

namespace icpl::nn {

enum class Activation { Relu };

struct NetworkSpec {
  int input_dim = 0;
  std::vector<int> hidden_dims;
  int embedding_dim = 0;  // output width of the feature extractor
  Activation activation = Activation::Relu;

  void validate() const;  // all dims >= 1
};

struct DenseLayer {
  Matrix weight;  // [out x in]
  Vector bias;    // [out]
};

/// Feature extractor (dense + relu stack ending at embedding_dim) plus a
/// growable linear classifier head. Growing never touches existing rows.
struct Model {
  NetworkSpec spec;
  std::vector<DenseLayer> layers;  // input -> hidden... -> embedding
  DenseLayer classifier;           // [out_units x embedding_dim]

  int out_units() const { return static_cast<int>(classifier.weight.rows()); }
};

/// He-style scaled-uniform init, fully determined by the generator state.
Model init_model(const NetworkSpec& spec, int initial_classes, Rng& rng);

struct ForwardResult {
  Matrix embeddings;  // [n x embedding_dim], pre-classifier activations
  Matrix logits;      // [n x out_units]
};

ForwardResult forward(const Model& model, const Matrix& batch);

/// Row-wise argmax of the classifier logits (ties -> lowest unit id).
Labels predict_units(const Model& model, const Matrix& batch);

/// Numerically stable row-wise softmax; rows sum to 1.
Matrix softmax_rows(const Matrix& logits);

struct TrainConfig {
  int epochs = 60;
  int batch_size = 64;
  Scalar lr = 0.1;
  Scalar momentum = 0.9;
  Scalar lr_decay_factor = 0.1;
  std::vector<int> lr_decay_epochs = {30, 45};
  Scalar mixup_alpha = 0.0;  // Beta(alpha, alpha); 0 disables
  bool class_weighting = false;
  Scalar distill_temperature = 2.0;
  Scalar distill_weight = 1.0;
  Scalar augment_noise_std = 0.0;  // Gaussian jitter on training batches
  std::uint64_t rng_seed = 0;

  void validate() const;
};

Scalar lr_at_epoch(const TrainConfig& cfg, int epoch);

struct Gradients {
  std::vector<DenseLayer> layers;
  DenseLayer classifier;
};

/// L = weighted CE(logits, targets) + distill_weight * KD against the old
/// model's logits on old-class columns (softened at distill_temperature).
/// `targets` rows are probability distributions; `class_weights`, when
/// present, weighs each sample by the weight of its target distribution.
Scalar loss_and_gradients(const Model& model, const Matrix& batch, const Matrix& targets,
                          const Model* old_model, const TrainConfig& cfg,
                          const Vector* class_weights, Gradients& grads);

/// Velocity buffers for SGD with momentum: v = mu*v + g, theta -= lr*v.
class SgdOptimizer {
 public:
  explicit SgdOptimizer(const Model& model);
  void step(Model& model, const Gradients& grads, Scalar lr, Scalar momentum);

 private:
  std::vector<DenseLayer> layer_vel_;
  DenseLayer classifier_vel_;
};

/// One SGD-with-momentum step; returns the scalar loss. `lr` is the
/// effective (possibly decayed) learning rate for this step.
Scalar train_step(Model& model, SgdOptimizer& opt, const Matrix& batch,
                  const Matrix& targets, const Model* old_model,
                  const TrainConfig& cfg, const Vector* class_weights, Scalar lr);

Scalar train_step(Model& model, SgdOptimizer& opt, const Matrix& batch,
                  const Labels& target_ids, const Model* old_model,
                  const TrainConfig& cfg, const Vector* class_weights, Scalar lr);

Matrix one_hot(const Labels& ids, int num_classes);

struct MixupResult {
  Matrix batch;
  Matrix targets;
};

/// Deterministic core: row i becomes lam[i]*x_i + (1-lam[i])*x_partner[i].
MixupResult mixup_pairs(const Matrix& batch, const Matrix& targets_onehot,
                        const std::vector<std::size_t>& partner, const Vector& lambdas);

/// Pairs each row with a random partner, lambda ~ Beta(alpha, alpha) per
/// pair; alpha = 0 returns the inputs unchanged.
MixupResult mixup(const Matrix& batch, const Matrix& targets_onehot, Scalar alpha,
                  Rng& rng);

/// Inverse-frequency weights: total / (present_classes * count_c), zero for
/// absent classes. Equal counts give weight 1 everywhere present.
Vector class_weights(const std::vector<int>& counts);

/// Returns a model with `new_classes` extra output units; existing rows are
/// copied bit-for-bit, new rows are freshly initialized from `rng`.
Model grow_classifier(const Model& model, int new_classes, Rng& rng);

/// Generic augmentation hook: additive Gaussian noise on feature vectors.
Matrix gaussian_jitter(const Matrix& batch, Scalar noise_std, Rng& rng);

}  // namespace icpl::nn
