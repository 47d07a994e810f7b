#include "icpl/nncore.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "icpl/errors.hpp"

namespace icpl::nn {

namespace {

DenseLayer init_layer(int out_dim, int in_dim, Rng& rng) {
  const Scalar bound = std::sqrt(6.0 / static_cast<Scalar>(in_dim));
  DenseLayer layer;
  layer.weight.resize(out_dim, in_dim);
  for (int i = 0; i < out_dim; ++i)
    for (int j = 0; j < in_dim; ++j)
      layer.weight(i, j) = uniform_in(rng, -bound, bound);
  layer.bias = Vector::Zero(out_dim);
  return layer;
}

Matrix relu(const Matrix& z) { return z.cwiseMax(0.0); }

// Row-wise log-sum-exp, stabilized by the row max.
Vector log_sum_exp(const Matrix& x) {
  const Vector m = x.rowwise().maxCoeff();
  return (m.array() + (x.colwise() - m).array().exp().rowwise().sum().log())
      .matrix();
}

Matrix log_softmax_rows(const Matrix& x) {
  return x.colwise() - log_sum_exp(x);
}

}  // namespace

void NetworkSpec::validate() const {
  if (input_dim < 1) throw ArgumentError("network: input_dim must be >= 1");
  if (embedding_dim < 1) throw ArgumentError("network: embedding_dim must be >= 1");
  for (int h : hidden_dims)
    if (h < 1) throw ArgumentError("network: hidden widths must be >= 1");
}

void TrainConfig::validate() const {
  if (epochs < 0) throw ArgumentError("train: epochs must be >= 0");
  if (batch_size < 1) throw ArgumentError("train: batch_size must be >= 1");
  if (lr <= 0) throw ArgumentError("train: lr must be > 0");
  if (momentum < 0 || momentum >= 1)
    throw ArgumentError("train: momentum must be in [0,1)");
  if (mixup_alpha < 0) throw ArgumentError("train: mixup_alpha must be >= 0");
  if (distill_temperature <= 0)
    throw ArgumentError("train: distill_temperature must be > 0");
  if (distill_weight < 0) throw ArgumentError("train: distill_weight must be >= 0");
  if (augment_noise_std < 0)
    throw ArgumentError("train: augment_noise_std must be >= 0");
  int prev = -1;
  for (int e : lr_decay_epochs) {
    if (e <= prev) throw ArgumentError("train: decay epochs must be strictly increasing");
    if (e >= epochs && epochs > 0)
      throw ArgumentError("train: decay epochs must be < epochs");
    prev = e;
  }
}

Scalar lr_at_epoch(const TrainConfig& cfg, int epoch) {
  Scalar lr = cfg.lr;
  for (int e : cfg.lr_decay_epochs)
    if (epoch >= e) lr *= cfg.lr_decay_factor;
  return lr;
}

Model init_model(const NetworkSpec& spec, int initial_classes, Rng& rng) {
  spec.validate();
  if (initial_classes < 0)
    throw ArgumentError("init_model: initial_classes must be >= 0");

  Model m;
  m.spec = spec;
  int in_dim = spec.input_dim;
  for (int h : spec.hidden_dims) {
    m.layers.push_back(init_layer(h, in_dim, rng));
    in_dim = h;
  }
  m.layers.push_back(init_layer(spec.embedding_dim, in_dim, rng));
  m.classifier = initial_classes > 0
                     ? init_layer(initial_classes, spec.embedding_dim, rng)
                     : DenseLayer{Matrix(0, spec.embedding_dim), Vector(0)};
  return m;
}

ForwardResult forward(const Model& model, const Matrix& batch) {
  if (batch.cols() != model.spec.input_dim)
    throw ShapeError("forward: batch has " + std::to_string(batch.cols()) +
                     " columns, expected " + std::to_string(model.spec.input_dim));
  Matrix a = batch;
  for (const auto& layer : model.layers)
    a = relu(((a * layer.weight.transpose()).rowwise() + layer.bias.transpose()));
  ForwardResult out;
  out.logits = (a * model.classifier.weight.transpose()).rowwise() +
               model.classifier.bias.transpose();
  out.embeddings = std::move(a);
  return out;
}

Labels predict_units(const Model& model, const Matrix& batch) {
  const Matrix logits = forward(model, batch).logits;
  Labels out(static_cast<std::size_t>(logits.rows()));
  for (Eigen::Index i = 0; i < logits.rows(); ++i) {
    Eigen::Index best = 0;
    logits.row(i).maxCoeff(&best);
    out[static_cast<std::size_t>(i)] = static_cast<int>(best);
  }
  return out;
}

Matrix softmax_rows(const Matrix& logits) {
  return log_softmax_rows(logits).array().exp().matrix();
}

Matrix one_hot(const Labels& ids, int num_classes) {
  Matrix t = Matrix::Zero(static_cast<Eigen::Index>(ids.size()), num_classes);
  for (std::size_t i = 0; i < ids.size(); ++i) {
    if (ids[i] < 0 || ids[i] >= num_classes)
      throw ArgumentError("one_hot: class id " + std::to_string(ids[i]) +
                          " out of range");
    t(static_cast<Eigen::Index>(i), ids[i]) = 1.0;
  }
  return t;
}

Scalar loss_and_gradients(const Model& model, const Matrix& batch, const Matrix& targets,
                          const Model* old_model, const TrainConfig& cfg,
                          const Vector* class_weights, Gradients& grads) {
  const Eigen::Index n = batch.rows();
  if (n == 0) throw ArgumentError("train_step: empty batch");
  if (targets.rows() != n) throw ShapeError("train_step: target row count mismatch");
  if (targets.cols() != model.out_units())
    throw ShapeError("train_step: target column count != out_units");
  if (class_weights && class_weights->size() != model.out_units())
    throw ShapeError("train_step: class_weights size != out_units");

  // Forward with cached activations.
  std::vector<Matrix> acts;  // acts[0] = input, acts[l+1] = relu output of layer l
  acts.reserve(model.layers.size() + 1);
  acts.push_back(batch);
  for (const auto& layer : model.layers)
    acts.push_back(
        ((acts.back() * layer.weight.transpose()).rowwise() + layer.bias.transpose())
            .cwiseMax(0.0));
  const Matrix& emb = acts.back();
  const Matrix logits = (emb * model.classifier.weight.transpose()).rowwise() +
                        model.classifier.bias.transpose();

  // Weighted cross entropy over full rows.
  const Matrix logp = log_softmax_rows(logits);
  Vector sample_w = Vector::Ones(n);
  if (class_weights) sample_w = targets * (*class_weights);
  const Vector ce = (-(targets.array() * logp.array()).rowwise().sum()).matrix();
  const Scalar inv_n = 1.0 / static_cast<Scalar>(n);
  Scalar loss = inv_n * (sample_w.array() * ce.array()).sum();

  Matrix dlogits = ((logp.array().exp().matrix() - targets).array().colwise() *
                    sample_w.array())
                       .matrix();
  dlogits *= inv_n;

  // Distillation on old-class columns against a frozen snapshot.
  if (old_model && old_model->out_units() > 0 && cfg.distill_weight > 0) {
    const int old_units = old_model->out_units();
    if (old_units > model.out_units())
      throw ShapeError("train_step: old model has more units than current");
    const Scalar temp = cfg.distill_temperature;
    const Matrix old_logits = forward(*old_model, batch).logits;
    const Matrix p_old = softmax_rows(old_logits / temp);
    const Matrix logq = log_softmax_rows(logits.leftCols(old_units) / temp);
    const Matrix logp_old = log_softmax_rows(old_logits / temp);
    const Scalar kd =
        inv_n * (p_old.array() * (logp_old.array() - logq.array())).sum();
    loss += cfg.distill_weight * kd;
    dlogits.leftCols(old_units) += (cfg.distill_weight * inv_n / temp) *
                                   (logq.array().exp().matrix() - p_old);
  }

  if (!std::isfinite(loss))
    throw NumericError("train_step: non-finite loss (batch of " +
                       std::to_string(n) + ", " +
                       std::to_string(model.out_units()) + " units)");

  // Backward pass.
  grads.classifier.weight = dlogits.transpose() * emb;
  grads.classifier.bias = dlogits.colwise().sum();
  Matrix da = dlogits * model.classifier.weight;
  grads.layers.resize(model.layers.size());
  for (int l = static_cast<int>(model.layers.size()) - 1; l >= 0; --l) {
    const Matrix dz =
        ((acts[l + 1].array() > 0.0).cast<Scalar>() * da.array()).matrix();
    grads.layers[l].weight = dz.transpose() * acts[l];
    grads.layers[l].bias = dz.colwise().sum();
    if (l > 0) da = dz * model.layers[l].weight;
  }
  return loss;
}

SgdOptimizer::SgdOptimizer(const Model& model) {
  layer_vel_.resize(model.layers.size());
  for (std::size_t l = 0; l < model.layers.size(); ++l) {
    layer_vel_[l].weight = Matrix::Zero(model.layers[l].weight.rows(),
                                        model.layers[l].weight.cols());
    layer_vel_[l].bias = Vector::Zero(model.layers[l].bias.size());
  }
  classifier_vel_.weight = Matrix::Zero(model.classifier.weight.rows(),
                                        model.classifier.weight.cols());
  classifier_vel_.bias = Vector::Zero(model.classifier.bias.size());
}

void SgdOptimizer::step(Model& model, const Gradients& grads, Scalar lr,
                        Scalar momentum) {
  for (std::size_t l = 0; l < model.layers.size(); ++l) {
    layer_vel_[l].weight = momentum * layer_vel_[l].weight + grads.layers[l].weight;
    layer_vel_[l].bias = momentum * layer_vel_[l].bias + grads.layers[l].bias;
    model.layers[l].weight -= lr * layer_vel_[l].weight;
    model.layers[l].bias -= lr * layer_vel_[l].bias;
  }
  classifier_vel_.weight = momentum * classifier_vel_.weight + grads.classifier.weight;
  classifier_vel_.bias = momentum * classifier_vel_.bias + grads.classifier.bias;
  model.classifier.weight -= lr * classifier_vel_.weight;
  model.classifier.bias -= lr * classifier_vel_.bias;
}

Scalar train_step(Model& model, SgdOptimizer& opt, const Matrix& batch,
                  const Matrix& targets, const Model* old_model,
                  const TrainConfig& cfg, const Vector* class_weights, Scalar lr) {
  Gradients grads;
  const Scalar loss =
      loss_and_gradients(model, batch, targets, old_model, cfg, class_weights, grads);
  if (lr != 0.0) opt.step(model, grads, lr, cfg.momentum);
  return loss;
}

Scalar train_step(Model& model, SgdOptimizer& opt, const Matrix& batch,
                  const Labels& target_ids, const Model* old_model,
                  const TrainConfig& cfg, const Vector* class_weights, Scalar lr) {
  return train_step(model, opt, batch, one_hot(target_ids, model.out_units()),
                    old_model, cfg, class_weights, lr);
}

MixupResult mixup_pairs(const Matrix& batch, const Matrix& targets_onehot,
                        const std::vector<std::size_t>& partner, const Vector& lambdas) {
  const Eigen::Index n = batch.rows();
  if (targets_onehot.rows() != n || static_cast<Eigen::Index>(partner.size()) != n ||
      lambdas.size() != n)
    throw ShapeError("mixup: row count mismatch");
  MixupResult out;
  out.batch.resizeLike(batch);
  out.targets.resizeLike(targets_onehot);
  for (Eigen::Index i = 0; i < n; ++i) {
    const Scalar lam = lambdas(i);
    const auto j = static_cast<Eigen::Index>(partner[static_cast<std::size_t>(i)]);
    out.batch.row(i) = lam * batch.row(i) + (1.0 - lam) * batch.row(j);
    out.targets.row(i) = lam * targets_onehot.row(i) + (1.0 - lam) * targets_onehot.row(j);
  }
  return out;
}

MixupResult mixup(const Matrix& batch, const Matrix& targets_onehot, Scalar alpha,
                  Rng& rng) {
  if (alpha < 0) throw ArgumentError("mixup: alpha must be >= 0");
  if (alpha == 0.0) return {batch, targets_onehot};
  const auto n = static_cast<std::size_t>(batch.rows());
  const std::vector<std::size_t> partner = shuffled_indices(n, rng);
  Vector lambdas(static_cast<Eigen::Index>(n));
  for (Eigen::Index i = 0; i < lambdas.size(); ++i)
    lambdas(i) = beta_sample(rng, alpha, alpha);
  return mixup_pairs(batch, targets_onehot, partner, lambdas);
}

Vector class_weights(const std::vector<int>& counts) {
  Scalar total = 0.0;
  int present = 0;
  for (int c : counts) {
    if (c < 0) throw ArgumentError("class_weights: negative count");
    total += c;
    if (c > 0) ++present;
  }
  if (present == 0) throw ArgumentError("class_weights: all counts are zero");
  Vector w = Vector::Zero(static_cast<Eigen::Index>(counts.size()));
  for (std::size_t i = 0; i < counts.size(); ++i)
    if (counts[i] > 0)
      w(static_cast<Eigen::Index>(i)) =
          total / (static_cast<Scalar>(present) * counts[i]);
  return w;
}

Model grow_classifier(const Model& model, int new_classes, Rng& rng) {
  if (new_classes < 1) throw ArgumentError("grow_classifier: new_classes must be >= 1");
  Model out = model;
  const int old_units = model.out_units();
  const DenseLayer fresh = init_layer(new_classes, model.spec.embedding_dim, rng);
  out.classifier.weight.conservativeResize(old_units + new_classes, Eigen::NoChange);
  out.classifier.bias.conservativeResize(old_units + new_classes);
  out.classifier.weight.bottomRows(new_classes) = fresh.weight;
  out.classifier.bias.tail(new_classes) = fresh.bias;
  return out;
}

Matrix gaussian_jitter(const Matrix& batch, Scalar noise_std, Rng& rng) {
  if (noise_std < 0) throw ArgumentError("gaussian_jitter: noise_std must be >= 0");
  if (noise_std == 0.0) return batch;
  Matrix out = batch;
  for (Eigen::Index i = 0; i < out.rows(); ++i)
    for (Eigen::Index j = 0; j < out.cols(); ++j)
      out(i, j) += noise_std * normal01(rng);
  return out;
}

}  // namespace icpl::nn
