#include "icpl/flops.hpp"

#include <sstream>

#include "icpl/errors.hpp"

namespace icpl::flops {

namespace {

void require_non_negative(Scalar v, const char* name) {
  if (v < 0) throw ArgumentError(std::string("flops: ") + name + " must be >= 0");
}

}  // namespace

Scalar kmeans_gflops(Scalar iterations, Scalar n, Scalar embed_dim, Scalar clusters) {
  require_non_negative(iterations, "iterations");
  require_non_negative(n, "n");
  require_non_negative(embed_dim, "embed_dim");
  require_non_negative(clusters, "clusters");
  return iterations * n * embed_dim * clusters / 1e9;
}

Scalar pseudo_label_gflops(Scalar inference_per_image, Scalar n, Scalar kmeans_g) {
  require_non_negative(inference_per_image, "inference_per_image");
  require_non_negative(n, "n");
  require_non_negative(kmeans_g, "kmeans_gflops");
  return inference_per_image * n + kmeans_g;
}

Scalar supervised_gflops(Scalar n_sup, Scalar epochs, Scalar train_per_image) {
  require_non_negative(n_sup, "n_supervised");
  require_non_negative(epochs, "epochs");
  require_non_negative(train_per_image, "train_per_image");
  return n_sup * epochs * train_per_image;
}

Scalar unsupervised_gflops(Scalar n_unsup, Scalar epochs, Scalar train_per_image,
                           Scalar recompute_count, Scalar pseudo_g) {
  require_non_negative(n_unsup, "n_unsupervised");
  require_non_negative(epochs, "epochs");
  require_non_negative(train_per_image, "train_per_image");
  require_non_negative(recompute_count, "recompute_count");
  require_non_negative(pseudo_g, "pseudo_label_gflops");
  return n_unsup * epochs * train_per_image + recompute_count * pseudo_g;
}

int recompute_count_formula(int epochs, int tau) {
  if (tau < 1) return 1;
  return 1 + epochs / tau;
}

int recompute_count_effective(int epochs, int tau) {
  if (tau < 1 || epochs < 1) return 1;
  return 1 + (epochs - 1) / tau;
}

Scalar FlopsModel::kmeans() const {
  return kmeans_gflops(kmeans_iters, samples, embed_dim, clusters);
}

Scalar FlopsModel::pseudo_labels() const {
  return pseudo_label_gflops(inference_gflops_per_image, samples, kmeans());
}

Scalar FlopsModel::supervised() const {
  return supervised_gflops(n_supervised, epochs, training_gflops_per_image);
}

Scalar FlopsModel::unsupervised() const {
  return unsupervised_with(recompute_count);
}

Scalar FlopsModel::unsupervised_with(int recomputes) const {
  return unsupervised_gflops(n_unsupervised, epochs, training_gflops_per_image,
                             recomputes, pseudo_labels());
}

std::string FlopsModel::table() const {
  const int formula = recompute_count_formula(static_cast<int>(epochs), step_size);
  std::ostringstream out;
  out.setf(std::ios::fixed);
  out.precision(4);
  out << "kmeans            " << kmeans() << " GFLOPs"
      << "  (I=" << kmeans_iters << " n=" << samples << " d=" << embed_dim
      << " k=" << clusters << ")\n";
  out << "pseudo-labels     " << pseudo_labels() << " GFLOPs\n";
  out.precision(2);
  out << "supervised        " << supervised() << " GFLOPs  (n=" << n_supervised
      << " epochs=" << epochs << ")\n";
  out << "unsupervised      " << unsupervised() << " GFLOPs  (recomputes="
      << recompute_count << ")\n";
  out << "unsupervised[1+floor(epochs/tau)=" << formula << "] "
      << unsupervised_with(formula) << " GFLOPs\n";
  out << "reduction         "
      << 100.0 * (supervised() - unsupervised()) / supervised() << " %\n";
  return out.str();
}

Scalar forward_macs(const nn::NetworkSpec& spec, int out_units) {
  spec.validate();
  Scalar macs = 0.0;
  int in_dim = spec.input_dim;
  for (int h : spec.hidden_dims) {
    macs += static_cast<Scalar>(in_dim) * h;
    in_dim = h;
  }
  macs += static_cast<Scalar>(in_dim) * spec.embedding_dim;
  macs += static_cast<Scalar>(spec.embedding_dim) * out_units;
  return macs;
}

Scalar inference_gflops_per_image(const nn::NetworkSpec& spec, int out_units) {
  return 2.0 * forward_macs(spec, out_units) / 1e9;
}

Scalar training_gflops_per_image(const nn::NetworkSpec& spec, int out_units) {
  return 3.0 * inference_gflops_per_image(spec, out_units);
}

}  // namespace icpl::flops
