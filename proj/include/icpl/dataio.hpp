#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "icpl/types.hpp"

namespace icpl::data {

enum class Split { Train, Test };

struct LabeledDataset {
  Matrix samples;  // [n x d_in]
  Labels labels;   // class ids, < num_classes()
  std::vector<std::string> class_names;  // optional, may be empty
  Split split = Split::Train;

  Eigen::Index size() const { return samples.rows(); }
  Eigen::Index dim() const { return samples.cols(); }
  int num_classes() const;
  void validate() const;  // finite features, labels in range
};

/// Gaussian mixture with class centers drawn uniformly in
/// [-center_scale, center_scale]^dim and isotropic noise. The split is
/// stratified per class; everything is a pure function of the seed.
std::pair<LabeledDataset, LabeledDataset> synth_gaussian(
    int num_classes, int per_class, int dim, Scalar center_scale,
    Scalar noise_std, std::uint64_t seed, Scalar test_fraction = 0.2);

/// Numeric CSV with a header row; `label_column` names the integer label.
LabeledDataset load_csv(const std::filesystem::path& path,
                        const std::string& label_column);

void save_csv(const std::filesystem::path& path, const LabeledDataset& ds,
              const std::string& label_column = "label");

/// CIFAR-100 binary records: 1 coarse byte + 1 fine byte + 3072 pixels.
/// The fine label is kept; pixels are scaled to [0,1].
LabeledDataset load_cifar100_binary(const std::filesystem::path& path);

/// IDX image/label file pair (magics 0x00000803 / 0x00000801, big-endian).
LabeledDataset load_idx(const std::filesystem::path& images_path,
                        const std::filesystem::path& labels_path);

/// Per-feature affine transform fitted on one split, reused on another.
struct Standardizer {
  RowVector mean;
  RowVector inv_std;  // 1/std, with zero-variance columns pinned to 1

  static Standardizer fit(const Matrix& samples);
  Matrix apply(const Matrix& samples) const;
};

}  // namespace icpl::data
