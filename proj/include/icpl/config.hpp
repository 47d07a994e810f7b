#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "icpl/dataio.hpp"
#include "icpl/pipeline.hpp"

namespace icpl::config {

using Json = nlohmann::ordered_json;

struct DatasetConfig {
  std::string kind = "synthetic";  // synthetic | csv | cifar100 | idx

  // synthetic
  int classes = 10;
  int per_class = 150;
  int dim = 16;
  Scalar center_scale = 10.0;
  Scalar noise_std = 1.0;
  std::uint64_t seed = 1;
  Scalar test_fraction = 0.2;

  // file-backed kinds
  std::string train_path, test_path;
  std::string label_column = "label";
  std::string train_images, train_labels, test_images, test_labels;

  bool standardize = false;
};

struct FullConfig {
  DatasetConfig dataset;
  pipeline::RunConfig run;
};

/// Strict parse: unknown keys anywhere are rejected, not ignored. Absent
/// keys fall back to documented defaults (including the strategy's
/// mixup/class-weight defaults and the "desk"/"paper" training profiles).
FullConfig parse_config(const Json& j);

FullConfig load_config_file(const std::filesystem::path& path);

/// Applies one `dotted.path=value` override to the raw JSON; the value is
/// parsed as JSON when possible, else taken as a string. The path must
/// address a key the schema knows (enforced by re-parsing).
void apply_override(Json& j, const std::string& key_value);

/// Canonical echo of a parsed config (all defaults materialized).
Json canonical_config(const FullConfig& cfg);

/// Loads or synthesizes the train/test pair, standardizing if requested
/// (fit on train, reuse on test). Returns the standardizer when active.
struct LoadedData {
  data::LabeledDataset train;
  data::LabeledDataset test;
  std::optional<data::Standardizer> standardizer;
};
LoadedData load_dataset(const DatasetConfig& dc);

}  // namespace icpl::config
