#pragma once

#include <filesystem>
#include <optional>
#include <string>

#include <json.hpp>

#include "icpl/config.hpp"
#include "icpl/pipeline.hpp"

namespace icpl::artifacts {

using Json = nlohmann::ordered_json;

// Model checkpoints are versioned JSON: spec plus per-layer parameters.
Json model_to_json(const nn::Model& model);
nn::Model model_from_json(const Json& j);

Json encoding_to_json(const assign::EncodingTable& table);
assign::EncodingTable encoding_from_json(const Json& j);

Json memory_to_json(const rehearsal::ExemplarMemory& memory);
rehearsal::ExemplarMemory memory_from_json(const Json& j);

struct Checkpoint {
  int completed_tasks = 0;
  nn::Model model;
  assign::EncodingTable encoding;
  rehearsal::ExemplarMemory memory;
  std::optional<data::Standardizer> standardizer;
};

void write_checkpoint(const std::filesystem::path& path, const Checkpoint& chk);
Checkpoint load_checkpoint(const std::filesystem::path& path);

/// Canonical run report: config echo, class partition, metrics. No
/// timestamps, so identical runs serialize to identical bytes.
Json report_to_json(const config::FullConfig& cfg, const pipeline::TaskStream& stream,
                    const metrics::MetricsReport& report);

void write_json(const std::filesystem::path& path, const Json& j);
Json read_json(const std::filesystem::path& path);

/// One row per task: task id, static top-1, cluster accuracy (2 decimals).
void write_curve_csv(const std::filesystem::path& path,
                     const metrics::MetricsReport& report);

}  // namespace icpl::artifacts
