#include "icpl/artifacts.hpp"

#include <fstream>
#include <iomanip>

#include "icpl/errors.hpp"

namespace icpl::artifacts {

namespace {

Json matrix_to_json(const Matrix& m) {
  Json rows = Json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    Json row = Json::array();
    for (Eigen::Index j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
    rows.push_back(std::move(row));
  }
  return rows;
}

Matrix matrix_from_json(const Json& j, Eigen::Index expect_cols = -1) {
  if (!j.is_array()) throw FormatError("checkpoint: matrix must be an array");
  const auto rows = static_cast<Eigen::Index>(j.size());
  Eigen::Index cols = expect_cols;
  if (rows > 0) cols = static_cast<Eigen::Index>(j.at(0).size());
  if (cols < 0) cols = 0;
  Matrix m(rows, cols);
  for (Eigen::Index i = 0; i < rows; ++i) {
    const auto& row = j.at(static_cast<std::size_t>(i));
    if (static_cast<Eigen::Index>(row.size()) != cols)
      throw FormatError("checkpoint: ragged matrix rows");
    for (Eigen::Index c = 0; c < cols; ++c)
      m(i, c) = row.at(static_cast<std::size_t>(c)).get<Scalar>();
  }
  return m;
}

Json vector_to_json(const Vector& v) {
  Json out = Json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) out.push_back(v(i));
  return out;
}

Vector vector_from_json(const Json& j) {
  Vector v(static_cast<Eigen::Index>(j.size()));
  for (Eigen::Index i = 0; i < v.size(); ++i)
    v(i) = j.at(static_cast<std::size_t>(i)).get<Scalar>();
  return v;
}

Json layer_to_json(const nn::DenseLayer& layer) {
  return Json{{"weight", matrix_to_json(layer.weight)},
              {"bias", vector_to_json(layer.bias)}};
}

nn::DenseLayer layer_from_json(const Json& j, Eigen::Index expect_cols = -1) {
  nn::DenseLayer layer;
  layer.weight = matrix_from_json(j.at("weight"), expect_cols);
  layer.bias = vector_from_json(j.at("bias"));
  return layer;
}

}  // namespace

Json model_to_json(const nn::Model& model) {
  Json j;
  j["format_version"] = 1;
  j["spec"] = {{"input_dim", model.spec.input_dim},
               {"hidden_dims", model.spec.hidden_dims},
               {"embedding_dim", model.spec.embedding_dim},
               {"activation", "relu"}};
  Json layers = Json::array();
  for (const auto& layer : model.layers) layers.push_back(layer_to_json(layer));
  j["layers"] = std::move(layers);
  j["classifier"] = layer_to_json(model.classifier);
  return j;
}

nn::Model model_from_json(const Json& j) {
  if (j.value("format_version", 0) != 1)
    throw FormatError("checkpoint: unsupported model format version");
  nn::Model model;
  const auto& spec = j.at("spec");
  model.spec.input_dim = spec.at("input_dim").get<int>();
  model.spec.hidden_dims = spec.at("hidden_dims").get<std::vector<int>>();
  model.spec.embedding_dim = spec.at("embedding_dim").get<int>();
  if (spec.at("activation").get<std::string>() != "relu")
    throw FormatError("checkpoint: unknown activation");
  for (const auto& layer : j.at("layers")) model.layers.push_back(layer_from_json(layer));
  model.classifier =
      layer_from_json(j.at("classifier"), model.spec.embedding_dim);
  return model;
}

Json encoding_to_json(const assign::EncodingTable& table) {
  Json j;
  j["format_version"] = 1;
  Json entries = Json::array();
  for (const auto& [unit, class_id] : table.entries())
    entries.push_back(Json::array({unit, class_id}));
  j["entries"] = std::move(entries);
  j["task_units"] = table.task_units();
  return j;
}

assign::EncodingTable encoding_from_json(const Json& j) {
  if (j.value("format_version", 0) != 1)
    throw FormatError("encoding: unsupported format version");
  const auto task_units = j.at("task_units").get<std::vector<std::vector<int>>>();
  std::vector<std::pair<int, int>> entries;
  for (const auto& e : j.at("entries"))
    entries.emplace_back(e.at(0).get<int>(), e.at(1).get<int>());

  assign::EncodingTable table;
  std::size_t at = 0;
  for (const auto& units : task_units) {
    std::vector<std::pair<int, int>> block;
    for (std::size_t i = 0; i < units.size(); ++i) {
      if (at >= entries.size() || entries[at].first != units[i])
        throw FormatError("encoding: entries and task_units disagree");
      block.push_back(entries[at++]);
    }
    table.append_task(block);
  }
  if (at != entries.size())
    throw FormatError("encoding: dangling entries outside task blocks");
  return table;
}

Json memory_to_json(const rehearsal::ExemplarMemory& memory) {
  Json j;
  j["format_version"] = 1;
  j["budget"] = memory.budget();
  Json classes = Json::array();
  for (const auto& [unit, store] : memory.per_class())
    classes.push_back(
        Json{{"unit", unit}, {"samples", matrix_to_json(store.samples)}});
  j["classes"] = std::move(classes);
  return j;
}

rehearsal::ExemplarMemory memory_from_json(const Json& j) {
  if (j.value("format_version", 0) != 1)
    throw FormatError("memory: unsupported format version");
  std::map<int, rehearsal::ClassStore> per_class;
  for (const auto& c : j.at("classes"))
    per_class[c.at("unit").get<int>()] =
        rehearsal::ClassStore{matrix_from_json(c.at("samples"))};
  return rehearsal::MemoryAccess::build(j.at("budget").get<int>(),
                                        std::move(per_class));
}

void write_checkpoint(const std::filesystem::path& path, const Checkpoint& chk) {
  Json j;
  j["format_version"] = 1;
  j["completed_tasks"] = chk.completed_tasks;
  j["model"] = model_to_json(chk.model);
  j["encoding"] = encoding_to_json(chk.encoding);
  j["memory"] = memory_to_json(chk.memory);
  if (chk.standardizer) {
    j["standardizer"] = {
        {"mean", vector_to_json(chk.standardizer->mean.transpose())},
        {"inv_std", vector_to_json(chk.standardizer->inv_std.transpose())}};
  }
  write_json(path, j);
}

Checkpoint load_checkpoint(const std::filesystem::path& path) {
  const Json j = read_json(path);
  if (j.value("format_version", 0) != 1)
    throw FormatError("checkpoint: unsupported format version");
  Checkpoint chk;
  chk.completed_tasks = j.at("completed_tasks").get<int>();
  chk.model = model_from_json(j.at("model"));
  chk.encoding = encoding_from_json(j.at("encoding"));
  chk.memory = memory_from_json(j.at("memory"));
  if (j.contains("standardizer")) {
    data::Standardizer s;
    s.mean = vector_from_json(j.at("standardizer").at("mean")).transpose();
    s.inv_std = vector_from_json(j.at("standardizer").at("inv_std")).transpose();
    chk.standardizer = std::move(s);
  }
  return chk;
}

Json report_to_json(const config::FullConfig& cfg, const pipeline::TaskStream& stream,
                    const metrics::MetricsReport& report) {
  Json j;
  j["format_version"] = 1;
  j["config"] = config::canonical_config(cfg);
  Json task_classes = Json::array();
  for (const auto& task : stream.tasks) task_classes.push_back(task.class_ids);
  j["stream"] = {{"base_classes", stream.base_classes},
                 {"inc_classes", stream.inc_classes},
                 {"shuffle_seed", stream.shuffle_seed},
                 {"task_classes", std::move(task_classes)}};
  Json regens = Json::array();
  for (const auto& r : report.regenerations)
    regens.push_back(Json{{"task", r.task},
                          {"epoch", r.epoch},
                          {"nmi", r.nmi},
                          {"ari", r.ari},
                          {"selected_fraction", r.selected_fraction}});
  j["results"] = {{"per_task_top1", report.per_task_top1},
                  {"final_accuracy", report.final_accuracy},
                  {"average_accuracy", report.average_accuracy},
                  {"cluster_accuracy", report.cluster_accuracy},
                  {"regenerations", std::move(regens)}};
  return j;
}

void write_json(const std::filesystem::path& path, const Json& j) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write " + path.string());
  out << j.dump(2) << "\n";
}

Json read_json(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot read " + path.string());
  try {
    return Json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw FormatError(path.string() + ": " + e.what());
  }
}

void write_curve_csv(const std::filesystem::path& path,
                     const metrics::MetricsReport& report) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write " + path.string());
  out << "task,top1,cluster_accuracy\n";
  out << std::fixed << std::setprecision(2);
  for (std::size_t i = 0; i < report.per_task_top1.size(); ++i)
    out << i + 1 << "," << report.per_task_top1[i] << ","
        << report.cluster_accuracy[i] << "\n";
}

}  // namespace icpl::artifacts
