#include "icpl/pipeline.hpp"

#include <algorithm>
#include <map>
#include <string>

#include "icpl/errors.hpp"

namespace icpl::pipeline {

namespace {

// Rows of `samples` whose label is in `class_ids`, preserving row order.
std::pair<Matrix, Labels> select_classes(const Matrix& samples, const Labels& labels,
                                         const std::vector<int>& class_ids) {
  std::vector<char> wanted;
  for (int c : class_ids) {
    if (c >= static_cast<int>(wanted.size()))
      wanted.resize(static_cast<std::size_t>(c) + 1, 0);
    wanted[static_cast<std::size_t>(c)] = 1;
  }
  std::vector<Eigen::Index> rows;
  for (std::size_t i = 0; i < labels.size(); ++i) {
    const int c = labels[i];
    if (c < static_cast<int>(wanted.size()) && wanted[static_cast<std::size_t>(c)])
      rows.push_back(static_cast<Eigen::Index>(i));
  }
  Matrix out(static_cast<Eigen::Index>(rows.size()), samples.cols());
  Labels out_labels(rows.size());
  for (std::size_t r = 0; r < rows.size(); ++r) {
    out.row(static_cast<Eigen::Index>(r)) = samples.row(rows[r]);
    out_labels[r] = labels[static_cast<std::size_t>(rows[r])];
  }
  return {std::move(out), std::move(out_labels)};
}

// class id -> unit id for one task block starting at first_unit.
Labels to_unit_ids(const Labels& class_labels, const std::vector<int>& class_ids,
                   int first_unit) {
  std::map<int, int> unit_of;
  for (std::size_t i = 0; i < class_ids.size(); ++i)
    unit_of[class_ids[i]] = first_unit + static_cast<int>(i);
  Labels out;
  out.reserve(class_labels.size());
  for (int c : class_labels) out.push_back(unit_of.at(c));
  return out;
}

std::vector<int> regeneration_epochs(int epochs, std::optional<int> tau) {
  std::vector<int> at{0};
  if (tau && *tau >= 1)
    for (int e = *tau; e < epochs; e += *tau) at.push_back(e);
  return at;
}

Labels masked(const Labels& values, const std::vector<bool>& mask) {
  Labels out;
  for (std::size_t i = 0; i < values.size(); ++i)
    if (mask[i]) out.push_back(values[i]);
  return out;
}

}  // namespace

int regeneration_events(int epochs, std::optional<int> tau) {
  return static_cast<int>(regeneration_epochs(epochs, tau).size());
}

TaskStream build_stream(const data::LabeledDataset& train,
                        const data::LabeledDataset& test, int base_classes,
                        int inc_classes, std::uint64_t seed) {
  train.validate();
  test.validate();
  if (train.dim() != test.dim())
    throw ShapeError("build_stream: train/test feature width mismatch");
  const int n_classes = std::max(train.num_classes(), test.num_classes());
  if (base_classes < 0 || inc_classes < 1)
    throw ArgumentError("build_stream: need base_classes >= 0, inc_classes >= 1");
  if (base_classes > n_classes)
    throw ArgumentError("build_stream: dataset has " + std::to_string(n_classes) +
                        " classes, fewer than base_classes");
  if ((n_classes - base_classes) % inc_classes != 0)
    throw ArgumentError("build_stream: " + std::to_string(n_classes - base_classes) +
                        " incremental classes do not split into chunks of " +
                        std::to_string(inc_classes));

  Rng rng = make_rng(seed);
  const auto perm = shuffled_indices(static_cast<std::size_t>(n_classes), rng);

  std::vector<std::vector<int>> partitions;
  std::size_t at = 0;
  if (base_classes > 0) {
    partitions.emplace_back();
    for (int i = 0; i < base_classes; ++i)
      partitions.back().push_back(static_cast<int>(perm[at++]));
  }
  while (at < perm.size()) {
    partitions.emplace_back();
    for (int i = 0; i < inc_classes; ++i)
      partitions.back().push_back(static_cast<int>(perm[at++]));
  }

  TaskStream stream;
  stream.base_classes = base_classes;
  stream.inc_classes = inc_classes;
  stream.shuffle_seed = seed;
  for (std::size_t t = 0; t < partitions.size(); ++t) {
    Task task;
    task.class_ids = partitions[t];
    auto [train_x, train_y] = select_classes(train.samples, train.labels, task.class_ids);
    auto [test_x, test_y] = select_classes(test.samples, test.labels, task.class_ids);
    task.train_samples = std::move(train_x);
    task.train_truth = HiddenLabels(std::move(train_y));
    task.test_samples = std::move(test_x);
    task.test_truth = std::move(test_y);
    task.labeled = t == 0;
    stream.tasks.push_back(std::move(task));
  }
  return stream;
}

void RunConfig::validate() const {
  network.validate();
  train.validate();
  if (train.epochs < 1) throw ArgumentError("run: epochs must be >= 1");
  if (pseudo.alpha <= 0.0 || pseudo.alpha >= 1.0)
    throw ArgumentError("run: alpha must lie in (0,1)");
  if (pseudo.tau && *pseudo.tau < 1)
    throw ArgumentError("run: tau must be >= 1 when present");
  if (pseudo.kmeans_max_iter < 1 || pseudo.kmeans_n_init < 1)
    throw ArgumentError("run: kmeans parameters must be >= 1");
  if (memory_budget < 0) throw ArgumentError("run: memory_budget must be >= 0");
}

namespace {

struct Evaluator {
  Matrix test_samples;  // union of all seen tasks
  Labels test_truth;

  void add_task(const Task& task) {
    if (test_samples.rows() == 0) {
      test_samples = task.test_samples;
      test_truth = task.test_truth;
      return;
    }
    Matrix merged(test_samples.rows() + task.test_samples.rows(), test_samples.cols());
    merged.topRows(test_samples.rows()) = test_samples;
    merged.bottomRows(task.test_samples.rows()) = task.test_samples;
    test_samples = std::move(merged);
    test_truth.insert(test_truth.end(), task.test_truth.begin(), task.test_truth.end());
  }

  void evaluate(const nn::Model& model, const assign::EncodingTable& encoding,
                metrics::MetricsReport& report) const {
    const Labels predictions = nn::predict_units(model, test_samples);
    report.per_task_top1.push_back(
        metrics::top1_static(predictions, encoding, test_truth));
    report.cluster_accuracy.push_back(
        metrics::cluster_accuracy(predictions, test_truth));
  }
};

// Memory update shared by all task kinds: groups samples per unit id and
// re-herds with embeddings from the freshly trained model.
rehearsal::ExemplarMemory update_memory(const rehearsal::ExemplarMemory& memory,
                                        const nn::Model& model, const Matrix& samples,
                                        const Labels& unit_ids,
                                        const std::vector<int>& new_units) {
  std::vector<Matrix> per_class_samples, per_class_embeddings;
  for (int unit : new_units) {
    std::vector<Eigen::Index> rows;
    for (std::size_t i = 0; i < unit_ids.size(); ++i)
      if (unit_ids[i] == unit) rows.push_back(static_cast<Eigen::Index>(i));
    Matrix class_samples(static_cast<Eigen::Index>(rows.size()), samples.cols());
    for (std::size_t r = 0; r < rows.size(); ++r)
      class_samples.row(static_cast<Eigen::Index>(r)) = samples.row(rows[r]);
    per_class_embeddings.push_back(
        rows.empty() ? Matrix(0, model.spec.embedding_dim)
                     : nn::forward(model, class_samples).embeddings);
    per_class_samples.push_back(std::move(class_samples));
  }
  return rehearsal::rebalance(memory, new_units, per_class_samples,
                              per_class_embeddings);
}

}  // namespace

RunResult run_incremental(const TaskStream& stream, const RunConfig& config,
                          const CheckpointHook& on_task_end) {
  config.validate();
  if (stream.tasks.empty()) throw ArgumentError("run: empty task stream");
  if (stream.tasks[0].train_samples.cols() != config.network.input_dim)
    throw ShapeError("run: network input_dim does not match dataset width");

  Rng rng = make_rng(config.train.rng_seed);
  RunResult state;
  state.memory = rehearsal::ExemplarMemory(config.memory_budget);
  Evaluator evaluator;

  for (std::size_t t = 0; t < stream.tasks.size(); ++t) {
    const Task& task = stream.tasks[t];
    const int task_no = static_cast<int>(t) + 1;
    const int k = static_cast<int>(task.class_ids.size());
    const int old_units = t == 0 ? 0 : state.model.out_units();

    std::vector<int> new_units(static_cast<std::size_t>(k));
    for (int i = 0; i < k; ++i) new_units[static_cast<std::size_t>(i)] = old_units + i;

    strategy::TrainSet task_set;
    task_set.samples = task.train_samples;

    if (task.labeled || config.supervised) {
      // Supervised path: real labels in unit space, identity encoding.
      if (t == 0) {
        state.model = nn::init_model(config.network, k, rng);
      } else {
        state.model = nn::grow_classifier(state.model, k, rng);
      }
      task_set.unit_ids = to_unit_ids(task.train_truth.for_supervised_training(),
                                      task.class_ids, old_units);
      strategy::TaskTrainer trainer(state.model, config.strategy, config.train,
                                    old_units, rng);
      strategy::TrainSet full = task_set;
      if (!state.memory.empty()) {
        auto [mem_x, mem_y] = state.memory.as_training_set();
        full = strategy::concat(task_set, {std::move(mem_x), std::move(mem_y)});
      }
      trainer.train_epochs(full, 0, config.train.epochs);
      trainer.finish_task();
      state.encoding = assign::extend_identity(state.encoding, new_units, task.class_ids);
    } else {
      // Unsupervised path: cluster, select, train, regenerate every tau.
      Matrix embeddings = nn::forward(state.model, task.train_samples).embeddings;
      cluster::PseudoLabelSet pls = cluster::generate_pseudo_labels(
          embeddings, k, config.pseudo.alpha, rng, config.pseudo.kmeans_max_iter,
          config.pseudo.kmeans_n_init);
      Matrix ref_centers = pls.clustering.centers;

      state.model = nn::grow_classifier(state.model, k, rng);
      strategy::TaskTrainer trainer(state.model, config.strategy, config.train,
                                    old_units, rng);

      const auto regen_at = regeneration_epochs(config.train.epochs, config.pseudo.tau);
      const Labels& truth = task.train_truth.for_evaluation();
      for (std::size_t seg = 0; seg < regen_at.size(); ++seg) {
        const int seg_begin = regen_at[seg];
        const int seg_end = seg + 1 < regen_at.size()
                                ? regen_at[seg + 1]
                                : config.train.epochs;
        if (seg > 0) {
          // Regenerate with the current extractor and keep unit meanings
          // stable by matching centers against the previous generation.
          embeddings = nn::forward(state.model, task.train_samples).embeddings;
          cluster::PseudoLabelSet fresh = cluster::generate_pseudo_labels(
              embeddings, k, config.pseudo.alpha, rng, config.pseudo.kmeans_max_iter,
              config.pseudo.kmeans_n_init);
          const auto relabel =
              cluster::align_clusters(ref_centers, fresh.clustering.centers);
          for (auto& label : fresh.labels)
            label = relabel[static_cast<std::size_t>(label)];
          for (int j = 0; j < k; ++j)
            ref_centers.row(relabel[static_cast<std::size_t>(j)]) =
                fresh.clustering.centers.row(j);
          pls = std::move(fresh);
        }

        const Labels sel_labels = masked(pls.labels, pls.selected);
        const Labels sel_truth = masked(truth, pls.selected);
        metrics::RegenRecord rec;
        rec.task = task_no;
        rec.epoch = seg_begin;
        rec.selected_fraction = pls.selected_fraction();
        rec.nmi = sel_labels.empty() ? 0.0 : metrics::nmi(sel_labels, sel_truth);
        rec.ari = sel_labels.size() < 2 ? 0.0 : metrics::ari(sel_labels, sel_truth);
        state.report.regenerations.push_back(rec);

        // Train on the confident subset plus rehearsal memory.
        std::vector<Eigen::Index> rows;
        for (std::size_t i = 0; i < pls.selected.size(); ++i)
          if (pls.selected[i]) rows.push_back(static_cast<Eigen::Index>(i));
        strategy::TrainSet selected_set;
        selected_set.samples.resize(static_cast<Eigen::Index>(rows.size()),
                                    task.train_samples.cols());
        selected_set.unit_ids.reserve(rows.size());
        for (std::size_t r = 0; r < rows.size(); ++r) {
          selected_set.samples.row(static_cast<Eigen::Index>(r)) =
              task.train_samples.row(rows[r]);
          selected_set.unit_ids.push_back(
              old_units + pls.labels[static_cast<std::size_t>(rows[r])]);
        }
        strategy::TrainSet full = selected_set;
        if (!state.memory.empty()) {
          auto [mem_x, mem_y] = state.memory.as_training_set();
          full = strategy::concat(selected_set, {std::move(mem_x), std::move(mem_y)});
        }
        trainer.train_epochs(full, seg_begin, seg_end);
      }
      trainer.finish_task();

      // Static encoding from the final assignment over all clustered samples.
      Matrix contingency = Matrix::Zero(k, k);
      for (std::size_t i = 0; i < pls.labels.size(); ++i) {
        int col = -1;
        for (int j = 0; j < k; ++j)
          if (task.class_ids[static_cast<std::size_t>(j)] == truth[i]) col = j;
        if (col >= 0) contingency(pls.labels[i], col) += 1.0;
      }
      state.encoding =
          assign::extend_encoding(state.encoding, contingency, new_units, task.class_ids);

      // Exemplars come from the confident subset under their unit id.
      strategy::TrainSet selected_set;
      std::vector<Eigen::Index> rows;
      for (std::size_t i = 0; i < pls.selected.size(); ++i)
        if (pls.selected[i]) rows.push_back(static_cast<Eigen::Index>(i));
      selected_set.samples.resize(static_cast<Eigen::Index>(rows.size()),
                                  task.train_samples.cols());
      for (std::size_t r = 0; r < rows.size(); ++r) {
        selected_set.samples.row(static_cast<Eigen::Index>(r)) =
            task.train_samples.row(rows[r]);
        selected_set.unit_ids.push_back(
            old_units + pls.labels[static_cast<std::size_t>(rows[r])]);
      }
      task_set = std::move(selected_set);
    }

    state.memory = update_memory(state.memory, state.model, task_set.samples,
                                 task_set.unit_ids, new_units);

    evaluator.add_task(task);
    evaluator.evaluate(state.model, state.encoding, state.report);
    state.report.finalize();
    state.completed_tasks = task_no;
    if (on_task_end) on_task_end(state);
  }
  return state;
}

}  // namespace icpl::pipeline
