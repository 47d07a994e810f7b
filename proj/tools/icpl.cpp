// Command-line frontend: generate data, run experiments, evaluate
// checkpoints, estimate compute cost, and compare run reports.

#include <chrono>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "icpl/artifacts.hpp"
#include "icpl/config.hpp"
#include "icpl/errors.hpp"
#include "icpl/flops.hpp"
#include "icpl/pipeline.hpp"

namespace fs = std::filesystem;
using icpl::Scalar;

namespace {

int log_level() {
  const char* env = std::getenv("ICPL_LOG");
  if (!env) return 0;
  const std::string v(env);
  if (v == "debug") return 2;
  if (v == "info") return 1;
  return 0;
}

int cmd_gen_data(const icpl::config::DatasetConfig& dc, const fs::path& out_dir) {
  fs::create_directories(out_dir);
  auto [train, test] =
      icpl::data::synth_gaussian(dc.classes, dc.per_class, dc.dim, dc.center_scale,
                                 dc.noise_std, dc.seed, dc.test_fraction);
  icpl::data::save_csv(out_dir / "train.csv", train);
  icpl::data::save_csv(out_dir / "test.csv", test);
  std::cout << "wrote " << (out_dir / "train.csv").string() << " (" << train.size()
            << " rows), " << (out_dir / "test.csv").string() << " (" << test.size()
            << " rows)\n";
  return 0;
}

int cmd_run(const fs::path& config_path, const fs::path& out_dir,
            const std::vector<std::string>& overrides,
            std::optional<std::uint64_t> seed) {
  std::ifstream in(config_path);
  if (!in) {
    std::cerr << "error: cannot open config " << config_path << "\n";
    return 1;
  }
  icpl::config::Json raw;
  try {
    raw = icpl::config::Json::parse(in);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  for (const auto& kv : overrides) icpl::config::apply_override(raw, kv);
  if (seed) icpl::config::apply_override(raw, "train.rng_seed=" + std::to_string(*seed));

  icpl::config::FullConfig cfg = icpl::config::parse_config(raw);

  auto data = icpl::config::load_dataset(cfg.dataset);
  if (cfg.run.network.input_dim == 0)
    cfg.run.network.input_dim = static_cast<int>(data.train.dim());

  const auto stream =
      icpl::pipeline::build_stream(data.train, data.test, cfg.run.base_classes,
                                   cfg.run.inc_classes, cfg.run.shuffle_seed);

  fs::create_directories(out_dir / "checkpoints");
  std::ofstream timing(out_dir / "timing.log");
  const auto t0 = std::chrono::steady_clock::now();

  auto hook = [&](const icpl::pipeline::RunResult& state) {
    icpl::artifacts::Checkpoint chk;
    chk.completed_tasks = state.completed_tasks;
    chk.model = state.model;
    chk.encoding = state.encoding;
    chk.memory = state.memory;
    chk.standardizer = data.standardizer;
    std::ostringstream name;
    name << "task_" << std::setw(2) << std::setfill('0') << state.completed_tasks
         << ".json";
    icpl::artifacts::write_checkpoint(out_dir / "checkpoints" / name.str(), chk);

    const auto elapsed = std::chrono::duration<double>(
                             std::chrono::steady_clock::now() - t0)
                             .count();
    timing << "task " << state.completed_tasks << " done at " << std::fixed
           << std::setprecision(2) << elapsed << " s\n";
    if (log_level() >= 1) {
      std::cout << "task " << state.completed_tasks << ": top1="
                << std::fixed << std::setprecision(2)
                << state.report.per_task_top1.back()
                << "% cluster=" << state.report.cluster_accuracy.back() << "%\n";
    }
  };

  icpl::pipeline::RunResult result;
  try {
    result = icpl::pipeline::run_incremental(stream, cfg.run, hook);
  } catch (const std::exception& e) {
    // Per-task checkpoints up to the failure stay on disk.
    std::cerr << "error: run aborted: " << e.what() << "\n";
    return 2;
  }

  icpl::artifacts::write_json(out_dir / "report.json",
                              icpl::artifacts::report_to_json(cfg, stream, result.report));
  icpl::artifacts::write_curve_csv(out_dir / "curve.csv", result.report);
  icpl::artifacts::write_json(out_dir / "encoding.json",
                              icpl::artifacts::encoding_to_json(result.encoding));
  icpl::artifacts::Checkpoint final_chk;
  final_chk.completed_tasks = result.completed_tasks;
  final_chk.model = result.model;
  final_chk.encoding = result.encoding;
  final_chk.memory = result.memory;
  final_chk.standardizer = data.standardizer;
  icpl::artifacts::write_checkpoint(out_dir / "checkpoint.json", final_chk);

  std::cout << std::fixed << std::setprecision(2)
            << "final accuracy  Theta_N = " << result.report.final_accuracy << "%\n"
            << "average accuracy Theta~ = " << result.report.average_accuracy
            << "%\n";
  return 0;
}

int cmd_eval(const fs::path& checkpoint_path, const fs::path& csv_path,
             const std::string& label_column) {
  const auto chk = icpl::artifacts::load_checkpoint(checkpoint_path);
  auto ds = icpl::data::load_csv(csv_path, label_column);
  if (chk.standardizer) ds.samples = chk.standardizer->apply(ds.samples);

  const icpl::Labels predictions = icpl::nn::predict_units(chk.model, ds.samples);
  const Scalar top1 = icpl::metrics::top1_static(predictions, chk.encoding, ds.labels);
  const Scalar cluster = icpl::metrics::cluster_accuracy(predictions, ds.labels);
  const icpl::Labels encoded = icpl::assign::encode_predictions(chk.encoding, predictions);

  std::cout << std::fixed << std::setprecision(2)
            << "top1 (static encoding): " << top1 << "%\n"
            << "cluster accuracy:       " << cluster << "%\n"
            << std::setprecision(4)
            << "nmi: " << icpl::metrics::nmi(encoded, ds.labels)
            << "  ari: " << icpl::metrics::ari(encoded, ds.labels) << "\n";
  return 0;
}

int cmd_flops(const icpl::flops::FlopsModel& model) {
  std::cout << model.table();
  return 0;
}

struct RunSummary {
  std::string dir;
  std::string strategy;
  bool supervised = false;
  std::uint64_t seed = 0;
  Scalar final_accuracy = 0;
  Scalar average_accuracy = 0;
  icpl::config::Json task_classes;
  std::string group_key;  // config identity minus the training seed
};

RunSummary load_summary(const fs::path& dir) {
  const auto j = icpl::artifacts::read_json(dir / "report.json");
  RunSummary s;
  s.dir = dir.string();
  s.strategy = j.at("config").at("strategy").at("kind").get<std::string>();
  s.supervised = j.at("config").at("supervised").get<bool>();
  s.seed = j.at("config").at("train").at("rng_seed").get<std::uint64_t>();
  s.final_accuracy = j.at("results").at("final_accuracy").get<Scalar>();
  s.average_accuracy = j.at("results").at("average_accuracy").get<Scalar>();
  s.task_classes = j.at("stream").at("task_classes");
  auto key = j.at("config");
  key.at("train").erase("rng_seed");
  s.group_key = key.dump();
  return s;
}

int cmd_report(const std::vector<std::string>& dirs, int baseline_index,
               const std::string& csv_out) {
  std::vector<RunSummary> runs;
  for (const auto& d : dirs) runs.push_back(load_summary(d));

  for (const auto& run : runs)
    if (run.task_classes != runs.front().task_classes)
      throw icpl::ComparisonError("runs use different class partitions: " +
                                  run.dir + " vs " + runs.front().dir);

  int base = baseline_index;
  if (base < 0) {  // default: first supervised run, if any
    for (std::size_t i = 0; i < runs.size(); ++i)
      if (runs[i].supervised) {
        base = static_cast<int>(i);
        break;
      }
  }
  const RunSummary* baseline =
      base >= 0 && base < static_cast<int>(runs.size()) ? &runs[base] : nullptr;

  std::ostringstream table;
  table << std::left << std::setw(28) << "run" << std::setw(10) << "strategy"
        << std::setw(12) << "mode" << std::right << std::setw(10) << "Theta_N"
        << std::setw(10) << "Theta~";
  if (baseline) table << std::setw(12) << "degr_N" << std::setw(12) << "degr~";
  table << "\n";
  table << std::fixed << std::setprecision(2);
  for (const auto& run : runs) {
    table << std::left << std::setw(28) << fs::path(run.dir).filename().string()
          << std::setw(10) << run.strategy << std::setw(12)
          << (run.supervised ? "supervised" : "unsupervised") << std::right
          << std::setw(10) << run.final_accuracy << std::setw(10)
          << run.average_accuracy;
    if (baseline)
      table << std::setw(12) << baseline->final_accuracy - run.final_accuracy
            << std::setw(12) << baseline->average_accuracy - run.average_accuracy;
    table << "\n";
  }

  // mean +- std rows for groups of seed-replicated runs
  std::vector<std::string> seen;
  for (const auto& run : runs) {
    if (std::find(seen.begin(), seen.end(), run.group_key) != seen.end()) continue;
    seen.push_back(run.group_key);
    std::vector<const RunSummary*> group;
    for (const auto& other : runs)
      if (other.group_key == run.group_key) group.push_back(&other);
    if (group.size() < 2) continue;
    Scalar mean_f = 0, mean_a = 0;
    for (const auto* g : group) {
      mean_f += g->final_accuracy;
      mean_a += g->average_accuracy;
    }
    mean_f /= static_cast<Scalar>(group.size());
    mean_a /= static_cast<Scalar>(group.size());
    Scalar var_f = 0, var_a = 0;
    for (const auto* g : group) {
      var_f += (g->final_accuracy - mean_f) * (g->final_accuracy - mean_f);
      var_a += (g->average_accuracy - mean_a) * (g->average_accuracy - mean_a);
    }
    var_f /= static_cast<Scalar>(group.size() - 1);
    var_a /= static_cast<Scalar>(group.size() - 1);
    table << std::left << std::setw(28)
          << (run.strategy + (run.supervised ? "/sup" : "/unsup") + " mean of " +
              std::to_string(group.size()))
          << std::setw(10) << run.strategy << std::setw(12)
          << (run.supervised ? "supervised" : "unsupervised") << std::right
          << std::setw(10) << mean_f << std::setw(10) << mean_a << "  +- "
          << std::sqrt(var_f) << "/" << std::sqrt(var_a) << "\n";
  }

  std::cout << table.str();

  if (!csv_out.empty()) {
    std::ofstream out(csv_out);
    out << "run,strategy,mode,final_accuracy,average_accuracy";
    if (baseline) out << ",degradation_final,degradation_average";
    out << "\n" << std::fixed << std::setprecision(2);
    for (const auto& run : runs) {
      out << fs::path(run.dir).filename().string() << "," << run.strategy << ","
          << (run.supervised ? "supervised" : "unsupervised") << ","
          << run.final_accuracy << "," << run.average_accuracy;
      if (baseline)
        out << "," << baseline->final_accuracy - run.final_accuracy << ","
            << baseline->average_accuracy - run.average_accuracy;
      out << "\n";
    }
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"unsupervised class-incremental learning toolkit"};
  app.require_subcommand(1);

  // gen-data
  auto* gen = app.add_subcommand("gen-data", "generate a synthetic CSV dataset");
  icpl::config::DatasetConfig dc;
  std::string gen_out;
  gen->add_option("--out", gen_out, "output directory")->required();
  gen->add_option("--classes", dc.classes);
  gen->add_option("--per-class", dc.per_class);
  gen->add_option("--dim", dc.dim);
  gen->add_option("--center-scale", dc.center_scale);
  gen->add_option("--noise-std", dc.noise_std);
  gen->add_option("--seed", dc.seed);
  gen->add_option("--test-fraction", dc.test_fraction);

  // run
  auto* run = app.add_subcommand("run", "run an incremental experiment");
  std::string run_config, run_out;
  std::vector<std::string> run_sets;
  std::optional<std::uint64_t> run_seed;
  run->add_option("--config", run_config, "config JSON path")->required();
  run->add_option("--out", run_out, "output directory")->required();
  run->add_option("--set", run_sets, "config override key.path=value")
      ->take_all();
  run->add_option("--seed", run_seed, "override train.rng_seed");

  // eval
  auto* eval = app.add_subcommand("eval", "evaluate a checkpoint on a CSV dataset");
  std::string eval_chk, eval_csv, eval_label = "label";
  eval->add_option("--checkpoint", eval_chk)->required();
  eval->add_option("--csv", eval_csv)->required();
  eval->add_option("--label-column", eval_label);

  // flops
  auto* fl = app.add_subcommand("flops", "analytical GFLOPs cost model");
  icpl::flops::FlopsModel fm;
  fl->add_option("--iterations", fm.kmeans_iters);
  fl->add_option("--samples", fm.samples);
  fl->add_option("--embed-dim", fm.embed_dim);
  fl->add_option("--clusters", fm.clusters);
  fl->add_option("--training-gflops", fm.training_gflops_per_image);
  fl->add_option("--inference-gflops", fm.inference_gflops_per_image);
  fl->add_option("--epochs", fm.epochs);
  fl->add_option("--tau", fm.step_size);
  fl->add_option("--n-supervised", fm.n_supervised);
  fl->add_option("--n-unsupervised", fm.n_unsupervised);
  fl->add_option("--recompute-count", fm.recompute_count);

  // report
  auto* rep = app.add_subcommand("report", "compare run reports");
  std::vector<std::string> rep_dirs;
  int rep_baseline = -1;
  std::string rep_csv;
  rep->add_option("dirs", rep_dirs, "run output directories")->required();
  rep->add_option("--baseline", rep_baseline, "baseline run index (default: first supervised)");
  rep->add_option("--csv", rep_csv, "also write the table as CSV");

  CLI11_PARSE(app, argc, argv);

  try {
    if (gen->parsed()) return cmd_gen_data(dc, gen_out);
    if (run->parsed()) return cmd_run(run_config, run_out, run_sets, run_seed);
    if (eval->parsed()) return cmd_eval(eval_chk, eval_csv, eval_label);
    if (fl->parsed()) return cmd_flops(fm);
    if (rep->parsed()) return cmd_report(rep_dirs, rep_baseline, rep_csv);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
