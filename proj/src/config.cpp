#include "icpl/config.hpp"

#include <fstream>
#include <set>

#include "icpl/errors.hpp"

namespace icpl::config {

namespace {

void check_keys(const Json& j, const std::set<std::string>& known,
                const std::string& context) {
  if (!j.is_object())
    throw ParseError("config: '" + context + "' must be a JSON object");
  for (const auto& [key, value] : j.items())
    if (!known.count(key))
      throw ParseError("config: unknown key '" + key + "' in " + context);
}

template <typename T>
T get_or(const Json& j, const std::string& key, T fallback) {
  if (!j.contains(key) || j.at(key).is_null()) return fallback;
  try {
    return j.at(key).get<T>();
  } catch (const nlohmann::json::exception& e) {
    throw ParseError("config: bad value for '" + key + "': " + e.what());
  }
}

DatasetConfig parse_dataset(const Json& j) {
  DatasetConfig dc;
  check_keys(j, {"kind", "classes", "per_class", "dim", "center_scale", "noise_std",
                 "seed", "test_fraction", "train", "test", "label_column",
                 "train_images", "train_labels", "test_images", "test_labels",
                 "standardize"},
             "dataset");
  dc.kind = get_or<std::string>(j, "kind", dc.kind);
  if (dc.kind != "synthetic" && dc.kind != "csv" && dc.kind != "cifar100" &&
      dc.kind != "idx")
    throw ParseError("config: dataset.kind must be synthetic|csv|cifar100|idx");
  dc.classes = get_or(j, "classes", dc.classes);
  dc.per_class = get_or(j, "per_class", dc.per_class);
  dc.dim = get_or(j, "dim", dc.dim);
  dc.center_scale = get_or(j, "center_scale", dc.center_scale);
  dc.noise_std = get_or(j, "noise_std", dc.noise_std);
  dc.seed = get_or(j, "seed", dc.seed);
  dc.test_fraction = get_or(j, "test_fraction", dc.test_fraction);
  dc.train_path = get_or<std::string>(j, "train", dc.train_path);
  dc.test_path = get_or<std::string>(j, "test", dc.test_path);
  dc.label_column = get_or<std::string>(j, "label_column", dc.label_column);
  dc.train_images = get_or<std::string>(j, "train_images", dc.train_images);
  dc.train_labels = get_or<std::string>(j, "train_labels", dc.train_labels);
  dc.test_images = get_or<std::string>(j, "test_images", dc.test_images);
  dc.test_labels = get_or<std::string>(j, "test_labels", dc.test_labels);
  dc.standardize = get_or(j, "standardize", dc.standardize);
  return dc;
}

void apply_profile(const std::string& profile, nn::TrainConfig& train) {
  if (profile == "desk") {
    train.epochs = 60;
    train.batch_size = 64;
    train.lr_decay_epochs = {30, 45};
  } else if (profile == "paper") {
    train.epochs = 170;
    train.batch_size = 128;
    train.lr_decay_epochs = {80, 120};
  } else {
    throw ParseError("config: profile must be 'desk' or 'paper'");
  }
  train.lr = 0.1;
  train.momentum = 0.9;
  train.lr_decay_factor = 0.1;
}

nn::TrainConfig parse_train(const Json& j, const std::string& profile) {
  nn::TrainConfig t;
  apply_profile(profile, t);
  check_keys(j, {"epochs", "batch_size", "lr", "momentum", "lr_decay_factor",
                 "lr_decay_epochs", "mixup_alpha", "augment_noise_std", "rng_seed"},
             "train");
  t.epochs = get_or(j, "epochs", t.epochs);
  t.batch_size = get_or(j, "batch_size", t.batch_size);
  t.lr = get_or(j, "lr", t.lr);
  t.momentum = get_or(j, "momentum", t.momentum);
  t.lr_decay_factor = get_or(j, "lr_decay_factor", t.lr_decay_factor);
  t.lr_decay_epochs = get_or(j, "lr_decay_epochs", t.lr_decay_epochs);
  t.mixup_alpha = get_or(j, "mixup_alpha", t.mixup_alpha);
  t.augment_noise_std = get_or(j, "augment_noise_std", t.augment_noise_std);
  t.rng_seed = get_or(j, "rng_seed", t.rng_seed);
  return t;
}

strategy::StrategySpec parse_strategy(const Json& j) {
  check_keys(j, {"kind", "use_mixup", "use_class_weights", "distill_temperature",
                 "distill_weight"},
             "strategy");
  const auto kind =
      strategy::kind_from_string(get_or<std::string>(j, "kind", "replay"));
  strategy::StrategySpec spec = strategy::StrategySpec::defaults(kind);
  spec.use_mixup = get_or(j, "use_mixup", spec.use_mixup);
  spec.use_class_weights = get_or(j, "use_class_weights", spec.use_class_weights);
  spec.distill_temperature = get_or(j, "distill_temperature", spec.distill_temperature);
  spec.distill_weight = get_or(j, "distill_weight", spec.distill_weight);
  return spec;
}

}  // namespace

FullConfig parse_config(const Json& j) {
  check_keys(j, {"profile", "dataset", "stream", "network", "train", "strategy",
                 "pseudo_labels", "memory_budget", "supervised"},
             "config");
  FullConfig cfg;
  if (j.contains("dataset")) cfg.dataset = parse_dataset(j.at("dataset"));

  const auto profile = get_or<std::string>(j, "profile", "desk");

  const Json stream = j.contains("stream") ? j.at("stream") : Json::object();
  check_keys(stream, {"base_classes", "inc_classes", "shuffle_seed"}, "stream");
  cfg.run.base_classes = get_or(stream, "base_classes", 0);
  cfg.run.inc_classes = get_or(stream, "inc_classes", 2);
  cfg.run.shuffle_seed = get_or<std::uint64_t>(stream, "shuffle_seed", 1993);

  const Json network = j.contains("network") ? j.at("network") : Json::object();
  check_keys(network, {"input_dim", "hidden_dims", "embedding_dim"}, "network");
  cfg.run.network.input_dim = get_or(network, "input_dim", 0);  // 0: from dataset
  cfg.run.network.hidden_dims =
      get_or<std::vector<int>>(network, "hidden_dims", {64});
  cfg.run.network.embedding_dim = get_or(network, "embedding_dim", 32);

  cfg.run.train =
      parse_train(j.contains("train") ? j.at("train") : Json::object(), profile);
  cfg.run.strategy =
      parse_strategy(j.contains("strategy") ? j.at("strategy") : Json::object());

  const Json pl = j.contains("pseudo_labels") ? j.at("pseudo_labels") : Json::object();
  check_keys(pl, {"alpha", "tau", "kmeans_max_iter", "kmeans_n_init"}, "pseudo_labels");
  cfg.run.pseudo.alpha = get_or(pl, "alpha", cfg.run.pseudo.alpha);
  if (pl.contains("tau") && pl.at("tau").is_null())
    cfg.run.pseudo.tau = std::nullopt;
  else if (pl.contains("tau"))
    cfg.run.pseudo.tau = pl.at("tau").get<int>();
  cfg.run.pseudo.kmeans_max_iter =
      get_or(pl, "kmeans_max_iter", cfg.run.pseudo.kmeans_max_iter);
  cfg.run.pseudo.kmeans_n_init =
      get_or(pl, "kmeans_n_init", cfg.run.pseudo.kmeans_n_init);

  cfg.run.memory_budget = get_or(j, "memory_budget", 2000);
  cfg.run.supervised = get_or(j, "supervised", false);
  return cfg;
}

FullConfig load_config_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("config: cannot open " + path.string());
  Json j;
  try {
    j = Json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw ParseError("config: " + path.string() + ": " + e.what());
  }
  return parse_config(j);
}

void apply_override(Json& j, const std::string& key_value) {
  const auto eq = key_value.find('=');
  if (eq == std::string::npos || eq == 0)
    throw ArgumentError("override must look like key.path=value: " + key_value);
  const std::string path = key_value.substr(0, eq);
  const std::string raw = key_value.substr(eq + 1);

  Json value;
  try {
    value = Json::parse(raw);
  } catch (const nlohmann::json::exception&) {
    value = raw;  // unquoted strings, e.g. strategy.kind=wa
  }

  Json* node = &j;
  std::size_t start = 0;
  for (;;) {
    const auto dot = path.find('.', start);
    const std::string key = path.substr(start, dot - start);
    if (key.empty()) throw ArgumentError("override has an empty path segment");
    if (dot == std::string::npos) {
      (*node)[key] = value;
      break;
    }
    node = &(*node)[key];
    start = dot + 1;
  }
}

Json canonical_config(const FullConfig& cfg) {
  Json d;
  d["kind"] = cfg.dataset.kind;
  if (cfg.dataset.kind == "synthetic") {
    d["classes"] = cfg.dataset.classes;
    d["per_class"] = cfg.dataset.per_class;
    d["dim"] = cfg.dataset.dim;
    d["center_scale"] = cfg.dataset.center_scale;
    d["noise_std"] = cfg.dataset.noise_std;
    d["seed"] = cfg.dataset.seed;
    d["test_fraction"] = cfg.dataset.test_fraction;
  } else if (cfg.dataset.kind == "csv") {
    d["train"] = cfg.dataset.train_path;
    d["test"] = cfg.dataset.test_path;
    d["label_column"] = cfg.dataset.label_column;
  } else if (cfg.dataset.kind == "cifar100") {
    d["train"] = cfg.dataset.train_path;
    d["test"] = cfg.dataset.test_path;
  } else {
    d["train_images"] = cfg.dataset.train_images;
    d["train_labels"] = cfg.dataset.train_labels;
    d["test_images"] = cfg.dataset.test_images;
    d["test_labels"] = cfg.dataset.test_labels;
  }
  d["standardize"] = cfg.dataset.standardize;

  Json j;
  j["dataset"] = d;
  j["stream"] = {{"base_classes", cfg.run.base_classes},
                 {"inc_classes", cfg.run.inc_classes},
                 {"shuffle_seed", cfg.run.shuffle_seed}};
  j["network"] = {{"input_dim", cfg.run.network.input_dim},
                  {"hidden_dims", cfg.run.network.hidden_dims},
                  {"embedding_dim", cfg.run.network.embedding_dim}};
  j["train"] = {{"epochs", cfg.run.train.epochs},
                {"batch_size", cfg.run.train.batch_size},
                {"lr", cfg.run.train.lr},
                {"momentum", cfg.run.train.momentum},
                {"lr_decay_factor", cfg.run.train.lr_decay_factor},
                {"lr_decay_epochs", cfg.run.train.lr_decay_epochs},
                {"mixup_alpha", cfg.run.train.mixup_alpha},
                {"augment_noise_std", cfg.run.train.augment_noise_std},
                {"rng_seed", cfg.run.train.rng_seed}};
  j["strategy"] = {{"kind", strategy::to_string(cfg.run.strategy.kind)},
                   {"use_mixup", cfg.run.strategy.use_mixup},
                   {"use_class_weights", cfg.run.strategy.use_class_weights},
                   {"distill_temperature", cfg.run.strategy.distill_temperature},
                   {"distill_weight", cfg.run.strategy.distill_weight}};
  Json pl;
  pl["alpha"] = cfg.run.pseudo.alpha;
  if (cfg.run.pseudo.tau)
    pl["tau"] = *cfg.run.pseudo.tau;
  else
    pl["tau"] = nullptr;
  pl["kmeans_max_iter"] = cfg.run.pseudo.kmeans_max_iter;
  pl["kmeans_n_init"] = cfg.run.pseudo.kmeans_n_init;
  j["pseudo_labels"] = pl;
  j["memory_budget"] = cfg.run.memory_budget;
  j["supervised"] = cfg.run.supervised;
  return j;
}

LoadedData load_dataset(const DatasetConfig& dc) {
  LoadedData out;
  if (dc.kind == "synthetic") {
    auto [train, test] =
        data::synth_gaussian(dc.classes, dc.per_class, dc.dim, dc.center_scale,
                             dc.noise_std, dc.seed, dc.test_fraction);
    out.train = std::move(train);
    out.test = std::move(test);
  } else if (dc.kind == "csv") {
    out.train = data::load_csv(dc.train_path, dc.label_column);
    out.test = data::load_csv(dc.test_path, dc.label_column);
    out.test.split = data::Split::Test;
  } else if (dc.kind == "cifar100") {
    out.train = data::load_cifar100_binary(dc.train_path);
    out.test = data::load_cifar100_binary(dc.test_path);
    out.test.split = data::Split::Test;
  } else if (dc.kind == "idx") {
    out.train = data::load_idx(dc.train_images, dc.train_labels);
    out.test = data::load_idx(dc.test_images, dc.test_labels);
    out.test.split = data::Split::Test;
  } else {
    throw ArgumentError("dataset: unknown kind " + dc.kind);
  }
  if (dc.standardize) {
    out.standardizer = data::Standardizer::fit(out.train.samples);
    out.train.samples = out.standardizer->apply(out.train.samples);
    out.test.samples = out.standardizer->apply(out.test.samples);
  }
  return out;
}

}  // namespace icpl::config
