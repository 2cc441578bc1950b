#include "clc/experiment.hpp"

#include <algorithm>
#include <fstream>
#include <map>
#include <mutex>
#include <set>
#include <sstream>
#include <thread>

#include "clc/errors.hpp"
#include "clc/evaluation.hpp"

namespace clc {

using nlohmann::json;

namespace {

constexpr Method kMethods[] = {Method::standard,   Method::bootstrap,   Method::forward,
                               Method::decouple,   Method::self_paced,  Method::co_teaching,
                               Method::co_distillation, Method::slc,    Method::clc};

void require_keys(const json& obj, const std::string& where, std::set<std::string> allowed) {
  if (!obj.is_object()) throw ConfigError(where + ": expected an object");
  for (const auto& [key, value] : obj.items())
    if (!allowed.count(key)) throw ConfigError(where + ": unknown key '" + key + "'");
}

template <typename T>
void read(const json& obj, const char* key, T& target, const std::string& where) {
  if (!obj.contains(key)) return;
  try {
    target = obj.at(key).get<T>();
  } catch (const json::exception& e) {
    throw ConfigError(where + "." + key + ": " + e.what());
  }
}

void read_count(const json& obj, const char* key, std::size_t& target, const std::string& where) {
  if (!obj.contains(key)) return;
  const auto& v = obj.at(key);
  if (!v.is_number_integer() || v.get<std::int64_t>() < 0)
    throw ConfigError(where + "." + key + ": expected a non-negative integer");
  target = v.get<std::size_t>();
}

void read_path(const json& obj, const char* key, std::filesystem::path& target,
               const std::string& where) {
  std::string s;
  read(obj, key, s, where);
  if (!s.empty()) target = s;
}

BaselineMethod baseline_of(Method m) {
  switch (m) {
    case Method::standard: return BaselineMethod::standard;
    case Method::bootstrap: return BaselineMethod::bootstrap;
    case Method::forward: return BaselineMethod::forward;
    case Method::decouple: return BaselineMethod::decouple;
    case Method::self_paced: return BaselineMethod::self_paced;
    case Method::co_teaching: return BaselineMethod::co_teaching;
    case Method::co_distillation: return BaselineMethod::co_distillation;
    default: throw ConfigError("not a baseline method: " + to_string(m));
  }
}

json matrix_json(const Matrix& m) {
  json rows = json::array();
  for (std::size_t r = 0; r < m.rows(); ++r) rows.push_back(std::vector<double>(m.row(r).begin(), m.row(r).end()));
  return rows;
}

json confusion_json(const ConfusionMatrix& cm, const char* rows, const char* cols) {
  json counts = json::array();
  for (std::size_t i = 0; i < cm.classes; ++i) {
    json row = json::array();
    for (std::size_t j = 0; j < cm.classes; ++j) row.push_back(cm.count(i, j));
    counts.push_back(row);
  }
  return {{"rows", rows}, {"cols", cols}, {"counts", counts}, {"normalized", matrix_json(cm.normalized())}};
}

void write_text(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw OutputError("cannot write " + path.string());
  out << text;
  if (!out) throw OutputError("write failed for " + path.string());
}

}  // namespace

std::string to_string(Method method) {
  switch (method) {
    case Method::slc: return "slc";
    case Method::clc: return "clc";
    default: return to_string(baseline_of(method));
  }
}

Method parse_method(const std::string& name) {
  for (auto m : kMethods)
    if (to_string(m) == name) return m;
  throw ConfigError("unknown method '" + name + "'");
}

MetricsLayout layout_of(Method method) {
  switch (method) {
    case Method::decouple:
    case Method::co_teaching:
    case Method::co_distillation: return MetricsLayout::dual;
    case Method::slc: return MetricsLayout::slc;
    case Method::clc: return MetricsLayout::clc;
    default: return MetricsLayout::single;
  }
}

ClcConfig ExperimentConfig::clc_config() const {
  ClcConfig c;
  c.train = train;
  c.alpha = alpha;
  c.beta = beta;
  c.gamma = gamma;
  c.hard_pseudo_labels = hard_pseudo_labels;
  c.gamma_from_both = gamma_from_both;
  return c;
}

BaselineConfig ExperimentConfig::baseline_config() const {
  BaselineConfig c;
  c.method = baseline_of(method);
  c.train = train;
  c.bootstrap_kappa = bootstrap_kappa;
  c.codistill_lambda = codistill_lambda;
  c.noise_ratio = side_noise_ratio.value_or(noise.ratio);
  c.schedule_epochs = schedule_epochs;
  return c;
}

ExperimentConfig parse_experiment_config(const json& doc) {
  require_keys(doc, "config", {"dataset", "noise", "method", "model", "train", "output"});
  ExperimentConfig c;
  c.source = doc;

  if (!doc.contains("method")) throw ConfigError("config: 'method' is required");
  std::string method;
  read(doc, "method", method, "config");
  c.method = parse_method(method);

  if (doc.contains("dataset")) {
    const auto& d = doc.at("dataset");
    require_keys(d, "dataset",
                 {"kind", "classes", "n_per_class", "dim", "separation", "noise_std", "images",
                  "labels", "max_n", "test_images", "test_labels", "test_max_n", "test_fraction"});
    auto& ds = c.dataset;
    read(d, "kind", ds.kind, "dataset");
    if (ds.kind != "blobs" && ds.kind != "rings" && ds.kind != "idx")
      throw ConfigError("dataset.kind must be blobs, rings or idx");
    read_count(d, "classes", ds.classes, "dataset");
    read_count(d, "n_per_class", ds.n_per_class, "dataset");
    read_count(d, "dim", ds.dim, "dataset");
    read(d, "separation", ds.separation, "dataset");
    read(d, "noise_std", ds.noise_std, "dataset");
    read_path(d, "images", ds.images, "dataset");
    read_path(d, "labels", ds.labels, "dataset");
    read_path(d, "test_images", ds.test_images, "dataset");
    read_path(d, "test_labels", ds.test_labels, "dataset");
    read_count(d, "max_n", ds.max_n, "dataset");
    read_count(d, "test_max_n", ds.test_max_n, "dataset");
    read(d, "test_fraction", ds.test_fraction, "dataset");
    if (ds.kind == "idx" && (ds.images.empty() || ds.labels.empty()))
      throw ConfigError("dataset: idx needs 'images' and 'labels'");
    if (ds.test_images.empty() != ds.test_labels.empty())
      throw ConfigError("dataset: 'test_images' and 'test_labels' go together");
    if (!(ds.test_fraction > 0.0 && ds.test_fraction < 1.0))
      throw ConfigError("dataset.test_fraction must lie in (0, 1)");
  }

  if (doc.contains("noise")) {
    const auto& n = doc.at("noise");
    require_keys(n, "noise", {"kind", "ratio", "pairs", "seed"});
    std::string kind = "symmetric";
    read(n, "kind", kind, "noise");
    c.noise.kind = parse_noise_kind(kind);
    read(n, "ratio", c.noise.ratio, "noise");
    if (!(c.noise.ratio >= 0.0 && c.noise.ratio < 1.0))
      throw ConfigError("noise.ratio must lie in [0, 1)");
    if (n.contains("pairs")) {
      if (c.noise.kind != NoiseKind::asymmetric)
        throw ConfigError("noise.pairs only applies to asymmetric noise");
      read(n, "pairs", c.noise.pairs, "noise");
    }
    if (n.contains("seed")) {
      std::uint64_t seed = 0;
      read(n, "seed", seed, "noise");
      c.noise.seed = seed;
    }
  }

  if (doc.contains("model")) {
    const auto& m = doc.at("model");
    require_keys(m, "model", {"hidden"});
    read(m, "hidden", c.train.hidden_dims, "model");
  }

  bool noise_seed_given = doc.contains("noise") && doc.at("noise").contains("seed");
  if (doc.contains("train")) {
    const auto& t = doc.at("train");
    require_keys(t, "train",
                 {"epochs", "batch_size", "learning_rate", "warm_up_epochs", "alpha", "beta",
                  "gamma", "gamma_from_both", "hard_pseudo_labels", "bootstrap_kappa",
                  "codistill_lambda", "noise_ratio", "schedule_epochs", "seed", "summary_last_k"});
    read_count(t, "epochs", c.train.epochs, "train");
    read_count(t, "batch_size", c.train.batch_size, "train");
    read(t, "learning_rate", c.train.learning_rate, "train");
    read_count(t, "warm_up_epochs", c.train.warm_up_epochs, "train");
    read(t, "alpha", c.alpha, "train");
    read(t, "beta", c.beta, "train");
    if (t.contains("gamma")) {
      const auto& g = t.at("gamma");
      if (g.is_string() && g.get<std::string>() == "auto") {
        c.gamma = GammaPolicy::automatic();
      } else if (g.is_number()) {
        if (!(g.get<double>() >= 0.0)) throw ConfigError("train.gamma must be >= 0");
        c.gamma = GammaPolicy::fixed(g.get<double>());
      } else {
        throw ConfigError("train.gamma must be \"auto\" or a number");
      }
    }
    read(t, "gamma_from_both", c.gamma_from_both, "train");
    read(t, "hard_pseudo_labels", c.hard_pseudo_labels, "train");
    read(t, "bootstrap_kappa", c.bootstrap_kappa, "train");
    read(t, "codistill_lambda", c.codistill_lambda, "train");
    if (t.contains("noise_ratio")) {
      double r = 0.0;
      read(t, "noise_ratio", r, "train");
      c.side_noise_ratio = r;
    }
    read_count(t, "schedule_epochs", c.schedule_epochs, "train");
    read(t, "seed", c.train.seed, "train");
    read_count(t, "summary_last_k", c.summary_last_k, "train");
  }
  if (!noise_seed_given) c.noise.seed = c.train.seed;

  if (doc.contains("output")) {
    const auto& o = doc.at("output");
    require_keys(o, "output", {"directory"});
    read_path(o, "directory", c.output_dir, "output");
  }

  c.train.validate();
  if (c.summary_last_k == 0 || c.summary_last_k > c.train.epochs)
    throw ConfigError("train.summary_last_k must lie in [1, epochs]");
  if (c.method == Method::clc || c.method == Method::slc)
    c.clc_config().validate();
  else
    c.baseline_config().validate();
  return c;
}

ExperimentConfig load_experiment_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config " + path.string());
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::parse_error& e) {
    throw ConfigError(path.string() + ": " + e.what());
  }
  return parse_experiment_config(doc);
}

PreparedData prepare_data(const ExperimentConfig& config) {
  const auto& ds = config.dataset;
  const std::uint64_t seed = config.train.seed;
  LabeledDataset train, test;
  if (ds.kind == "idx") {
    LabeledDataset all = load_idx(ds.images, ds.labels, ds.max_n);
    if (!ds.test_images.empty()) {
      train = std::move(all);
      test = load_idx(ds.test_images, ds.test_labels, ds.test_max_n);
      const auto classes = std::max(train.classes, test.classes);
      train.classes = test.classes = classes;
    } else {
      SeededRng split(seed, "split");
      std::tie(train, test) = train_test_split(all, ds.test_fraction, split);
    }
  } else {
    SeededRng gen(seed, "data");
    LabeledDataset all = ds.kind == "blobs"
                             ? gen_gaussian_blobs(ds.classes, ds.n_per_class, ds.dim, ds.separation, gen)
                             : gen_rings(ds.classes, ds.n_per_class, ds.noise_std, gen);
    SeededRng split(seed, "split");
    std::tie(train, test) = train_test_split(all, ds.test_fraction, split);
  }
  if (train.dim() != test.dim()) throw LoadError("train and test feature dimensions differ");

  TransitionMatrix t = build_transition(config.noise, train.classes);
  SeededRng noise_rng(config.noise.seed, "noise");
  train.noisy_labels = inject_noise(train.clean_labels, t, noise_rng);
  train.validate();
  test.validate();
  return PreparedData{std::move(train), std::move(test), std::move(t)};
}

ExperimentOutcome execute_experiment(const ExperimentConfig& config) {
  PreparedData data = prepare_data(config);
  const Evaluator evaluator(data.train, data.test);
  const TrainView view = train_view(data.train);
  TrainResult result;
  switch (config.method) {
    case Method::clc: result = train_clc(view, evaluator, config.clc_config()); break;
    case Method::slc: result = train_slc(view, evaluator, config.clc_config()); break;
    default: result = train_baseline(view, evaluator, config.baseline_config(), data.transition);
  }
  Summary summary = summarize(result.history, config.summary_last_k);
  return ExperimentOutcome{std::move(data), std::move(result), summary};
}

nlohmann::json transition_json(const NoiseSpec& spec, const TransitionMatrix& t) {
  json pairs = json::array();
  for (auto [s, d] : spec.pairs) pairs.push_back({s, d});
  return {{"kind", to_string(spec.kind)},
          {"ratio", spec.ratio},
          {"classes", t.classes()},
          {"pairs", pairs},
          {"matrix", matrix_json(t.entries())}};
}

nlohmann::json summary_json(const ExperimentConfig& config, const ExperimentOutcome& outcome) {
  const auto& s = outcome.summary;
  const auto& train = outcome.data.train;
  json summary = {{"last_k", s.last_k},
                  {"test_accuracy_mean", s.test_accuracy},
                  {"n_selected_mean", s.n_selected},
                  {"peak_test_accuracy", s.peak_test_accuracy},
                  {"final_test_accuracy", s.final_test_accuracy}};
  summary["test_accuracy_g_mean"] = s.test_accuracy_g ? json(*s.test_accuracy_g) : json(nullptr);
  summary["supervision_precision_mean"] =
      s.supervision_precision ? json(*s.supervision_precision) : json(nullptr);

  std::vector<Label> corrected, clean, noisy;
  for (std::size_t n = 0; n < train.size(); ++n) {
    if (outcome.result.final_targets[n] < 0) continue;
    corrected.push_back(outcome.result.final_targets[n]);
    clean.push_back(train.clean_labels[n]);
    noisy.push_back(train.noisy_labels[n]);
  }
  json confusion = {
      {"samples", corrected.size()},
      {"clean_vs_corrected",
       confusion_json(confusion_matrix(clean, corrected, train.classes), "clean", "corrected")},
      {"corrected_vs_noisy",
       confusion_json(confusion_matrix(corrected, noisy, train.classes), "corrected", "noisy")},
  };

  json out = {{"config", config.source},
              {"method", to_string(config.method)},
              {"seed", config.train.seed},
              {"train_size", train.size()},
              {"test_size", outcome.data.test.size()},
              {"classes", train.classes},
              {"summary", summary},
              {"final_label_confusion", confusion}};
  out["gamma"] = outcome.result.gamma ? json(*outcome.result.gamma) : json(nullptr);
  return out;
}

void write_results(const ExperimentConfig& config, const ExperimentOutcome& outcome,
                   const std::filesystem::path& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw OutputError("cannot create " + dir.string() + ": " + ec.message());
  std::ostringstream csv;
  write_metrics_csv(csv, outcome.result.layout, outcome.result.history);
  write_text(dir / "metrics.csv", csv.str());
  write_text(dir / "summary.json", summary_json(config, outcome).dump(2) + "\n");
  NoiseSpec spec = config.noise;
  if (spec.kind == NoiseKind::asymmetric && spec.pairs.empty())
    spec.pairs = default_asymmetric_pairs(outcome.data.train.classes);
  write_text(dir / "transition.json",
             transition_json(spec, outcome.data.transition).dump(2) + "\n");
}

namespace {

struct RunStatus {
  int code = kExitOk;
  std::string message;
  std::optional<ExperimentConfig> config;
  std::optional<Summary> summary;
  std::optional<double> gamma;
};

RunStatus failure(int code, std::string message) {
  RunStatus status;
  status.code = code;
  status.message = std::move(message);
  return status;
}

RunStatus run_one(const std::filesystem::path& config_path, const RunOverrides& overrides) {
  RunStatus status;
  try {
    ExperimentConfig config = load_experiment_config(config_path);
    if (overrides.seed) {
      config.train.seed = *overrides.seed;
      if (!config.source.contains("noise") || !config.source.at("noise").contains("seed"))
        config.noise.seed = *overrides.seed;
    }
    if (overrides.out) config.output_dir = *overrides.out;
    auto outcome = execute_experiment(config);
    write_results(config, outcome, config.output_dir);
    status.summary = outcome.summary;
    status.gamma = outcome.result.gamma;
    status.config = std::move(config);
  } catch (const ConfigError& e) {
    status = failure(kExitConfig, std::string("config error: ") + e.what());
  } catch (const LoadError& e) {
    status = failure(kExitData, std::string("dataset error: ") + e.what());
  } catch (const OutputError& e) {
    status = failure(kExitOutput, std::string("output error: ") + e.what());
  } catch (const std::exception& e) {
    status = failure(kExitRuntime, std::string("error: ") + e.what());
  }
  return status;
}

}  // namespace

int run_experiment(const std::filesystem::path& config_path, const RunOverrides& overrides,
                   std::ostream& out, std::ostream& err) {
  const auto status = run_one(config_path, overrides);
  if (status.code != kExitOk) {
    err << config_path.string() << ": " << status.message << "\n";
    return status.code;
  }
  const auto& s = *status.summary;
  out << to_string(status.config->method) << ": last-" << s.last_k
      << " test accuracy " << format_real(s.test_accuracy) << ", peak "
      << format_real(s.peak_test_accuracy) << " -> " << status.config->output_dir.string() << "\n";
  return kExitOk;
}

int sweep(const std::filesystem::path& config_dir, const std::filesystem::path& out_dir,
          std::size_t jobs, std::ostream& out, std::ostream& err) {
  std::vector<std::filesystem::path> configs;
  std::error_code ec;
  for (const auto& entry : std::filesystem::directory_iterator(config_dir, ec))
    if (entry.is_regular_file() && entry.path().extension() == ".json") configs.push_back(entry.path());
  if (ec) {
    err << "cannot read " << config_dir.string() << ": " << ec.message() << "\n";
    return kExitConfig;
  }
  std::sort(configs.begin(), configs.end(),
            [](const auto& a, const auto& b) { return a.filename() < b.filename(); });

  std::vector<RunStatus> statuses(configs.size());
  std::mutex next_mutex;
  std::size_t next = 0;
  auto worker = [&] {
    for (;;) {
      std::size_t i;
      {
        std::lock_guard lock(next_mutex);
        if (next >= configs.size()) return;
        i = next++;
      }
      RunOverrides overrides;
      overrides.out = out_dir / configs[i].stem();
      statuses[i] = run_one(configs[i], overrides);
    }
  };
  {
    std::vector<std::jthread> pool;
    for (std::size_t t = 0; t < std::max<std::size_t>(1, jobs); ++t) pool.emplace_back(worker);
  }

  std::ostringstream csv;
  csv << "config,method,dataset,noise_kind,noise_ratio,status,last_k,test_accuracy_mean,"
         "test_accuracy_g_mean,supervision_precision_mean,n_selected_mean,peak_test_accuracy,"
         "final_test_accuracy,gamma\n";
  int first_failure = kExitOk;
  for (std::size_t i = 0; i < configs.size(); ++i) {
    const auto& st = statuses[i];
    csv << configs[i].stem().string() << ",";
    if (st.code != kExitOk) {
      err << configs[i].string() << ": " << st.message << "\n";
      if (first_failure == kExitOk) first_failure = st.code;
      csv << ",,,," << st.code << ",,,,,,,,\n";
      continue;
    }
    const auto& c = *st.config;
    const auto& s = *st.summary;
    csv << to_string(c.method) << "," << c.dataset.kind << "," << to_string(c.noise.kind) << ","
        << format_real(c.noise.ratio) << ",0," << s.last_k << "," << format_real(s.test_accuracy)
        << "," << (s.test_accuracy_g ? format_real(*s.test_accuracy_g) : "") << ","
        << (s.supervision_precision ? format_real(*s.supervision_precision) : "") << ","
        << format_real(s.n_selected) << "," << format_real(s.peak_test_accuracy) << ","
        << format_real(s.final_test_accuracy) << "," << (st.gamma ? format_real(*st.gamma) : "")
        << "\n";
  }
  try {
    std::filesystem::create_directories(out_dir);
    write_text(out_dir / "comparison.csv", csv.str());
  } catch (const std::exception& e) {
    err << "output error: " << e.what() << "\n";
    return kExitOutput;
  }
  out << "sweep: " << configs.size() << " configs -> " << (out_dir / "comparison.csv").string() << "\n";
  return first_failure;
}

}  // namespace clc
