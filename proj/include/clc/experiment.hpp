#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "clc/baselines.hpp"
#include "clc/clc.hpp"
#include "clc/dataset.hpp"
#include "clc/metrics.hpp"
#include "clc/noise.hpp"
#include "clc/training.hpp"

namespace clc {

inline constexpr int kExitOk = 0;
inline constexpr int kExitRuntime = 1;
inline constexpr int kExitConfig = 2;
inline constexpr int kExitData = 3;
inline constexpr int kExitOutput = 4;

enum class Method {
  standard,
  bootstrap,
  forward,
  decouple,
  self_paced,
  co_teaching,
  co_distillation,
  slc,
  clc,
};

std::string to_string(Method method);
Method parse_method(const std::string& name);
MetricsLayout layout_of(Method method);

struct DatasetConfig {
  std::string kind = "blobs";  // blobs | rings | idx
  std::size_t classes = 4;
  std::size_t n_per_class = 250;
  std::size_t dim = 2;
  double separation = 10.0;
  double noise_std = 0.1;
  std::filesystem::path images, labels, test_images, test_labels;
  std::size_t max_n = 0;
  std::size_t test_max_n = 0;
  double test_fraction = 0.2;
};

struct ExperimentConfig {
  DatasetConfig dataset;
  NoiseSpec noise;
  Method method = Method::clc;
  TrainSettings train;
  double alpha = 0.1;
  double beta = 0.5;
  GammaPolicy gamma = GammaPolicy::automatic();
  bool gamma_from_both = false;
  bool hard_pseudo_labels = false;
  double bootstrap_kappa = 0.95;
  double codistill_lambda = 1.0;
  std::optional<double> side_noise_ratio;  // defaults to noise.ratio
  std::size_t schedule_epochs = 10;
  std::size_t summary_last_k = 10;
  std::filesystem::path output_dir = "results";
  nlohmann::json source;  // the document as read

  ClcConfig clc_config() const;
  BaselineConfig baseline_config() const;
};

// Strict parsing: unknown keys, wrong types and out-of-range values throw
// ConfigError.
ExperimentConfig parse_experiment_config(const nlohmann::json& doc);
ExperimentConfig load_experiment_config(const std::filesystem::path& path);

// Train and test splits with noise injected into the training labels only.
struct PreparedData {
  LabeledDataset train;
  LabeledDataset test;
  TransitionMatrix transition;
};

PreparedData prepare_data(const ExperimentConfig& config);

struct ExperimentOutcome {
  PreparedData data;
  TrainResult result;
  Summary summary;
};

ExperimentOutcome execute_experiment(const ExperimentConfig& config);

// Writes metrics.csv, summary.json and transition.json into `dir`.
void write_results(const ExperimentConfig& config, const ExperimentOutcome& outcome,
                   const std::filesystem::path& dir);

nlohmann::json summary_json(const ExperimentConfig& config, const ExperimentOutcome& outcome);
nlohmann::json transition_json(const NoiseSpec& spec, const TransitionMatrix& t);

struct RunOverrides {
  std::optional<std::filesystem::path> out;
  std::optional<std::uint64_t> seed;
};

// Full run from a config file; returns one of the kExit* codes and reports
// failures on `err`.
int run_experiment(const std::filesystem::path& config_path, const RunOverrides& overrides,
                   std::ostream& out, std::ostream& err);

// Runs every *.json config in `config_dir` (sorted by filename) into
// out_dir/<stem>/ and writes out_dir/comparison.csv. Returns the first
// nonzero run status, or kExitOk.
int sweep(const std::filesystem::path& config_dir, const std::filesystem::path& out_dir,
          std::size_t jobs, std::ostream& out, std::ostream& err);

}  // namespace clc
