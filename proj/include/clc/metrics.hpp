#pragma once

#include <cstddef>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "clc/matrix.hpp"

namespace clc {

// Column set of metrics.csv. single: one-network baselines; dual:
// two-network baselines (adds test_accuracy_g); slc/clc add partition
// counts and the three loss terms.
enum class MetricsLayout { single, dual, slc, clc };

std::string to_string(MetricsLayout layout);
MetricsLayout parse_metrics_layout(const std::string& name);

// One row of metrics.csv. Optional fields are empty cells when absent or not
// part of the layout. Counts are per-epoch totals over all mini-batches.
struct EpochMetrics {
  int epoch = 0;
  double test_accuracy = 0.0;
  std::optional<double> test_accuracy_g;
  std::optional<double> train_supervision_precision;
  std::size_t n_selected = 0;
  std::optional<std::size_t> n_low_f, n_high_f, n_low_g, n_high_g;
  std::optional<double> mean_entropy_correct;
  std::optional<double> mean_entropy_incorrect;
  double mean_entropy_all = 0.0;
  std::optional<double> ce_low, ent_own, ce_high;
  double train_loss = 0.0;
  double train_noisy_accuracy = 0.0;
  std::optional<double> gamma;
  std::optional<std::size_t> low_eval_count;
  std::optional<double> low_eval_precision;

  bool operator==(const EpochMetrics&) const = default;
};

std::vector<std::string> metrics_columns(MetricsLayout layout);

void write_metrics_csv(std::ostream& out, MetricsLayout layout,
                       std::span<const EpochMetrics> history);
std::pair<MetricsLayout, std::vector<EpochMetrics>> parse_metrics_csv(std::istream& in);

// Fixed-point rendering with 6 decimals, as written to metrics.csv.
std::string format_real(double value);
// Rounds every real field the way write_metrics_csv does.
EpochMetrics rounded(const EpochMetrics& m);

// Fraction of supervised samples whose effective label matches the clean
// label. Entries < 0 in effective_targets mark samples that received no
// supervision and are skipped; absent if none were supervised.
std::optional<double> supervision_precision(std::span<const Label> effective_targets,
                                            std::span<const Label> clean_labels);

struct Summary {
  std::size_t last_k = 0;
  double test_accuracy = 0.0;
  std::optional<double> test_accuracy_g;
  std::optional<double> supervision_precision;
  double n_selected = 0.0;
  double peak_test_accuracy = 0.0;
  double final_test_accuracy = 0.0;
};

// Means over the final last_k epochs; throws InvalidInput if last_k is 0 or
// exceeds the history length.
Summary summarize(std::span<const EpochMetrics> history, std::size_t last_k = 10);

}  // namespace clc
