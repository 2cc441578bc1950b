#pragma once

#include <optional>

#include "clc/dataset.hpp"
#include "clc/metrics.hpp"
#include "clc/mlp.hpp"
#include "clc/training.hpp"

namespace clc {

// Metric-only access to ground truth. Holds the clean training labels and
// the test set; trainers hand it networks and epoch statistics but never
// see the labels it holds.
class Evaluator {
 public:
  Evaluator(const LabeledDataset& train, const LabeledDataset& test);

  EpochMetrics evaluate(int epoch, const MlpNetwork& f, const MlpNetwork* g,
                        const EpochStats& stats, std::optional<double> gamma,
                        MetricsLayout layout) const;

  double test_accuracy(const MlpNetwork& net) const;

 private:
  const LabeledDataset& train_;
  const LabeledDataset& test_;
};

}  // namespace clc
