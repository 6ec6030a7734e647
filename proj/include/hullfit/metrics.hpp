#pragma once
// Per-split evaluation metrics: MAE/MSE on the original target scale for
// regression, misclassification rate (%) for classification.

#include <string>

#include "hullfit/dataset.hpp"
#include "hullfit/model_io.hpp"

namespace hullfit {

struct SplitMetrics {
  std::size_t n = 0;
  double mae = 0.0;        // regression
  double mse = 0.0;        // regression
  double misclass_pct = 0.0;  // classification
};

struct MetricsReport {
  Task task = Task::regression;
  SplitMetrics train, val, test;
  std::size_t atom_count = 0;
  std::size_t param_count = 0;
  double wall_seconds = 0.0;

  std::string to_json() const;
  std::string to_table() const;
};

// Metrics of the model on one already-normalized split.
SplitMetrics evaluate_split(const ModelFile& model, const Dataset& normalized);

// Splits the raw dataset with `spec`, replays the model's stored
// normalization statistics, and reports metrics per split.
MetricsReport evaluate_model(const ModelFile& model, const Dataset& raw,
                             const SplitSpec& spec);

// Class prediction rule: argmax over outputs, or sign for single-output
// margin models.
std::size_t predicted_class(const ModelFile& model,
                            std::span<const double> prediction);

}  // namespace hullfit
