#pragma once
// CSV ingestion, feature normalization, and seeded train/val/test splits.

#include <cstdint>
#include <string>
#include <vector>

#include "hullfit/matrix.hpp"

namespace hullfit {

enum class Task { regression, classification };

Task parse_task(const std::string& name);  // "reg" / "cls"
std::string task_name(Task t);

struct Dataset {
  Matrix features;                  // n x d
  std::vector<double> targets;      // n; class id for classification
  Task task = Task::regression;
  std::size_t num_classes = 0;      // classification only
  std::vector<std::string> feature_names;

  std::size_t size() const { return features.rows(); }
  std::size_t dim() const { return features.cols(); }
  // 1 for regression, num_classes for classification.
  std::size_t output_dim() const;
};

struct SplitSpec {
  std::uint64_t seed = 0;
  double test_fraction = 0.2;
  double val_fraction = 0.2;
};

struct Split {
  Dataset train, val, test;
  std::vector<std::size_t> train_idx, val_idx, test_idx;
};

// Per-column normalization statistics, replayable on held-out data.
struct NormStats {
  std::vector<std::string> columns;
  std::vector<double> mean;
  std::vector<double> std_dev;

  std::string to_json() const;
  static NormStats from_json(const std::string& text);

  // Realigns the per-column entries to the given column order; JSON object
  // keys come back alphabetically sorted, so consumers must match by name.
  NormStats reordered(const std::vector<std::string>& order) const;
};

// Reads a UTF-8 comma-separated file with one header row. The target column
// may be given by name or as a 0-based index into the header. Classification
// targets must be integers 0..K-1.
Dataset load_csv(const std::string& path, const std::string& target_column,
                 Task task);

// Column-wise (x - mean) / std with the population convention (divide by n).
// Constant columns map to zero and record std 1.
std::pair<Dataset, NormStats> normalize(const Dataset& d);

// Replays previously computed statistics, e.g. on validation/test splits.
Dataset apply_normalization(const Dataset& d, const NormStats& stats);

// Seeded shuffle, then carve test first and validation from the remainder.
// Sizes floor(n * fraction) with a one-row minimum per held-out split.
Split split(const Dataset& d, const SplitSpec& s);

}  // namespace hullfit
