#include "hullfit/metrics.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

#include "json.hpp"

namespace hullfit {

std::size_t predicted_class(const ModelFile& model,
                            std::span<const double> prediction) {
  if (model.task != Task::classification)
    throw std::logic_error("predicted_class on a regression model");
  if (prediction.size() == 1)  // margin model: sign rule
    return prediction[0] >= 0.0 ? 1 : 0;
  std::size_t best = 0;
  for (std::size_t j = 1; j < prediction.size(); ++j)
    if (prediction[j] > prediction[best]) best = j;
  return best;
}

SplitMetrics evaluate_split(const ModelFile& model,
                            const Dataset& normalized) {
  const auto& ens = model.ensemble;
  if (normalized.dim() != ens.atoms().front().shape().input_dim)
    throw std::invalid_argument("dataset dimension does not match the model");
  SplitMetrics m;
  m.n = normalized.size();
  if (m.n == 0) return m;
  const Matrix P = ens.predict_batch(normalized.features);
  if (model.task == Task::regression) {
    double abs_sum = 0.0, sq_sum = 0.0;
    for (std::size_t i = 0; i < m.n; ++i) {
      const double e = P(i, 0) - normalized.targets[i];
      abs_sum += std::abs(e);
      sq_sum += e * e;
    }
    m.mae = abs_sum / static_cast<double>(m.n);
    m.mse = sq_sum / static_cast<double>(m.n);
  } else {
    std::size_t wrong = 0;
    for (std::size_t i = 0; i < m.n; ++i) {
      const std::size_t label = static_cast<std::size_t>(normalized.targets[i]);
      if (predicted_class(model, P.row(i)) != label) ++wrong;
    }
    m.misclass_pct =
        100.0 * static_cast<double>(wrong) / static_cast<double>(m.n);
  }
  return m;
}

MetricsReport evaluate_model(const ModelFile& model, const Dataset& raw,
                             const SplitSpec& spec) {
  const NormStats stats = model.norm_stats.reordered(
      raw.feature_names.empty()
          ? model.norm_stats.columns
          : raw.feature_names);
  const Split parts = split(raw, spec);
  MetricsReport report;
  report.task = model.task;
  report.train = evaluate_split(model, apply_normalization(parts.train, stats));
  report.val = evaluate_split(model, apply_normalization(parts.val, stats));
  report.test = evaluate_split(model, apply_normalization(parts.test, stats));
  report.atom_count = model.ensemble.size();
  report.param_count = model.ensemble.param_count();
  return report;
}

namespace {

nlohmann::json split_json(Task task, const SplitMetrics& m) {
  nlohmann::json j;
  j["n"] = m.n;
  if (task == Task::regression) {
    j["mae"] = m.mae;
    j["mse"] = m.mse;
  } else {
    j["misclass_pct"] = m.misclass_pct;
  }
  return j;
}

}  // namespace

std::string MetricsReport::to_json() const {
  nlohmann::json j;
  j["task"] = task == Task::regression ? "reg" : "cls";
  j["train"] = split_json(task, train);
  j["val"] = split_json(task, val);
  j["test"] = split_json(task, test);
  j["atoms"] = atom_count;
  j["params"] = param_count;
  j["wall_seconds"] = wall_seconds;
  return j.dump(2) + "\n";
}

std::string MetricsReport::to_table() const {
  std::ostringstream os;
  const char* metric =
      task == Task::regression ? "mae / mse" : "misclass %";
  os << "split   n       " << metric << "\n";
  auto line = [&](const char* name, const SplitMetrics& m) {
    os << name << "  " << m.n << "\t";
    if (task == Task::regression)
      os << m.mae << " / " << m.mse;
    else
      os << m.misclass_pct;
    os << "\n";
  };
  line("train", train);
  line("val  ", val);
  line("test ", test);
  os << "atoms: " << atom_count << ", params: " << param_count << "\n";
  return os.str();
}

}  // namespace hullfit
