#pragma once
// Model persistence. A model file is JSON:
//   {B, task, loss, atoms: [{d, h, m, B, W1, b1, W2, b2}, ...],
//    weights: [...], norm_stats: {column: {mean, std}, ...}}

#include <string>

#include "hullfit/basis.hpp"
#include "hullfit/dataset.hpp"
#include "hullfit/ensemble.hpp"

namespace hullfit {

struct ModelFile {
  ConvexEnsemble ensemble;
  Task task = Task::regression;
  std::string loss = "mse";
  NormStats norm_stats;
};

std::string model_to_json(const ModelFile& model);
ModelFile model_from_json(const std::string& text);

void save_model(const ModelFile& model, const std::string& path);
ModelFile load_model(const std::string& path);

}  // namespace hullfit
