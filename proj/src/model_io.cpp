#include "hullfit/model_io.hpp"

#include <fstream>
#include <stdexcept>

#include "json.hpp"

namespace hullfit {

namespace {

using nlohmann::json;

json matrix_rows(std::span<const double> flat, std::size_t rows,
                 std::size_t cols) {
  json out = json::array();
  for (std::size_t r = 0; r < rows; ++r) {
    json row = json::array();
    for (std::size_t c = 0; c < cols; ++c) row.push_back(flat[r * cols + c]);
    out.push_back(std::move(row));
  }
  return out;
}

void read_matrix_rows(const json& j, std::span<double> flat, std::size_t rows,
                      std::size_t cols, const char* name) {
  if (!j.is_array() || j.size() != rows)
    throw std::runtime_error(std::string("model json: bad shape for ") + name);
  for (std::size_t r = 0; r < rows; ++r) {
    const auto& row = j[r];
    if (!row.is_array() || row.size() != cols)
      throw std::runtime_error(std::string("model json: bad shape for ") +
                               name);
    for (std::size_t c = 0; c < cols; ++c)
      flat[r * cols + c] = row[c].get<double>();
  }
}

json module_to_json(const BasisModule& g) {
  const auto& s = g.shape();
  json j;
  j["d"] = s.input_dim;
  j["h"] = s.hidden;
  j["m"] = s.output_dim;
  j["B"] = s.bound;
  j["W1"] = matrix_rows(g.w1(), s.hidden, s.input_dim);
  j["b1"] = json(std::vector<double>(g.b1().begin(), g.b1().end()));
  j["W2"] = matrix_rows(g.w2(), s.output_dim, s.hidden);
  j["b2"] = json(std::vector<double>(g.b2().begin(), g.b2().end()));
  return j;
}

BasisModule module_from_json(const json& j) {
  ModuleShape s;
  s.input_dim = j.at("d").get<std::size_t>();
  s.hidden = j.at("h").get<std::size_t>();
  s.output_dim = j.at("m").get<std::size_t>();
  s.bound = j.at("B").get<double>();
  BasisModule g(s);
  read_matrix_rows(j.at("W1"), g.w1(), s.hidden, s.input_dim, "W1");
  read_matrix_rows(j.at("W2"), g.w2(), s.output_dim, s.hidden, "W2");
  const auto b1 = j.at("b1").get<std::vector<double>>();
  const auto b2 = j.at("b2").get<std::vector<double>>();
  if (b1.size() != s.hidden || b2.size() != s.output_dim)
    throw std::runtime_error("model json: bad bias length");
  std::copy(b1.begin(), b1.end(), g.b1().begin());
  std::copy(b2.begin(), b2.end(), g.b2().begin());
  return g;
}

}  // namespace

std::string model_to_json(const ModelFile& model) {
  json j;
  j["B"] = model.ensemble.bound();
  j["task"] = model.task == Task::regression ? "reg" : "cls";
  j["loss"] = model.loss;
  j["atoms"] = json::array();
  for (const auto& g : model.ensemble.atoms())
    j["atoms"].push_back(module_to_json(g));
  j["weights"] = model.ensemble.weights();
  j["norm_stats"] = json::parse(model.norm_stats.to_json());
  return j.dump(2) + "\n";
}

ModelFile model_from_json(const std::string& text) {
  const json j = json::parse(text);
  ModelFile model;
  model.task = parse_task(j.at("task").get<std::string>());
  model.loss = j.at("loss").get<std::string>();
  std::vector<BasisModule> atoms;
  for (const auto& a : j.at("atoms")) atoms.push_back(module_from_json(a));
  model.ensemble = ConvexEnsemble::from_parts(
      std::move(atoms), j.at("weights").get<std::vector<double>>());
  model.norm_stats = NormStats::from_json(j.at("norm_stats").dump());
  return model;
}

void save_model(const ModelFile& model, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write model file: " + path);
  out << model_to_json(model);
}

ModelFile load_model(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open model file: " + path);
  std::string text((std::istreambuf_iterator<char>(in)),
                   std::istreambuf_iterator<char>());
  return model_from_json(text);
}

}  // namespace hullfit
