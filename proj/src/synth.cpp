#include "hullfit/synth.hpp"

#include <cstdio>
#include <fstream>
#include <stdexcept>

#include "hullfit/capacity.hpp"
#include "hullfit/rng.hpp"

namespace hullfit {

SynthData synth_conv_regression(const SynthSpec& spec) {
  if (spec.atoms == 0 || spec.n == 0 || spec.dim == 0)
    throw std::invalid_argument("synth spec dimensions must be positive");
  Rng rng(spec.seed);

  ModuleShape shape{spec.dim, spec.hidden, 1, spec.bound};
  std::vector<BasisModule> atoms;
  Rng init_rng = rng.child(1);
  for (std::size_t j = 0; j < spec.atoms; ++j) {
    BasisModule g = init_module(init_rng.raw(), shape);
    // Spread the hidden kinks around; fan-in init leaves biases at zero.
    for (double& b : g.b1()) b = init_rng.uniform(-0.5, 0.5);
    atoms.push_back(std::move(g));
  }
  std::vector<double> w(spec.atoms);
  double total = 0.0;
  for (double& wi : w) {
    wi = init_rng.uniform(0.05, 1.0);
    total += wi;
  }
  for (double& wi : w) wi /= total;
  ConvexEnsemble generator =
      ConvexEnsemble::from_parts(std::move(atoms), std::move(w));

  Rng data_rng = rng.child(2);
  Dataset d;
  d.task = Task::regression;
  d.features = Matrix(spec.n, spec.dim);
  for (std::size_t i = 0; i < d.features.size(); ++i)
    d.features.data()[i] = data_rng.normal();
  d.targets.resize(spec.n);
  std::vector<double> out(1);
  for (std::size_t i = 0; i < spec.n; ++i) {
    generator.predict(d.features.row(i), out);
    d.targets[i] = out[0];
    if (spec.noise_sd > 0.0) d.targets[i] += spec.noise_sd * data_rng.normal();
  }
  for (std::size_t c = 0; c < spec.dim; ++c)
    d.feature_names.push_back("x" + std::to_string(c));
  return {std::move(d), std::move(generator)};
}

Dataset synth_circle_labels(std::size_t k, std::uint64_t seed) {
  const auto pts = capacity::circle_points(k);
  Rng rng(seed);
  Dataset d;
  d.task = Task::classification;
  d.num_classes = 2;
  d.features = Matrix(k, 2);
  d.targets.resize(k);
  for (std::size_t j = 0; j < k; ++j) {
    d.features(j, 0) = pts[j][0];
    d.features(j, 1) = pts[j][1];
    d.targets[j] = rng.coin() ? 1.0 : 0.0;
  }
  d.feature_names = {"x0", "x1"};
  return d;
}

void write_csv(const Dataset& d, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write csv: " + path);
  for (std::size_t c = 0; c < d.dim(); ++c) {
    const std::string name =
        c < d.feature_names.size() ? d.feature_names[c] : "x" + std::to_string(c);
    out << name << ",";
  }
  out << "y\n";
  char buf[32];
  for (std::size_t i = 0; i < d.size(); ++i) {
    for (std::size_t c = 0; c < d.dim(); ++c) {
      std::snprintf(buf, sizeof buf, "%.17g", d.features(i, c));
      out << buf << ",";
    }
    std::snprintf(buf, sizeof buf, "%.17g", d.targets[i]);
    out << buf << "\n";
  }
}

}  // namespace hullfit
