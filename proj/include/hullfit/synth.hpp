#pragma once
// Bundled synthetic data: regression targets drawn from a known convex
// combination of basis modules (so the realizable loss floor is zero), and
// the circle point set used by the shattering demo.

#include <cstdint>
#include <string>

#include "hullfit/dataset.hpp"
#include "hullfit/ensemble.hpp"

namespace hullfit {

struct SynthSpec {
  std::size_t n = 1000;
  std::size_t dim = 10;
  std::size_t atoms = 5;       // size of the generating combination
  std::size_t hidden = 4;      // hidden width of the generator modules
  double bound = 10.0;
  double noise_sd = 0.0;
  std::uint64_t seed = 0;
};

struct SynthData {
  Dataset data;               // task = regression, target name "y"
  ConvexEnsemble generator;   // the f* that produced the targets
};

SynthData synth_conv_regression(const SynthSpec& spec);

// k circle points labeled by a seeded coin, as a 2-feature classification set.
Dataset synth_circle_labels(std::size_t k, std::uint64_t seed);

void write_csv(const Dataset& d, const std::string& path);

}  // namespace hullfit
