#include "hullfit/model_io.hpp"

#include <cstdio>

#include "doctest.h"
#include "hullfit/rng.hpp"
#include "hullfit/synth.hpp"

using namespace hullfit;

TEST_CASE("model json round trip reproduces predictions bit for bit") {
  const SynthData sd = synth_conv_regression(
      SynthSpec{.n = 20, .dim = 3, .atoms = 4, .hidden = 2, .bound = 6.0,
                .noise_sd = 0.0, .seed = 81});
  ModelFile model;
  model.task = Task::regression;
  model.loss = "mse";
  model.ensemble = sd.generator;
  model.norm_stats.columns = {"a", "b", "c"};
  model.norm_stats.mean = {0.25, -1.5, 3.0};
  model.norm_stats.std_dev = {1.0, 2.0, 0.5};

  const ModelFile back = model_from_json(model_to_json(model));
  CHECK(back.task == Task::regression);
  CHECK(back.loss == "mse");
  REQUIRE(back.ensemble.size() == model.ensemble.size());
  CHECK(back.ensemble.weights() == model.ensemble.weights());
  for (std::size_t j = 0; j < back.ensemble.size(); ++j)
    CHECK(back.ensemble.atom(j).to_vector() ==
          model.ensemble.atom(j).to_vector());

  for (std::size_t i = 0; i < sd.data.size(); ++i) {
    const auto a = model.ensemble.predict(sd.data.features.row(i));
    const auto b = back.ensemble.predict(sd.data.features.row(i));
    CHECK(a == b);  // bit-identical after serialization
  }

  const NormStats stats = back.norm_stats.reordered({"a", "b", "c"});
  CHECK(stats.mean == model.norm_stats.mean);
  CHECK(stats.std_dev == model.norm_stats.std_dev);
}

TEST_CASE("save_model / load_model round trip via disk") {
  const SynthData sd = synth_conv_regression(
      SynthSpec{.n = 10, .dim = 2, .atoms = 2, .hidden = 1, .bound = 4.0,
                .noise_sd = 0.0, .seed = 82});
  ModelFile model;
  model.task = Task::regression;
  model.loss = "lq:1.500000";
  model.ensemble = sd.generator;
  model.norm_stats.columns = {"x0", "x1"};
  model.norm_stats.mean = {0.0, 0.0};
  model.norm_stats.std_dev = {1.0, 1.0};

  const std::string path = "model_io_test.json";
  save_model(model, path);
  const ModelFile back = load_model(path);
  CHECK(back.loss == model.loss);
  CHECK(back.ensemble.weights() == model.ensemble.weights());
  std::remove(path.c_str());

  CHECK_THROWS(load_model("no_such_model.json"));
}

TEST_CASE("malformed model json is rejected") {
  CHECK_THROWS(model_from_json("{}"));
  CHECK_THROWS(model_from_json(
      R"({"B":1,"task":"reg","loss":"mse","atoms":[],"weights":[],)"
      R"("norm_stats":{}})"));
}
