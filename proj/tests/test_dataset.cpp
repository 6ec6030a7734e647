#include "hullfit/dataset.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <set>

#include "doctest.h"
#include "hullfit/rng.hpp"

using namespace hullfit;

namespace {

std::string write_temp(const std::string& text) {
  static int counter = 0;
  std::string path = "dataset_test_" + std::to_string(counter++) + ".csv";
  std::ofstream out(path);
  out << text;
  return path;
}

Dataset random_dataset(std::size_t n, std::size_t d, std::uint64_t seed) {
  Dataset ds;
  ds.task = Task::regression;
  ds.features = Matrix(n, d);
  Rng rng(seed);
  for (std::size_t i = 0; i < ds.features.size(); ++i)
    ds.features.data()[i] = rng.uniform(-5.0, 5.0);
  ds.targets.resize(n);
  for (double& y : ds.targets) y = rng.uniform(-1.0, 1.0);
  return ds;
}

}  // namespace

TEST_CASE("load_csv parses a simple file") {
  const auto path = write_temp("x1,x2,y\n1,2,3\n4,5,6\n7,8,9\n");
  const Dataset d = load_csv(path, "y", Task::regression);
  REQUIRE(d.size() == 3);
  REQUIRE(d.dim() == 2);
  CHECK(d.features(0, 0) == 1.0);
  CHECK(d.features(0, 1) == 2.0);
  CHECK(d.features(2, 0) == 7.0);
  CHECK(d.targets == std::vector<double>{3.0, 6.0, 9.0});
  CHECK(d.feature_names == std::vector<std::string>{"x1", "x2"});
  std::remove(path.c_str());
}

TEST_CASE("load_csv rejects bad input") {
  CHECK_THROWS(load_csv("does_not_exist.csv", "y", Task::regression));

  const auto nan_path = write_temp("a,y\nNaN,1\n");
  CHECK_THROWS_WITH_AS(load_csv(nan_path, "y", Task::regression),
                       doctest::Contains("non-numeric"), std::runtime_error);
  std::remove(nan_path.c_str());

  const auto ok = write_temp("a,y\n1,2\n");
  CHECK_THROWS(load_csv(ok, "missing_column", Task::regression));
  std::remove(ok.c_str());

  const auto frac = write_temp("a,y\n1,0.5\n");
  CHECK_THROWS(load_csv(frac, "y", Task::classification));
  std::remove(frac.c_str());
}

TEST_CASE("classification labels are integer coded") {
  const auto path = write_temp("a,y\n1,0\n2,1\n3,2\n4,1\n");
  const Dataset d = load_csv(path, "y", Task::classification);
  CHECK(d.num_classes == 3);
  CHECK(d.output_dim() == 3);
  CHECK(d.targets == std::vector<double>{0.0, 1.0, 2.0, 1.0});
  std::remove(path.c_str());
}

TEST_CASE("target column can be given as an index") {
  const auto path = write_temp("a,b\n1,2\n3,4\n");
  const Dataset d = load_csv(path, "1", Task::regression);
  CHECK(d.targets == std::vector<double>{2.0, 4.0});
  CHECK(d.feature_names == std::vector<std::string>{"a"});
  std::remove(path.c_str());
}

TEST_CASE("normalize centers and scales with the population convention") {
  Dataset d;
  d.features = Matrix(2, 1);
  d.features(0, 0) = 1.0;
  d.features(1, 0) = 3.0;
  d.targets = {0.0, 0.0};
  auto [nd, stats] = normalize(d);
  CHECK(stats.mean[0] == doctest::Approx(2.0));
  CHECK(stats.std_dev[0] == doctest::Approx(1.0));  // population sigma
  CHECK(nd.features(0, 0) == doctest::Approx(-1.0));
  CHECK(nd.features(1, 0) == doctest::Approx(1.0));
}

TEST_CASE("normalize is idempotent and replayable") {
  Dataset d = random_dataset(40, 3, 5);
  auto [nd, stats] = normalize(d);
  // every column has mean ~0 and std ~1
  for (std::size_t c = 0; c < nd.dim(); ++c) {
    double mu = 0.0;
    for (std::size_t r = 0; r < nd.size(); ++r) mu += nd.features(r, c);
    mu /= static_cast<double>(nd.size());
    CHECK(std::abs(mu) <= 1e-9);
    double var = 0.0;
    for (std::size_t r = 0; r < nd.size(); ++r) {
      const double e = nd.features(r, c) - mu;
      var += e * e;
    }
    var /= static_cast<double>(nd.size());
    CHECK(std::sqrt(var) == doctest::Approx(1.0).epsilon(1e-9));
  }
  // renormalizing changes nothing
  auto [nd2, stats2] = normalize(nd);
  for (std::size_t i = 0; i < nd.features.size(); ++i)
    CHECK(nd2.features.data()[i] ==
          doctest::Approx(nd.features.data()[i]).epsilon(1e-12));
  // replay reproduces the transform
  const Dataset replay = apply_normalization(d, stats);
  for (std::size_t i = 0; i < nd.features.size(); ++i)
    CHECK(replay.features.data()[i] ==
          doctest::Approx(nd.features.data()[i]).epsilon(1e-12));
}

TEST_CASE("constant columns map to zero with recorded std 1") {
  Dataset d;
  d.features = Matrix(3, 1, 5.0);
  d.targets = {0.0, 0.0, 0.0};
  auto [nd, stats] = normalize(d);
  CHECK(stats.std_dev[0] == 1.0);
  for (std::size_t r = 0; r < 3; ++r) CHECK(nd.features(r, 0) == 0.0);
}

TEST_CASE("norm stats survive a json round trip") {
  Dataset d = random_dataset(10, 4, 77);
  d.feature_names = {"zeta", "alpha", "mid", "beta"};
  auto [nd, stats] = normalize(d);
  const NormStats back =
      NormStats::from_json(stats.to_json()).reordered(d.feature_names);
  for (std::size_t c = 0; c < 4; ++c) {
    CHECK(back.mean[c] == stats.mean[c]);
    CHECK(back.std_dev[c] == stats.std_dev[c]);
  }
  CHECK_THROWS(back.reordered({"zeta", "alpha", "mid", "nope"}));
}

TEST_CASE("split sizes follow the carve rule") {
  const Dataset d100 = random_dataset(100, 2, 1);
  const Split s = split(d100, SplitSpec{42, 0.2, 0.2});
  CHECK(s.test.size() == 20);
  CHECK(s.val.size() == 16);
  CHECK(s.train.size() == 64);

  const Dataset d5 = random_dataset(5, 2, 2);
  const Split s5 = split(d5, SplitSpec{42, 0.2, 0.2});
  CHECK(s5.test.size() == 1);
  CHECK(s5.val.size() == 1);
  CHECK(s5.train.size() == 3);
}

TEST_CASE("split is a deterministic partition") {
  const Dataset d = random_dataset(53, 2, 3);
  const Split a = split(d, SplitSpec{7, 0.2, 0.2});
  const Split b = split(d, SplitSpec{7, 0.2, 0.2});
  CHECK(a.train_idx == b.train_idx);
  CHECK(a.val_idx == b.val_idx);
  CHECK(a.test_idx == b.test_idx);

  std::set<std::size_t> all;
  for (auto i : a.train_idx) all.insert(i);
  for (auto i : a.val_idx) all.insert(i);
  for (auto i : a.test_idx) all.insert(i);
  CHECK(all.size() == 53);  // disjoint and exhaustive
  CHECK(*all.rbegin() == 52);

  const Split c = split(d, SplitSpec{8, 0.2, 0.2});
  CHECK(c.train_idx != a.train_idx);  // seed matters
}

TEST_CASE("split validates fractions") {
  const Dataset d = random_dataset(20, 2, 4);
  CHECK_THROWS(split(d, SplitSpec{0, 0.0, 0.2}));
  CHECK_THROWS(split(d, SplitSpec{0, 0.2, 1.0}));
}
