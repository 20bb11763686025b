#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <vector>

#include "doctest.h"
#include "stitforest/errors.hpp"
#include "stitforest/forest.hpp"
#include "stitforest/stats.hpp"

using namespace stitforest;

namespace {

Dataset synthetic_dataset(std::size_t n, std::size_t d, Rng& rng) {
  Dataset data{Mat(n, d), Vec(n)};
  for (std::size_t r = 0; r < n; ++r) {
    double s = 0.0;
    for (std::size_t c = 0; c < d; ++c) {
      data.x.at(r, c) = rng.uniform();
      s += data.x.at(r, c);
    }
    data.y[r] = std::sin(3.0 * s) + 0.1 * rng.normal();
  }
  return data;
}

Vec dataset_row(const Dataset& data, std::size_t r) {
  Vec out(data.dim());
  for (std::size_t c = 0; c < data.dim(); ++c) out[c] = data.x.at(r, c);
  return out;
}

}  // namespace

TEST_CASE("dataset validation and csv round trip") {
  Dataset bad{Mat(2, 2), Vec(3)};
  CHECK_THROWS_AS(bad.validate(), DimensionMismatch);
  Dataset nan_data{Mat(1, 1), Vec{std::nan("")}};
  nan_data.x.at(0, 0) = 0.5;
  CHECK_THROWS_AS(nan_data.validate(), DimensionMismatch);

  Rng rng(7);
  Dataset data = synthetic_dataset(20, 3, rng);
  const std::string path = "dataset_roundtrip_test.csv";
  data.to_csv(path);
  Dataset back = Dataset::from_csv(path);
  REQUIRE(back.size() == 20);
  REQUIRE(back.dim() == 3);
  for (std::size_t r = 0; r < 20; ++r) {
    CHECK(back.y[r] == data.y[r]);
    for (std::size_t c = 0; c < 3; ++c) CHECK(back.x.at(r, c) == data.x.at(r, c));
  }
  std::remove(path.c_str());
  CHECK_THROWS_AS(Dataset::from_csv("missing_dataset.csv"), IoError);
}

TEST_CASE("sampler resolution defaults and validation") {
  Rng rng(8);
  Dataset data = synthetic_dataset(12, 2, rng);

  SamplerSpec spec;
  spec.lifetime = 2.0;
  SamplerSpec resolved = resolve_sampler(spec, data);
  REQUIRE(resolved.window.has_value());
  CHECK(resolved.weights == Vec{0.5, 0.5});
  Vec row = dataset_row(data, 0);
  CHECK(resolved.window->contains(row));

  SamplerSpec stit_spec;
  stit_spec.kind = SamplerSpec::Kind::stit;
  CHECK_THROWS_AS(resolve_sampler(stit_spec, data), ConfigError);

  SamplerSpec narrow = spec;
  narrow.window = AxisBox{Vec{0.4, 0.4}, Vec{0.6, 0.6}};
  CHECK_THROWS_AS(resolve_sampler(narrow, data), OutOfWindow);

  SamplerSpec badw = spec;
  badw.weights = Vec{1.0, 2.0, 3.0};
  CHECK_THROWS_AS(resolve_sampler(badw, data), DimensionMismatch);

  SamplerSpec obl = spec;
  obl.kind = SamplerSpec::Kind::oblique;
  CHECK_THROWS_AS(resolve_sampler(obl, data), ConfigError);
}

TEST_CASE("single point, constant labels, and vanishing lifetime") {
  Rng rng(9);

  Dataset one{Mat(1, 2), Vec{3.25}};
  one.x.at(0, 0) = 0.2;
  one.x.at(0, 1) = 0.8;
  SamplerSpec spec;
  spec.lifetime = 5.0;
  spec.window = AxisBox{Vec{0.0, 0.0}, Vec{1.0, 1.0}};
  TreeEstimator t1 = fit_tree(one, spec, rng);
  CHECK(t1.predict(Vec{0.2, 0.8}) == 3.25);

  Dataset constant = synthetic_dataset(30, 2, rng);
  for (double& v : constant.y) v = -1.5;
  TreeEstimator t2 = fit_tree(constant, spec, rng);
  for (std::size_t r = 0; r < constant.size(); ++r) {
    Vec row = dataset_row(constant, r);
    CHECK(t2.predict(row) == -1.5);
  }

  SamplerSpec tiny = spec;
  tiny.lifetime = 1e-9;
  Dataset data = synthetic_dataset(25, 2, rng);
  TreeEstimator t3 = fit_tree(data, tiny, rng);
  CHECK(t3.tree().leaf_count() == 1);
  CHECK(t3.predict(Vec{0.5, 0.5}) == doctest::Approx(mean(data.y)).epsilon(1e-14));
}

TEST_CASE("empty leaf predicts exactly zero") {
  Rng rng(10);
  Dataset data{Mat(40, 1), Vec(40)};
  for (std::size_t r = 0; r < 40; ++r) {
    data.x.at(r, 0) = 0.1 * rng.uniform();
    data.y[r] = 1.0 + rng.uniform();
  }
  SamplerSpec spec;
  spec.lifetime = 50.0;
  spec.window = AxisBox{Vec{0.0}, Vec{1.0}};
  TreeEstimator tree = fit_tree(data, spec, rng);
  const int leaf = tree.route(Vec{0.95});
  REQUIRE(tree.counts()[static_cast<std::size_t>(leaf)] == 0);
  CHECK(tree.predict(Vec{0.95}) == 0.0);
}

TEST_CASE("tree prediction matches the exhaustive co-membership scan") {
  Rng rng(11);
  Dataset data = synthetic_dataset(200, 2, rng);

  SamplerSpec specs[2];
  specs[0].lifetime = 4.0;
  specs[1].kind = SamplerSpec::Kind::oblique;
  specs[1].lifetime = 4.0;
  Mat a(2, 2);
  a.at(0, 0) = 0.8;
  a.at(1, 0) = 0.6;
  a.at(0, 1) = -0.3;
  a.at(1, 1) = 0.9;
  specs[1].feature_matrix = a;

  for (const auto& spec : specs) {
    TreeEstimator tree = fit_tree(data, spec, rng);
    Rng probe_rng(17);
    for (int probe = 0; probe < 25; ++probe) {
      Vec x{probe_rng.uniform(), probe_rng.uniform()};
      const int leaf = tree.route(x);
      double sum = 0.0;
      std::int64_t cnt = 0;
      for (std::size_t r = 0; r < data.size(); ++r) {
        Vec row = dataset_row(data, r);
        if (tree.route(row) == leaf) {
          sum += data.y[r];
          cnt += 1;
        }
      }
      CHECK(cnt == tree.counts()[static_cast<std::size_t>(leaf)]);
      if (cnt == 0)
        CHECK(tree.predict(x) == 0.0);
      else
        CHECK(tree.predict(x) == doctest::Approx(sum / static_cast<double>(cnt)).epsilon(1e-13));
    }
  }
}

TEST_CASE("forest is the exact mean of its trees") {
  Rng rng(12);
  Dataset data = synthetic_dataset(120, 2, rng);
  SamplerSpec spec;
  spec.lifetime = 3.0;
  spec.window = AxisBox{Vec{0.0, 0.0}, Vec{1.0, 1.0}};

  const std::uint64_t seed = 2024;
  ForestModel forest = fit_forest(data, spec, 32, seed);

  // compositional oracle: the same streams fitted one by one
  std::vector<TreeEstimator> loose;
  for (std::size_t t = 0; t < 32; ++t) {
    Rng tr = tree_stream(seed, t);
    loose.push_back(fit_tree(data, spec, tr));
  }
  Rng probe_rng(18);
  for (int probe = 0; probe < 50; ++probe) {
    Vec x{probe_rng.uniform(), probe_rng.uniform()};
    double acc = 0.0;
    for (const auto& t : loose) acc += t.predict(x);
    CHECK(forest.predict(x) == acc / 32.0);
  }

  // M trees sharing one stream collapse to the tree prediction
  Rng tr = tree_stream(seed, 5);
  TreeEstimator base = fit_tree(data, spec, tr);
  std::vector<TreeEstimator> copies(4, base);
  ForestModel degenerate(std::move(copies), resolve_sampler(spec, data), seed);
  CHECK(degenerate.predict(Vec{0.3, 0.3}) == base.predict(Vec{0.3, 0.3}));
}

TEST_CASE("forest fitting is independent of the thread count") {
  Rng rng(13);
  Dataset data = synthetic_dataset(90, 2, rng);
  SamplerSpec spec;
  spec.lifetime = 3.0;
  ForestModel serial = fit_forest(data, spec, 8, 99, 1);
  ForestModel threaded = fit_forest(data, spec, 8, 99, 4);
  Rng probe_rng(19);
  for (int probe = 0; probe < 40; ++probe) {
    Vec x{probe_rng.uniform(), probe_rng.uniform()};
    CHECK(serial.predict(x) == threaded.predict(x));
  }
}

TEST_CASE("permuting dataset rows leaves predictions unchanged") {
  Rng rng(14);
  Dataset data = synthetic_dataset(60, 2, rng);
  Dataset reversed{Mat(60, 2), Vec(60)};
  for (std::size_t r = 0; r < 60; ++r) {
    reversed.y[r] = data.y[59 - r];
    for (std::size_t c = 0; c < 2; ++c) reversed.x.at(r, c) = data.x.at(59 - r, c);
  }
  SamplerSpec spec;
  spec.lifetime = 4.0;
  ForestModel f1 = fit_forest(data, spec, 6, 31);
  ForestModel f2 = fit_forest(reversed, spec, 6, 31);
  Rng probe_rng(20);
  for (int probe = 0; probe < 40; ++probe) {
    Vec x{probe_rng.uniform(), probe_rng.uniform()};
    CHECK(f1.predict(x) == f2.predict(x));
  }
}

TEST_CASE("predictions stay in the label range (or zero)") {
  Rng rng(15);
  Dataset data = synthetic_dataset(80, 2, rng);
  const double lo = *std::min_element(data.y.begin(), data.y.end());
  const double hi = *std::max_element(data.y.begin(), data.y.end());

  SamplerSpec spec;
  spec.kind = SamplerSpec::Kind::stit;
  spec.lifetime = 3.0;
  std::vector<Vec> dirs{Vec{1.0, 0.0}, Vec{0.0, 1.0}, Vec{std::sqrt(0.5), std::sqrt(0.5)}};
  spec.directions = DirectionalDistribution::discrete(dirs, Vec{0.3, 0.3, 0.4});
  ForestModel forest = fit_forest(data, spec, 5, 77);

  Rng probe_rng(21);
  for (int probe = 0; probe < 60; ++probe) {
    Vec x{probe_rng.uniform() * 1.4 - 0.2, probe_rng.uniform() * 1.4 - 0.2};
    for (const auto& t : forest.trees()) {
      const double p = t.predict(x);
      const bool zero = p == 0.0;
      CHECK((zero || (p >= lo - 1e-12 && p <= hi + 1e-12)));
    }
    const double fp = forest.predict(x);
    CHECK(fp >= std::min(lo, 0.0) - 1e-12);
    CHECK(fp <= std::max(hi, 0.0) + 1e-12);
  }
}

TEST_CASE("out-of-window queries are clamped and flagged") {
  Rng rng(16);
  Dataset data = synthetic_dataset(50, 2, rng);
  SamplerSpec spec;
  spec.lifetime = 2.0;
  spec.window = AxisBox{Vec{0.0, 0.0}, Vec{1.0, 1.0}};
  TreeEstimator tree = fit_tree(data, spec, rng);
  bool clamped = false;
  const double outside = tree.predict(Vec{2.0, 0.5}, &clamped);
  CHECK(clamped);
  bool clamped_edge = false;
  const double edge = tree.predict(Vec{1.0, 0.5}, &clamped_edge);
  CHECK_FALSE(clamped_edge);
  CHECK(outside == edge);
}

TEST_CASE("model persistence") {
  Rng rng(22);
  Dataset data = synthetic_dataset(70, 2, rng);
  SamplerSpec spec;
  spec.kind = SamplerSpec::Kind::oblique;
  spec.lifetime = 3.0;
  Mat a(2, 3);
  a.at(0, 0) = 1.0;
  a.at(1, 0) = 0.0;
  a.at(0, 1) = 0.0;
  a.at(1, 1) = 1.0;
  a.at(0, 2) = 0.6;
  a.at(1, 2) = 0.8;
  spec.feature_matrix = a;

  const std::string path = "model_roundtrip_test.json";
  ForestModel forest = fit_forest(data, spec, 4, 555);
  forest.save(path);
  ForestModel back = ForestModel::load(path);
  REQUIRE(back.trees().size() == 4);
  CHECK(back.seed() == 555);

  Rng probe_rng(23);
  for (int probe = 0; probe < 1000; ++probe) {
    Vec x{probe_rng.uniform(), probe_rng.uniform()};
    CHECK(back.predict(x) == forest.predict(x));
  }

  // reload equals a fresh fit with the stored seed and sampler
  ForestModel refit = fit_forest(data, back.sampler(), 4, back.seed());
  Rng probe2(24);
  for (int probe = 0; probe < 100; ++probe) {
    Vec x{probe2.uniform(), probe2.uniform()};
    CHECK(refit.predict(x) == back.predict(x));
  }

  // truncation never yields a partial model
  std::ifstream in(path);
  std::string full((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  in.close();
  std::ofstream out(path, std::ios::trunc);
  out << full.substr(0, full.size() / 2);
  out.close();
  CHECK_THROWS_AS(ForestModel::load(path), SchemaVersionMismatch);
  std::remove(path.c_str());
  CHECK_THROWS_AS(ForestModel::load("missing_model.json"), IoError);
}
