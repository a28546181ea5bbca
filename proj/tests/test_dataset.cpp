#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <fstream>

#include "minpred/csv.hpp"
#include "minpred/dataset.hpp"
#include "minpred/errors.hpp"
#include "minpred/synth.hpp"

using namespace minpred;

namespace {

TimeSeriesBundle white_noise_bundle(std::size_t n, std::size_t segments,
                                    std::size_t T, std::uint64_t seed) {
  Rng rng(seed);
  TimeSeriesBundle bundle;
  bundle.n_series = n;
  bundle.M = 1;
  for (std::size_t j = 0; j < n; ++j) {
    bundle.names.push_back("x" + std::to_string(j + 1));
  }
  for (std::size_t s = 0; s < segments; ++s) {
    TimeSeriesBundle::Segment seg;
    seg.length = T;
    seg.values.resize(n * T);
    for (double& v : seg.values) v = rng.normal();
    bundle.segments.push_back(std::move(seg));
  }
  return bundle;
}

}  // namespace

TEST_CASE("windowize: T=22, K=3 gives 19 examples per segment") {
  const auto one = white_noise_bundle(1, 1, 22, 1);
  CHECK(windowize(one, 3).n_examples() == 19);

  const auto many = white_noise_bundle(3, 500, 22, 2);
  const auto ds = windowize(many, 3);
  CHECK(ds.n_examples() == 9500);
  CHECK(ds.train_count == 8550);  // 9:1 split
  CHECK(ds.input_dim() == 9);
  CHECK(ds.targets.cols == 3);
}

TEST_CASE("windowize: T=K+1 gives exactly one example") {
  const auto bundle = white_noise_bundle(2, 1, 4, 3);
  const auto ds = windowize(bundle, 3);
  CHECK(ds.n_examples() == 1);
}

TEST_CASE("windowize: T<=K raises a data error naming the series") {
  const auto bundle = white_noise_bundle(2, 1, 3, 4);
  CHECK_THROWS_WITH_AS(windowize(bundle, 3), doctest::Contains("x1"),
                       DataError);
}

TEST_CASE("windowize: windows are oldest-lag-first and aligned to targets") {
  TimeSeriesBundle bundle;
  bundle.n_series = 2;
  bundle.M = 1;
  bundle.names = {"a", "b"};
  TimeSeriesBundle::Segment seg;
  seg.length = 5;
  // series a: 0..4, series b: 10..14
  seg.values = {0, 1, 2, 3, 4, 10, 11, 12, 13, 14};
  bundle.segments.push_back(seg);
  const auto ds = windowize(bundle, 2, 1.0);
  REQUIRE(ds.n_examples() == 3);
  // First example: window (t=0,1), target t=2.
  CHECK(ds.inputs.at(0, 0) == 0.0);
  CHECK(ds.inputs.at(0, 1) == 1.0);
  CHECK(ds.inputs.at(0, 2) == 10.0);
  CHECK(ds.inputs.at(0, 3) == 11.0);
  CHECK(ds.targets.at(0, 0) == 2.0);
  CHECK(ds.targets.at(0, 1) == 12.0);
  // Last example: window (t=2,3), target t=4.
  CHECK(ds.inputs.at(2, 1) == 3.0);
  CHECK(ds.targets.at(2, 0) == 4.0);
}

TEST_CASE("fake series: permutation preserves the window multiset") {
  const auto bundle = white_noise_bundle(3, 4, 30, 5);
  const auto ds = windowize(bundle, 3);
  Rng rng(99);
  const auto aug = make_fake_series(ds, 2, rng);
  REQUIRE(aug.n_fake == 2);
  REQUIRE(aug.names.size() == 5);
  CHECK(aug.input_dim() == 15);

  for (std::size_t s = 0; s < 2; ++s) {
    const std::size_t src = aug.fake_sources[s];
    const std::size_t dims = ds.dims_per_series();
    std::vector<double> original, permuted;
    for (std::size_t e = 0; e < ds.n_examples(); ++e) {
      for (std::size_t l = 0; l < dims; ++l) {
        original.push_back(ds.inputs.at(e, src * dims + l));
        permuted.push_back(aug.inputs.at(e, (3 + s) * dims + l));
      }
    }
    std::sort(original.begin(), original.end());
    std::sort(permuted.begin(), permuted.end());
    CHECK(original == permuted);
  }
}

TEST_CASE("fake series: default count rule max(2, ceil(N/2))") {
  CHECK(default_fake_count(2) == 2);
  CHECK(default_fake_count(3) == 2);
  CHECK(default_fake_count(4) == 2);
  CHECK(default_fake_count(5) == 3);
  CHECK(default_fake_count(10) == 5);
}

TEST_CASE("fake series: fixed seed reproduces the augmentation") {
  const auto bundle = white_noise_bundle(4, 3, 25, 6);
  const auto ds = windowize(bundle, 3);
  Rng rng_a(123), rng_b(123);
  const auto a = make_fake_series(ds, 2, rng_a);
  const auto b = make_fake_series(ds, 2, rng_b);
  CHECK(a.inputs.data == b.inputs.data);
  CHECK(a.fake_sources == b.fake_sources);
}

TEST_CASE("fake series: S > N and double augmentation are rejected") {
  const auto bundle = white_noise_bundle(2, 2, 20, 7);
  const auto ds = windowize(bundle, 3);
  Rng rng(1);
  CHECK_THROWS_AS(make_fake_series(ds, 3, rng), ConfigError);
  const auto aug = make_fake_series(ds, 2, rng);
  CHECK_THROWS_AS(make_fake_series(aug, 1, rng), ConfigError);
}

TEST_CASE("normalize: postcondition and idempotence") {
  auto bundle = white_noise_bundle(2, 3, 50, 8);
  for (auto& seg : bundle.segments) {
    for (std::size_t t = 0; t < seg.length; ++t) {
      seg.at(0, t, 0, 1) = seg.at(0, t, 0, 1) * 7.0 + 3.0;
    }
  }
  const auto normalized = normalize(bundle);
  for (std::size_t j = 0; j < 2; ++j) {
    double mean = 0.0, var = 0.0;
    std::size_t count = 0;
    for (const auto& seg : normalized.segments) {
      for (std::size_t t = 0; t < seg.length; ++t) {
        mean += seg.at(j, t, 0, 1);
        ++count;
      }
    }
    mean /= static_cast<double>(count);
    for (const auto& seg : normalized.segments) {
      for (std::size_t t = 0; t < seg.length; ++t) {
        var += (seg.at(j, t, 0, 1) - mean) * (seg.at(j, t, 0, 1) - mean);
      }
    }
    var /= static_cast<double>(count);
    CHECK(std::fabs(mean) <= 1e-12);
    CHECK(std::fabs(var - 1.0) <= 1e-9);
  }
  const auto twice = normalize(normalized);
  for (std::size_t s = 0; s < twice.segments.size(); ++s) {
    for (std::size_t i = 0; i < twice.segments[s].values.size(); ++i) {
      CHECK(twice.segments[s].values[i] ==
            doctest::Approx(normalized.segments[s].values[i]).epsilon(1e-12));
    }
  }
}

TEST_CASE("normalize: constant dimension is an explicit error") {
  auto bundle = white_noise_bundle(2, 1, 30, 9);
  for (std::size_t t = 0; t < 30; ++t) bundle.segments[0].at(1, t, 0, 1) = 5.0;
  CHECK_THROWS_WITH_AS(normalize(bundle), doctest::Contains("x2"), DataError);
}

TEST_CASE("csv: wide file with header loads with expected shape") {
  const std::string path = "/tmp/minpred_test_basic.csv";
  {
    std::ofstream f(path);
    f << "hr,br\n";
    for (int t = 0; t < 1200; ++t) {
      f << 0.1 * t << ',' << -0.2 * t << '\n';
    }
  }
  const auto bundle = load_csv(path);
  CHECK(bundle.n_series == 2);
  CHECK(bundle.M == 1);
  CHECK(bundle.segments.size() == 1);
  CHECK(bundle.segments[0].length == 1200);
  CHECK(bundle.names[0] == "hr");
}

TEST_CASE("csv: suffix convention groups multi-dimensional series") {
  const std::string path = "/tmp/minpred_test_multidim.csv";
  {
    std::ofstream f(path);
    f << "hr.0,hr.1,br.0,br.1\n";
    f << "1,2,3,4\n2,3,4,5\n3,4,5,6\n4,5,6,7\n";
  }
  const auto bundle = load_csv(path);
  CHECK(bundle.n_series == 2);
  CHECK(bundle.M == 2);
  CHECK(bundle.names == std::vector<std::string>{"hr", "br"});
  CHECK(bundle.segments[0].at(0, 1, 1, 2) == 3.0);
  CHECK(bundle.segments[0].at(1, 0, 0, 2) == 3.0);
}

TEST_CASE("csv: empty file, ragged rows, bad cells, duplicates rejected") {
  const std::string dir = "/tmp/";
  {
    std::ofstream f(dir + "minpred_empty.csv");
  }
  CHECK_THROWS_AS(load_csv(dir + "minpred_empty.csv"), DataError);

  {
    std::ofstream f(dir + "minpred_ragged.csv");
    f << "a,b\n1,2\n3\n";
  }
  CHECK_THROWS_WITH_AS(load_csv(dir + "minpred_ragged.csv"),
                       doctest::Contains("line 3"), DataError);

  {
    std::ofstream f(dir + "minpred_nan.csv");
    f << "a,b\n1,two\n";
  }
  CHECK_THROWS_WITH_AS(load_csv(dir + "minpred_nan.csv"),
                       doctest::Contains("line 2"), DataError);

  {
    std::ofstream f(dir + "minpred_dup.csv");
    f << "a,a\n1,2\n";
  }
  CHECK_THROWS_AS(load_csv(dir + "minpred_dup.csv"), DataError);
}

TEST_CASE("csv: segment column splits windowing units and round-trips") {
  Rng rng(10);
  const auto graph = sample_graph(3, 2, 1, rng);
  const auto bundle = generate(graph, 5, 12, &rng);
  const std::string path = "/tmp/minpred_roundtrip.csv";
  save_csv(bundle, path);
  const auto loaded = load_csv(path);
  CHECK(loaded.segments.size() == 5);
  CHECK(loaded.n_series == 3);
  for (std::size_t s = 0; s < 5; ++s) {
    for (std::size_t i = 0; i < loaded.segments[s].values.size(); ++i) {
      CHECK(loaded.segments[s].values[i] ==
            doctest::Approx(bundle.segments[s].values[i]).epsilon(1e-15));
    }
  }
}
