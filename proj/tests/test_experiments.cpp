#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <numbers>

#include "doctest.h"
#include "oracles.hpp"
#include "tnt/error.hpp"
#include "tnt/experiments.hpp"
#include "tnt/rng.hpp"

using namespace tnt;
namespace fs = std::filesystem;

namespace {

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), {}};
}

std::size_t count_lines(const std::string& s) {
  return static_cast<std::size_t>(std::count(s.begin(), s.end(), '\n'));
}

}  // namespace

TEST_CASE("seed derivation") {
  CHECK(derive_seed(1, 2, 3) == derive_seed(1, 2, 3));
  CHECK(derive_seed(1, 2, 3) != derive_seed(1, 3, 2));
  CHECK(derive_seed(1, 2, 3) != derive_seed(2, 2, 3));
  // SplitMix64 of 0 is a published constant.
  CHECK(splitmix64(0) == 0xE220A8397B1DCDAFull);
}

TEST_CASE("generated vectors") {
  CHECK(gen_vector(Distribution::StandardNormal, 100, 5) ==
        gen_vector(Distribution::StandardNormal, 100, 5));
  CHECK(gen_vector(Distribution::StandardNormal, 100, 5) !=
        gen_vector(Distribution::StandardNormal, 100, 6));
  // prefixes agree, so longer draws extend shorter ones
  const auto a = gen_vector(Distribution::UniformSymmetric, 10, 5);
  const auto b = gen_vector(Distribution::UniformSymmetric, 20, 5);
  CHECK(std::equal(a.begin(), a.end(), b.begin()));

  const std::size_t n = 1000000;
  const auto normal = gen_vector(Distribution::StandardNormal, n, 42);
  double mean = testing::compensated_sum(normal) / n;
  std::vector<double> sq(n);
  for (std::size_t i = 0; i < n; ++i) sq[i] = (normal[i] - mean) * (normal[i] - mean);
  const double var = testing::compensated_sum(sq) / (n - 1);
  CHECK(std::abs(mean) < 0.005);
  CHECK(std::abs(var - 1.0) < 0.01);

  const auto uni = gen_vector(Distribution::UniformSymmetric, n, 42);
  CHECK(std::all_of(uni.begin(), uni.end(), [](double v) { return v >= -1.0 && v <= 1.0; }));
  mean = testing::compensated_sum(uni) / n;
  for (std::size_t i = 0; i < n; ++i) sq[i] = uni[i] * uni[i];
  CHECK(std::abs(mean) < 0.005);
  CHECK(std::abs(testing::compensated_sum(sq) / n - 1.0 / 3.0) < 0.005);
}

TEST_CASE("similarity curves") {
  const auto one = curve_experiment(Distribution::StandardNormal, 1, 3);
  CHECK(one.curve.scores.size() == 1);
  CHECK(one.curve.scores[0] == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(one.argmax_m == 1);

  const auto c = curve_experiment(Distribution::UniformSymmetric, 5000, 3);
  CHECK(c.curve.scores.size() == 5000);
  for (double s : c.curve.scores) {
    CHECK(s > 0.0);
    CHECK(s <= 1.0 + 1e-12);
  }
  CHECK(c.max_cosine == c.curve.scores[c.argmax_m - 1]);
  CHECK(c.curve.scores.back() == doctest::Approx(std::sqrt(3.0) / 2.0).epsilon(0.03));

  const auto csv = curve_csv(c.curve);
  CHECK(csv.rfind("m,score\n1,", 0) == 0);
  CHECK(count_lines(csv) == 5001);

  CHECK(is_unimodal(std::vector<double>{0.1, 0.5, 0.5, 0.3}));
  CHECK_FALSE(is_unimodal(std::vector<double>{0.1, 0.5, 0.2, 0.4, 0.3}));
  // Not every sampled curve is unimodal (small bumps past the peak), but most are.
  const double rate = unimodality_rate(Distribution::StandardNormal, 500, 200, 1);
  CHECK(rate > 0.7);
  CHECK(rate <= 1.0);
}

TEST_CASE("reference limits") {
  CHECK(reference_limits(Distribution::UniformSymmetric, QuantMode::Ternary) ==
        doctest::Approx(0.94281).epsilon(1e-5));
  CHECK(reference_limits(Distribution::UniformSymmetric, QuantMode::Binary) ==
        doctest::Approx(0.86603).epsilon(1e-5));
  CHECK(reference_limits(Distribution::StandardNormal, QuantMode::Binary) ==
        doctest::Approx(0.79788).epsilon(1e-5));
  double frac = 0.0;
  const double quad = testing::normal_ternary_limit_by_quadrature(&frac);
  CHECK(std::abs(reference_limits(Distribution::StandardNormal, QuantMode::Ternary) - quad) < 1e-5);
  CHECK(std::abs(reference_support_fraction(Distribution::StandardNormal, QuantMode::Ternary) -
                 frac) < 2e-3);
  CHECK(reference_support_fraction(Distribution::UniformSymmetric, QuantMode::Ternary) ==
        doctest::Approx(2.0 / 3.0));
  CHECK(reference_support_fraction(Distribution::StandardNormal, QuantMode::Binary) == 1.0);
}

TEST_CASE("dimension sweeps") {
  const std::vector<std::size_t> dims = {10, 100, 1000};
  const auto a = dimension_sweep(Distribution::StandardNormal, QuantMode::Ternary, dims, 30, 99);
  REQUIRE(a.records.size() == 90);
  CHECK(a.summary.size() == 3);
  CHECK(a.records[31].dimension == 100);
  CHECK(a.records[31].trial == 1);
  CHECK(a.records[31].seed == derive_seed(99, 100, 1));
  CHECK(dimension_sweep(Distribution::StandardNormal, QuantMode::Ternary, dims, 30, 99).records ==
        a.records);
  for (int threads : {2, 5}) {
    CHECK(dimension_sweep_parallel(Distribution::StandardNormal, QuantMode::Ternary, dims, 30, 99,
                                   threads)
              .records == a.records);
  }
  const auto b = dimension_sweep(Distribution::StandardNormal, QuantMode::Binary, dims, 30, 99);
  for (std::size_t i = 0; i < a.records.size(); ++i) {
    CHECK(a.records[i].seed == b.records[i].seed);
    CHECK(a.records[i].max_cosine >= b.records[i].max_cosine);
    CHECK(b.records[i].argmax_m == b.records[i].dimension);
  }

  const auto& s = a.at_dimension(1000);
  double sum = 0.0;
  for (std::size_t i = 60; i < 90; ++i) sum += a.records[i].max_cosine;
  CHECK(s.mean == doctest::Approx(sum / 30));
  CHECK(s.variance > 0.0);
  CHECK_THROWS_AS(a.at_dimension(7), Error);

  const std::vector<std::size_t> bad = {100, 10};
  CHECK_THROWS_AS(dimension_sweep(Distribution::StandardNormal, QuantMode::Ternary, bad, 3, 1),
                  Error);
  CHECK_THROWS_AS(dimension_sweep(Distribution::StandardNormal, QuantMode::Ternary, dims, 0, 1),
                  Error);
}

TEST_CASE("binary sweeps approach their limits") {
  const std::vector<std::size_t> dims = {100000};
  for (auto dist : {Distribution::UniformSymmetric, Distribution::StandardNormal}) {
    const auto r = dimension_sweep(dist, QuantMode::Binary, dims, 5, 17);
    CHECK(std::abs(r.summary[0].mean - reference_limits(dist, QuantMode::Binary)) < 0.005);
  }
}

TEST_CASE("sweep CSV") {
  CHECK(sweep_csv(SweepResult{}) == std::string(kSweepCsvHeader) + "\n");

  const std::vector<std::size_t> dims = {10, 20, 30};
  const auto r = dimension_sweep(Distribution::UniformSymmetric, QuantMode::Ternary, dims, 1, 4);
  const auto csv = sweep_csv(r);
  CHECK(count_lines(csv) == 4);
  CHECK(csv.rfind(std::string(kSweepCsvHeader) + "\n10,0,ternary,uniform,", 0) == 0);

  const auto p1 = fs::temp_directory_path() / "tnt_test_sweep1.csv";
  const auto p2 = fs::temp_directory_path() / "tnt_test_sweep2.csv";
  export_csv(r, p1);
  CHECK(slurp(p1) == csv);
  const auto back = read_sweep_csv(p1);
  CHECK(back == r.records);
  SweepResult again;
  again.records = back;
  again.summary = summarize(back);
  export_csv(again, p2);
  CHECK(slurp(p2) == slurp(p1));

  {
    std::ofstream out(p2);
    out << "dimension,trial\n1,2\n";
  }
  try {
    (void)read_sweep_csv(p2);
    FAIL("expected ParseError");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::ParseError);
  }
  fs::remove(p1);
  fs::remove(p2);
}
