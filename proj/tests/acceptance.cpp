// Acceptance suite: one PASS/FAIL line per criterion, exit 1 if any fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <sstream>
#include <string>

#include "oracles.hpp"
#include "tnt/container.hpp"
#include "tnt/experiments.hpp"
#include "tnt/fixtures.hpp"
#include "tnt/model_file.hpp"
#include "tnt/pipeline.hpp"
#include "tnt/rng.hpp"
#include "tnt/scalars.hpp"
#include "tnt/ternary.hpp"

using namespace tnt;
namespace fs = std::filesystem;
using Clock = std::chrono::steady_clock;

namespace {

constexpr std::uint64_t kSeed = 20200305;

struct Outcome {
  bool passed = false;
  std::string detail;
};

int failures = 0;

void criterion(const std::string& name, const std::function<Outcome()>& body) {
  const auto start = Clock::now();
  Outcome o;
  try {
    o = body();
  } catch (const std::exception& e) {
    o = {false, std::string("exception: ") + e.what()};
  }
  const double secs = std::chrono::duration<double>(Clock::now() - start).count();
  if (!o.passed) ++failures;
  std::printf("%s %s: %s (%.2f s)\n", o.passed ? "PASS" : "FAIL", name.c_str(), o.detail.c_str(),
              secs);
  std::fflush(stdout);
}

double seconds_since(Clock::time_point t) {
  return std::chrono::duration<double>(Clock::now() - t).count();
}

std::string fmt(double v, int prec = 6) {
  std::ostringstream s;
  s.precision(prec);
  s << v;
  return s.str();
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), {}};
}

Outcome oracle_optimality() {
  const auto start = Clock::now();
  std::size_t cases = 0;
  double worst = 0.0;
  bool enumerated_ok = true;
  for (auto dist : {Distribution::UniformSymmetric, Distribution::StandardNormal}) {
    for (std::size_t n = 2; n <= 10; ++n) {
      for (std::size_t trial = 0; trial < 200; ++trial) {
        const auto w = gen_vector(dist, n, derive_seed(kSeed, n, trial));
        const double fast = ternarize(w).cosine;
        const double brute = brute_force_ternarize(w).cosine;
        worst = std::max(worst, std::abs(fast - brute));
        // an independent recursive enumeration, on a subsample
        if (trial % 20 == 0) {
          enumerated_ok &= std::abs(testing::enumerate_ternary(w).cosine - fast) <= 1e-12;
        }
        ++cases;
      }
    }
  }
  const double secs = seconds_since(start);
  return {worst <= 1e-12 && enumerated_ok && secs < 30.0,
          std::to_string(cases) + " vectors, max |fast - brute| = " + fmt(worst) +
              (enumerated_ok ? "" : ", enumeration disagrees") + ", " + fmt(secs, 3) + " s < 30"};
}

Outcome curve(Distribution dist, double lo, double hi, double flo, double fhi) {
  constexpr std::size_t n = 1000000;
  const auto start = Clock::now();
  const auto c = curve_experiment(dist, n, kSeed);
  const double secs = seconds_since(start);
  const double frac = static_cast<double>(c.argmax_m) / n;
  return {c.max_cosine >= lo && c.max_cosine <= hi && frac >= flo && frac <= fhi && secs < 10.0,
          "max cosine " + fmt(c.max_cosine) + " in [" + fmt(lo) + ", " + fmt(hi) +
              "], argmax_m/N " + fmt(frac) + " in [" + fmt(flo) + ", " + fmt(fhi) + "], " +
              fmt(secs, 3) + " s < 10"};
}

Outcome convergence() {
  const auto start = Clock::now();
  const std::vector<std::size_t> dims = {10, 100, 1000, 10000};
  bool ok = true;
  std::string detail;
  for (auto dist : {Distribution::UniformSymmetric, Distribution::StandardNormal}) {
    const auto tern = dimension_sweep(dist, QuantMode::Ternary, dims, 200, kSeed);
    const auto bin = dimension_sweep(dist, QuantMode::Binary, dims, 200, kSeed);
    for (std::size_t i = 0; i < dims.size(); ++i) {
      if (tern.summary[i].mean < bin.summary[i].mean) {
        ok = false;
        detail += " ternary<binary at " + std::string(to_string(dist)) + " dim " +
                  std::to_string(dims[i]) + ";";
      }
    }
    for (const auto* r : {&tern, &bin}) {
      const QuantMode mode = r == &tern ? QuantMode::Ternary : QuantMode::Binary;
      const std::string series = std::string(to_string(mode)) + "/" + std::string(to_string(dist));
      for (std::size_t i = 2; i < dims.size(); ++i) {
        if (!(r->summary[i].variance < r->summary[i - 1].variance)) {
          ok = false;
          detail += " variance not decreasing in " + series + ";";
        }
      }
      const double mean = r->summary.back().mean;
      const double limit = reference_limits(dist, mode);
      const bool near = std::abs(mean - limit) <= 0.01;
      ok &= near;
      detail += " " + series + " mean@1e4 " + fmt(mean) + " vs " + fmt(limit) +
                (near ? "" : " (off)") + ";";
    }
  }
  const double secs = seconds_since(start);
  ok &= secs < 300.0;
  return {ok, detail.substr(1) + " " + fmt(secs, 3) + " s < 300"};
}

Outcome scalar_chain() {
  std::size_t pairs = 0;
  std::size_t violations = 0;
  std::size_t strict_checked = 0;
  for (std::size_t i = 0; i < 1000; ++i) {
    const auto dist = i % 2 ? Distribution::StandardNormal : Distribution::UniformSymmetric;
    const std::size_t n = 2 + i % 64;
    auto w = gen_vector(dist, n, derive_seed(kSeed ^ 0x5ca1a7, n, i));
    const auto t = ternarize(w).t;
    const double none = residual_error(w, t, ScalarSet::none());
    const double single = residual_error(w, t, single_scalar(w, t));
    const double dual = residual_error(w, t, dual_scalar(w, t));
    const double slack = 1e-12 * (1.0 + none);
    if (dual > single + slack || single > none + slack) ++violations;
    // w parallel to t only when all nonzero |w| are equal and t covers them
    if (none > 0.0 && cosine(w, t) < 1.0 - 1e-12) {
      ++strict_checked;
      if (!(single < none)) ++violations;
    }
    ++pairs;
  }
  // parallel but longer than t: single removes the whole residual
  const std::vector<double> par = {3.0, -3.0, 0.0, 3.0};
  const auto tp = ternarize(par).t;
  const double par_none = residual_error(par, tp, ScalarSet::none());
  const double par_single = residual_error(par, tp, single_scalar(par, tp));
  const bool par_ok = par_single < 1e-12 && par_none > 0.0;

  const std::vector<double> w = {2.0, -1.0};
  const TernaryVector t({1, -1});
  const double d = residual_error(w, t, dual_scalar(w, t));
  const double s = residual_error(w, t, single_scalar(w, t));
  const bool exact = d <= 1e-12 && std::abs(s - 0.70711) <= 1e-5;
  return {violations == 0 && par_ok && exact,
          std::to_string(pairs) + " pairs (" + std::to_string(strict_checked) +
              " strict), violations " + std::to_string(violations) + "; parallel case single " +
              fmt(par_single) + " < none " + fmt(par_none) + "; w=(2,-1) dual " + fmt(d) +
              " single " + fmt(s)};
}

Outcome compression() {
  const auto fx = dense_fixture(1000, 1000, kSeed);
  const auto [model, report] = quantize_model(fx.manifest, fx.tensors, QuantizeConfig{});
  const auto path = fs::temp_directory_path() / "tnt_acceptance_dense.tnt";
  const std::size_t file_bytes = write_quantized(path, model);
  fs::remove(path);
  const auto& l = report.layers.at(0);
  const bool ok = l.original_bytes == 4000000 && l.code_bytes == 250000 && l.code_ratio == 16.0 &&
                  verify_compression(report).passed;
  return {ok, "code stream " + std::to_string(l.code_bytes) + " bytes, ratio " +
                  fmt(l.code_ratio) + " vs " + std::to_string(l.original_bytes) +
                  " bytes; whole file " + std::to_string(file_bytes) + " bytes, ratio " +
                  fmt(static_cast<double>(l.original_bytes) / file_bytes, 5)};
}

double median_time(const std::vector<double>& w) {
  std::vector<double> times;
  for (int i = 0; i < 5; ++i) {
    const auto start = Clock::now();
    const auto r = ternarize(w);
    times.push_back(seconds_since(start));
    if (r.m == 0) std::abort();
  }
  std::sort(times.begin(), times.end());
  return times[2];
}

Outcome complexity() {
  const auto small = gen_vector(Distribution::StandardNormal, 1u << 16, kSeed);
  const auto large = gen_vector(Distribution::StandardNormal, 1u << 20, kSeed);
  (void)ternarize(small);  // warm up
  const double ts = median_time(small);
  const double tl = median_time(large);
  const double ratio = tl / ts;
  return {ratio <= 24.0, "median " + fmt(tl * 1e3, 4) + " ms / " + fmt(ts * 1e3, 4) +
                             " ms = " + fmt(ratio, 4) + " <= 24"};
}

Outcome determinism() {
  const auto dir = fs::temp_directory_path() / "tnt_acceptance";
  fs::create_directories(dir);
  write_fixture(dir / "lenet.npz", lenet5_fixture(kSeed));
  const auto c = TensorContainer::open(dir / "lenet.npz");
  QuantizeConfig cfg;
  cfg.jobs = 1;
  write_quantized(dir / "j1.tnt", quantize_model(c, cfg).first);
  cfg.jobs = 8;
  write_quantized(dir / "j8.tnt", quantize_model(c, cfg).first);
  const bool files = slurp(dir / "j1.tnt") == slurp(dir / "j8.tnt");

  const std::vector<std::size_t> dims = {10, 100, 1000};
  export_csv(dimension_sweep(Distribution::StandardNormal, QuantMode::Ternary, dims, 50, kSeed),
             dir / "a.csv");
  export_csv(
      dimension_sweep(Distribution::StandardNormal, QuantMode::Ternary, dims, 50, kSeed, 8),
      dir / "b.csv");
  const bool sweeps = slurp(dir / "a.csv") == slurp(dir / "b.csv");
  const bool curves =
      curve_csv(curve_experiment(Distribution::UniformSymmetric, 10000, kSeed).curve) ==
      curve_csv(curve_experiment(Distribution::UniformSymmetric, 10000, kSeed).curve);
  fs::remove_all(dir);
  return {files && sweeps && curves,
          std::string(".tnt jobs 1 vs 8 ") + (files ? "identical" : "differ") + ", sweep CSV " +
              (sweeps ? "identical" : "differ") + ", curve CSV " +
              (curves ? "identical" : "differ")};
}

Outcome fixture_cosines() {
  const auto fx = lenet5_fixture(kSeed);
  const auto [model, report] = quantize_model(fx.manifest, fx.tensors, QuantizeConfig{});
  bool ok = true;
  std::string detail;
  for (const auto& l : report.layers) {
    if (!l.quantized) continue;
    ok &= l.stats.mean_cosine >= 0.85;
    detail += l.name + " " + fmt(l.stats.mean_cosine, 4) + ", ";
  }
  return {ok, detail + "all >= 0.85, " + std::to_string(report.total_parameters) + " parameters"};
}

}  // namespace

int main() {
  criterion("oracle optimality", oracle_optimality);
  criterion("uniform curve at 1e6",
            [] { return curve(Distribution::UniformSymmetric, 0.935, 0.945, 0.660, 0.674); });
  criterion("normal curve at 1e6",
            [] { return curve(Distribution::StandardNormal, 0.895, 0.905, 0.530, 0.550); });
  criterion("convergence sweep", convergence);
  criterion("scalar ordering chain", scalar_chain);
  criterion("compression ratio", compression);
  criterion("complexity scaling", complexity);
  criterion("determinism", determinism);
  criterion("fixture conversion cosines", fixture_cosines);
  std::printf("%d failed\n", failures);
  return failures == 0 ? 0 : 1;
}
