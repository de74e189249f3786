#include "tnt/experiments.hpp"

#include <omp.h>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numbers>
#include <sstream>

#include "format.hpp"
#include "tnt/error.hpp"
#include "tnt/rng.hpp"

namespace tnt {

using detail::format_double;

double Stream::standard_normal() {
  if (has_spare_) {
    has_spare_ = false;
    return spare_;
  }
  const double u1 = 1.0 - uniform01();  // (0, 1]
  const double u2 = uniform01();
  const double r = std::sqrt(-2.0 * std::log(u1));
  const double theta = 2.0 * std::numbers::pi * u2;
  spare_ = r * std::sin(theta);
  has_spare_ = true;
  return r * std::cos(theta);
}

std::string_view to_string(Distribution d) noexcept {
  return d == Distribution::UniformSymmetric ? "uniform" : "normal";
}

Distribution parse_distribution(std::string_view text) {
  if (text == "uniform") return Distribution::UniformSymmetric;
  if (text == "normal") return Distribution::StandardNormal;
  throw Error(ErrorKind::InvalidConfig, "unknown distribution '" + std::string(text) + "'");
}

std::vector<double> gen_vector(Distribution dist, std::size_t n, std::uint64_t seed) {
  Stream stream(seed);
  std::vector<double> out(n);
  if (dist == Distribution::UniformSymmetric) {
    for (auto& v : out) v = stream.uniform_symmetric();
  } else {
    for (auto& v : out) v = stream.standard_normal();
  }
  return out;
}

CurveExperiment curve_experiment(Distribution dist, std::size_t n, std::uint64_t seed) {
  const auto w = gen_vector(dist, n, seed);
  CurveExperiment out;
  out.curve = similarity_curve(w);
  out.argmax_m = out.curve.argmax_m;
  out.max_cosine = out.curve.max_score();
  return out;
}

std::string curve_csv(const SimilarityCurve& curve) {
  std::string out = "m,score\n";
  out.reserve(curve.scores.size() * 28);
  for (std::size_t k = 0; k < curve.scores.size(); ++k) {
    out += std::to_string(k + 1);
    out += ',';
    out += format_double(curve.scores[k]);
    out += '\n';
  }
  return out;
}

bool is_unimodal(std::span<const double> scores) {
  std::vector<double> runs;
  for (double s : scores) {
    if (runs.empty() || runs.back() != s) runs.push_back(s);
  }
  std::size_t peaks = 0;
  for (std::size_t i = 0; i < runs.size(); ++i) {
    const bool left = i == 0 || runs[i] > runs[i - 1];
    const bool right = i + 1 == runs.size() || runs[i] > runs[i + 1];
    if (left && right) ++peaks;
  }
  return peaks == 1;
}

double unimodality_rate(Distribution dist, std::size_t n, std::size_t trials,
                        std::uint64_t base_seed) {
  if (trials == 0) return 0.0;
  std::size_t unimodal = 0;
  for (std::size_t t = 0; t < trials; ++t) {
    const auto w = gen_vector(dist, n, derive_seed(base_seed, n, t));
    if (is_unimodal(similarity_curve(w).scores)) ++unimodal;
  }
  return static_cast<double>(unimodal) / static_cast<double>(trials);
}

const SweepSummary& SweepResult::at_dimension(std::size_t dim) const {
  for (const auto& s : summary) {
    if (s.dimension == dim) return s;
  }
  throw Error(ErrorKind::InvalidConfig, "no summary for dimension " + std::to_string(dim));
}

namespace {

void check_sweep_args(std::span<const std::size_t> dims, std::size_t trials) {
  if (dims.empty()) throw Error(ErrorKind::InvalidConfig, "sweep needs at least one dimension");
  if (trials == 0) throw Error(ErrorKind::InvalidConfig, "sweep needs at least one trial");
  for (std::size_t i = 0; i < dims.size(); ++i) {
    if (dims[i] == 0) throw Error(ErrorKind::InvalidConfig, "dimensions must be >= 1");
    if (i > 0 && dims[i] <= dims[i - 1]) {
      throw Error(ErrorKind::InvalidConfig, "dimensions must be strictly ascending");
    }
  }
}

SweepRecord run_trial(Distribution dist, QuantMode mode, std::size_t dim, std::size_t trial,
                      std::uint64_t base_seed) {
  SweepRecord r;
  r.dimension = dim;
  r.trial = trial;
  r.mode = mode;
  r.distribution = dist;
  r.seed = derive_seed(base_seed, dim, trial);
  const auto w = gen_vector(dist, dim, r.seed);
  const TernaryResult res = mode == QuantMode::Ternary ? ternarize(w) : binarize(w);
  r.max_cosine = res.cosine;
  r.argmax_m = res.m;
  return r;
}

}  // namespace

std::vector<SweepSummary> summarize(std::span<const SweepRecord> records) {
  std::vector<SweepSummary> out;
  std::size_t i = 0;
  while (i < records.size()) {
    std::size_t j = i;
    double sum = 0.0;
    while (j < records.size() && records[j].dimension == records[i].dimension) {
      sum += records[j].max_cosine;
      ++j;
    }
    SweepSummary s;
    s.dimension = records[i].dimension;
    s.trials = j - i;
    s.mean = sum / static_cast<double>(s.trials);
    if (s.trials > 1) {
      double sq = 0.0;
      for (std::size_t k = i; k < j; ++k) {
        const double d = records[k].max_cosine - s.mean;
        sq += d * d;
      }
      s.variance = sq / static_cast<double>(s.trials - 1);
    }
    out.push_back(s);
    i = j;
  }
  return out;
}

SweepResult dimension_sweep_serial(Distribution dist, QuantMode mode,
                                   std::span<const std::size_t> dims, std::size_t trials,
                                   std::uint64_t base_seed) {
  check_sweep_args(dims, trials);
  SweepResult result;
  result.records.reserve(dims.size() * trials);
  for (std::size_t dim : dims) {
    for (std::size_t t = 0; t < trials; ++t) {
      result.records.push_back(run_trial(dist, mode, dim, t, base_seed));
    }
  }
  result.summary = summarize(result.records);
  return result;
}

SweepResult dimension_sweep_parallel(Distribution dist, QuantMode mode,
                                     std::span<const std::size_t> dims, std::size_t trials,
                                     std::uint64_t base_seed, int threads) {
  check_sweep_args(dims, trials);
  SweepResult result;
  result.records.resize(dims.size() * trials);
  const auto total = static_cast<std::ptrdiff_t>(result.records.size());
#pragma omp parallel for schedule(dynamic, 4) num_threads(std::max(threads, 1))
  for (std::ptrdiff_t idx = 0; idx < total; ++idx) {
    const auto u = static_cast<std::size_t>(idx);
    result.records[u] = run_trial(dist, mode, dims[u / trials], u % trials, base_seed);
  }
  result.summary = summarize(result.records);
  return result;
}

namespace {

double normal_pdf(double x) { return std::exp(-0.5 * x * x) / std::sqrt(2.0 * std::numbers::pi); }
double normal_upper_tail(double x) { return 0.5 * std::erfc(x / std::numbers::sqrt2); }

// Score of keeping |x| > tau for standard normal x.
double normal_ternary_score(double tau) {
  return 2.0 * normal_pdf(tau) / std::sqrt(2.0 * normal_upper_tail(tau));
}

// Golden-section search for the maximizing threshold on [0, 4]; the score is
// unimodal in tau there.
double normal_ternary_threshold() {
  const double ratio = (std::sqrt(5.0) - 1.0) / 2.0;
  double lo = 0.0;
  double hi = 4.0;
  double a = hi - ratio * (hi - lo);
  double b = lo + ratio * (hi - lo);
  double fa = normal_ternary_score(a);
  double fb = normal_ternary_score(b);
  for (int i = 0; i < 200 && hi - lo > 1e-14; ++i) {
    if (fa < fb) {
      lo = a;
      a = b;
      fa = fb;
      b = lo + ratio * (hi - lo);
      fb = normal_ternary_score(b);
    } else {
      hi = b;
      b = a;
      fb = fa;
      a = hi - ratio * (hi - lo);
      fa = normal_ternary_score(a);
    }
  }
  return 0.5 * (lo + hi);
}

}  // namespace

double reference_limits(Distribution dist, QuantMode mode) {
  if (mode == QuantMode::Binary) {
    return dist == Distribution::UniformSymmetric ? std::sqrt(3.0) / 2.0
                                                  : std::sqrt(2.0 / std::numbers::pi);
  }
  if (dist == Distribution::UniformSymmetric) {
    const double m = 2.0 / 3.0;
    return std::sqrt(3.0) * std::sqrt(m) * (2.0 - m) / 2.0;
  }
  return normal_ternary_score(normal_ternary_threshold());
}

double reference_support_fraction(Distribution dist, QuantMode mode) {
  if (mode == QuantMode::Binary) return 1.0;
  if (dist == Distribution::UniformSymmetric) return 2.0 / 3.0;
  return 2.0 * normal_upper_tail(normal_ternary_threshold());
}

std::string sweep_csv(const SweepResult& result) {
  std::string out(kSweepCsvHeader);
  out += '\n';
  for (const auto& r : result.records) {
    out += std::to_string(r.dimension) + ',' + std::to_string(r.trial) + ',' +
           std::string(to_string(r.mode)) + ',' + std::string(to_string(r.distribution)) + ',' +
           format_double(r.max_cosine) + ',' + std::to_string(r.argmax_m) + ',' +
           std::to_string(r.seed) + '\n';
  }
  return out;
}

void export_csv(const SweepResult& result, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorKind::IoError, "cannot open '" + path.string() + "' for writing");
  out << sweep_csv(result);
  if (!out) throw Error(ErrorKind::IoError, "write failed for '" + path.string() + "'");
}

std::vector<SweepRecord> read_sweep_csv(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::IoError, "cannot open '" + path.string() + "'");
  std::string line;
  if (!std::getline(in, line) || line != kSweepCsvHeader) {
    throw Error(ErrorKind::ParseError, path.string() + ": unexpected CSV header");
  }
  std::vector<SweepRecord> out;
  std::size_t lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    std::vector<std::string> fields;
    std::stringstream ss(line);
    std::string f;
    while (std::getline(ss, f, ',')) fields.push_back(f);
    if (fields.size() != 7) {
      throw Error(ErrorKind::ParseError, path.string() + ": line " + std::to_string(lineno) +
                                             " has " + std::to_string(fields.size()) + " fields");
    }
    try {
      SweepRecord r;
      r.dimension = std::stoull(fields[0]);
      r.trial = std::stoull(fields[1]);
      r.mode = parse_mode(fields[2]);
      r.distribution = parse_distribution(fields[3]);
      r.max_cosine = std::stod(fields[4]);
      r.argmax_m = std::stoull(fields[5]);
      r.seed = std::stoull(fields[6]);
      out.push_back(r);
    } catch (const std::logic_error&) {
      throw Error(ErrorKind::ParseError,
                  path.string() + ": malformed number on line " + std::to_string(lineno));
    } catch (const Error& e) {
      throw Error(ErrorKind::ParseError,
                  path.string() + ": line " + std::to_string(lineno) + ": " + e.detail());
    }
  }
  return out;
}

}  // namespace tnt
