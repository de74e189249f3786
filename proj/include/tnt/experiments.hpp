#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "tnt/kernels.hpp"
#include "tnt/ternary.hpp"

namespace tnt {

// Uniform on [-1, 1] or N(0, 1). Cosine scores are scale invariant, so only
// the shape of the law matters.
enum class Distribution { UniformSymmetric, StandardNormal };

std::string_view to_string(Distribution d) noexcept;
Distribution parse_distribution(std::string_view text);

std::vector<double> gen_vector(Distribution dist, std::size_t n, std::uint64_t seed);

struct CurveExperiment {
  SimilarityCurve curve;
  double max_cosine = 0.0;
  std::size_t argmax_m = 0;
};

CurveExperiment curve_experiment(Distribution dist, std::size_t n, std::uint64_t seed);

// "m,score" rows for M = 1..N.
std::string curve_csv(const SimilarityCurve& curve);

// Exactly one strict local maximum once runs of equal scores are collapsed.
bool is_unimodal(std::span<const double> scores);
double unimodality_rate(Distribution dist, std::size_t n, std::size_t trials,
                        std::uint64_t base_seed);

struct SweepRecord {
  std::size_t dimension = 0;
  std::size_t trial = 0;
  QuantMode mode = QuantMode::Ternary;
  Distribution distribution = Distribution::UniformSymmetric;
  double max_cosine = 0.0;
  std::size_t argmax_m = 0;
  std::uint64_t seed = 0;

  friend bool operator==(const SweepRecord&, const SweepRecord&) = default;
};

struct SweepSummary {
  std::size_t dimension = 0;
  std::size_t trials = 0;
  double mean = 0.0;
  double variance = 0.0;  // unbiased sample variance, 0 for one trial
};

struct SweepResult {
  std::vector<SweepRecord> records;    // by (dimension, trial)
  std::vector<SweepSummary> summary;   // one per dimension

  const SweepSummary& at_dimension(std::size_t dim) const;
};

// Trial (dim, t) always uses derive_seed(base_seed, dim, t), whatever the
// mode or thread count, so ternary and binary sweeps see the same vectors.
SweepResult dimension_sweep_serial(Distribution dist, QuantMode mode,
                                   std::span<const std::size_t> dims, std::size_t trials,
                                   std::uint64_t base_seed);
SweepResult dimension_sweep_parallel(Distribution dist, QuantMode mode,
                                     std::span<const std::size_t> dims, std::size_t trials,
                                     std::uint64_t base_seed, int threads);

inline SweepResult dimension_sweep(Distribution dist, QuantMode mode,
                                   std::span<const std::size_t> dims, std::size_t trials,
                                   std::uint64_t base_seed, int threads = 1) {
  return threads > 1 ? dimension_sweep_parallel(dist, mode, dims, trials, base_seed, threads)
                     : dimension_sweep_serial(dist, mode, dims, trials, base_seed);
}

std::vector<SweepSummary> summarize(std::span<const SweepRecord> records);

// Large-N limit of the best cosine score.
//   ternary, uniform: max over m of sqrt(3) * sqrt(m) * (2 - m) / 2, at m = 2/3
//   ternary, normal:  max over tau of 2 phi(tau) / sqrt(2 (1 - Phi(tau)))
//   binary:           E|x| / sqrt(E x^2): sqrt(3)/2 uniform, sqrt(2/pi) normal
double reference_limits(Distribution dist, QuantMode mode);

// Limit of argmax_m / N for ternary mode (1 for binary).
double reference_support_fraction(Distribution dist, QuantMode mode);

inline constexpr std::string_view kSweepCsvHeader =
    "dimension,trial,mode,distribution,max_cosine,argmax_m,seed";

std::string sweep_csv(const SweepResult& result);
void export_csv(const SweepResult& result, const std::filesystem::path& path);
std::vector<SweepRecord> read_sweep_csv(const std::filesystem::path& path);

}  // namespace tnt
