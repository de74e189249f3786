#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "tnt/container.hpp"

namespace tnt {

struct LayerStats {
  double mean_cosine = 0.0;  // over non-degenerate vectors
  double min_cosine = 0.0;
  double support_fraction_min = 0.0;  // m / N
  double support_fraction_mean = 0.0;
  double support_fraction_max = 0.0;

  friend bool operator==(const LayerStats&, const LayerStats&) = default;
};

struct LayerReport {
  std::string name;
  std::string shape;
  Dtype dtype = Dtype::F32;
  bool quantized = false;
  std::string skip_reason;
  std::size_t parameters = 0;
  std::size_t vector_count = 0;
  std::size_t vector_length = 0;
  LayerStats stats;
  std::size_t degenerate_vectors = 0;
  std::size_t original_bytes = 0;
  std::size_t code_bytes = 0;    // packed 2-bit stream (or raw payload when skipped)
  std::size_t scalar_bytes = 0;
  double code_ratio = 1.0;        // original / code bytes
  double total_ratio = 1.0;       // original / (code + scalar) bytes
};

struct ConversionReport {
  std::vector<LayerReport> layers;
  std::size_t total_parameters = 0;
  std::size_t quantized_parameters = 0;
  std::size_t original_bytes = 0;
  std::size_t stored_bytes = 0;  // codes + scalars + raw payloads
  double overall_ratio = 1.0;
  std::size_t file_bytes = 0;    // set once the .tnt file is written
  std::size_t warnings = 0;      // degenerate vectors
  double wall_seconds = 0.0;
};

std::string report_csv(const ConversionReport& report);
std::string report_json(const ConversionReport& report);
// Format chosen by extension: .json, otherwise CSV.
void write_report(const std::filesystem::path& path, const ConversionReport& report);
std::string report_table(const ConversionReport& report);

struct CompressionCheck {
  struct Layer {
    std::string name;
    double code_ratio = 1.0;
    bool checked = false;
    bool ok = false;
  };
  bool passed = false;
  std::vector<Layer> layers;
  double overall_ratio = 1.0;
};

inline constexpr double kMinCodeRatio = 15.9;
inline constexpr double kMaxCodeRatio = 16.0;
// Layers below this many weights are reported but not asserted: the last
// code byte's padding dominates.
inline constexpr std::size_t kCompressionCheckMinWeights = 1024;

// Passes when every quantized f32 layer of at least kCompressionCheckMinWeights
// weights has a code-stream ratio in [15.9, 16.0], and at least one exists.
CompressionCheck verify_compression(const ConversionReport& report);

}  // namespace tnt
