#pragma once

#include <cstdint>
#include <set>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "tnt/container.hpp"
#include "tnt/kernels.hpp"
#include "tnt/report.hpp"
#include "tnt/scalars.hpp"
#include "tnt/tensor.hpp"

namespace tnt {

struct QuantizeConfig {
  QuantMode mode = QuantMode::Ternary;
  ScalarKind scalars = ScalarKind::Single;
  // Preferred slicing. Layers whose rank does not fit it use their natural
  // strategy: channel-wise for 4-dim, row-wise for 2-dim, flat otherwise.
  DecomposeStrategy strategy = DecomposeStrategy::ChannelWise;
  std::set<std::string> skip_layers;
  bool quantize_biases = false;
  // Worker threads. Not part of the output: results are identical for any value.
  int jobs = 1;

  // Throws InvalidConfig naming the valid layers if a skip name is unknown.
  void validate(const ModelManifest& manifest) const;

  friend bool operator==(const QuantizeConfig&, const QuantizeConfig&) = default;
};

DecomposeStrategy resolve_strategy(DecomposeStrategy preferred, const TensorShape& shape) noexcept;

struct QuantizedLayer {
  LayerEntry entry;
  bool quantized = false;
  std::string skip_reason;  // "config", "bias", "other" when not quantized

  DecomposeStrategy strategy = DecomposeStrategy::Flat;
  std::size_t vector_count = 0;
  std::size_t vector_length = 0;
  std::vector<std::uint8_t> codes;  // one 2-bit stream over all vectors in order
  // Per vector in order: 0 (None), 1 (Single, or Dual fallback), 2 (Dual: p then n).
  std::vector<float> scalars;
  std::vector<std::uint32_t> degenerate;     // all-zero vectors
  std::vector<std::uint32_t> dual_fallback;  // Dual mode vectors storing one scalar
  LayerStats stats;

  std::vector<std::uint8_t> raw;  // verbatim payload of an unquantized layer

  std::size_t scalar_count(std::size_t vector, ScalarKind kind) const;
  friend bool operator==(const QuantizedLayer&, const QuantizedLayer&) = default;
};

struct QuantizedModel {
  static constexpr int kFormatVersion = 1;

  int format_version = kFormatVersion;
  QuantizeConfig config;  // jobs is always stored as 1
  std::string source_digest;
  std::vector<QuantizedLayer> layers;

  friend bool operator==(const QuantizedModel&, const QuantizedModel&) = default;
};

std::pair<QuantizedModel, ConversionReport> quantize_model(const TensorContainer& container,
                                                           const QuantizeConfig& config);

// In-memory variant; unquantized layers are stored as the tensor values
// encoded in the manifest dtype.
std::pair<QuantizedModel, ConversionReport> quantize_model(const ModelManifest& manifest,
                                                           std::span<const WeightTensor> tensors,
                                                           const QuantizeConfig& config);

// Per-vector ternary codes and scalars of a quantized layer.
std::vector<std::int8_t> layer_codes(const QuantizedLayer& layer);
std::vector<ScalarSet> layer_scalars(const QuantizedLayer& layer, ScalarKind kind);

// Reconstructed weights: scaled codes for quantized layers, the stored payload
// for the rest.
WeightTensor dequantize_layer(const QuantizedLayer& layer, ScalarKind kind);

ConversionReport build_report(const QuantizedModel& model);

}  // namespace tnt
