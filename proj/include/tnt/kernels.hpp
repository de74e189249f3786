#pragma once

// Per-vector quantization of a whole layer payload. The serial version is
// the reference; the OpenMP version must produce identical results for any
// thread count (tests compare them element by element).

#include <cstddef>
#include <cstdint>
#include <span>
#include <string_view>
#include <vector>

#include "tnt/scalars.hpp"
#include "tnt/tensor.hpp"

namespace tnt {

enum class QuantMode { Ternary, Binary };

std::string_view to_string(QuantMode m) noexcept;
QuantMode parse_mode(std::string_view text);

struct LayerCodes {
  std::vector<std::int8_t> codes;    // geometry.count * geometry.length, vector-major
  std::vector<double> cosines;       // per vector; 0 for degenerate vectors
  std::vector<std::size_t> support;  // nonzero count per vector
  std::vector<ScalarSet> scalars;    // per vector
  std::vector<std::uint8_t> degenerate;  // 1 where the vector was all zero

  friend bool operator==(const LayerCodes&, const LayerCodes&) = default;
};

// Degenerate (all-zero) vectors get all-zero codes and a zero Single scalar
// (or no scalar in ScalarKind::None).
LayerCodes quantize_vectors_serial(std::span<const double> values, VectorGeometry geometry,
                                   QuantMode mode, ScalarKind scalars);

LayerCodes quantize_vectors_parallel(std::span<const double> values, VectorGeometry geometry,
                                     QuantMode mode, ScalarKind scalars, int threads);

}  // namespace tnt
