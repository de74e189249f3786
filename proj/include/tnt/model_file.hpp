#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

#include "tnt/pipeline.hpp"

namespace tnt {

// .tnt layout, all integers little-endian:
//   "TNT1" | u32 header length | UTF-8 JSON header | layer sections
// Each quantized layer section is its packed code stream followed by its
// scalars as f32; an unquantized layer section is its verbatim payload. The
// header records every section's offset relative to the first section.
std::vector<std::uint8_t> encode_quantized(const QuantizedModel& model);
QuantizedModel decode_quantized(std::span<const std::uint8_t> bytes);

// Returns the number of bytes written.
std::size_t write_quantized(const std::filesystem::path& path, const QuantizedModel& model);
QuantizedModel read_quantized(const std::filesystem::path& path);

}  // namespace tnt
