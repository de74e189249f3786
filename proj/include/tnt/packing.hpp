#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace tnt {

// 2-bit code layout: 0 -> 00, +1 -> 01, -1 -> 10; four codes per byte with
// the first code in the least-significant bits; the last byte is zero-padded.
// 11 is never written.
inline constexpr std::size_t kCodesPerByte = 4;

constexpr std::size_t packed_size(std::size_t count) {
  return (count + kCodesPerByte - 1) / kCodesPerByte;
}

std::vector<std::uint8_t> pack_codes(std::span<const std::int8_t> codes);

// Appends to an existing stream; `code_offset` is the number of codes already
// in `out` (so a layer's vectors pack into one continuous stream).
void pack_codes_into(std::span<const std::int8_t> codes, std::vector<std::uint8_t>& out,
                     std::size_t code_offset);

// Throws InvalidCode on the pattern 11, LengthMismatch if count exceeds the
// capacity of `bytes`.
std::vector<std::int8_t> unpack_codes(std::span<const std::uint8_t> bytes, std::size_t count);

}  // namespace tnt
