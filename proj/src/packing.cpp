#include "tnt/packing.hpp"

#include <string>

#include "tnt/error.hpp"

namespace tnt {

namespace {

std::uint8_t encode(std::int8_t c, std::size_t pos) {
  switch (c) {
    case 0: return 0b00;
    case 1: return 0b01;
    case -1: return 0b10;
    default: break;
  }
  throw Error(ErrorKind::InvalidCode,
              "code " + std::to_string(c) + " at position " + std::to_string(pos));
}

}  // namespace

void pack_codes_into(std::span<const std::int8_t> codes, std::vector<std::uint8_t>& out,
                     std::size_t code_offset) {
  out.resize(packed_size(code_offset + codes.size()), 0);
  for (std::size_t i = 0; i < codes.size(); ++i) {
    const std::size_t slot = code_offset + i;
    out[slot / kCodesPerByte] |=
        static_cast<std::uint8_t>(encode(codes[i], i) << (2 * (slot % kCodesPerByte)));
  }
}

std::vector<std::uint8_t> pack_codes(std::span<const std::int8_t> codes) {
  std::vector<std::uint8_t> out;
  pack_codes_into(codes, out, 0);
  return out;
}

std::vector<std::int8_t> unpack_codes(std::span<const std::uint8_t> bytes, std::size_t count) {
  if (count > bytes.size() * kCodesPerByte) {
    throw Error(ErrorKind::LengthMismatch, std::to_string(count) + " codes requested from " +
                                               std::to_string(bytes.size()) + " bytes");
  }
  std::vector<std::int8_t> out(count);
  for (std::size_t i = 0; i < count; ++i) {
    const unsigned bits = (bytes[i / kCodesPerByte] >> (2 * (i % kCodesPerByte))) & 0b11u;
    switch (bits) {
      case 0b00: out[i] = 0; break;
      case 0b01: out[i] = 1; break;
      case 0b10: out[i] = -1; break;
      default:
        throw Error(ErrorKind::InvalidCode, "bit pattern 11 at code " + std::to_string(i));
    }
  }
  return out;
}

}  // namespace tnt
