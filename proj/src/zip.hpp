#pragma once

// Minimal zip archive support for .npz containers: stored and deflated
// members on read, stored members on write. No zip64.

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

namespace tnt::zip {

struct Entry {
  std::string name;
  std::uint16_t method = 0;  // 0 stored, 8 deflate
  std::uint32_t crc32 = 0;
  std::uint64_t compressed_size = 0;
  std::uint64_t uncompressed_size = 0;
  std::uint64_t local_header_offset = 0;
  std::uint64_t data_offset = 0;  // resolved from the local header
};

// Central directory in archive order.
std::vector<Entry> list_entries(std::ifstream& in, std::uint64_t file_size);

// Up to `max_bytes` of the member's uncompressed content from its start.
std::vector<std::uint8_t> read_prefix(std::ifstream& in, const Entry& entry, std::size_t max_bytes);

std::vector<std::uint8_t> read_entry(std::ifstream& in, const Entry& entry);

struct Member {
  std::string name;
  std::vector<std::uint8_t> data;
};

void write_stored(const std::filesystem::path& path, const std::vector<Member>& members);

}  // namespace tnt::zip
