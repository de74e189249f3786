#include "zip.hpp"

#include <zlib.h>

#include <algorithm>

#include "tnt/error.hpp"

namespace tnt::zip {

namespace {

constexpr std::uint32_t kLocalSig = 0x04034b50;
constexpr std::uint32_t kCentralSig = 0x02014b50;
constexpr std::uint32_t kEndSig = 0x06054b50;

std::uint16_t le16(const std::uint8_t* p) { return static_cast<std::uint16_t>(p[0] | (p[1] << 8)); }
std::uint32_t le32(const std::uint8_t* p) {
  return static_cast<std::uint32_t>(p[0]) | (static_cast<std::uint32_t>(p[1]) << 8) |
         (static_cast<std::uint32_t>(p[2]) << 16) | (static_cast<std::uint32_t>(p[3]) << 24);
}

void put16(std::vector<std::uint8_t>& out, std::uint16_t v) {
  out.push_back(static_cast<std::uint8_t>(v));
  out.push_back(static_cast<std::uint8_t>(v >> 8));
}
void put32(std::vector<std::uint8_t>& out, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
}

std::vector<std::uint8_t> read_at(std::ifstream& in, std::uint64_t offset, std::size_t size) {
  std::vector<std::uint8_t> buf(size);
  in.clear();
  in.seekg(static_cast<std::streamoff>(offset));
  in.read(reinterpret_cast<char*>(buf.data()), static_cast<std::streamsize>(size));
  if (static_cast<std::size_t>(in.gcount()) != size) {
    throw Error(ErrorKind::ParseError, "zip archive truncated at offset " + std::to_string(offset));
  }
  return buf;
}

std::vector<std::uint8_t> inflate_raw(const std::vector<std::uint8_t>& src, std::size_t max_out,
                                      bool require_complete) {
  std::vector<std::uint8_t> out(max_out);
  z_stream zs{};
  if (inflateInit2(&zs, -MAX_WBITS) != Z_OK) {
    throw Error(ErrorKind::ParseError, "zlib initialisation failed");
  }
  zs.next_in = const_cast<Bytef*>(src.data());
  zs.avail_in = static_cast<uInt>(src.size());
  zs.next_out = out.data();
  zs.avail_out = static_cast<uInt>(out.size());
  int rc = Z_OK;
  while (zs.avail_out > 0 && rc == Z_OK) rc = inflate(&zs, Z_SYNC_FLUSH);
  const std::size_t produced = out.size() - zs.avail_out;
  inflateEnd(&zs);
  if (rc != Z_OK && rc != Z_STREAM_END && !(rc == Z_BUF_ERROR && produced == out.size())) {
    throw Error(ErrorKind::ParseError, "corrupt deflate stream");
  }
  if (require_complete && produced != max_out) {
    throw Error(ErrorKind::ParseError, "deflate stream shorter than declared size");
  }
  out.resize(produced);
  return out;
}

}  // namespace

std::vector<Entry> list_entries(std::ifstream& in, std::uint64_t file_size) {
  // End-of-central-directory record: 22 bytes plus an optional comment.
  const std::size_t tail = static_cast<std::size_t>(std::min<std::uint64_t>(file_size, 22 + 65535));
  if (tail < 22) throw Error(ErrorKind::ParseError, "zip archive too short");
  const auto buf = read_at(in, file_size - tail, tail);
  std::size_t eocd = std::string::npos;
  for (std::size_t i = tail - 22 + 1; i-- > 0;) {
    if (le32(&buf[i]) == kEndSig) {
      eocd = i;
      break;
    }
  }
  if (eocd == std::string::npos) {
    throw Error(ErrorKind::ParseError, "no zip end-of-central-directory record");
  }
  const std::uint16_t count = le16(&buf[eocd + 10]);
  const std::uint32_t dir_size = le32(&buf[eocd + 12]);
  const std::uint32_t dir_offset = le32(&buf[eocd + 16]);
  if (dir_offset == 0xFFFFFFFFu || count == 0xFFFF) {
    throw Error(ErrorKind::ParseError, "zip64 archives are not supported");
  }
  if (static_cast<std::uint64_t>(dir_offset) + dir_size > file_size) {
    throw Error(ErrorKind::ParseError,
                "central directory exceeds file at offset " + std::to_string(dir_offset));
  }
  const auto dir = read_at(in, dir_offset, dir_size);
  std::vector<Entry> entries;
  std::size_t pos = 0;
  for (std::uint16_t k = 0; k < count; ++k) {
    if (pos + 46 > dir.size() || le32(&dir[pos]) != kCentralSig) {
      throw Error(ErrorKind::ParseError, "bad central directory entry at offset " +
                                             std::to_string(dir_offset + pos));
    }
    Entry e;
    e.method = le16(&dir[pos + 10]);
    e.crc32 = le32(&dir[pos + 16]);
    e.compressed_size = le32(&dir[pos + 20]);
    e.uncompressed_size = le32(&dir[pos + 24]);
    const std::uint16_t name_len = le16(&dir[pos + 28]);
    const std::uint16_t extra_len = le16(&dir[pos + 30]);
    const std::uint16_t comment_len = le16(&dir[pos + 32]);
    e.local_header_offset = le32(&dir[pos + 42]);
    if (pos + 46 + name_len > dir.size()) {
      throw Error(ErrorKind::ParseError, "central directory truncated");
    }
    e.name.assign(reinterpret_cast<const char*>(&dir[pos + 46]), name_len);
    pos += 46u + name_len + extra_len + comment_len;

    const auto local = read_at(in, e.local_header_offset, 30);
    if (le32(local.data()) != kLocalSig) {
      throw Error(ErrorKind::ParseError,
                  "bad local header at offset " + std::to_string(e.local_header_offset));
    }
    e.data_offset = e.local_header_offset + 30 + le16(&local[26]) + le16(&local[28]);
    if (e.data_offset + e.compressed_size > file_size) {
      throw Error(ErrorKind::ParseError, "member '" + e.name + "' truncated at offset " +
                                             std::to_string(file_size));
    }
    if (e.method != 0 && e.method != 8) {
      throw Error(ErrorKind::ParseError, "member '" + e.name + "' uses unsupported compression " +
                                             std::to_string(e.method));
    }
    entries.push_back(std::move(e));
  }
  return entries;
}

std::vector<std::uint8_t> read_prefix(std::ifstream& in, const Entry& entry, std::size_t max_bytes) {
  const std::size_t want =
      static_cast<std::size_t>(std::min<std::uint64_t>(max_bytes, entry.uncompressed_size));
  if (entry.method == 0) return read_at(in, entry.data_offset, want);
  const auto src = read_at(in, entry.data_offset, static_cast<std::size_t>(entry.compressed_size));
  return inflate_raw(src, want, false);
}

std::vector<std::uint8_t> read_entry(std::ifstream& in, const Entry& entry) {
  std::vector<std::uint8_t> data;
  if (entry.method == 0) {
    data = read_at(in, entry.data_offset, static_cast<std::size_t>(entry.uncompressed_size));
  } else {
    const auto src =
        read_at(in, entry.data_offset, static_cast<std::size_t>(entry.compressed_size));
    data = inflate_raw(src, static_cast<std::size_t>(entry.uncompressed_size), true);
  }
  const auto crc = static_cast<std::uint32_t>(
      ::crc32(0L, data.data(), static_cast<uInt>(data.size())));
  if (crc != entry.crc32) {
    throw Error(ErrorKind::ParseError, "CRC mismatch in member '" + entry.name + "'");
  }
  return data;
}

void write_stored(const std::filesystem::path& path, const std::vector<Member>& members) {
  std::vector<std::uint8_t> out;
  std::vector<std::uint8_t> central;
  constexpr std::uint16_t kVersion = 20;
  constexpr std::uint16_t kDosDate = (1 << 5) | 1;  // 1980-01-01, fixed for reproducible files
  for (const auto& m : members) {
    if (out.size() + m.data.size() >= 0xFFFFFFFFull) {
      throw Error(ErrorKind::IoError, "archive would need zip64");
    }
    const auto offset = static_cast<std::uint32_t>(out.size());
    const auto crc = static_cast<std::uint32_t>(
        ::crc32(0L, m.data.data(), static_cast<uInt>(m.data.size())));
    const auto size = static_cast<std::uint32_t>(m.data.size());
    const auto name_len = static_cast<std::uint16_t>(m.name.size());

    put32(out, kLocalSig);
    put16(out, kVersion);
    put16(out, 0);  // flags
    put16(out, 0);  // stored
    put16(out, 0);  // time
    put16(out, kDosDate);
    put32(out, crc);
    put32(out, size);
    put32(out, size);
    put16(out, name_len);
    put16(out, 0);
    out.insert(out.end(), m.name.begin(), m.name.end());
    out.insert(out.end(), m.data.begin(), m.data.end());

    put32(central, kCentralSig);
    put16(central, kVersion);
    put16(central, kVersion);
    put16(central, 0);
    put16(central, 0);
    put16(central, 0);
    put16(central, kDosDate);
    put32(central, crc);
    put32(central, size);
    put32(central, size);
    put16(central, name_len);
    put16(central, 0);  // extra
    put16(central, 0);  // comment
    put16(central, 0);  // disk
    put16(central, 0);  // internal attrs
    put32(central, 0);  // external attrs
    put32(central, offset);
    central.insert(central.end(), m.name.begin(), m.name.end());
  }
  const auto dir_offset = static_cast<std::uint32_t>(out.size());
  out.insert(out.end(), central.begin(), central.end());
  put32(out, kEndSig);
  put16(out, 0);
  put16(out, 0);
  put16(out, static_cast<std::uint16_t>(members.size()));
  put16(out, static_cast<std::uint16_t>(members.size()));
  put32(out, static_cast<std::uint32_t>(central.size()));
  put32(out, dir_offset);
  put16(out, 0);

  std::ofstream file(path, std::ios::binary | std::ios::trunc);
  if (!file) throw Error(ErrorKind::IoError, "cannot open '" + path.string() + "' for writing");
  file.write(reinterpret_cast<const char*>(out.data()), static_cast<std::streamsize>(out.size()));
  if (!file) throw Error(ErrorKind::IoError, "write failed for '" + path.string() + "'");
}

}  // namespace tnt::zip
