#include "tnt/container.hpp"

#include <openssl/evp.h>

#include <bit>
#include <cstring>
#include <fstream>
#include <regex>

#include "tnt/error.hpp"
#include "zip.hpp"

namespace tnt {

static_assert(std::endian::native == std::endian::little,
              "payload decoding assumes a little-endian host");

std::string_view to_string(Dtype d) noexcept { return d == Dtype::F32 ? "f32" : "f64"; }
std::size_t dtype_size(Dtype d) noexcept { return d == Dtype::F32 ? 4 : 8; }

std::string_view to_string(LayerRole r) noexcept {
  switch (r) {
    case LayerRole::Conv: return "conv";
    case LayerRole::Dense: return "dense";
    case LayerRole::Bias: return "bias";
    case LayerRole::Other: return "other";
  }
  return "other";
}

LayerRole role_for_shape(const TensorShape& shape) noexcept {
  switch (shape.rank()) {
    case 4: return LayerRole::Conv;
    case 2: return LayerRole::Dense;
    case 1: return LayerRole::Bias;
    default: return LayerRole::Other;
  }
}

std::optional<std::size_t> ModelManifest::index_of(std::string_view name) const {
  for (std::size_t i = 0; i < layers.size(); ++i) {
    if (layers[i].name == name) return i;
  }
  return std::nullopt;
}

namespace {

constexpr char kNpyMagic[] = "\x93NUMPY";
constexpr std::size_t kNpyMagicLen = 6;

struct NpyHeader {
  Dtype dtype = Dtype::F32;
  TensorShape shape;
  std::size_t data_offset = 0;  // from the start of the .npy bytes
};

// Size of the fixed preamble (magic, version, header length) or 0 if the
// bytes are too short to tell.
std::size_t preamble_size(const std::vector<std::uint8_t>& bytes) {
  if (bytes.size() < 8) return 0;
  return bytes[6] == 1 ? 10 : 12;
}

NpyHeader parse_npy_header(const std::vector<std::uint8_t>& bytes, const std::string& what) {
  if (bytes.size() < 10 || std::memcmp(bytes.data(), kNpyMagic, kNpyMagicLen) != 0) {
    throw Error(ErrorKind::ParseError, what + ": missing \\x93NUMPY magic at offset 0");
  }
  const std::uint8_t major = bytes[6];
  if (major < 1 || major > 3) {
    throw Error(ErrorKind::ParseError, what + ": unsupported npy version " +
                                           std::to_string(major) + " at offset 6");
  }
  const std::size_t pre = preamble_size(bytes);
  if (bytes.size() < pre) throw Error(ErrorKind::ParseError, what + ": header truncated at offset 8");
  std::size_t header_len = bytes[8] | (bytes[9] << 8);
  if (major > 1) header_len |= (std::size_t{bytes[10]} << 16) | (std::size_t{bytes[11]} << 24);
  if (bytes.size() < pre + header_len) {
    throw Error(ErrorKind::ParseError, what + ": header truncated at offset " +
                                           std::to_string(bytes.size()));
  }
  const std::string dict(reinterpret_cast<const char*>(bytes.data() + pre), header_len);

  static const std::regex descr_re(R"('descr'\s*:\s*'([^']*)')");
  static const std::regex order_re(R"('fortran_order'\s*:\s*(True|False))");
  static const std::regex shape_re(R"('shape'\s*:\s*\(([^)]*)\))");
  std::smatch m;
  if (!std::regex_search(dict, m, descr_re)) {
    throw Error(ErrorKind::ParseError, what + ": header has no 'descr' at offset " +
                                           std::to_string(pre));
  }
  const std::string descr = m[1];
  NpyHeader h;
  if (descr == "<f4") {
    h.dtype = Dtype::F32;
  } else if (descr == "<f8") {
    h.dtype = Dtype::F64;
  } else {
    throw Error(ErrorKind::UnsupportedDtype,
                what + ": dtype '" + descr + "' (only little-endian f4/f8 are accepted)");
  }
  if (!std::regex_search(dict, m, order_re)) {
    throw Error(ErrorKind::ParseError, what + ": header has no 'fortran_order'");
  }
  if (m[1] == "True") {
    throw Error(ErrorKind::UnsupportedDtype, what + ": Fortran-order payloads are not accepted");
  }
  if (!std::regex_search(dict, m, shape_re)) {
    throw Error(ErrorKind::ParseError, what + ": header has no 'shape'");
  }
  std::vector<std::size_t> dims;
  const std::string tuple = m[1];
  static const std::regex dim_re(R"(\s*(\d+)\s*)");
  for (auto it = std::sregex_iterator(tuple.begin(), tuple.end(), dim_re);
       it != std::sregex_iterator(); ++it) {
    dims.push_back(std::stoull((*it)[1]));
  }
  h.shape = TensorShape(std::move(dims));
  h.data_offset = pre + header_len;
  return h;
}

std::vector<double> decode_payload(const std::uint8_t* data, std::size_t count, Dtype dtype) {
  std::vector<double> out(count);
  if (dtype == Dtype::F64) {
    std::memcpy(out.data(), data, count * sizeof(double));
  } else {
    for (std::size_t i = 0; i < count; ++i) {
      float f;
      std::memcpy(&f, data + i * sizeof(float), sizeof(float));
      out[i] = f;
    }
  }
  return out;
}

std::uint64_t file_size_of(const std::filesystem::path& path) {
  std::error_code ec;
  const auto size = std::filesystem::file_size(path, ec);
  if (ec) throw Error(ErrorKind::IoError, "cannot stat '" + path.string() + "': " + ec.message());
  return size;
}

std::ifstream open_input(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::IoError, "cannot open '" + path.string() + "'");
  return in;
}

std::vector<std::uint8_t> read_range(std::ifstream& in, std::uint64_t offset, std::size_t size,
                                     const std::string& what) {
  std::vector<std::uint8_t> buf(size);
  in.clear();
  in.seekg(static_cast<std::streamoff>(offset));
  in.read(reinterpret_cast<char*>(buf.data()), static_cast<std::streamsize>(size));
  if (static_cast<std::size_t>(in.gcount()) != size) {
    throw Error(ErrorKind::ParseError, what + ": truncated at offset " +
                                           std::to_string(offset + static_cast<std::uint64_t>(in.gcount())));
  }
  return buf;
}

std::string member_to_layer_name(const std::string& member) {
  constexpr std::string_view ext = ".npy";
  if (member.size() > ext.size() && member.ends_with(ext)) {
    return member.substr(0, member.size() - ext.size());
  }
  return member;
}

}  // namespace

struct TensorContainer::Impl {
  std::filesystem::path path;
  bool archive = false;
  ModelManifest manifest;
  std::vector<zip::Entry> entries;       // archive members, parallel to manifest.layers
  std::vector<std::size_t> data_offsets;  // payload offset within the file or member
};

TensorContainer::TensorContainer(std::unique_ptr<Impl> impl) : impl_(std::move(impl)) {}
TensorContainer::TensorContainer(TensorContainer&&) noexcept = default;
TensorContainer& TensorContainer::operator=(TensorContainer&&) noexcept = default;
TensorContainer::~TensorContainer() = default;

TensorContainer TensorContainer::open(const std::filesystem::path& path) {
  auto impl = std::make_unique<Impl>();
  impl->path = path;
  const std::uint64_t size = file_size_of(path);
  auto in = open_input(path);
  const std::string fname = path.filename().string();

  std::vector<std::uint8_t> head(std::min<std::uint64_t>(size, 4));
  in.read(reinterpret_cast<char*>(head.data()), static_cast<std::streamsize>(head.size()));
  const bool is_zip = head.size() == 4 && head[0] == 'P' && head[1] == 'K' && head[2] == 3 &&
                      head[3] == 4;
  if (is_zip) {
    impl->archive = true;
    impl->entries = zip::list_entries(in, size);
    for (const auto& e : impl->entries) {
      const std::string what = fname + ":" + e.name;
      auto prefix = zip::read_prefix(in, e, 12);
      const std::size_t pre = preamble_size(prefix);
      if (pre == 0) throw Error(ErrorKind::ParseError, what + ": member truncated at offset 0");
      std::size_t hlen = 0;
      if (prefix.size() >= pre) {
        hlen = prefix[8] | (prefix[9] << 8);
        if (pre == 12) hlen |= (std::size_t{prefix[10]} << 16) | (std::size_t{prefix[11]} << 24);
      }
      prefix = zip::read_prefix(in, e, pre + hlen);
      const auto h = parse_npy_header(prefix, what);
      const std::uint64_t need =
          h.data_offset + h.shape.element_count() * dtype_size(h.dtype);
      if (need > e.uncompressed_size) {
        throw Error(ErrorKind::ParseError, what + ": payload truncated at offset " +
                                               std::to_string(e.uncompressed_size));
      }
      LayerEntry layer{member_to_layer_name(e.name), h.shape, h.dtype, role_for_shape(h.shape)};
      if (impl->manifest.index_of(layer.name)) {
        throw Error(ErrorKind::ParseError, what + ": duplicate tensor name");
      }
      impl->manifest.layers.push_back(std::move(layer));
      impl->data_offsets.push_back(h.data_offset);
    }
  } else {
    std::vector<std::uint8_t> prefix = read_range(in, 0, std::min<std::uint64_t>(size, 12), fname);
    const std::size_t pre = preamble_size(prefix);
    std::size_t hlen = 0;
    if (pre != 0 && prefix.size() >= pre) {
      hlen = prefix[8] | (prefix[9] << 8);
      if (pre == 12) hlen |= (std::size_t{prefix[10]} << 16) | (std::size_t{prefix[11]} << 24);
    }
    prefix = read_range(in, 0, std::min<std::uint64_t>(size, pre + hlen), fname);
    const auto h = parse_npy_header(prefix, fname);
    const std::uint64_t need = h.data_offset + h.shape.element_count() * dtype_size(h.dtype);
    if (need > size) {
      throw Error(ErrorKind::ParseError, fname + ": payload of " +
                                             std::to_string(need - h.data_offset) +
                                             " bytes truncated at offset " + std::to_string(size));
    }
    impl->manifest.layers.push_back(
        {path.stem().string(), h.shape, h.dtype, role_for_shape(h.shape)});
    impl->data_offsets.push_back(h.data_offset);
  }
  impl->manifest.source_digest = sha256_hex(path);
  return TensorContainer(std::move(impl));
}

const ModelManifest& TensorContainer::manifest() const noexcept { return impl_->manifest; }

std::vector<std::uint8_t> TensorContainer::read_raw(std::size_t layer) const {
  const auto& entry = impl_->manifest.layers.at(layer);
  const std::size_t bytes = entry.shape.element_count() * dtype_size(entry.dtype);
  auto in = open_input(impl_->path);
  if (!impl_->archive) {
    return read_range(in, impl_->data_offsets[layer], bytes, impl_->path.filename().string());
  }
  const auto member = zip::read_entry(in, impl_->entries[layer]);
  const auto first = member.begin() + static_cast<std::ptrdiff_t>(impl_->data_offsets[layer]);
  return {first, first + static_cast<std::ptrdiff_t>(bytes)};
}

WeightTensor TensorContainer::read(std::size_t layer) const {
  const auto& entry = impl_->manifest.layers.at(layer);
  const auto raw = read_raw(layer);
  WeightTensor t;
  t.shape = entry.shape;
  t.values = decode_payload(raw.data(), entry.shape.element_count(), entry.dtype);
  t.layer_name = entry.name;
  t.layer_index = static_cast<int>(layer);
  return t;
}

WeightTensor TensorContainer::read(std::string_view name) const {
  const auto idx = impl_->manifest.index_of(name);
  if (!idx) throw Error(ErrorKind::InvalidConfig, "no tensor named '" + std::string(name) + "'");
  return read(*idx);
}

std::vector<std::uint8_t> encode_npy(const WeightTensor& tensor, Dtype dtype) {
  std::string shape = "(";
  for (std::size_t i = 0; i < tensor.shape.rank(); ++i) {
    shape += std::to_string(tensor.shape[i]);
    if (i + 1 < tensor.shape.rank() || tensor.shape.rank() == 1) shape += ",";
    if (i + 1 < tensor.shape.rank()) shape += " ";
  }
  shape += ")";
  std::string dict = std::string("{'descr': '") + (dtype == Dtype::F32 ? "<f4" : "<f8") +
                     "', 'fortran_order': False, 'shape': " + shape + ", }";
  // Pad so the payload starts on a 64-byte boundary; the header ends in '\n'.
  const std::size_t total = 10 + dict.size() + 1;
  dict.append((64 - total % 64) % 64, ' ');
  dict.push_back('\n');
  if (dict.size() > 0xFFFF) throw Error(ErrorKind::ShapeMismatch, "npy header too long");

  std::vector<std::uint8_t> out(kNpyMagic, kNpyMagic + kNpyMagicLen);
  out.push_back(1);
  out.push_back(0);
  out.push_back(static_cast<std::uint8_t>(dict.size() & 0xFF));
  out.push_back(static_cast<std::uint8_t>(dict.size() >> 8));
  out.insert(out.end(), dict.begin(), dict.end());
  const std::size_t start = out.size();
  out.resize(start + tensor.values.size() * dtype_size(dtype));
  if (dtype == Dtype::F64) {
    std::memcpy(out.data() + start, tensor.values.data(), tensor.values.size() * sizeof(double));
  } else {
    for (std::size_t i = 0; i < tensor.values.size(); ++i) {
      const float f = static_cast<float>(tensor.values[i]);
      std::memcpy(out.data() + start + i * sizeof(float), &f, sizeof(float));
    }
  }
  return out;
}

void write_npy(const std::filesystem::path& path, const WeightTensor& tensor, Dtype dtype) {
  const auto bytes = encode_npy(tensor, dtype);
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorKind::IoError, "cannot open '" + path.string() + "' for writing");
  out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw Error(ErrorKind::IoError, "write failed for '" + path.string() + "'");
}

void write_npz(const std::filesystem::path& path, const std::vector<WeightTensor>& tensors,
               Dtype dtype) {
  std::vector<zip::Member> members;
  members.reserve(tensors.size());
  for (const auto& t : tensors) members.push_back({t.layer_name + ".npy", encode_npy(t, dtype)});
  zip::write_stored(path, members);
}

std::string sha256_hex(const std::filesystem::path& path) {
  auto in = open_input(path);
  EVP_MD_CTX* ctx = EVP_MD_CTX_new();
  if (ctx == nullptr || EVP_DigestInit_ex(ctx, EVP_sha256(), nullptr) != 1) {
    EVP_MD_CTX_free(ctx);
    throw Error(ErrorKind::IoError, "SHA-256 unavailable");
  }
  std::vector<char> buf(1 << 16);
  while (in) {
    in.read(buf.data(), static_cast<std::streamsize>(buf.size()));
    if (in.gcount() > 0) EVP_DigestUpdate(ctx, buf.data(), static_cast<std::size_t>(in.gcount()));
  }
  unsigned char md[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  EVP_DigestFinal_ex(ctx, md, &len);
  EVP_MD_CTX_free(ctx);
  static constexpr char kHex[] = "0123456789abcdef";
  std::string out;
  for (unsigned int i = 0; i < len; ++i) {
    out.push_back(kHex[md[i] >> 4]);
    out.push_back(kHex[md[i] & 0xF]);
  }
  return out;
}

}  // namespace tnt
