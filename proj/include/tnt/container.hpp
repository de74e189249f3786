#pragma once

#include <cstdint>
#include <filesystem>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "tnt/tensor.hpp"

namespace tnt {

enum class Dtype { F32, F64 };

std::string_view to_string(Dtype d) noexcept;
std::size_t dtype_size(Dtype d) noexcept;

enum class LayerRole { Conv, Dense, Bias, Other };

std::string_view to_string(LayerRole r) noexcept;
LayerRole role_for_shape(const TensorShape& shape) noexcept;

struct LayerEntry {
  std::string name;
  TensorShape shape;
  Dtype dtype = Dtype::F32;
  LayerRole role = LayerRole::Other;

  friend bool operator==(const LayerEntry&, const LayerEntry&) = default;
};

struct ModelManifest {
  std::vector<LayerEntry> layers;
  std::string source_digest;  // hex SHA-256 of the container file

  std::optional<std::size_t> index_of(std::string_view name) const;

  friend bool operator==(const ModelManifest&, const ModelManifest&) = default;
};

// A .npy file (one tensor, named after the file stem) or a .npz archive (one
// tensor per member, in archive order). Opening parses headers only; payloads
// are read on demand. Accepts little-endian f4/f8 in C order.
class TensorContainer {
 public:
  static TensorContainer open(const std::filesystem::path& path);

  TensorContainer(TensorContainer&&) noexcept;
  TensorContainer& operator=(TensorContainer&&) noexcept;
  ~TensorContainer();

  const ModelManifest& manifest() const noexcept;
  WeightTensor read(std::size_t layer) const;
  WeightTensor read(std::string_view name) const;
  // The payload bytes exactly as stored (little-endian, C order).
  std::vector<std::uint8_t> read_raw(std::size_t layer) const;

 private:
  struct Impl;
  explicit TensorContainer(std::unique_ptr<Impl> impl);
  std::unique_ptr<Impl> impl_;
};

inline TensorContainer load_container(const std::filesystem::path& path) {
  return TensorContainer::open(path);
}

// Serialized .npy bytes (format 1.0) for `tensor` encoded as `dtype`.
std::vector<std::uint8_t> encode_npy(const WeightTensor& tensor, Dtype dtype);
void write_npy(const std::filesystem::path& path, const WeightTensor& tensor, Dtype dtype);
// Stored (uncompressed) .npz with members "<layer_name>.npy" in the given order.
void write_npz(const std::filesystem::path& path, const std::vector<WeightTensor>& tensors,
               Dtype dtype);

std::string sha256_hex(const std::filesystem::path& path);

}  // namespace tnt
