#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace tnt {

// Dimensions of a row-major tensor, e.g. [N, C, W, H] for a convolution
// kernel or [O, I] for a dense layer.
class TensorShape {
 public:
  TensorShape() = default;
  explicit TensorShape(std::vector<std::size_t> dims);

  const std::vector<std::size_t>& dims() const noexcept { return dims_; }
  std::size_t rank() const noexcept { return dims_.size(); }
  std::size_t operator[](std::size_t i) const { return dims_.at(i); }
  std::size_t element_count() const noexcept;
  bool has_zero_dim() const noexcept;
  std::string to_string() const;

  friend bool operator==(const TensorShape&, const TensorShape&) = default;

 private:
  std::vector<std::size_t> dims_;
};

struct WeightTensor {
  TensorShape shape;
  std::vector<double> values;
  std::string layer_name;
  int layer_index = 0;

  // Throws ShapeMismatch if the payload size disagrees with the shape and
  // NonFinite on NaN/Inf.
  void validate() const;

  friend bool operator==(const WeightTensor&, const WeightTensor&) = default;
};

enum class DecomposeStrategy { ChannelWise, RowWise, Flat };

std::string_view to_string(DecomposeStrategy s) noexcept;
DecomposeStrategy parse_strategy(std::string_view text);

struct VectorOrigin {
  std::string layer_name;
  std::size_t filter_index = 0;
  // channel index for ChannelWise, row index for RowWise, 0 for Flat
  std::size_t slice_index = 0;

  friend bool operator==(const VectorOrigin&, const VectorOrigin&) = default;
};

struct TargetVector {
  std::vector<double> values;
  VectorOrigin origin;
};

// Number and length of the vectors `strategy` produces for `shape`.
struct VectorGeometry {
  std::size_t count = 0;
  std::size_t length = 0;
};

VectorGeometry vector_geometry(const TensorShape& shape, DecomposeStrategy strategy);

// ChannelWise slices [N,C,W,H] into N*C vectors of W*H, ordered by
// (filter, channel). RowWise slices [O,I] into O rows. Flat is one vector.
// Since the payload is row-major every strategy is a contiguous split, so the
// vectors concatenated in order reproduce the payload.
std::vector<TargetVector> decompose(const WeightTensor& tensor, DecomposeStrategy strategy);

WeightTensor recompose(const TensorShape& shape, std::span<const std::vector<double>> vectors,
                       DecomposeStrategy strategy);

}  // namespace tnt
