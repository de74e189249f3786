#include "tnt/tensor.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <numeric>

#include "tnt/error.hpp"

namespace tnt {

std::string_view to_string(ErrorKind kind) noexcept {
  switch (kind) {
    case ErrorKind::ShapeMismatch: return "ShapeMismatch";
    case ErrorKind::EmptyTensor: return "EmptyTensor";
    case ErrorKind::NonFinite: return "NonFinite";
    case ErrorKind::LengthMismatch: return "LengthMismatch";
    case ErrorKind::DegenerateInput: return "DegenerateInput";
    case ErrorKind::DimensionTooLarge: return "DimensionTooLarge";
    case ErrorKind::ZeroTernary: return "ZeroTernary";
    case ErrorKind::InconsistentScalarSet: return "InconsistentScalarSet";
    case ErrorKind::InvalidCode: return "InvalidCode";
    case ErrorKind::InvalidConfig: return "InvalidConfig";
    case ErrorKind::ParseError: return "ParseError";
    case ErrorKind::UnsupportedDtype: return "UnsupportedDtype";
    case ErrorKind::IoError: return "IoError";
    case ErrorKind::VersionMismatch: return "VersionMismatch";
  }
  return "Unknown";
}

TensorShape::TensorShape(std::vector<std::size_t> dims) : dims_(std::move(dims)) {}

std::size_t TensorShape::element_count() const noexcept {
  return std::accumulate(dims_.begin(), dims_.end(), std::size_t{1}, std::multiplies<>());
}

bool TensorShape::has_zero_dim() const noexcept {
  return std::find(dims_.begin(), dims_.end(), std::size_t{0}) != dims_.end();
}

std::string TensorShape::to_string() const {
  std::string out = "[";
  for (std::size_t i = 0; i < dims_.size(); ++i) {
    if (i) out += ",";
    out += std::to_string(dims_[i]);
  }
  return out + "]";
}

void WeightTensor::validate() const {
  if (shape.rank() == 0 || shape.element_count() != values.size()) {
    throw Error(ErrorKind::ShapeMismatch, "layer '" + layer_name + "': shape " + shape.to_string() +
                                              " does not match " + std::to_string(values.size()) +
                                              " values");
  }
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (!std::isfinite(values[i])) {
      throw Error(ErrorKind::NonFinite,
                  "layer '" + layer_name + "': non-finite value at element " + std::to_string(i));
    }
  }
}

std::string_view to_string(DecomposeStrategy s) noexcept {
  switch (s) {
    case DecomposeStrategy::ChannelWise: return "channel";
    case DecomposeStrategy::RowWise: return "row";
    case DecomposeStrategy::Flat: return "flat";
  }
  return "flat";
}

DecomposeStrategy parse_strategy(std::string_view text) {
  if (text == "channel") return DecomposeStrategy::ChannelWise;
  if (text == "row") return DecomposeStrategy::RowWise;
  if (text == "flat") return DecomposeStrategy::Flat;
  throw Error(ErrorKind::InvalidConfig, "unknown strategy '" + std::string(text) + "'");
}

VectorGeometry vector_geometry(const TensorShape& shape, DecomposeStrategy strategy) {
  if (shape.rank() == 0) throw Error(ErrorKind::ShapeMismatch, "rank-0 shape");
  if (shape.has_zero_dim()) throw Error(ErrorKind::EmptyTensor, "shape " + shape.to_string());
  switch (strategy) {
    case DecomposeStrategy::ChannelWise:
      if (shape.rank() != 4) {
        throw Error(ErrorKind::ShapeMismatch,
                    "channel-wise decomposition needs a 4-dim shape, got " + shape.to_string());
      }
      return {shape[0] * shape[1], shape[2] * shape[3]};
    case DecomposeStrategy::RowWise:
      if (shape.rank() != 2) {
        throw Error(ErrorKind::ShapeMismatch,
                    "row-wise decomposition needs a 2-dim shape, got " + shape.to_string());
      }
      return {shape[0], shape[1]};
    case DecomposeStrategy::Flat:
      return {1, shape.element_count()};
  }
  throw Error(ErrorKind::InvalidConfig, "unknown strategy");
}

namespace {

VectorOrigin origin_of(const TensorShape& shape, DecomposeStrategy strategy, std::size_t k,
                       const std::string& name) {
  switch (strategy) {
    case DecomposeStrategy::ChannelWise: return {name, k / shape[1], k % shape[1]};
    case DecomposeStrategy::RowWise: return {name, 0, k};
    case DecomposeStrategy::Flat: break;
  }
  return {name, 0, 0};
}

}  // namespace

std::vector<TargetVector> decompose(const WeightTensor& tensor, DecomposeStrategy strategy) {
  const auto geom = vector_geometry(tensor.shape, strategy);
  if (tensor.values.size() != geom.count * geom.length) {
    throw Error(ErrorKind::ShapeMismatch, "payload size does not match shape " +
                                              tensor.shape.to_string());
  }
  std::vector<TargetVector> out;
  out.reserve(geom.count);
  for (std::size_t k = 0; k < geom.count; ++k) {
    auto first = tensor.values.begin() + static_cast<std::ptrdiff_t>(k * geom.length);
    out.push_back({std::vector<double>(first, first + static_cast<std::ptrdiff_t>(geom.length)),
                   origin_of(tensor.shape, strategy, k, tensor.layer_name)});
  }
  return out;
}

WeightTensor recompose(const TensorShape& shape, std::span<const std::vector<double>> vectors,
                       DecomposeStrategy strategy) {
  const auto geom = vector_geometry(shape, strategy);
  if (vectors.size() != geom.count) {
    throw Error(ErrorKind::ShapeMismatch, "expected " + std::to_string(geom.count) +
                                              " vectors for " + shape.to_string() + ", got " +
                                              std::to_string(vectors.size()));
  }
  WeightTensor out;
  out.shape = shape;
  out.values.reserve(shape.element_count());
  for (std::size_t k = 0; k < vectors.size(); ++k) {
    if (vectors[k].size() != geom.length) {
      throw Error(ErrorKind::ShapeMismatch, "vector " + std::to_string(k) + " has length " +
                                                std::to_string(vectors[k].size()) + ", expected " +
                                                std::to_string(geom.length));
    }
    out.values.insert(out.values.end(), vectors[k].begin(), vectors[k].end());
  }
  return out;
}

}  // namespace tnt
