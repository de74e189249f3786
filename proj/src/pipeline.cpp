#include "tnt/pipeline.hpp"

#include <algorithm>
#include <chrono>
#include <cstring>
#include <functional>
#include <limits>

#include "tnt/error.hpp"
#include "tnt/packing.hpp"

namespace tnt {

void QuantizeConfig::validate(const ModelManifest& manifest) const {
  for (const auto& name : skip_layers) {
    if (!manifest.index_of(name)) {
      std::string valid;
      for (const auto& l : manifest.layers) valid += (valid.empty() ? "" : ", ") + l.name;
      throw Error(ErrorKind::InvalidConfig,
                  "unknown layer '" + name + "' in skip list; valid layers: " + valid);
    }
  }
  if (jobs < 1) throw Error(ErrorKind::InvalidConfig, "jobs must be >= 1");
}

DecomposeStrategy resolve_strategy(DecomposeStrategy preferred, const TensorShape& shape) noexcept {
  if (preferred == DecomposeStrategy::Flat) return preferred;
  if (preferred == DecomposeStrategy::ChannelWise && shape.rank() == 4) return preferred;
  if (preferred == DecomposeStrategy::RowWise && shape.rank() == 2) return preferred;
  if (shape.rank() == 4) return DecomposeStrategy::ChannelWise;
  if (shape.rank() == 2) return DecomposeStrategy::RowWise;
  return DecomposeStrategy::Flat;
}

std::size_t QuantizedLayer::scalar_count(std::size_t vector, ScalarKind kind) const {
  switch (kind) {
    case ScalarKind::None: return 0;
    case ScalarKind::Single: return 1;
    case ScalarKind::Dual:
      return std::binary_search(dual_fallback.begin(), dual_fallback.end(),
                                static_cast<std::uint32_t>(vector))
                 ? 1
                 : 2;
  }
  return 0;
}

namespace {

using Clock = std::chrono::steady_clock;

std::vector<std::uint8_t> encode_values(const WeightTensor& t, Dtype dtype) {
  std::vector<std::uint8_t> out(t.values.size() * dtype_size(dtype));
  if (dtype == Dtype::F64) {
    std::memcpy(out.data(), t.values.data(), out.size());
  } else {
    for (std::size_t i = 0; i < t.values.size(); ++i) {
      const float f = static_cast<float>(t.values[i]);
      std::memcpy(out.data() + i * sizeof(float), &f, sizeof(float));
    }
  }
  return out;
}

std::string skip_reason(const LayerEntry& entry, const QuantizeConfig& config) {
  if (config.skip_layers.contains(entry.name)) return "config";
  switch (entry.role) {
    case LayerRole::Conv:
    case LayerRole::Dense: return {};
    case LayerRole::Bias: return config.quantize_biases ? std::string{} : "bias";
    case LayerRole::Other: return "other";
  }
  return "other";
}

LayerStats summarize(const LayerCodes& lc, std::size_t length) {
  LayerStats s;
  std::size_t live = 0;
  double cos_sum = 0.0;
  double frac_sum = 0.0;
  s.min_cosine = std::numeric_limits<double>::infinity();
  s.support_fraction_min = std::numeric_limits<double>::infinity();
  s.support_fraction_max = 0.0;
  for (std::size_t k = 0; k < lc.cosines.size(); ++k) {
    if (lc.degenerate[k]) continue;
    ++live;
    cos_sum += lc.cosines[k];
    s.min_cosine = std::min(s.min_cosine, lc.cosines[k]);
    const double frac = static_cast<double>(lc.support[k]) / static_cast<double>(length);
    frac_sum += frac;
    s.support_fraction_min = std::min(s.support_fraction_min, frac);
    s.support_fraction_max = std::max(s.support_fraction_max, frac);
  }
  if (live == 0) return LayerStats{};
  s.mean_cosine = cos_sum / static_cast<double>(live);
  s.support_fraction_mean = frac_sum / static_cast<double>(live);
  return s;
}

void quantize_layer(const WeightTensor& tensor, const QuantizeConfig& config, QuantizedLayer& out) {
  tensor.validate();
  out.strategy = resolve_strategy(config.strategy, tensor.shape);
  const auto geom = vector_geometry(tensor.shape, out.strategy);
  out.vector_count = geom.count;
  out.vector_length = geom.length;

  const LayerCodes lc =
      config.jobs > 1
          ? quantize_vectors_parallel(tensor.values, geom, config.mode, config.scalars, config.jobs)
          : quantize_vectors_serial(tensor.values, geom, config.mode, config.scalars);

  out.codes = pack_codes(lc.codes);
  for (std::size_t k = 0; k < geom.count; ++k) {
    const auto idx = static_cast<std::uint32_t>(k);
    if (lc.degenerate[k]) out.degenerate.push_back(idx);
    const ScalarSet& s = lc.scalars[k];
    switch (config.scalars) {
      case ScalarKind::None: break;
      case ScalarKind::Single: out.scalars.push_back(static_cast<float>(s.lambda)); break;
      case ScalarKind::Dual:
        if (s.kind == ScalarKind::Dual) {
          out.scalars.push_back(static_cast<float>(s.lambda_p));
          out.scalars.push_back(static_cast<float>(s.lambda_n));
        } else {
          out.dual_fallback.push_back(idx);
          out.scalars.push_back(static_cast<float>(s.lambda));
        }
        break;
    }
  }
  out.stats = summarize(lc, geom.length);
}

std::pair<QuantizedModel, ConversionReport> run(
    const ModelManifest& manifest, const QuantizeConfig& config,
    const std::function<WeightTensor(std::size_t)>& load,
    const std::function<std::vector<std::uint8_t>(std::size_t)>& load_raw) {
  const auto start = Clock::now();
  config.validate(manifest);

  QuantizedModel model;
  model.config = config;
  model.config.jobs = 1;
  model.source_digest = manifest.source_digest;
  model.layers.reserve(manifest.layers.size());

  for (std::size_t i = 0; i < manifest.layers.size(); ++i) {
    const LayerEntry& entry = manifest.layers[i];
    QuantizedLayer layer;
    layer.entry = entry;
    layer.skip_reason = skip_reason(entry, config);
    layer.quantized = layer.skip_reason.empty();
    try {
      if (layer.quantized) {
        quantize_layer(load(i), config, layer);
      } else {
        layer.raw = load_raw(i);
      }
    } catch (const Error& e) {
      throw Error(e.kind(), "layer '" + entry.name + "': " + e.detail());
    }
    model.layers.push_back(std::move(layer));
  }

  ConversionReport report = build_report(model);
  report.wall_seconds = std::chrono::duration<double>(Clock::now() - start).count();
  return {std::move(model), std::move(report)};
}

}  // namespace

std::pair<QuantizedModel, ConversionReport> quantize_model(const TensorContainer& container,
                                                           const QuantizeConfig& config) {
  return run(
      container.manifest(), config, [&](std::size_t i) { return container.read(i); },
      [&](std::size_t i) { return container.read_raw(i); });
}

std::pair<QuantizedModel, ConversionReport> quantize_model(const ModelManifest& manifest,
                                                           std::span<const WeightTensor> tensors,
                                                           const QuantizeConfig& config) {
  if (tensors.size() != manifest.layers.size()) {
    throw Error(ErrorKind::ShapeMismatch, "manifest lists " +
                                              std::to_string(manifest.layers.size()) +
                                              " layers, got " + std::to_string(tensors.size()));
  }
  return run(
      manifest, config, [&](std::size_t i) { return tensors[i]; },
      [&](std::size_t i) { return encode_values(tensors[i], manifest.layers[i].dtype); });
}

std::vector<std::int8_t> layer_codes(const QuantizedLayer& layer) {
  return unpack_codes(layer.codes, layer.vector_count * layer.vector_length);
}

std::vector<ScalarSet> layer_scalars(const QuantizedLayer& layer, ScalarKind kind) {
  std::vector<ScalarSet> out;
  out.reserve(layer.vector_count);
  std::size_t pos = 0;
  for (std::size_t k = 0; k < layer.vector_count; ++k) {
    const std::size_t n = layer.scalar_count(k, kind);
    if (pos + n > layer.scalars.size()) {
      throw Error(ErrorKind::InconsistentScalarSet,
                  "layer '" + layer.entry.name + "' has too few scalars");
    }
    if (n == 0) out.push_back(ScalarSet::none());
    if (n == 1) out.push_back(ScalarSet::single(layer.scalars[pos]));
    if (n == 2) out.push_back(ScalarSet::dual(layer.scalars[pos], layer.scalars[pos + 1]));
    pos += n;
  }
  if (pos != layer.scalars.size()) {
    throw Error(ErrorKind::InconsistentScalarSet,
                "layer '" + layer.entry.name + "' has trailing scalars");
  }
  return out;
}

WeightTensor dequantize_layer(const QuantizedLayer& layer, ScalarKind kind) {
  WeightTensor out;
  out.shape = layer.entry.shape;
  out.layer_name = layer.entry.name;
  const std::size_t count = layer.entry.shape.element_count();
  if (!layer.quantized) {
    out.values.resize(count);
    if (layer.raw.size() != count * dtype_size(layer.entry.dtype)) {
      throw Error(ErrorKind::ShapeMismatch, "layer '" + layer.entry.name + "' payload size");
    }
    if (layer.entry.dtype == Dtype::F64) {
      std::memcpy(out.values.data(), layer.raw.data(), layer.raw.size());
    } else {
      for (std::size_t i = 0; i < count; ++i) {
        float f;
        std::memcpy(&f, layer.raw.data() + i * sizeof(float), sizeof(float));
        out.values[i] = f;
      }
    }
    return out;
  }
  const auto codes = layer_codes(layer);
  const auto scalars = layer_scalars(layer, kind);
  out.values.assign(count, 0.0);
  for (std::size_t k = 0; k < layer.vector_count; ++k) {
    if (std::binary_search(layer.degenerate.begin(), layer.degenerate.end(),
                           static_cast<std::uint32_t>(k))) {
      continue;
    }
    const auto first = codes.begin() + static_cast<std::ptrdiff_t>(k * layer.vector_length);
    const TernaryVector t(
        std::vector<std::int8_t>(first, first + static_cast<std::ptrdiff_t>(layer.vector_length)));
    const auto v = reconstruct(t, scalars[k]);
    std::copy(v.begin(), v.end(),
              out.values.begin() + static_cast<std::ptrdiff_t>(k * layer.vector_length));
  }
  return out;
}

}  // namespace tnt
