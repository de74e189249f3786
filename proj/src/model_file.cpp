#include "tnt/model_file.hpp"

#include <cstring>
#include <fstream>

#include "json.hpp"
#include "tnt/error.hpp"

namespace tnt {

namespace {

using nlohmann::json;

constexpr char kMagic[4] = {'T', 'N', 'T', '1'};

json shape_json(const TensorShape& s) { return json(s.dims()); }

Dtype parse_dtype(const std::string& s) {
  if (s == "f32") return Dtype::F32;
  if (s == "f64") return Dtype::F64;
  throw Error(ErrorKind::ParseError, "unknown dtype '" + s + "' in header");
}

LayerRole parse_role(const std::string& s) {
  if (s == "conv") return LayerRole::Conv;
  if (s == "dense") return LayerRole::Dense;
  if (s == "bias") return LayerRole::Bias;
  if (s == "other") return LayerRole::Other;
  throw Error(ErrorKind::ParseError, "unknown role '" + s + "' in header");
}

json stats_json(const LayerStats& s) {
  return {{"mean_cosine", s.mean_cosine},
          {"min_cosine", s.min_cosine},
          {"support_fraction_min", s.support_fraction_min},
          {"support_fraction_mean", s.support_fraction_mean},
          {"support_fraction_max", s.support_fraction_max}};
}

LayerStats parse_stats(const json& j) {
  return {j.at("mean_cosine").get<double>(), j.at("min_cosine").get<double>(),
          j.at("support_fraction_min").get<double>(), j.at("support_fraction_mean").get<double>(),
          j.at("support_fraction_max").get<double>()};
}

void put_u32(std::vector<std::uint8_t>& out, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
}

std::vector<std::uint8_t> scalar_bytes(const std::vector<float>& scalars) {
  std::vector<std::uint8_t> out(scalars.size() * sizeof(float));
  if (!out.empty()) std::memcpy(out.data(), scalars.data(), out.size());
  return out;
}

}  // namespace

std::vector<std::uint8_t> encode_quantized(const QuantizedModel& model) {
  const ConversionReport summary = build_report(model);
  json header;
  header["format_version"] = model.format_version;
  header["source_digest"] = model.source_digest;
  header["config"] = {{"mode", to_string(model.config.mode)},
                      {"scalars", to_string(model.config.scalars)},
                      {"strategy", to_string(model.config.strategy)},
                      {"skip_layers", model.config.skip_layers},
                      {"quantize_biases", model.config.quantize_biases}};

  std::vector<std::uint8_t> body;
  json layers = json::array();
  for (const auto& l : model.layers) {
    json jl = {{"name", l.entry.name},
               {"shape", shape_json(l.entry.shape)},
               {"dtype", to_string(l.entry.dtype)},
               {"role", to_string(l.entry.role)},
               {"quantized", l.quantized},
               {"skip_reason", l.skip_reason}};
    if (l.quantized) {
      jl["strategy"] = to_string(l.strategy);
      jl["vector_count"] = l.vector_count;
      jl["vector_length"] = l.vector_length;
      jl["codes_offset"] = body.size();
      jl["codes_bytes"] = l.codes.size();
      body.insert(body.end(), l.codes.begin(), l.codes.end());
      const auto sb = scalar_bytes(l.scalars);
      jl["scalars_offset"] = body.size();
      jl["scalar_count"] = l.scalars.size();
      body.insert(body.end(), sb.begin(), sb.end());
      jl["degenerate"] = l.degenerate;
      jl["dual_fallback"] = l.dual_fallback;
      jl["stats"] = stats_json(l.stats);
    } else {
      jl["raw_offset"] = body.size();
      jl["raw_bytes"] = l.raw.size();
      body.insert(body.end(), l.raw.begin(), l.raw.end());
    }
    layers.push_back(std::move(jl));
  }
  header["layers"] = std::move(layers);
  header["summary"] = {{"parameters", summary.total_parameters},
                       {"quantized_parameters", summary.quantized_parameters},
                       {"original_bytes", summary.original_bytes},
                       {"stored_bytes", summary.stored_bytes},
                       {"overall_ratio", summary.overall_ratio},
                       {"warnings", summary.warnings}};

  const std::string text = header.dump();
  std::vector<std::uint8_t> out(kMagic, kMagic + 4);
  put_u32(out, static_cast<std::uint32_t>(text.size()));
  out.insert(out.end(), text.begin(), text.end());
  out.insert(out.end(), body.begin(), body.end());
  return out;
}

QuantizedModel decode_quantized(std::span<const std::uint8_t> bytes) {
  if (bytes.size() < 8) throw Error(ErrorKind::ParseError, "file shorter than the 8-byte preamble");
  if (std::memcmp(bytes.data(), kMagic, 3) != 0) {
    throw Error(ErrorKind::ParseError, "bad magic at offset 0");
  }
  if (bytes[3] != kMagic[3]) {
    throw Error(ErrorKind::VersionMismatch, std::string("format 'TNT") +
                                                static_cast<char>(bytes[3]) +
                                                "' is not supported (expected 'TNT1')");
  }
  const std::uint32_t hlen = bytes[4] | (bytes[5] << 8) | (bytes[6] << 16) |
                             (static_cast<std::uint32_t>(bytes[7]) << 24);
  if (8 + static_cast<std::uint64_t>(hlen) > bytes.size()) {
    throw Error(ErrorKind::ParseError, "header truncated at offset " + std::to_string(bytes.size()));
  }
  json header;
  try {
    header = json::parse(bytes.begin() + 8, bytes.begin() + 8 + hlen);
  } catch (const json::exception& e) {
    throw Error(ErrorKind::ParseError, std::string("header JSON: ") + e.what());
  }
  const auto body = bytes.subspan(8 + hlen);
  auto section = [&](std::size_t offset, std::size_t size, const std::string& what) {
    if (offset + size > body.size()) {
      throw Error(ErrorKind::ParseError, what + " section truncated at offset " +
                                             std::to_string(8 + hlen + body.size()));
    }
    return std::vector<std::uint8_t>(body.begin() + static_cast<std::ptrdiff_t>(offset),
                                     body.begin() + static_cast<std::ptrdiff_t>(offset + size));
  };

  QuantizedModel model;
  try {
    model.format_version = header.at("format_version").get<int>();
    if (model.format_version != QuantizedModel::kFormatVersion) {
      throw Error(ErrorKind::VersionMismatch,
                  "header format_version " + std::to_string(model.format_version));
    }
    model.source_digest = header.at("source_digest").get<std::string>();
    const auto& cfg = header.at("config");
    model.config.mode = parse_mode(cfg.at("mode").get<std::string>());
    model.config.scalars = parse_scalar_kind(cfg.at("scalars").get<std::string>());
    model.config.strategy = parse_strategy(cfg.at("strategy").get<std::string>());
    model.config.skip_layers = cfg.at("skip_layers").get<std::set<std::string>>();
    model.config.quantize_biases = cfg.at("quantize_biases").get<bool>();
    model.config.jobs = 1;

    for (const auto& jl : header.at("layers")) {
      QuantizedLayer l;
      l.entry.name = jl.at("name").get<std::string>();
      l.entry.shape = TensorShape(jl.at("shape").get<std::vector<std::size_t>>());
      l.entry.dtype = parse_dtype(jl.at("dtype").get<std::string>());
      l.entry.role = parse_role(jl.at("role").get<std::string>());
      l.quantized = jl.at("quantized").get<bool>();
      l.skip_reason = jl.at("skip_reason").get<std::string>();
      if (l.quantized) {
        l.strategy = parse_strategy(jl.at("strategy").get<std::string>());
        l.vector_count = jl.at("vector_count").get<std::size_t>();
        l.vector_length = jl.at("vector_length").get<std::size_t>();
        l.codes = section(jl.at("codes_offset").get<std::size_t>(),
                          jl.at("codes_bytes").get<std::size_t>(), l.entry.name + " codes");
        const auto count = jl.at("scalar_count").get<std::size_t>();
        const auto sb = section(jl.at("scalars_offset").get<std::size_t>(), count * sizeof(float),
                                l.entry.name + " scalars");
        l.scalars.resize(count);
        if (count > 0) std::memcpy(l.scalars.data(), sb.data(), sb.size());
        l.degenerate = jl.at("degenerate").get<std::vector<std::uint32_t>>();
        l.dual_fallback = jl.at("dual_fallback").get<std::vector<std::uint32_t>>();
        l.stats = parse_stats(jl.at("stats"));
      } else {
        l.raw = section(jl.at("raw_offset").get<std::size_t>(),
                        jl.at("raw_bytes").get<std::size_t>(), l.entry.name + " payload");
      }
      model.layers.push_back(std::move(l));
    }
  } catch (const json::exception& e) {
    throw Error(ErrorKind::ParseError, std::string("header field: ") + e.what());
  } catch (const Error& e) {
    if (e.kind() == ErrorKind::InvalidConfig) throw Error(ErrorKind::ParseError, e.detail());
    throw;
  }
  return model;
}

std::size_t write_quantized(const std::filesystem::path& path, const QuantizedModel& model) {
  const auto bytes = encode_quantized(model);
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorKind::IoError, "cannot open '" + path.string() + "' for writing");
  out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw Error(ErrorKind::IoError, "write failed for '" + path.string() + "'");
  return bytes.size();
}

QuantizedModel read_quantized(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::IoError, "cannot open '" + path.string() + "'");
  std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)),
                                  std::istreambuf_iterator<char>());
  return decode_quantized(bytes);
}

}  // namespace tnt
