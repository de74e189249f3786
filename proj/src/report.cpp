#include "tnt/report.hpp"

#include <fstream>
#include <iomanip>
#include <sstream>

#include "format.hpp"
#include "json.hpp"
#include "tnt/error.hpp"
#include "tnt/pipeline.hpp"

namespace tnt {

using detail::format_double;
using detail::format_fixed;

ConversionReport build_report(const QuantizedModel& model) {
  ConversionReport r;
  for (const auto& layer : model.layers) {
    LayerReport lr;
    lr.name = layer.entry.name;
    lr.shape = layer.entry.shape.to_string();
    lr.dtype = layer.entry.dtype;
    lr.quantized = layer.quantized;
    lr.skip_reason = layer.skip_reason;
    lr.parameters = layer.entry.shape.element_count();
    lr.original_bytes = lr.parameters * dtype_size(layer.entry.dtype);
    if (layer.quantized) {
      lr.vector_count = layer.vector_count;
      lr.vector_length = layer.vector_length;
      lr.stats = layer.stats;
      lr.degenerate_vectors = layer.degenerate.size();
      lr.code_bytes = layer.codes.size();
      lr.scalar_bytes = layer.scalars.size() * sizeof(float);
      if (lr.code_bytes > 0) {
        lr.code_ratio = static_cast<double>(lr.original_bytes) / static_cast<double>(lr.code_bytes);
        lr.total_ratio = static_cast<double>(lr.original_bytes) /
                         static_cast<double>(lr.code_bytes + lr.scalar_bytes);
      }
      r.quantized_parameters += lr.parameters;
    } else {
      lr.code_bytes = layer.raw.size();
    }
    r.total_parameters += lr.parameters;
    r.original_bytes += lr.original_bytes;
    r.stored_bytes += lr.code_bytes + lr.scalar_bytes;
    r.warnings += lr.degenerate_vectors;
    r.layers.push_back(std::move(lr));
  }
  if (r.stored_bytes > 0) {
    r.overall_ratio = static_cast<double>(r.original_bytes) / static_cast<double>(r.stored_bytes);
  }
  return r;
}

std::string report_csv(const ConversionReport& report) {
  std::ostringstream out;
  out << "layer,shape,dtype,quantized,skip_reason,parameters,vectors,vector_length,mean_cosine,"
         "min_cosine,support_fraction_min,support_fraction_mean,support_fraction_max,"
         "degenerate_vectors,original_bytes,code_bytes,scalar_bytes,code_ratio,total_ratio\n";
  for (const auto& l : report.layers) {
    out << l.name << ",\"" << l.shape << "\"," << to_string(l.dtype) << ','
        << (l.quantized ? 1 : 0) << ',' << l.skip_reason << ',' << l.parameters << ','
        << l.vector_count << ',' << l.vector_length << ',' << format_double(l.stats.mean_cosine)
        << ',' << format_double(l.stats.min_cosine) << ','
        << format_double(l.stats.support_fraction_min) << ','
        << format_double(l.stats.support_fraction_mean) << ','
        << format_double(l.stats.support_fraction_max) << ',' << l.degenerate_vectors << ','
        << l.original_bytes << ',' << l.code_bytes << ',' << l.scalar_bytes << ','
        << format_double(l.code_ratio) << ',' << format_double(l.total_ratio) << '\n';
  }
  return out.str();
}

std::string report_json(const ConversionReport& report) {
  nlohmann::ordered_json j;
  auto& layers = j["layers"] = nlohmann::ordered_json::array();
  for (const auto& l : report.layers) {
    layers.push_back({{"name", l.name},
                      {"shape", l.shape},
                      {"dtype", to_string(l.dtype)},
                      {"quantized", l.quantized},
                      {"skip_reason", l.skip_reason},
                      {"parameters", l.parameters},
                      {"vectors", l.vector_count},
                      {"vector_length", l.vector_length},
                      {"mean_cosine", l.stats.mean_cosine},
                      {"min_cosine", l.stats.min_cosine},
                      {"support_fraction",
                       {{"min", l.stats.support_fraction_min},
                        {"mean", l.stats.support_fraction_mean},
                        {"max", l.stats.support_fraction_max}}},
                      {"degenerate_vectors", l.degenerate_vectors},
                      {"original_bytes", l.original_bytes},
                      {"code_bytes", l.code_bytes},
                      {"scalar_bytes", l.scalar_bytes},
                      {"code_ratio", l.code_ratio},
                      {"total_ratio", l.total_ratio}});
  }
  j["totals"] = {{"parameters", report.total_parameters},
                 {"quantized_parameters", report.quantized_parameters},
                 {"original_bytes", report.original_bytes},
                 {"stored_bytes", report.stored_bytes},
                 {"overall_ratio", report.overall_ratio},
                 {"file_bytes", report.file_bytes},
                 {"warnings", report.warnings},
                 {"wall_seconds", report.wall_seconds}};
  return j.dump(2) + "\n";
}

void write_report(const std::filesystem::path& path, const ConversionReport& report) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorKind::IoError, "cannot open '" + path.string() + "' for writing");
  out << (path.extension() == ".json" ? report_json(report) : report_csv(report));
  if (!out) throw Error(ErrorKind::IoError, "write failed for '" + path.string() + "'");
}

std::string report_table(const ConversionReport& report) {
  std::ostringstream out;
  out << std::left << std::setw(20) << "layer" << std::setw(18) << "shape" << std::right
      << std::setw(10) << "vectors" << std::setw(10) << "mean_cos" << std::setw(10) << "min_cos"
      << std::setw(8) << "m/N" << std::setw(12) << "code_bytes" << std::setw(12) << "ratio"
      << "\n";
  for (const auto& l : report.layers) {
    out << std::left << std::setw(20) << l.name << std::setw(18) << l.shape << std::right;
    if (l.quantized) {
      out << std::setw(10) << l.vector_count << std::setw(10) << format_fixed(l.stats.mean_cosine, 5)
          << std::setw(10) << format_fixed(l.stats.min_cosine, 5) << std::setw(8)
          << format_fixed(l.stats.support_fraction_mean, 3) << std::setw(12) << l.code_bytes
          << std::setw(12) << format_fixed(l.code_ratio, 2);
    } else {
      out << std::setw(10) << "-" << std::setw(10) << "-" << std::setw(10) << "-" << std::setw(8)
          << "-" << std::setw(12) << l.code_bytes << std::setw(12) << ("skip:" + l.skip_reason);
    }
    out << "\n";
  }
  out << "parameters " << report.total_parameters << " (quantized " << report.quantized_parameters
      << "), " << report.original_bytes << " -> " << report.stored_bytes << " bytes, ratio "
      << format_fixed(report.overall_ratio, 2);
  if (report.file_bytes > 0) out << ", file " << report.file_bytes << " bytes";
  out << ", warnings " << report.warnings << ", " << format_fixed(report.wall_seconds, 3)
      << " s\n";
  return out.str();
}

CompressionCheck verify_compression(const ConversionReport& report) {
  CompressionCheck check;
  check.overall_ratio = report.overall_ratio;
  std::size_t checked = 0;
  bool all_ok = true;
  for (const auto& l : report.layers) {
    CompressionCheck::Layer cl{l.name, l.code_ratio, false, false};
    cl.checked = l.quantized && l.dtype == Dtype::F32 && l.parameters >= kCompressionCheckMinWeights;
    if (cl.checked) {
      ++checked;
      cl.ok = l.code_ratio >= kMinCodeRatio && l.code_ratio <= kMaxCodeRatio;
      all_ok = all_ok && cl.ok;
    }
    check.layers.push_back(std::move(cl));
  }
  check.passed = checked > 0 && all_ok;
  return check;
}

}  // namespace tnt
