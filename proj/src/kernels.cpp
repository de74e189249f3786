#include "tnt/kernels.hpp"

#include <omp.h>

#include <algorithm>
#include <exception>
#include <string>

#include "tnt/error.hpp"
#include "tnt/ternary.hpp"

namespace tnt {

std::string_view to_string(QuantMode m) noexcept {
  return m == QuantMode::Ternary ? "ternary" : "binary";
}

QuantMode parse_mode(std::string_view text) {
  if (text == "ternary") return QuantMode::Ternary;
  if (text == "binary") return QuantMode::Binary;
  throw Error(ErrorKind::InvalidConfig, "unknown mode '" + std::string(text) + "'");
}

namespace {

LayerCodes allocate(VectorGeometry g) {
  LayerCodes out;
  out.codes.assign(g.count * g.length, 0);
  out.cosines.assign(g.count, 0.0);
  out.support.assign(g.count, 0);
  out.scalars.assign(g.count, ScalarSet::none());
  out.degenerate.assign(g.count, 0);
  return out;
}

void check_payload(std::span<const double> values, VectorGeometry g) {
  if (values.size() != g.count * g.length) {
    throw Error(ErrorKind::ShapeMismatch, std::to_string(values.size()) +
                                              " values for " + std::to_string(g.count) + " x " +
                                              std::to_string(g.length) + " vectors");
  }
}

void quantize_one(std::span<const double> values, VectorGeometry g, std::size_t k, QuantMode mode,
                  ScalarKind kind, LayerCodes& out) {
  const auto w = values.subspan(k * g.length, g.length);
  if (std::all_of(w.begin(), w.end(), [](double v) { return v == 0.0; })) {
    out.degenerate[k] = 1;
    out.scalars[k] = kind == ScalarKind::None ? ScalarSet::none() : ScalarSet::single(0.0);
    return;
  }
  TernaryResult r = mode == QuantMode::Ternary ? ternarize(w) : binarize(w);
  out.cosines[k] = r.cosine;
  out.support[k] = r.m;
  out.scalars[k] = compute_scalars(kind, w, r.t);
  std::copy(r.t.codes().begin(), r.t.codes().end(),
            out.codes.begin() + static_cast<std::ptrdiff_t>(k * g.length));
}

std::string vector_context(std::size_t k) { return "vector " + std::to_string(k) + ": "; }

}  // namespace

LayerCodes quantize_vectors_serial(std::span<const double> values, VectorGeometry geometry,
                                   QuantMode mode, ScalarKind scalars) {
  check_payload(values, geometry);
  LayerCodes out = allocate(geometry);
  for (std::size_t k = 0; k < geometry.count; ++k) {
    try {
      quantize_one(values, geometry, k, mode, scalars, out);
    } catch (const Error& e) {
      throw Error(e.kind(), vector_context(k) + e.detail());
    }
  }
  return out;
}

LayerCodes quantize_vectors_parallel(std::span<const double> values, VectorGeometry geometry,
                                     QuantMode mode, ScalarKind scalars, int threads) {
  check_payload(values, geometry);
  LayerCodes out = allocate(geometry);
  const auto count = static_cast<std::ptrdiff_t>(geometry.count);
  // Exceptions cannot cross the parallel region; keep the one from the lowest
  // vector index so the reported error matches the serial kernel.
  std::ptrdiff_t failed_at = count;
  std::exception_ptr failure;

#pragma omp parallel for schedule(dynamic, 16) num_threads(std::max(threads, 1))
  for (std::ptrdiff_t k = 0; k < count; ++k) {
    try {
      quantize_one(values, geometry, static_cast<std::size_t>(k), mode, scalars, out);
    } catch (...) {
#pragma omp critical(tnt_kernel_failure)
      if (k < failed_at) {
        failed_at = k;
        failure = std::current_exception();
      }
    }
  }

  if (failure) {
    try {
      std::rethrow_exception(failure);
    } catch (const Error& e) {
      throw Error(e.kind(), vector_context(static_cast<std::size_t>(failed_at)) + e.detail());
    }
  }
  return out;
}

}  // namespace tnt
