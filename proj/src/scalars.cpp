#include "tnt/scalars.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "tnt/error.hpp"

namespace tnt {

std::string_view to_string(ScalarKind k) noexcept {
  switch (k) {
    case ScalarKind::None: return "none";
    case ScalarKind::Single: return "single";
    case ScalarKind::Dual: return "dual";
  }
  return "none";
}

ScalarKind parse_scalar_kind(std::string_view text) {
  if (text == "none") return ScalarKind::None;
  if (text == "single") return ScalarKind::Single;
  if (text == "dual") return ScalarKind::Dual;
  throw Error(ErrorKind::InvalidConfig, "unknown scalar mode '" + std::string(text) + "'");
}

namespace {

void check_lengths(std::span<const double> w, const TernaryVector& t) {
  if (w.size() != t.size()) {
    throw Error(ErrorKind::LengthMismatch,
                std::to_string(w.size()) + " vs " + std::to_string(t.size()));
  }
  if (t.nonzero_count() == 0) throw Error(ErrorKind::ZeroTernary, "ternary vector is all zero");
}

struct SignClasses {
  std::size_t pos = 0;
  std::size_t neg = 0;
};

SignClasses sign_classes(const TernaryVector& t) {
  SignClasses c;
  for (auto code : t.codes()) {
    if (code > 0) ++c.pos;
    if (code < 0) ++c.neg;
  }
  return c;
}

double clamp_length(double v) { return std::max(v, 0.0); }

}  // namespace

ScalarSet single_scalar(std::span<const double> w, const TernaryVector& t) {
  check_lengths(w, t);
  double dot = 0.0;
  std::size_t nnz = 0;
  for (std::size_t i = 0; i < w.size(); ++i) {
    if (t[i] != 0) {
      dot += t[i] * w[i];
      ++nnz;
    }
  }
  return ScalarSet::single(clamp_length(dot / std::sqrt(static_cast<double>(nnz))));
}

ScalarSet dual_scalar(std::span<const double> w, const TernaryVector& t) {
  check_lengths(w, t);
  const auto classes = sign_classes(t);
  if (classes.pos == 0 || classes.neg == 0) return single_scalar(w, t);
  double pos_dot = 0.0;
  double neg_dot = 0.0;
  for (std::size_t i = 0; i < w.size(); ++i) {
    if (t[i] > 0) pos_dot += w[i];
    if (t[i] < 0) neg_dot -= w[i];
  }
  return ScalarSet::dual(clamp_length(pos_dot / std::sqrt(static_cast<double>(classes.pos))),
                         clamp_length(neg_dot / std::sqrt(static_cast<double>(classes.neg))));
}

ScalarSet compute_scalars(ScalarKind kind, std::span<const double> w, const TernaryVector& t) {
  switch (kind) {
    case ScalarKind::None: check_lengths(w, t); return ScalarSet::none();
    case ScalarKind::Single: return single_scalar(w, t);
    case ScalarKind::Dual: return dual_scalar(w, t);
  }
  return ScalarSet::none();
}

std::vector<double> reconstruct(const TernaryVector& t, const ScalarSet& s) {
  std::vector<double> out(t.size());
  switch (s.kind) {
    case ScalarKind::None:
      std::transform(t.codes().begin(), t.codes().end(), out.begin(),
                     [](std::int8_t c) { return static_cast<double>(c); });
      break;
    case ScalarKind::Single: {
      const std::size_t nnz = t.nonzero_count();
      if (nnz == 0) throw Error(ErrorKind::InconsistentScalarSet, "single scalar on zero codes");
      const double step = s.lambda / std::sqrt(static_cast<double>(nnz));
      for (std::size_t i = 0; i < t.size(); ++i) out[i] = step * t[i];
      break;
    }
    case ScalarKind::Dual: {
      const auto classes = sign_classes(t);
      if (classes.pos == 0 || classes.neg == 0) {
        throw Error(ErrorKind::InconsistentScalarSet,
                    "dual scalars need both positive and negative codes");
      }
      const double pos_step = s.lambda_p / std::sqrt(static_cast<double>(classes.pos));
      const double neg_step = s.lambda_n / std::sqrt(static_cast<double>(classes.neg));
      for (std::size_t i = 0; i < t.size(); ++i) {
        if (t[i] > 0) out[i] = pos_step;
        if (t[i] < 0) out[i] = -neg_step;
      }
      break;
    }
  }
  return out;
}

double residual_error(std::span<const double> w, const TernaryVector& t, const ScalarSet& s) {
  if (w.size() != t.size()) {
    throw Error(ErrorKind::LengthMismatch,
                std::to_string(w.size()) + " vs " + std::to_string(t.size()));
  }
  const auto approx = reconstruct(t, s);
  double sq = 0.0;
  for (std::size_t i = 0; i < w.size(); ++i) {
    const double d = w[i] - approx[i];
    sq += d * d;
  }
  return std::sqrt(sq);
}

}  // namespace tnt
