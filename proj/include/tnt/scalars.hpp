#pragma once

#include <span>
#include <string_view>
#include <vector>

#include "tnt/ternary.hpp"

namespace tnt {

enum class ScalarKind { None, Single, Dual };

std::string_view to_string(ScalarKind k) noexcept;
ScalarKind parse_scalar_kind(std::string_view text);

// Scaling attached to a ternary vector. Single: reconstruction is
// lambda * t / ||t||. Dual: the positive and negative codes get their own
// length, lambda_p and lambda_n. All lengths are nonnegative.
struct ScalarSet {
  ScalarKind kind = ScalarKind::None;
  double lambda = 0.0;
  double lambda_p = 0.0;
  double lambda_n = 0.0;

  static ScalarSet none() { return {}; }
  static ScalarSet single(double lambda) { return {ScalarKind::Single, lambda, 0.0, 0.0}; }
  static ScalarSet dual(double p, double n) { return {ScalarKind::Dual, 0.0, p, n}; }

  friend bool operator==(const ScalarSet&, const ScalarSet&) = default;
};

// lambda = (w.t) / ||t||, the length of the orthogonal projection of w onto t.
ScalarSet single_scalar(std::span<const double> w, const TernaryVector& t);

// Splits on the sign classes of t: lambda_p projects w restricted to the +1
// codes, lambda_n projects -w restricted to the -1 codes. Falls back to
// single_scalar when t has only one sign class.
ScalarSet dual_scalar(std::span<const double> w, const TernaryVector& t);

ScalarSet compute_scalars(ScalarKind kind, std::span<const double> w, const TernaryVector& t);

std::vector<double> reconstruct(const TernaryVector& t, const ScalarSet& s);

// ||w - reconstruct(t, s)||_2
double residual_error(std::span<const double> w, const TernaryVector& t, const ScalarSet& s);

}  // namespace tnt
