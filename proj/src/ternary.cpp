#include "tnt/ternary.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <string>

#include "tnt/error.hpp"

namespace tnt {

TernaryVector::TernaryVector(std::vector<std::int8_t> codes) : codes_(std::move(codes)) {
  bool any = false;
  for (std::size_t i = 0; i < codes_.size(); ++i) {
    const auto c = codes_[i];
    if (c < -1 || c > 1) {
      throw Error(ErrorKind::InvalidCode,
                  "code " + std::to_string(c) + " at position " + std::to_string(i));
    }
    any = any || c != 0;
  }
  if (!any) throw Error(ErrorKind::ZeroTernary, "ternary vector has no nonzero code");
}

std::size_t TernaryVector::nonzero_count() const noexcept {
  return static_cast<std::size_t>(
      std::count_if(codes_.begin(), codes_.end(), [](std::int8_t c) { return c != 0; }));
}

TernaryVector TernaryVector::operator-() const {
  TernaryVector out = *this;
  for (auto& c : out.codes_) c = static_cast<std::int8_t>(-c);
  return out;
}

namespace {

double checked_norm(std::span<const double> w) {
  double sq = 0.0;
  for (double v : w) {
    if (!std::isfinite(v)) throw Error(ErrorKind::NonFinite, "target vector has a non-finite value");
    sq += v * v;
  }
  if (w.empty() || !(sq > 0.0)) {
    throw Error(ErrorKind::DegenerateInput, "target vector is empty or all zero");
  }
  return std::sqrt(sq);
}

std::vector<double> sorted_magnitudes(std::span<const double> w) {
  std::vector<double> mags(w.size());
  std::transform(w.begin(), w.end(), mags.begin(), [](double v) { return std::abs(v); });
  std::sort(mags.begin(), mags.end(), std::greater<>());
  return mags;
}

struct Scan {
  std::size_t best_m = 0;
  double best_score = -1.0;
};

// One left-to-right prefix pass over the sorted magnitudes. `sink` sees every
// score; the strict comparison keeps the smallest maximizing M.
template <typename Sink>
Scan scan_scores(const std::vector<double>& mags, double norm, Sink&& sink) {
  Scan scan;
  double prefix = 0.0;
  for (std::size_t k = 0; k < mags.size(); ++k) {
    prefix += mags[k];
    const double score = prefix / (norm * std::sqrt(static_cast<double>(k + 1)));
    sink(score);
    if (score > scan.best_score) {
      scan.best_score = score;
      scan.best_m = k + 1;
    }
  }
  return scan;
}

std::int8_t sign_code(double v) { return v < 0.0 ? std::int8_t{-1} : std::int8_t{1}; }

}  // namespace

double cosine(std::span<const double> w, const TernaryVector& t) {
  if (w.size() != t.size()) {
    throw Error(ErrorKind::LengthMismatch,
                std::to_string(w.size()) + " vs " + std::to_string(t.size()));
  }
  const double norm = checked_norm(w);
  double dot = 0.0;
  std::size_t nnz = 0;
  for (std::size_t i = 0; i < w.size(); ++i) {
    if (t[i] != 0) {
      dot += t[i] * w[i];
      ++nnz;
    }
  }
  if (nnz == 0) throw Error(ErrorKind::ZeroTernary, "ternary vector has no nonzero code");
  return dot / (norm * std::sqrt(static_cast<double>(nnz)));
}

TernaryResult ternarize(std::span<const double> w) {
  const double norm = checked_norm(w);
  const auto mags = sorted_magnitudes(w);
  const Scan scan = scan_scores(mags, norm, [](double) {});

  // Top-M support: everything strictly above the M-th magnitude, then the
  // lowest-index entries equal to it until M are taken.
  const double threshold = mags[scan.best_m - 1];
  std::size_t above = 0;
  for (std::size_t k = 0; k < scan.best_m && mags[k] > threshold; ++k) ++above;
  std::size_t ties_left = scan.best_m - above;

  std::vector<std::int8_t> codes(w.size(), 0);
  for (std::size_t i = 0; i < w.size(); ++i) {
    const double a = std::abs(w[i]);
    if (a > threshold) {
      codes[i] = sign_code(w[i]);
    } else if (a == threshold && ties_left > 0) {
      codes[i] = sign_code(w[i]);
      --ties_left;
    }
  }
  return {TernaryVector(std::move(codes)), scan.best_m, scan.best_score};
}

SimilarityCurve similarity_curve(std::span<const double> w) {
  const double norm = checked_norm(w);
  const auto mags = sorted_magnitudes(w);
  SimilarityCurve curve;
  curve.scores.reserve(mags.size());
  curve.argmax_m = scan_scores(mags, norm, [&](double s) { curve.scores.push_back(s); }).best_m;
  return curve;
}

TernaryResult binarize(std::span<const double> w) {
  const double norm = checked_norm(w);
  std::vector<std::int8_t> codes(w.size());
  double sum = 0.0;
  for (std::size_t i = 0; i < w.size(); ++i) {
    codes[i] = sign_code(w[i]);
    sum += std::abs(w[i]);
  }
  const double cos = sum / (norm * std::sqrt(static_cast<double>(w.size())));
  return {TernaryVector(std::move(codes)), w.size(), cos};
}

TernaryResult brute_force_ternarize(std::span<const double> w) {
  if (w.size() > kBruteForceMaxDim) {
    throw Error(ErrorKind::DimensionTooLarge, "brute force limited to N <= " +
                                                  std::to_string(kBruteForceMaxDim) + ", got " +
                                                  std::to_string(w.size()));
  }
  const double norm = checked_norm(w);
  const std::size_t n = w.size();

  // Odometer over digits {0 -> 0, 1 -> +1, 2 -> -1}; every candidate's dot
  // product is evaluated from scratch.
  static constexpr std::int8_t kCode[3] = {0, 1, -1};
  std::vector<std::uint8_t> digit(n, 0);
  std::size_t nnz = 0;
  double best = -2.0;
  std::vector<std::int8_t> best_codes(n, 0);
  for (;;) {
    std::size_t i = 0;
    while (i < n && digit[i] == 2) {
      digit[i] = 0;
      --nnz;
      ++i;
    }
    if (i == n) break;
    if (digit[i] == 0) ++nnz;
    ++digit[i];

    double dot = 0.0;
    for (std::size_t k = 0; k < n; ++k) dot += kCode[digit[k]] * w[k];
    const double cos = dot / (norm * std::sqrt(static_cast<double>(nnz)));
    if (cos > best) {
      best = cos;
      for (std::size_t k = 0; k < n; ++k) best_codes[k] = kCode[digit[k]];
    }
  }
  TernaryVector t(std::move(best_codes));
  const std::size_t m = t.nonzero_count();
  return {std::move(t), m, best};
}

}  // namespace tnt
