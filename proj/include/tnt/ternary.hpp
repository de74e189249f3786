#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace tnt {

// Codes over {-1, 0, +1} with at least one nonzero entry.
class TernaryVector {
 public:
  TernaryVector() = default;
  // Throws InvalidCode for a code outside {-1,0,1}, ZeroTernary if all zero.
  explicit TernaryVector(std::vector<std::int8_t> codes);

  const std::vector<std::int8_t>& codes() const noexcept { return codes_; }
  std::size_t size() const noexcept { return codes_.size(); }
  std::int8_t operator[](std::size_t i) const { return codes_[i]; }
  std::size_t nonzero_count() const noexcept;
  TernaryVector operator-() const;

  friend bool operator==(const TernaryVector&, const TernaryVector&) = default;

 private:
  std::vector<std::int8_t> codes_;
};

struct TernaryResult {
  TernaryVector t;
  std::size_t m = 0;    // nonzero count of t
  double cosine = 0.0;  // cos of the angle between w and t
};

// Score for every support size: scores[M-1] = (b_1 + ... + b_M) / sqrt(M),
// b the magnitudes of w/||w|| in descending order. argmax_m is the smallest
// maximizer.
struct SimilarityCurve {
  std::vector<double> scores;
  std::size_t argmax_m = 0;

  double max_score() const { return scores.at(argmax_m - 1); }
};

// (w.t) / (||w|| ||t||). Throws LengthMismatch, DegenerateInput for w == 0.
double cosine(std::span<const double> w, const TernaryVector& t);

// Global maximizer of cosine(w, t) over the nonzero ternary vectors. The
// magnitudes are sorted once and every support size is scored in one prefix
// pass, so the cost is that of the sort. Ties in |w_i| go to the lower
// index; ties in score go to the smaller support.
TernaryResult ternarize(std::span<const double> w);

SimilarityCurve similarity_curve(std::span<const double> w);

// Best vector over {-1,+1}^N, which is sign(w) with sign(0) = +1.
TernaryResult binarize(std::span<const double> w);

inline constexpr std::size_t kBruteForceMaxDim = 12;

// Enumerates all 3^N - 1 nonzero candidates. Only for N <= kBruteForceMaxDim.
TernaryResult brute_force_ternarize(std::span<const double> w);

}  // namespace tnt
