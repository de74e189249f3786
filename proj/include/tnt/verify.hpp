#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

namespace tnt {

struct VerifyOptions {
  std::size_t oracle_trials = 200;  // per dimension and distribution
  std::size_t max_dim = 10;         // at most kBruteForceMaxDim
  std::uint64_t seed = 20200305;
};

// The packer under test; replaceable so the harness itself can be tested.
struct VerifyHooks {
  std::function<std::vector<std::uint8_t>(std::span<const std::int8_t>)> pack;
  std::function<std::vector<std::int8_t>(std::span<const std::uint8_t>, std::size_t)> unpack;

  static VerifyHooks defaults();
};

struct VerifyCheck {
  std::string name;
  bool passed = false;
  std::size_t cases = 0;
  std::string counterexample;  // first failing input, empty when passed
};

struct VerifyOutcome {
  std::vector<VerifyCheck> checks;
  bool passed() const;
};

// Oracle equivalence of ternarize against brute force, the residual ordering
// Dual <= Single <= None, and pack/unpack round trips. Throws InvalidConfig
// when max_dim exceeds the brute-force limit.
VerifyOutcome run_verify(const VerifyOptions& options, const VerifyHooks& hooks = VerifyHooks::defaults());

}  // namespace tnt
