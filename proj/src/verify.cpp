#include "tnt/verify.hpp"

#include <algorithm>
#include <cmath>

#include "format.hpp"
#include "tnt/error.hpp"
#include "tnt/experiments.hpp"
#include "tnt/packing.hpp"
#include "tnt/rng.hpp"
#include "tnt/scalars.hpp"
#include "tnt/ternary.hpp"

namespace tnt {

VerifyHooks VerifyHooks::defaults() {
  return {[](std::span<const std::int8_t> c) { return pack_codes(c); },
          [](std::span<const std::uint8_t> b, std::size_t n) { return unpack_codes(b, n); }};
}

bool VerifyOutcome::passed() const {
  return std::all_of(checks.begin(), checks.end(), [](const VerifyCheck& c) { return c.passed; });
}

namespace {

template <typename T>
std::string render(std::span<const T> v) {
  std::string out = "(";
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i) out += ", ";
    if constexpr (std::is_floating_point_v<T>) {
      out += detail::format_double(v[i]);
    } else {
      out += std::to_string(static_cast<int>(v[i]));
    }
  }
  return out + ")";
}

VerifyCheck oracle_check(const VerifyOptions& opt) {
  VerifyCheck check{"oracle equivalence (ternarize vs brute force, |diff| <= 1e-12)", true, 0, {}};
  for (Distribution dist : {Distribution::UniformSymmetric, Distribution::StandardNormal}) {
    for (std::size_t n = 1; n <= opt.max_dim; ++n) {
      for (std::size_t t = 0; t < opt.oracle_trials; ++t) {
        const auto w = gen_vector(dist, n, derive_seed(opt.seed ^ static_cast<std::uint64_t>(dist), n, t));
        const double fast = ternarize(w).cosine;
        const double brute = brute_force_ternarize(w).cosine;
        ++check.cases;
        if (!(std::abs(fast - brute) <= 1e-12)) {
          check.passed = false;
          check.counterexample = "w = " + render<double>(w) + ": ternarize " +
                                 detail::format_double(fast) + ", brute force " +
                                 detail::format_double(brute);
          return check;
        }
      }
    }
  }
  return check;
}

VerifyCheck scalar_chain_check(const VerifyOptions& opt) {
  VerifyCheck check{"residual ordering dual <= single <= none", true, 0, {}};
  for (Distribution dist : {Distribution::UniformSymmetric, Distribution::StandardNormal}) {
    for (std::size_t t = 0; t < opt.oracle_trials; ++t) {
      const std::size_t n = 2 + t % 63;
      const auto w = gen_vector(dist, n, derive_seed(opt.seed + 1, n, t));
      const TernaryVector tv = ternarize(w).t;
      const double none = residual_error(w, tv, ScalarSet::none());
      const double single = residual_error(w, tv, single_scalar(w, tv));
      const double dual = residual_error(w, tv, dual_scalar(w, tv));
      ++check.cases;
      const double slack = 1e-12 * std::max(1.0, none);
      if (!(dual <= single + slack && single <= none + slack)) {
        check.passed = false;
        check.counterexample = "w = " + render<double>(w) + ": none " +
                               detail::format_double(none) + ", single " +
                               detail::format_double(single) + ", dual " +
                               detail::format_double(dual);
        return check;
      }
    }
  }
  return check;
}

VerifyCheck packing_check(const VerifyOptions& opt, const VerifyHooks& hooks) {
  VerifyCheck check{"2-bit pack/unpack round trip", true, 0, {}};
  auto fail = [&](std::span<const std::int8_t> codes, const std::string& why) {
    check.passed = false;
    check.counterexample = "codes = " + render<std::int8_t>(codes) + ": " + why;
  };
  const std::int8_t known[] = {1, -1, 0, 1};
  const auto known_packed = hooks.pack(known);
  ++check.cases;
  if (known_packed != std::vector<std::uint8_t>{0x49}) {
    fail(known, "expected the single byte 0x49");
    return check;
  }
  Stream stream(derive_seed(opt.seed + 2, 0, 0));
  for (std::size_t t = 0; t < std::max<std::size_t>(opt.oracle_trials, 1); ++t) {
    const std::size_t n = t % 67;
    std::vector<std::int8_t> codes(n);
    for (auto& c : codes) c = static_cast<std::int8_t>(static_cast<int>(stream.uniform01() * 3.0) - 1);
    ++check.cases;
    try {
      const auto packed = hooks.pack(codes);
      if (packed.size() != packed_size(n)) {
        fail(codes, "packed to " + std::to_string(packed.size()) + " bytes");
        return check;
      }
      if (hooks.unpack(packed, n) != codes) {
        fail(codes, "unpack(pack(codes)) differs");
        return check;
      }
    } catch (const Error& e) {
      fail(codes, e.what());
      return check;
    }
  }
  return check;
}

}  // namespace

VerifyOutcome run_verify(const VerifyOptions& options, const VerifyHooks& hooks) {
  if (options.max_dim > kBruteForceMaxDim || options.max_dim == 0) {
    throw Error(ErrorKind::InvalidConfig, "max-dim must be in 1.." +
                                              std::to_string(kBruteForceMaxDim) + ", got " +
                                              std::to_string(options.max_dim));
  }
  VerifyOutcome out;
  out.checks.push_back(oracle_check(options));
  out.checks.push_back(scalar_chain_check(options));
  out.checks.push_back(packing_check(options, hooks));
  return out;
}

}  // namespace tnt
