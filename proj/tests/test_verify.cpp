#include "doctest.h"
#include "tnt/error.hpp"
#include "tnt/packing.hpp"
#include "tnt/verify.hpp"

using namespace tnt;

TEST_CASE("verify passes on the real implementation") {
  VerifyOptions opt;
  opt.oracle_trials = 20;
  opt.max_dim = 8;
  const auto out = run_verify(opt);
  CHECK(out.passed());
  REQUIRE(out.checks.size() == 3);
  for (const auto& c : out.checks) {
    CAPTURE(c.name);
    CHECK(c.passed);
    CHECK(c.cases > 0);
    CHECK(c.counterexample.empty());
  }
}

TEST_CASE("verify catches a broken packer") {
  auto hooks = VerifyHooks::defaults();
  // swaps the +1 and -1 codes
  hooks.pack = [](std::span<const std::int8_t> codes) {
    std::vector<std::int8_t> flipped(codes.begin(), codes.end());
    for (auto& c : flipped) c = static_cast<std::int8_t>(-c);
    return pack_codes(flipped);
  };
  VerifyOptions opt;
  opt.oracle_trials = 5;
  opt.max_dim = 4;
  const auto out = run_verify(opt, hooks);
  CHECK_FALSE(out.passed());
  const auto& packing = out.checks.back();
  CHECK_FALSE(packing.passed);
  CHECK_FALSE(packing.counterexample.empty());
  CHECK(out.checks[0].passed);
}

TEST_CASE("verify options are bounded") {
  VerifyOptions opt;
  opt.max_dim = 13;
  CHECK_THROWS_AS(run_verify(opt), Error);
  opt.max_dim = 0;
  CHECK_THROWS_AS(run_verify(opt), Error);
}
