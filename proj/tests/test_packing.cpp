#include "doctest.h"
#include "tnt/error.hpp"
#include "tnt/packing.hpp"
#include "tnt/rng.hpp"

using namespace tnt;

TEST_CASE("pack_codes bit layout") {
  const std::int8_t codes[] = {1, -1, 0, 1};
  CHECK(pack_codes(codes) == std::vector<std::uint8_t>{0x49});
  CHECK(pack_codes({}).empty());

  const std::int8_t five[] = {1, 1, 1, 1, -1};
  const auto packed = pack_codes(five);
  REQUIRE(packed.size() == 2);
  CHECK(packed[0] == 0x55);
  CHECK(packed[1] == 0x02);  // six zero pad bits
}

TEST_CASE("unpack rejects the unused pattern and oversized counts") {
  const std::uint8_t bad[] = {0b00001100};
  try {
    unpack_codes(bad, 2);
    FAIL("expected InvalidCode");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::InvalidCode);
  }
  const std::uint8_t one[] = {0x49};
  CHECK_THROWS_AS(unpack_codes(one, 5), Error);
  const std::int8_t invalid[] = {2};
  CHECK_THROWS_AS(pack_codes(invalid), Error);
}

TEST_CASE("unpack after pack is the identity, also when appending") {
  Stream rng(derive_seed(4, 4, 4));
  for (std::size_t n = 0; n < 300; ++n) {
    std::vector<std::int8_t> codes(n);
    for (auto& c : codes) c = static_cast<std::int8_t>(static_cast<int>(rng.uniform01() * 3) - 1);
    const auto packed = pack_codes(codes);
    CHECK(packed.size() == packed_size(n));
    CHECK(unpack_codes(packed, n) == codes);

    // split into two appended chunks
    const std::size_t cut = n / 3;
    std::vector<std::uint8_t> stream;
    pack_codes_into(std::span(codes).first(cut), stream, 0);
    pack_codes_into(std::span(codes).subspan(cut), stream, cut);
    CHECK(stream == packed);
  }
}
