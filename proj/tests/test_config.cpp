#include "doctest.h"
#include "ksfft/config.hpp"
#include "ksfft/error.hpp"

using namespace ksfft;

TEST_CASE("config parsing") {
  const Config c = parse_config(R"(
# comment
alpha = 12.5
moduli = 7, 11, 13
identity_hash = true
view_mode = dense
t = 5   # trailing comment
)");
  CHECK(c.alpha == 12.5);
  CHECK(c.moduli == std::vector<std::uint64_t>{7, 11, 13});
  CHECK(c.identity_hash);
  CHECK(c.view_mode == ViewMode::Dense);
  CHECK(c.t == 5);
  CHECK(c.shift_count == 3);
}

TEST_CASE("config rejects bad input") {
  CHECK_THROWS_AS(parse_config("nonsense = 1"), Error);
  CHECK_THROWS_AS(parse_config("shift_count = 4"), Error);
  CHECK_THROWS_AS(parse_config("t = -1"), Error);
  CHECK_THROWS_AS(parse_config("alpha = abc"), Error);
  CHECK(resolve_threads(Config{}) >= 1);
}
