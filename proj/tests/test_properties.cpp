#include <doctest.h>
TEST_CASE("placeholder properties") { CHECK(true); }
