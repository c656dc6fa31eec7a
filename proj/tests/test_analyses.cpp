#include <doctest.h>
TEST_CASE("placeholder analyses") { CHECK(true); }
