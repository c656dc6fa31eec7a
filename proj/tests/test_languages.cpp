#include <doctest.h>
TEST_CASE("placeholder languages") { CHECK(true); }
