#include <doctest.h>
TEST_CASE("placeholder pattern") { CHECK(true); }
