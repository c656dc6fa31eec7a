#include <doctest.h>
TEST_CASE("placeholder codegen") { CHECK(true); }
