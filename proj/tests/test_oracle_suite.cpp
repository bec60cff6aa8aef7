#include <doctest.h>

#include "suite.hpp"

TEST_CASE("reference oracle checks") {
    for (const auto& check : mlirl::oracle::all_checks()) {
        SUBCASE(check.name) {
            const auto result = mlirl::oracle::run_check(check);
            INFO(result.detail);
            CHECK(result.passed);
        }
    }
}
