#include "evacast/core/error.hpp"
#include "evacast/core/rng.hpp"
#include "evacast/core/time.hpp"

#include <doctest.h>

using namespace evacast;

TEST_CASE("timestamps parse in the accepted forms and print as UTC") {
    const auto t = parse_timestamp("2021-08-29T16:55:00Z");
    CHECK(format_timestamp(t) == "2021-08-29T16:55:00Z");
    CHECK(parse_timestamp("2021-08-29 16:55") == t);
    CHECK(parse_timestamp("2021-08-29T16:55") == t);
    CHECK(parse_timestamp("2021-08-29T11:55:00-05:00") == t);
    CHECK(parse_timestamp("2021-08-29T18:55:00+02:00") == t);
    CHECK(parse_timestamp("2021-08-29T16:55:00.250Z") == t);
}

TEST_CASE("malformed timestamps are parse errors") {
    CHECK_THROWS_AS(parse_timestamp(""), ParseError);
    CHECK_THROWS_AS(parse_timestamp("2021-13-01T00:00Z"), ParseError);
    CHECK_THROWS_AS(parse_timestamp("2021-02-30T00:00Z"), ParseError);
    CHECK_THROWS_AS(parse_timestamp("yesterday"), ParseError);
    CHECK_THROWS_AS(parse_timestamp("2021-08-29T25:00Z"), ParseError);
}

TEST_CASE("day floor and hour differences") {
    const auto t = parse_timestamp("2021-08-29T16:55:00Z");
    CHECK(format_timestamp(floor_to_day(t)) == "2021-08-29T00:00:00Z");
    CHECK(hours_between(t, floor_to_day(t)) == doctest::Approx(16.0 + 55.0 / 60.0));
    CHECK(hours_between(floor_to_day(t), t) < 0.0);
}

TEST_CASE("derived seeds are deterministic and order sensitive") {
    CHECK(derive_seed(1, 2, 3) == derive_seed(1, 2, 3));
    CHECK(derive_seed(1, 2, 3) != derive_seed(1, 3, 2));
    CHECK(derive_seed(1, 2) != derive_seed(2, 2));
    CHECK(fnv1a("") == 0xcbf29ce484222325ULL);
    CHECK(fnv1a("a") == 0xaf63dc4c8601ec8cULL); // published FNV-1a test vector
}

TEST_CASE("uniform01 stays in [0, 1)") {
    Rng rng(5);
    double lo = 1.0, hi = 0.0, sum = 0.0;
    for (int i = 0; i < 100000; ++i) {
        const double u = uniform01(rng);
        lo = std::min(lo, u);
        hi = std::max(hi, u);
        sum += u;
    }
    CHECK(lo >= 0.0);
    CHECK(hi < 1.0);
    CHECK(sum / 100000.0 == doctest::Approx(0.5).epsilon(0.01));
}

TEST_CASE("error hierarchy") {
    CHECK_THROWS_AS(throw IncompatibleVersionError("v"), ParseError);
    CHECK_THROWS_AS(throw ValidationError("v"), Error);
    CHECK_THROWS_AS(throw TrainingError("v"), std::runtime_error);
}
