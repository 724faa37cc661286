#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "fraclab/gamma.hpp"

#include <doctest.h>

#include <cmath>

using fraclab::gamma_fn;

TEST_CASE("integer and half-integer values") {
    CHECK(gamma_fn(1.0) == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(gamma_fn(2.0) == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(gamma_fn(5.0) == doctest::Approx(24.0).epsilon(1e-14));
    CHECK(gamma_fn(0.5) == doctest::Approx(std::sqrt(M_PI)).epsilon(1e-14));
    CHECK(gamma_fn(1.5) == doctest::Approx(0.5 * std::sqrt(M_PI)).epsilon(1e-14));
}

TEST_CASE("reference values") {
    // high-precision references
    CHECK(gamma_fn(0.123) == doctest::Approx(7.662417261962312).epsilon(1e-13));
    CHECK(gamma_fn(3.7) == doctest::Approx(4.1706517837966032).epsilon(1e-13));
    CHECK(gamma_fn(19.99) == doctest::Approx(1.1808504867660155e17).epsilon(1e-13));
    CHECK(gamma_fn(7.5) == doctest::Approx(1871.2543057977883).epsilon(1e-13));
}

TEST_CASE("reflection handles negative arguments") {
    CHECK(gamma_fn(-0.3) == doctest::Approx(-4.3268511088251926).epsilon(1e-13));
    CHECK(gamma_fn(-1.7) == doctest::Approx(2.5139235190652022).epsilon(1e-13));
}

TEST_CASE("functional equation on a grid") {
    for (double x = 0.05; x < 6.0; x += 0.173) {
        CHECK(gamma_fn(x + 1.0) == doctest::Approx(x * gamma_fn(x)).epsilon(1e-12));
    }
}
