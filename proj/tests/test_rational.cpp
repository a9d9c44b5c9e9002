#include "doctest.h"

#include "segchain/errors.hpp"
#include "segchain/rational.hpp"

#include <cmath>

using namespace segchain;

TEST_SUITE("rational") {

TEST_CASE("parse accepts fractions and integers")
{
    CHECK(parse_rational("3/4") == Rational(3, 4));
    CHECK(parse_rational("6/8") == Rational(3, 4));
    CHECK(parse_rational("1") == 1);
    CHECK(parse_rational("0") == 0);
    CHECK(parse_rational("-2/3") == Rational(-2, 3));
}

TEST_CASE("parse rejects malformed text")
{
    for (const char* bad : {"", "1/0", " 1/2", "1/2 ", "1.5", "a/b", "1//2", "/2", "2/"})
        CHECK_THROWS_AS(parse_rational(bad), ParseError);
}

TEST_CASE("to_string round-trips")
{
    for (Rational q : {Rational(0), Rational(1), Rational(7, 10), Rational(-5, 3), Rational(123456789, 1000)}) {
        q.canonicalize();
        CHECK(parse_rational(to_string(q)) == q);
    }
    CHECK(to_string(parse_rational("4/2")) == "2");
    CHECK(to_string(Rational(1, 3)) == "1/3");
}

TEST_CASE("power and probability predicate")
{
    CHECK(power(Rational(1, 2), 10) == Rational(1, 1024));
    CHECK(power(Rational(3, 5), 0) == 1);
    CHECK(is_probability(Rational(0)));
    CHECK(is_probability(Rational(1)));
    CHECK_FALSE(is_probability(Rational(-1, 5)));
    CHECK_FALSE(is_probability(Rational(6, 5)));
}

TEST_CASE("snap returns the simplest rational in the tolerance window")
{
    auto half = snap_to_rational(0.5000000000001, 1e-12);
    CHECK(half == Rational(1, 2));
    const double target = std::sqrt(2.0) / 2;
    for (double tol : {1e-3, 1e-6, 1e-9, 1e-12}) {
        Rational q = snap_to_rational(target, tol);
        CHECK(std::abs(to_double(q) - target) <= target * tol * (1 + 1e-9));
        // No fraction with a smaller denominator fits the window.
        const unsigned long den = q.get_den().get_ui();
        for (unsigned long d = 1; d < den && d < 5000; ++d) {
            double lo = target * (1 - tol) * static_cast<double>(d);
            double hi = target * (1 + tol) * static_cast<double>(d);
            CHECK(std::floor(hi) < lo);
        }
    }
}

}
