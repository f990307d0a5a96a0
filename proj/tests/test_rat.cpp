#include <doctest.h>

#include "markov/errors.hpp"
#include "markov/rat.hpp"

using namespace markov;

TEST_CASE("rationals parse and print in lowest terms") {
    CHECK(rat_to_string(rat_from_string("3/4")) == "3/4");
    CHECK(rat_to_string(rat_from_string("2/4")) == "1/2");
    CHECK(rat_to_string(rat_from_string("1")) == "1");
    CHECK(rat_to_string(rat_from_string("1/1")) == "1");
    CHECK(rat_to_string(rat_from_string("0/7")) == "0");
    CHECK(rat_to_string(rat_from_string("-1/2")) == "-1/2");
    CHECK(rat_to_string(rat_from_string("-2/4")) == "-1/2");
}

TEST_CASE("rational parsing rejects malformed input") {
    CHECK_THROWS_AS(rat_from_string(""), ParseError);
    CHECK_THROWS_AS(rat_from_string("1/0"), ParseError);
    CHECK_THROWS_AS(rat_from_string("abc"), ParseError);
    CHECK_THROWS_AS(rat_from_string("1.5"), ParseError);
    CHECK_THROWS_AS(rat_from_string("1/"), ParseError);
    CHECK_THROWS_AS(rat_from_string("/2"), ParseError);
    CHECK_THROWS_AS(rat_from_string("1/-2"), ParseError);
    CHECK_THROWS_AS(rat_from_string("1 / 2"), ParseError);
}

TEST_CASE("rational arithmetic is exact") {
    Rat third(1, 3);
    CHECK(third * 3 == Rat(1));
    CHECK(Rat(1, 10) + Rat(2, 10) == Rat(3, 10));
    Rat sum(0);
    for (int i = 0; i < 100; ++i) sum += Rat(1, 100);
    CHECK(sum == Rat(1));
}

TEST_CASE("serialization round-trips bit-exactly") {
    const char* samples[] = {"0", "1", "3/4", "-5/7", "123456789123456789/123456789123456790"};
    for (const char* s : samples) CHECK(rat_to_string(rat_from_string(s)) == s);
}
