#include "doctest.h"

#include <random>

#include "chiral/scalar.hpp"

using namespace chiral;

namespace {

Scalar a(int i) { return Scalar::param("a" + std::to_string(i)); }

Scalar random_scalar(std::mt19937& rng, bool allow_den)
{
    std::uniform_int_distribution<int> c(-3, 3), pick(1, 3), terms(1, 3);
    auto rp = [&] {
        Scalar p;
        int nt = terms(rng);
        for (int k = 0; k < nt; ++k) {
            Scalar t(long(c(rng)));
            int d = pick(rng) - 1;
            for (int j = 0; j < d; ++j) t *= a(pick(rng));
            p += t;
        }
        return p;
    };
    Scalar num = rp();
    if (!allow_den) return num;
    Scalar den = rp();
    if (den.is_zero()) den = Scalar(1);
    return num / den;
}

} // namespace

TEST_CASE("scalar: canonical quotients")
{
    CHECK((a(1) - a(2)) / (a(1) - a(2)) == Scalar(1));
    CHECK(a(1) * a(2) + a(2) * a(1) == Scalar(2) * a(1) * a(2));
    CHECK(Scalar(1) / (a(1) - a(2)) + Scalar(1) / (a(2) - a(1)) == Scalar());
    Scalar x = (a(1) * a(1) - a(2) * a(2)) / (a(1) - a(2));
    CHECK(x == a(1) + a(2));
    CHECK(x.is_polynomial());
}

TEST_CASE("scalar: gcd cancels multivariate common factors")
{
    Scalar f = (a(1) - a(2)) * (a(2) + a(3) * a(3));
    Scalar g = (a(1) - a(2)) * (a(1) + 1);
    Scalar q = f / g;
    CHECK(q == (a(2) + a(3) * a(3)) / (a(1) + 1));
    CHECK(q.den().leading().second == 1);
    CHECK(q * g == f);
}

TEST_CASE("scalar: substitution")
{
    Substitution s{{"a1", 1}, {"a2", 2}};
    CHECK(substitute(a(1) + a(2), s) == 3);
    Substitution coll{{"a1", 1}, {"a2", 1}};
    CHECK_THROWS_AS(substitute(Scalar(1) / (a(1) - a(2)), coll), Error);
    try {
        substitute(Scalar(1) / (a(1) - a(2)), coll);
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::DenominatorVanishes);
    }
    Substitution s2{{"a1", 3}, {"a2", -1}};
    CHECK(substitute((a(1) * a(1) - a(2) * a(2)) / (a(1) - a(2)), s2) == 2);
    try {
        substitute(a(3), s);
        CHECK(false);
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::UnboundParameter);
    }
}

TEST_CASE("scalar: field axioms on random elements")
{
    std::mt19937 rng(11);
    for (int trial = 0; trial < 60; ++trial) {
        Scalar x = random_scalar(rng, true), y = random_scalar(rng, true), z = random_scalar(rng, trial % 2);
        CHECK((x + y) - y == x);
        CHECK((x * y) * z == x * (y * z));
        CHECK(x * (y + z) == x * y + x * z);
        if (!y.is_zero()) CHECK((x / y) * y == x);
    }
}

TEST_CASE("scalar: substitution is a ring homomorphism")
{
    std::mt19937 rng(5);
    Substitution s{{"a1", mpq_class(1, 2)}, {"a2", -3}, {"a3", 7}};
    for (int trial = 0; trial < 40; ++trial) {
        Scalar x = random_scalar(rng, true), y = random_scalar(rng, true);
        try {
            mpq_class sx = substitute(x, s), sy = substitute(y, s);
            CHECK(substitute(x * y, s) == sx * sy);
            CHECK(substitute(x + y, s) == sx + sy);
        } catch (const Error& e) {
            CHECK(e.kind() == ErrorKind::DenominatorVanishes);
        }
    }
}

TEST_CASE("scalar: text round trip")
{
    std::mt19937 rng(3);
    for (int trial = 0; trial < 40; ++trial) {
        Scalar x = random_scalar(rng, true) / Scalar(mpq_class(3, 7));
        CHECK(parse_scalar(x.str()) == x);
    }
    CHECK(parse_scalar("(a1 - a2)^2 / (a1 - a2)") == a(1) - a(2));
    CHECK(parse_scalar("-3/4") == Scalar(mpq_class(-3, 4)));
    CHECK_THROWS_AS(parse_scalar("(a1 +"), Error);
}

TEST_CASE("scalar: partial specialization and composition")
{
    Scalar x = (a(1) + a(2)) / (a(1) - a(3));
    Scalar y = specialize(x, Substitution{{"a1", 2}});
    CHECK(y == (a(2) + 2) / (Scalar(2) - a(3)));
    std::map<int, Scalar> img{{var_index("a2"), a(1)}};
    CHECK(compose(x, img) == Scalar(2) * a(1) / (a(1) - a(3)));
}
