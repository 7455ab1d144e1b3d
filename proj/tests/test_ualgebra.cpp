#include "doctest.h"

#include <random>

#include "chiral/residue.hpp"
#include "chiral/ualgebra.hpp"

using namespace chiral;

namespace {

Scalar a(int i) { return Scalar::param("a" + std::to_string(i)); }

PhiSeries random_series(const SigmaConfig& cfg, std::mt19937& rng, int lo, int hi, int terms)
{
    std::uniform_int_distribution<int> lvl(lo, hi), pos(0, cfg.n() - 1), c(-3, 3);
    PhiSeries f(cfg);
    for (int k = 0; k < terms; ++k) f += PhiSeries::basis(cfg, lvl(rng), pos(rng), Scalar(long(c(rng))));
    return f;
}

} // namespace

TEST_CASE("ualgebra: beta basics")
{
    SigmaConfig cfg(2, 8);
    AlgebraPtr U = CoeffAlgebra::heisenberg(cfg, 4);
    UElement b0 = beta(PhiSeries::basis(cfg, 0, 0), U);
    REQUIRE(b0.terms().size() == 1);
    CHECK(b0.terms().begin()->first == Word{Gen{0, 0}});
    CHECK(beta(PhiSeries::zero(cfg), U).is_zero());
    CHECK(b0 * UElement::one(U) == b0);
    CHECK(UElement::one(U) * b0 == b0);

    PhiSeries c = PhiSeries::basis(cfg, -1, 1);
    UElement bc = beta(c, U);
    Scalar p = pairing(c, PhiSeries::basis(cfg, 0, 0));
    CHECK(p == Scalar(1));
    // odd generators: the bracket is the anticommutator
    CHECK(bc * b0 + b0 * bc == UElement::scalar(U, p));
    CHECK(supercommutator(bc, b0) == UElement::scalar(U, p));
    // the plain commutator is not central
    CHECK_FALSE((bc * b0 - b0 * bc).is_central());
    // normal order: creation generator on the left
    CHECK((b0 * bc).terms().count(Word{Gen{0, -1}, Gen{0, 0}}) == 1);
}

TEST_CASE("ualgebra: root-dependent brackets")
{
    SigmaConfig cfg(2, 8);
    AlgebraPtr U = CoeffAlgebra::heisenberg(cfg, 4);
    // Res((t-a1)^2 / ((t-a1)(t-a2))) = a2 - a1
    UElement x = beta(PhiSeries::basis(cfg, -1, 1), U), y = beta(PhiSeries::basis(cfg, 0, 1), U);
    CHECK(supercommutator(x, y) == UElement::scalar(U, a(2) - a(1)));
    // levels not summing to -1 anticommute
    UElement z = beta(PhiSeries::basis(cfg, -2, 1), U);
    CHECK(supercommutator(z, y).is_zero());
}

TEST_CASE("ualgebra: CCR against the pairing")
{
    std::mt19937 rng(7);
    for (int n = 1; n <= 3; ++n) {
        SigmaConfig cfg(n, 8);
        AlgebraPtr U = CoeffAlgebra::heisenberg(cfg, 5);
        for (int trial = 0; trial < 6; ++trial) {
            PhiSeries f = random_series(cfg, rng, -3, 2, 3), g = random_series(cfg, rng, -3, 2, 3);
            UElement bf = beta(f, U), bg = beta(g, U);
            UElement br = supercommutator(bf, bg);
            CHECK(br == UElement::scalar(U, pairing(f, g)));
            // super-antisymmetry for odd elements: [x,y] = [y,x]
            CHECK(br == supercommutator(bg, bf));
            CHECK(beta(f + g, U) == bf + bg);
        }
    }
}

TEST_CASE("ualgebra: associativity and confluence")
{
    std::mt19937 rng(19);
    SigmaConfig cfg(2, 8);
    AlgebraPtr U = CoeffAlgebra::heisenberg(cfg, 5);
    for (int trial = 0; trial < 8; ++trial) {
        UElement x = beta(random_series(cfg, rng, -2, 2, 3), U);
        UElement y = beta(random_series(cfg, rng, -2, 2, 3), U) * beta(random_series(cfg, rng, -2, 2, 2), U);
        UElement z = beta(random_series(cfg, rng, -2, 2, 3), U) + UElement::scalar(U, Scalar(2));
        CHECK((x * y) * z == x * (y * z));
    }
    // the same word read in different orders reaches one canonical form
    std::uniform_int_distribution<int> code(-4, 3);
    for (int trial = 0; trial < 20; ++trial) {
        Word w;
        for (int k = 0; k < 4; ++k) w.push_back(Gen{0, code(rng)});
        UElement left = UElement::word(U, w);
        // split the product at every position
        for (std::size_t cut = 0; cut <= w.size(); ++cut) {
            Word l(w.begin(), w.begin() + long(cut)), r(w.begin() + long(cut), w.end());
            CHECK(UElement::word(U, l) * UElement::word(U, r) == left);
        }
        Word rev(w.rbegin(), w.rend());
        UElement back = UElement::one(U);
        for (auto it = rev.rbegin(); it != rev.rend(); ++it) back = back * UElement::word(U, Word{*it});
        CHECK(back == left);
    }
}

TEST_CASE("ualgebra: truncation ideal")
{
    std::mt19937 rng(23);
    SigmaConfig cfg(2, 10);
    int K = 2;
    AlgebraPtr U = CoeffAlgebra::heisenberg(cfg, K);
    UElement deep = beta(PhiSeries::basis(cfg, K, 1), U);
    CHECK(deep.is_zero_at_level(K));
    CHECK_FALSE(deep.is_zero_at_level(K + 1));
    for (int trial = 0; trial < 10; ++trial) {
        UElement x = beta(random_series(cfg, rng, -4, 2, 3), U) * beta(random_series(cfg, rng, -4, 2, 2), U);
        UElement y = beta(random_series(cfg, rng, -2, 4, 3), U) * beta(random_series(cfg, rng, -2, 4, 3), U);
        // left-module projection
        CHECK((x * y).truncate(K) == (x * y.truncate(K)).truncate(K));
        // continuity: the level x demands
        int kx = std::max(K, -x.min_level());
        UElement e = deep * beta(PhiSeries::basis(cfg, kx, 0), U) * y;
        CHECK(e.is_zero_at_level(K));
        CHECK((x * e.truncate(kx)).truncate(K) == (x * e).truncate(K));
    }
}

TEST_CASE("ualgebra: matrix algebra")
{
    AlgebraPtr M = CoeffAlgebra::matrix(2);
    UElement e12 = UElement::matrix_unit(M, 0, 1), e21 = UElement::matrix_unit(M, 1, 0);
    CHECK(e12 * e21 - e21 * e12 == UElement::matrix_unit(M, 0, 0) - UElement::matrix_unit(M, 1, 1));
    CHECK(e12 * UElement::one(M) == e12);
    CHECK(UElement::one(M).is_central());
    CHECK(e12.is_zero_at_level(3) == false);
    AlgebraPtr U = CoeffAlgebra::heisenberg(SigmaConfig(1, 4), 2);
    try {
        (void)(e12 * UElement::one(U));
        CHECK(false);
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::InstanceMismatch);
    }
}

TEST_CASE("ualgebra: blocks anticommute")
{
    SigmaConfig c1 = SigmaConfig::from_roots({a(1)}, 6), c2 = SigmaConfig::from_roots({a(2)}, 6);
    AlgebraPtr U = CoeffAlgebra::heisenberg(std::vector<SigmaConfig>{c1, c2}, 3);
    UElement x = beta(PhiSeries::basis(c1, -1, 0), U, 0), y = beta(PhiSeries::basis(c2, 0, 0), U, 1);
    CHECK(supercommutator(x, y).is_zero());
    UElement y1 = beta(PhiSeries::basis(c1, 0, 0), U, 0);
    CHECK(supercommutator(x, y1) == UElement::one(U));
}
