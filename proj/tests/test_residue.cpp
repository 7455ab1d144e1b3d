#include "doctest.h"

#include <random>

#include "chiral/residue.hpp"

using namespace chiral;

namespace {

Scalar a(int i) { return Scalar::param("a" + std::to_string(i)); }

PhiSeries random_series(const SigmaConfig& cfg, std::mt19937& rng, int lo, int hi, int terms)
{
    std::uniform_int_distribution<int> lvl(lo, hi), pos(0, cfg.n() - 1), c(-5, 5);
    PhiSeries f(cfg);
    for (int k = 0; k < terms; ++k) {
        Scalar coef(long(c(rng)));
        if (k % 2) coef *= a(1 + pos(rng));
        f += PhiSeries::basis(cfg, lvl(rng), pos(rng), coef);
    }
    return f;
}

} // namespace

TEST_CASE("residue: basic values")
{
    SigmaConfig c1(1, 4), c2(2, 4);
    CHECK(residue(OneForm(PhiSeries::basis(c1, -1, 0))) == Scalar(1));
    CHECK(residue(OneForm(PhiSeries::basis(c2, -1, 0))).is_zero());
    CHECK(residue(OneForm(PhiSeries::basis(c2, -1, 1))) == Scalar(1));
    for (int n = 1; n <= 4; ++n) {
        SigmaConfig cfg(n, 4);
        CHECK(residue(OneForm(PhiSeries::basis(cfg, -1, n - 1))) == Scalar(1));
        CHECK(pairing(PhiSeries::one(cfg), PhiSeries::one(cfg)).is_zero());
    }
}

TEST_CASE("residue: agrees with the basis coefficient and ignores truncation")
{
    std::mt19937 rng(21);
    for (int n = 1; n <= 3; ++n) {
        SigmaConfig cfg(n, 5);
        for (int trial = 0; trial < 20; ++trial) {
            PhiSeries f = random_series(cfg, rng, -4, 4, 8);
            Scalar r = residue(OneForm(f));
            CHECK(r == residue_coefficient(f));
            CHECK(residue(OneForm(f.with_config(cfg.with_truncation(9)))) == r);
        }
    }
}

TEST_CASE("residue: dual bases")
{
    for (int n = 1; n <= 3; ++n) {
        SigmaConfig cfg(n, 6);
        for (int m = -3; m <= 2; ++m)
            for (int i = 0; i < n; ++i)
                for (int mm = -3; mm <= 2; ++mm)
                    for (int j = 0; j < n; ++j) {
                        Scalar expect = (m + mm == -1 && i + j == n - 1) ? Scalar(1) : Scalar(0);
                        CHECK(pairing(PhiSeries::basis(cfg, m, i), PhiSeries::minus_basis(cfg, mm, j)) == expect);
                        if (m < 0 && mm < 0)
                            CHECK(pairing(PhiSeries::minus_basis(cfg, m, i), PhiSeries::minus_basis(cfg, mm, j)).is_zero());
                    }
    }
}

TEST_CASE("residue: exact forms")
{
    std::mt19937 rng(22);
    for (int n = 1; n <= 3; ++n) {
        SigmaConfig cfg(n, 6);
        for (int trial = 0; trial < 15; ++trial)
            CHECK(residue(OneForm(d_dt(random_series(cfg, rng, -4, 4, 6)))).is_zero());
    }
}

TEST_CASE("residue: split over distinct points")
{
    SigmaConfig c2(2, 4);
    Substitution s{{"a1", 0}, {"a2", 1}};
    auto r = residue_split(OneForm(PhiSeries::basis(c2, -1, 0)), s);
    REQUIRE(r.size() == 2);
    CHECK(r[0] == Scalar(-1));
    CHECK(r[1] == Scalar(1));
    r = residue_split(OneForm(PhiSeries::basis(c2, -1, 1)), s);
    CHECK(r[0].is_zero());
    CHECK(r[1] == Scalar(1));
    r = residue_split(OneForm(PhiSeries::basis(c2, 2, 1)), s);
    CHECK(r[0].is_zero());
    CHECK(r[1].is_zero());
    try {
        residue_split(OneForm(PhiSeries::one(c2)), Substitution{{"a1", 2}, {"a2", 2}});
        CHECK(false);
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::CollidingPoints);
    }

    std::mt19937 rng(23);
    SigmaConfig c3(3, 5);
    for (int trial = 0; trial < 10; ++trial) {
        PhiSeries f = random_series(c3, rng, -3, 3, 6);
        Substitution sub{{"a1", mpq_class(trial, 3)}, {"a2", -trial - 1}, {"a3", 5}};
        auto parts = residue_split(OneForm(f), sub);
        Scalar sum;
        for (auto& p : parts) sum += p;
        CHECK(sum == Scalar(substitute(residue(OneForm(f)), sub)));
    }
}
