#include "doctest.h"

#include <random>

#include "chiral/sigma.hpp"

using namespace chiral;

namespace {

Scalar a(int i) { return Scalar::param("a" + std::to_string(i)); }

PhiSeries random_series(const SigmaConfig& cfg, std::mt19937& rng, int lo, int hi, int terms)
{
    std::uniform_int_distribution<int> lvl(lo, hi), pos(0, cfg.n() - 1), c(-4, 4);
    PhiSeries f(cfg);
    for (int k = 0; k < terms; ++k) {
        Scalar coef(long(c(rng)));
        if (k % 3 == 0) coef *= a(1 + pos(rng));
        f += PhiSeries::basis(cfg, lvl(rng), pos(rng), coef);
    }
    return f;
}

// naive oracle: multiply monomial representations and convert back
PhiSeries monomial_product(const PhiSeries& f, const PhiSeries& g)
{
    auto [p, k] = f.to_monomials();
    auto [q, l] = g.to_monomials();
    return PhiSeries::from_monomials(p * q, k + l, f.config());
}

} // namespace

TEST_CASE("sigma: from_monomials examples")
{
    SigmaConfig c1(1, 6), c2(2, 6);
    CHECK(PhiSeries::from_monomials(TPoly(Scalar(1)), 0, c2) == PhiSeries::basis(c2, 0, 0));
    CHECK(PhiSeries::from_monomials(TPoly::t(), 0, c2) == PhiSeries::basis(c2, 0, 0, a(1)) + PhiSeries::basis(c2, 0, 1));
    TPoly t2 = TPoly::t() * TPoly::t();
    PhiSeries expect = PhiSeries::basis(c1, -1, 0, a(1) * a(1)) + PhiSeries::basis(c1, 0, 0, Scalar(2) * a(1)) +
                       PhiSeries::basis(c1, 1, 0);
    CHECK(PhiSeries::from_monomials(t2, -1, c1) == expect);
}

TEST_CASE("sigma: to_monomials and round trip")
{
    SigmaConfig c2(2, 6);
    auto [p0, k0] = PhiSeries::basis(c2, 0, 0).to_monomials();
    CHECK(p0 == TPoly(Scalar(1)));
    CHECK(k0 == 0);
    auto [p1, k1] = PhiSeries::basis(c2, -1, 1).to_monomials();
    CHECK(p1 == TPoly::linear(a(1)));
    CHECK(k1 == -1);

    std::mt19937 rng(1);
    for (int n = 1; n <= 3; ++n) {
        SigmaConfig cfg(n, 5);
        for (int trial = 0; trial < 10; ++trial) {
            PhiSeries f = random_series(cfg, rng, -3, 4, 10);
            auto [p, k] = f.to_monomials();
            CHECK(PhiSeries::from_monomials(p, k, cfg) == f);
        }
    }
}

TEST_CASE("sigma: triangularity of the plus basis")
{
    for (int n = 1; n <= 4; ++n) {
        SigmaConfig cfg(n, 6);
        for (int m = -2; m <= 2; ++m)
            for (int i = 0; i < n; ++i) {
                TPoly p = cfg.pi(i);
                PhiSeries f = PhiSeries::from_monomials(p, m, cfg);
                CHECK(f == PhiSeries::basis(cfg, m, i));
            }
    }
}

TEST_CASE("sigma: products")
{
    SigmaConfig c1 = SigmaConfig::from_roots({Scalar(0)}, 6);
    CHECK(PhiSeries::basis(c1, -1, 0) * PhiSeries::basis(c1, 1, 0) == PhiSeries::one(c1));
    SigmaConfig c2(2, 6);
    CHECK(PhiSeries::basis(c2, -1, 0) * PhiSeries::basis(c2, 0, 1) == PhiSeries::basis(c2, -1, 1));

    std::mt19937 rng(2);
    for (int n = 1; n <= 3; ++n) {
        SigmaConfig cfg(n, 6);
        for (int trial = 0; trial < 8; ++trial) {
            PhiSeries f = random_series(cfg, rng, -2, 3, 5), g = random_series(cfg, rng, -2, 3, 5);
            CHECK(f * PhiSeries::one(cfg) == f);
            // product drops levels >= M; the oracle uses the same cut
            CHECK(f * g == monomial_product(f, g));
            if (!f.is_zero() && !g.is_zero()) {
                int k = -f.pole_order(), l = -g.pole_order();
                CHECK((f * g).in_filtration(k + l));
            }
        }
    }
}

TEST_CASE("sigma: derivative")
{
    SigmaConfig c0 = SigmaConfig::from_roots({Scalar(0)}, 8);
    CHECK(d_dt(PhiSeries::one(c0)).is_zero());
    for (int m = -3; m <= 4; ++m)
        CHECK(d_dt(PhiSeries::basis(c0, m, 0)) == PhiSeries::basis(c0, m - 1, 0, Scalar(long(m))));
    SigmaConfig c2(2, 6);
    PhiSeries dphi = d_dt(PhiSeries::basis(c2, 1, 0));
    CHECK(dphi == PhiSeries::basis(c2, 0, 0, a(1) - a(2)) + PhiSeries::basis(c2, 0, 1, Scalar(2)));
    CHECK(dphi == PhiSeries::from_monomials(c2.phi().derivative(), 0, c2));

    std::mt19937 rng(4);
    for (int n = 1; n <= 3; ++n) {
        SigmaConfig cfg(n, 7);
        for (int trial = 0; trial < 6; ++trial) {
            PhiSeries f = random_series(cfg, rng, -2, 2, 4), g = random_series(cfg, rng, -2, 2, 4);
            PhiSeries lhs = d_dt(f * g), rhs = d_dt(f) * g + f * d_dt(g);
            int w = cfg.M() - 1;
            CHECK(lhs.truncated(w) == rhs.truncated(w));
            // monomial oracle
            auto [p, k] = f.to_monomials();
            TPoly phi = cfg.phi();
            TPoly num = p.derivative() * phi + p * phi.derivative() * Scalar(long(k));
            CHECK(d_dt(f).truncated(cfg.M() - 1) == PhiSeries::from_monomials(num, k - 1, cfg).truncated(cfg.M() - 1));
        }
    }
}

TEST_CASE("sigma: differential operators")
{
    SigmaConfig c0 = SigmaConfig::from_roots({Scalar(0)}, 8);
    CHECK(apply_dop(DOperator::derivative(c0), PhiSeries::one(c0)).is_zero());
    DOperator euler;
    euler.add(PhiSeries::t(c0), 1);
    CHECK(apply_dop(euler, PhiSeries::basis(c0, 3, 0)) == PhiSeries::basis(c0, 3, 0, Scalar(3)));
    std::mt19937 rng(6);
    SigmaConfig c3(3, 6);
    PhiSeries f = random_series(c3, rng, -2, 3, 6);
    CHECK(apply_dop(DOperator::derivative(c3, 2), f) == d_dt(d_dt(f)));
}

TEST_CASE("sigma: plus and minus bases")
{
    for (int n = 1; n <= 4; ++n) {
        SigmaConfig cfg(n, 6);
        for (int m = -2; m <= 2; ++m)
            for (int i = 0; i < n; ++i) {
                PhiSeries f = PhiSeries::minus_basis(cfg, m, i);
                TPoly rho(Scalar(1));
                for (int k = n - i; k < n; ++k) rho = rho * TPoly::linear(cfg.roots()[std::size_t(k)]);
                CHECK(f == PhiSeries::from_monomials(rho, m, cfg));
                // minus view inverts the conversion and keeps the level
                auto mc = f.minus_coeffs();
                CHECK(mc.size() == 1);
                CHECK(mc.begin()->first == cfg.code(m, i));
                CHECK(f.pole_order() == m);
            }
    }
}

TEST_CASE("sigma: text round trip")
{
    std::mt19937 rng(9);
    SigmaConfig cfg(2, 5);
    PhiSeries f = random_series(cfg, rng, -2, 4, 7);
    CHECK(phiseries_from_text(to_text(f)) == f);
}
