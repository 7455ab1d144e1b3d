#include "doctest.h"

#include <random>

#include "chiral/fields.hpp"

using namespace chiral;

namespace {

PhiSeries random_series(const SigmaConfig& cfg, std::mt19937& rng, int lo, int hi, int terms)
{
    std::uniform_int_distribution<int> lvl(lo, hi), pos(0, cfg.n() - 1), c(-3, 3);
    PhiSeries f(cfg);
    for (int k = 0; k < terms; ++k) f += PhiSeries::basis(cfg, lvl(rng), pos(rng), Scalar(long(c(rng))));
    return f;
}

PhiSeries dt(const SigmaConfig& cfg) { return PhiSeries::one(cfg); }

} // namespace

TEST_CASE("fields: primitive evaluation")
{
    for (int n = 1; n <= 3; ++n) {
        SigmaConfig cfg(n, 24);
        AlgebraPtr U = CoeffAlgebra::heisenberg(cfg, 4);
        Field one = Field::unit(cfg, U, dt(cfg));
        CHECK(one.eval(PhiSeries::basis(cfg, -1, n - 1)) == UElement::one(U));
        CHECK(one.eval(PhiSeries::basis(cfg, 0, 0)).is_zero());
        Field b = Field::beta(cfg, U);
        std::mt19937 rng(n);
        PhiSeries f = random_series(cfg, rng, -2, 2, 4);
        CHECK(b.eval(f) == beta(f, U).truncate(4));
        CHECK(b.d().eval(f) == b.eval(d_dt(f)));
        PhiSeries g = random_series(cfg, rng, 0, 1, 2);
        CHECK((b * g).eval(f) == b.eval(g * f));
    }
}

TEST_CASE("fields: products and bracket on regular tensors")
{
    std::mt19937 rng(3);
    for (int n = 1; n <= 2; ++n) {
        SigmaConfig cfg(n, 24);
        AlgebraPtr U = CoeffAlgebra::heisenberg(cfg, 4);
        Field b = Field::beta(cfg, U);
        EvalContext ctx;
        for (int trial = 0; trial < 4; ++trial) {
            PhiSeries f = random_series(cfg, rng, -2, 1, 3), g = random_series(cfg, rng, -2, 1, 3);
            TwoVarSeries fg = tensor(f, g);
            UElement r = m_r(b, b).eval(ctx, fg, 4), l = m_l(b, b).eval(ctx, fg, 4);
            CHECK(r - l == UElement::scalar(U, pairing(f, g)));
            CHECK(mu(b, b).eval(ctx, fg, 4) == UElement::scalar(U, pairing(f, g)));
        }
        // R of the bracket is the residue field
        Field rb = r_map(mu(b, b));
        for (int c = -2 * n; c < 2 * n; ++c) {
            PhiSeries f = PhiSeries(cfg);
            f.add_term(c, Scalar(1));
            CHECK(rb.eval(f) == Field::unit(cfg, U, dt(cfg)).eval(f));
        }
    }
}

TEST_CASE("fields: associativity of m_r")
{
    SigmaConfig cfg(2, 24);
    AlgebraPtr U = CoeffAlgebra::heisenberg(cfg, 3);
    Field b = Field::beta(cfg, U), bd = b.d(), bt = b * PhiSeries::t(cfg);
    Field lhs = m_r(b, m_r(bd, bt)), rhs = m_r(m_r(b, bd), bt);
    EvalContext ctx;
    for (int x = -2; x < 2; ++x)
        for (int y = -2; y < 2; ++y)
            for (int z = -2; z < 2; ++z) CHECK(lhs.eval(ctx, Codes{x, y, z}, 3) == rhs.eval(ctx, Codes{x, y, z}, 3));
}

TEST_CASE("fields: unit axiom and the Phi formula")
{
    std::mt19937 rng(9);
    SigmaConfig cfg(2, 30);
    int K = 3;
    AlgebraPtr U = CoeffAlgebra::heisenberg(cfg, K);
    Field b = Field::beta(cfg, U);
    for (int trial = 0; trial < 3; ++trial) {
        PhiSeries f = random_series(cfg, rng, -1, 1, 2), g = random_series(cfg, rng, -1, 1, 2), h = random_series(cfg, rng, -1, 1, 2);
        Field X = trial == 0 ? b : trial == 1 ? b.d() : b * g;
        Field unit = Field::unit(cfg, U, f);
        Field reg = mu(unit, X);
        Field phi = mu(unit, X, tensor(g, h), 1);
        EvalContext ctx;
        for (int a = -4; a < 2; ++a)
            for (int c = -4; c < 2; ++c) {
                CHECK(reg.eval(ctx, Codes{a, c, 0}, K).is_zero());
                PhiSeries la(cfg), lc(cfg);
                la.add_term(a, Scalar(1));
                lc.add_term(c, Scalar(1));
                CHECK(phi.eval(ctx, Codes{a, c, 0}, K) == X.eval(ctx, f * g * h * la * lc, K));
            }
    }
}

TEST_CASE("fields: super antisymmetry and D-equivariance")
{
    SigmaConfig cfg(2, 30);
    int K = 3;
    AlgebraPtr U = CoeffAlgebra::heisenberg(cfg, K);
    Field b = Field::beta(cfg, U), bd = b.d();
    EvalContext ctx;
    Field z = mu(b, bd, 1), zs = swap_slots(mu(bd, b, 1));
    Field zd = mu(b.d(), b, 1), zact = d_slot(mu(b, b, 1), 0);
    for (int x = -3; x < 3; ++x)
        for (int y = -3; y < 3; ++y) {
            // odd fields: mu(X,Y) = +swap(mu(Y,X)) with the swapped coefficient (-delta)^-1
            CHECK(z.eval(ctx, Codes{x, y, 0}, K) == -zs.eval(ctx, Codes{x, y, 0}, K));
            // (X d (x) Y) delta^-1 = (X (x) Y)(delta^-1 d_u - delta^-2)
            CHECK(zd.eval(ctx, Codes{x, y, 0}, K) == zact.eval(ctx, Codes{x, y, 0}, K) - mu(b, b, 2).eval(ctx, Codes{x, y, 0}, K));
            CHECK(mu(bd, b).eval(ctx, Codes{x, y, 0}, K) == d_slot(mu(b, b), 0).eval(ctx, Codes{x, y, 0}, K));
            PhiSeries g = PhiSeries::t(cfg);
            CHECK(mu(b * g, b).eval(ctx, Codes{x, y, 0}, K) ==
                  act(mu(b, b), tensor(g, PhiSeries::one(cfg))).eval(ctx, Codes{x, y, 0}, K));
        }
}
