#include "doctest.h"

#include <random>

#include "chiral/twovar.hpp"

using namespace chiral;

namespace {

Scalar a(int i) { return Scalar::param("a" + std::to_string(i)); }

PhiSeries random_series(const SigmaConfig& cfg, std::mt19937& rng, int lo, int hi, int terms)
{
    std::uniform_int_distribution<int> lvl(lo, hi), pos(0, cfg.n() - 1), c(-3, 3);
    PhiSeries f(cfg);
    for (int k = 0; k < terms; ++k) {
        Scalar coef(long(c(rng)));
        if (k % 2 == 0) coef *= a(1 + pos(rng));
        f += PhiSeries::basis(cfg, lvl(rng), pos(rng), coef);
    }
    return f;
}

TwoVarSeries random_tensor(const SigmaConfig& cfg, std::mt19937& rng, int lo, int hi)
{
    TwoVarSeries x(cfg, Orientation::poly);
    for (int k = 0; k < 3; ++k) x += tensor(random_series(cfg, rng, lo, hi, 2), random_series(cfg, rng, lo, hi, 2));
    return x;
}

// u^p v^q for n = 1, a = 0
TwoVarSeries uv(const SigmaConfig& c, int p, int q, long coef = 1)
{
    return tensor(PhiSeries::basis(c, p, 0, Scalar(coef)), PhiSeries::basis(c, q, 0));
}

} // namespace

TEST_CASE("twovar: delta basics")
{
    SigmaConfig c0 = SigmaConfig::from_roots({Scalar(0)}, 10);
    TwoVarSeries d = delta(c0);
    CHECK(d == uv(c0, 1, 0) - uv(c0, 0, 1));
    CHECK(diag_restrict(d).is_zero());
    CHECK(diag_restrict(uv(c0, 1, 0) * uv(c0, 0, 1)) == PhiSeries::basis(c0, 2, 0));
    PhiSeries f = PhiSeries::basis(c0, -2, 0, Scalar(3));
    CHECK(diag_restrict(tensor(f, PhiSeries::one(c0))) == f);
    // disjoint slots multiply into a pure tensor
    SigmaConfig c2(2, 6);
    PhiSeries g = PhiSeries::basis(c2, -1, 1, a(2)), h = PhiSeries::basis(c2, 2, 0);
    CHECK(tensor(g, PhiSeries::one(c2)) * tensor(PhiSeries::one(c2), h) == tensor(g, h));
    CHECK(d * TwoVarSeries::one(c0) == d);
}

TEST_CASE("twovar: delta squared against monomials")
{
    SigmaConfig c0 = SigmaConfig::from_roots({Scalar(0)}, 10);
    TwoVarSeries d = delta(c0);
    CHECK(d * d == uv(c0, 2, 0) - uv(c0, 1, 1, 2) + uv(c0, 0, 2));
    // general n: delta^2 restricts to 0 and is divisible by delta twice
    SigmaConfig c3(3, 8);
    TwoVarSeries d3 = delta(c3);
    TwoVarSeries sq = d3 * d3;
    auto q = divide_by_delta(sq);
    REQUIRE(q.has_value());
    CHECK(*q == d3);
    CHECK_FALSE(divide_by_delta(TwoVarSeries::one(c3)).has_value());
}

TEST_CASE("twovar: expansions of 1/(u-v)")
{
    SigmaConfig c0 = SigmaConfig::from_roots({Scalar(0)}, 12);
    int D = 6;
    TwoVarSeries e = exp_r(1, c0, D);
    TwoVarSeries expect(c0, Orientation::right);
    for (int m = 0; m < D; ++m) expect += uv(c0, -m - 1, m);
    CHECK(e == expect);
    CHECK(e.orientation() == Orientation::right);

    // n = 2: leading terms 1/(u-a1) + (v-a1)/((u-a1)(u-a2))
    SigmaConfig c2(2, 10);
    TwoVarSeries e2 = exp_r(1, c2, 4);
    PhiSeries first = PhiSeries::from_monomials(TPoly::linear(a(2)), -1, c2);
    TwoVarSeries lead = tensor(first, PhiSeries::one(c2)) +
                        tensor(PhiSeries::basis(c2, -1, 0), PhiSeries::from_monomials(TPoly::linear(a(1)), 0, c2));
    CHECK(e2.truncated(1, 1) == lead);

    // dual-pair structure term by term
    for (int n = 1; n <= 3; ++n) {
        SigmaConfig cfg(n, 8);
        TwoVarSeries er = exp_r(1, cfg, 3);
        TwoVarSeries sum(cfg, Orientation::right);
        for (int m = 0; m < 3; ++m)
            for (int i = 0; i < n; ++i) sum += tensor(PhiSeries::minus_basis(cfg, -m - 1, n - i - 1), PhiSeries::basis(cfg, m, i));
        CHECK(er == sum);
    }
}

TEST_CASE("twovar: delta times expansion is one up to tail")
{
    for (int n = 1; n <= 3; ++n) {
        SigmaConfig cfg(n, 10);
        int D = 5;
        TwoVarSeries pr = delta(cfg) * exp_r(1, cfg, D);
        TwoVarSeries one = TwoVarSeries::one(cfg);
        CHECK(pr.exact_part() == one);
        // surviving extra terms sit at depth >= D in v
        TwoVarSeries rest = pr - one;
        for (auto& [k, c] : rest.coeffs()) CHECK(cfg.level(k[1]) >= D);
        TwoVarSeries pl = delta(cfg) * exp_l(1, cfg, D);
        CHECK(pl.exact_part() == one);
        TwoVarSeries restl = pl - one;
        for (auto& [k, c] : restl.coeffs()) CHECK(cfg.level(k[0]) >= D);
    }
}

TEST_CASE("twovar: higher powers")
{
    for (int n = 1; n <= 2; ++n) {
        SigmaConfig cfg(n, 12);
        int D = 4;
        for (int k = 2; k <= 3; ++k) {
            TwoVarSeries e = exp_r(k, cfg, D);
            CHECK(e == exp_r_by_derivative(k, cfg, D));
            // delta^k * exp(k) = 1 below the window
            TwoVarSeries dk = delta(cfg);
            for (int j = 1; j < k; ++j) dk = dk * delta(cfg);
            CHECK((dk * e).exact_part() == TwoVarSeries::one(cfg));
            CHECK((dk * exp_l(k, cfg, D)).exact_part() == TwoVarSeries::one(cfg));
        }
    }
}

TEST_CASE("twovar: orientation rules")
{
    SigmaConfig cfg(2, 8);
    CHECK_THROWS_AS(exp_r(1, cfg, 3) * exp_l(1, cfg, 3), Error);
    try {
        (void)mul_two(exp_r(1, cfg, 3), exp_l(1, cfg, 3));
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::OrientationMismatch);
    }
    try {
        (void)diag_restrict(exp_r(1, cfg, 3));
        CHECK(false);
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::OrientationUnsupported);
    }
    SigmaConfig other(3, 8);
    try {
        (void)(delta(cfg) * delta(other));
        CHECK(false);
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::ConfigMismatch);
    }
    CHECK((delta(cfg) * exp_r(1, cfg, 3)).orientation() == Orientation::right);
}

TEST_CASE("twovar: contractions")
{
    for (int n = 1; n <= 3; ++n) {
        SigmaConfig cfg(n, 8);
        PhiSeries g = PhiSeries::basis(cfg, 1, 0, a(1)) + PhiSeries::basis(cfg, -2, n - 1);
        CHECK(contract_r(tensor(PhiSeries::basis(cfg, -1, n - 1), g)) == g);
        CHECK(contract_r(tensor(PhiSeries::one(cfg), g)).is_zero());
    }
    SigmaConfig c0 = SigmaConfig::from_roots({Scalar(0)}, 10);
    TwoVarSeries f = uv(c0, -1, 0);
    CHECK(contract_r(f * exp_r(1, c0, 5)).is_zero());
    CHECK(contract_l(f * exp_l(1, c0, 5)) == PhiSeries::basis(c0, -1, 0, Scalar(-1)));
    try {
        (void)contract_r(exp_l(1, c0, 3));
        CHECK(false);
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::OrientationMismatch);
    }
}

TEST_CASE("twovar: Cauchy formula")
{
    SigmaConfig c0 = SigmaConfig::from_roots({Scalar(0)}, 12);
    auto r = cauchy_check(uv(c0, -1, 0), 6);
    CHECK(r.holds);
    CHECK(r.lhs_r.is_zero());
    CHECK(r.lhs_l == PhiSeries::basis(c0, -1, 0, Scalar(-1)));
    CHECK(r.rhs == PhiSeries::basis(c0, -1, 0));

    auto one = cauchy_check(TwoVarSeries::one(c0), 4);
    CHECK(one.holds);
    CHECK(one.rhs == PhiSeries::one(c0));

    std::mt19937 rng(11);
    for (int n = 1; n <= 3; ++n) {
        SigmaConfig cfg(n, 12);
        for (int trial = 0; trial < 4; ++trial) {
            TwoVarSeries f = random_tensor(cfg, rng, -2, 2);
            auto res = cauchy_check(f, 5);
            CHECK(res.holds);
            CHECK(res.window >= 3);
        }
    }
    try {
        (void)cauchy_check(uv(c0, -4, 0), 4);
        CHECK(false);
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::WindowTooSmall);
    }
}

TEST_CASE("twovar: h identity")
{
    for (int n = 1; n <= 4; ++n) {
        SigmaConfig cfg(n, 2 * n + 4);
        PhiSeries phi = PhiSeries::basis(cfg, 1, 0), one = PhiSeries::one(cfg);
        CHECK(tensor(phi, one) - tensor(one, phi) == diagonal_quotient(cfg) * delta(cfg));
    }
}

TEST_CASE("twovar: diagonal localization")
{
    std::mt19937 rng(5);
    SigmaConfig cfg(2, 12);
    TwoVarSeries d = delta(cfg);
    for (int trial = 0; trial < 4; ++trial) {
        TwoVarSeries y = random_tensor(cfg, rng, -1, 2);
        DiagonalPole p = localize_diagonal(d * y, 1);
        CHECK(p.k == 0);
        CHECK(p.num == y);
        DiagonalPole q = localize_diagonal(y, 2) * localize_diagonal(d, 0);
        CHECK(q.num == y);
        CHECK(q.k == 1);
    }
    DiagonalPole inv = localize_diagonal(TwoVarSeries::one(cfg), 1);
    CHECK(expand_r(inv, 4) == exp_r(1, cfg, 4));
    CHECK(expand_l(inv, 4) == exp_l(1, cfg, 4));
    // expansion of a shifted numerator keeps the requested window
    TwoVarSeries num = tensor(PhiSeries::one(cfg), PhiSeries::basis(cfg, -2, 1));
    TwoVarSeries e = expand_r(localize_diagonal(num, 1), 3);
    CHECK(e.valid(1) >= 3);
    CHECK(e == (num * exp_r(1, cfg, 8)).truncated(1, 3));
}

TEST_CASE("twovar: text round trip")
{
    std::mt19937 rng(3);
    SigmaConfig cfg(2, 6);
    TwoVarSeries x = random_tensor(cfg, rng, -2, 3);
    CHECK(twovar_from_text(to_text(x)) == x);
    TwoVarSeries e = exp_l(1, cfg, 3);
    TwoVarSeries back = twovar_from_text(to_text(e));
    CHECK(back == e);
    CHECK(back.orientation() == Orientation::left);
}
