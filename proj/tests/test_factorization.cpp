#include "doctest.h"

#include <random>

#include "chiral/factorization.hpp"

using namespace chiral;

namespace {

PhiSeries random_series(const SigmaConfig& cfg, std::mt19937& rng, int lo, int hi, int terms)
{
    std::uniform_int_distribution<int> lvl(lo, hi), pos(0, cfg.n() - 1), c(-3, 3);
    PhiSeries f(cfg);
    for (int k = 0; k < terms; ++k) f += PhiSeries::basis(cfg, lvl(rng), pos(rng), Scalar(long(c(rng))));
    return f;
}

bool agree(const PhiSeries& a, const PhiSeries& b, int level)
{
    return a.config().same_roots(b.config()) && (a - b).truncated(level).is_zero();
}

SigmaConfig two_points(int M) { return SigmaConfig(2, M).substituted({{"a1", 0}, {"a2", 1}}); }

} // namespace

TEST_CASE("factorization: partitions")
{
    Partition p({0, 0, 1});
    CHECK(p.blocks() == 2);
    CHECK(p.str() == "12|3");
    CHECK(p.members(0) == std::vector<int>{0, 1});
    CHECK(Partition::discrete(3).refines(p));
    CHECK(p.refines(Partition::single(3)));
    CHECK_FALSE(p.refines(Partition({0, 1, 1})));
    CHECK(Partition::discrete(3).restricted(p, 0).str() == "1|2");
    CHECK_THROWS_AS(Partition({0, 2}), Error);
}

TEST_CASE("factorization: split examples")
{
    int M = 6;
    SigmaConfig cfg = two_points(M);
    Factorization fz(cfg, Partition::discrete(2));
    const auto& blocks = fz.block_configs();
    REQUIRE(blocks.size() == 2);

    auto ones = fz.split(PhiSeries::one(cfg));
    CHECK(ones[0] == PhiSeries::one(blocks[0]));
    CHECK(ones[1] == PhiSeries::one(blocks[1]));

    // t - a1 is t near 0 and (t - 1) + 1 near 1
    auto lin = fz.split(PhiSeries::basis(cfg, 0, 1));
    CHECK(lin[0] == PhiSeries::basis(blocks[0], 1, 0));
    CHECK(lin[1] == PhiSeries::basis(blocks[1], 1, 0) + PhiSeries::one(blocks[1]));

    // 1/(t(t-1)) times (t - 1) is 1/t near 0; times t is 1/(t-1) near 1
    auto inv = fz.split(PhiSeries::basis(cfg, -1, 0));
    PhiSeries tm1 = PhiSeries::basis(blocks[0], 1, 0) - PhiSeries::one(blocks[0]);
    CHECK(agree(inv[0] * tm1, PhiSeries::basis(blocks[0], -1, 0), M - 1));
    PhiSeries t = PhiSeries::basis(blocks[1], 1, 0) + PhiSeries::one(blocks[1]);
    CHECK(agree(inv[1] * t, PhiSeries::basis(blocks[1], -1, 0), M - 1));
}

TEST_CASE("factorization: merge examples")
{
    int M = 6;
    SigmaConfig cfg = two_points(M);
    Factorization fz(cfg, Partition::discrete(2));
    const auto& blocks = fz.block_configs();
    CHECK(fz.merge({PhiSeries::one(blocks[0]), PhiSeries::one(blocks[1])}) == PhiSeries::one(cfg));

    PhiSeries e0 = fz.idempotent(0, M), e1 = fz.idempotent(1, M);
    CHECK(agree(e0 + e1, PhiSeries::one(cfg), M));
    CHECK(agree(e0 * e0, e0, M));
    CHECK(agree(e0 * e1, PhiSeries::zero(cfg), M));

    // merge(f, 0) = e_1 f
    PhiSeries f = PhiSeries::basis(blocks[0], 2, 0) - PhiSeries::basis(blocks[0], 1, 0) * Scalar(3) + PhiSeries::one(blocks[0]);
    PhiSeries F = PhiSeries::basis(cfg, 1, 0) - PhiSeries::basis(cfg, 0, 1) * Scalar(2) + PhiSeries::one(cfg); // t^2 - 3t + 1
    CHECK(agree(fz.merge({f, PhiSeries::zero(blocks[1])}), e0 * F, M));
}

TEST_CASE("factorization: round trips")
{
    std::mt19937 rng(17);
    for (int n = 2; n <= 4; ++n) {
        Substitution s;
        for (int i = 0; i < n; ++i) s.set("a" + std::to_string(i + 1), mpq_class(i * i - 1));
        SigmaConfig cfg = SigmaConfig(n, 5).substituted(s);
        std::vector<int> last(std::size_t(n), 0);
        last.back() = 1;
        for (auto p : {Partition::discrete(n), Partition(last)}) {
            Factorization fz(cfg, p);
            for (int k = 0; k < 10; ++k) {
                PhiSeries f = random_series(cfg, rng, -2, 3, 4);
                CHECK(agree(fz.merge(fz.split(f)), f, 5));
                auto pieces = fz.split(f);
                auto again = fz.split(fz.merge(pieces));
                for (std::size_t b = 0; b < pieces.size(); ++b) CHECK(agree(again[b], pieces[b], 5));
            }
        }
    }
}

TEST_CASE("factorization: symbolic split after substitution")
{
    std::mt19937 rng(4);
    SigmaConfig sym(2, 5);
    Substitution s{{"a1", 2}, {"a2", -1}};
    Factorization fz(sym, Partition::discrete(2), s);
    for (int k = 0; k < 5; ++k) {
        PhiSeries f = random_series(sym, rng, -1, 2, 3);
        auto a = fz.split(f);
        auto b = fact_split(substitute(f, s), Partition::discrete(2));
        for (std::size_t j = 0; j < a.size(); ++j) CHECK(agree(a[j], b[j], 5));
        CHECK(agree(fact_merge(a, Partition::discrete(2)), substitute(f, s), 5));
    }
}

TEST_CASE("factorization: axioms")
{
    for (int n = 3; n <= 4; ++n) {
        Report r = fact_axioms_check(n, 5, 4, 9);
        for (auto& s : r.residuals) MESSAGE(s);
        CHECK(r.pass);
        CHECK(r.cases > 0);
    }
}

TEST_CASE("factorization: Ran examples")
{
    int M = 6;
    SigmaConfig cfg(2, M);
    Partition all = Partition::single(2);
    SigmaConfig target = ran_config(cfg, all, M);
    CHECK(target.n() == 1);
    for (int m = -2; m <= 2; ++m)
        for (int i = 0; i < 2; ++i) {
            PhiSeries img = ran_merge(PhiSeries::basis(cfg, m, i), all, M);
            CHECK(agree(img, PhiSeries::basis(target, 2 * m + i, 0), M));
        }
    std::mt19937 rng(3);
    PhiSeries f = random_series(cfg, rng, -1, 2, 3);
    CHECK(ran_merge(f, Partition::discrete(2), M) == f);
    for (int k = 0; k < 5; ++k) {
        PhiSeries g = random_series(cfg, rng, -2, 2, 3), h = random_series(cfg, rng, -2, 2, 3);
        CHECK(agree(ran_merge(g * h, all, M), ran_merge(g, all, M) * ran_merge(h, all, M), M));
    }
    CHECK_THROWS_AS(ran_merge(f, all, 2 * M + 1), Error);
    try {
        ran_merge(f, all, 2 * M + 1);
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::TruncationIncompatible);
    }
}

TEST_CASE("factorization: colliding blocks")
{
    SigmaConfig cfg(3, 4);
    // a2 and a3 coincide after substitution but sit in different blocks
    Substitution s{{"a2", 1}, {"a3", 1}};
    bool thrown = false;
    try {
        Factorization(cfg, Partition({0, 0, 1}), s);
    } catch (const Error& e) {
        thrown = true;
        CHECK((e.kind() == ErrorKind::CollidingBlocks || e.kind() == ErrorKind::CollidingPoints));
    }
    CHECK(thrown);
}

TEST_CASE("factorization: field split")
{
    int M = 8, K = 3;
    SigmaConfig cfg = two_points(M);
    Factorization fz(cfg, Partition::discrete(2));
    const auto& blocks = fz.block_configs();
    std::vector<Field> bs;
    for (auto& c : blocks) bs.push_back(Field::beta(c, CoeffAlgebra::heisenberg(c, K)));
    Field X = field_split(bs, fz);
    CHECK(X.algebra()->blocks() == 2);
    std::mt19937 rng(8);
    EvalContext ctx;
    for (int k = 0; k < 8; ++k) {
        PhiSeries f0 = random_series(blocks[0], rng, -1, 2, 2), f1 = random_series(blocks[1], rng, -1, 2, 2);
        UElement want = embed_block(bs[0].eval(ctx, f0, K), X.algebra(), 0) + embed_block(bs[1].eval(ctx, f1, K), X.algebra(), 1);
        CHECK((X.eval(ctx, fz.merge({f0, f1}), K) - want).is_zero_at_level(K));
    }
}

TEST_CASE("factorization: mu on separated blocks")
{
    SigmaConfig cfg = two_points(8);
    Factorization fz(cfg, Partition::discrete(2));
    for (int pole = 0; pole <= 1; ++pole) {
        Report r = fact_mu_check(fz, pole, Window::centered(3), 3);
        for (auto& s : r.residuals) MESSAGE(s);
        CHECK(r.pass);
    }
}

TEST_CASE("factorization: base change")
{
    SigmaConfig cfg(2, 30);
    int K = 3;
    AlgebraPtr U = CoeffAlgebra::heisenberg(cfg, K);
    Field b = Field::beta(cfg, U);
    for (auto s : {Substitution{{"a1", 0}, {"a2", 1}}, Substitution{{"a2", 3}}}) {
        Report r = base_change_check(b, b.d(), s, Window::centered(3), K);
        for (auto& x : r.residuals) MESSAGE(x);
        CHECK(r.pass);
    }
    // eval then substitute against substitute then eval on random inputs
    std::mt19937 rng(21);
    Substitution s{{"a1", 2}, {"a2", 5}};
    Field bs = field_base_change(b * PhiSeries::t(cfg), s);
    EvalContext ctx;
    for (int k = 0; k < 6; ++k) {
        PhiSeries f = random_series(cfg, rng, -1, 2, 3);
        UElement lhs = bs.eval(ctx, substitute(f, s), K);
        UElement rhs = (b * PhiSeries::t(cfg)).eval(ctx, f, K).substituted(bs.algebra(), s);
        CHECK((lhs - rhs).is_zero_at_level(K));
    }
}
