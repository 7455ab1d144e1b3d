#include "doctest.h"

#include <set>

#include "chiral/suite.hpp"

using namespace chiral;

TEST_CASE("suite: partition text")
{
    CHECK(parse_partition("12|3", 3).map() == std::vector<int>{0, 0, 1});
    CHECK(parse_partition("2|13", 3).map() == std::vector<int>{1, 0, 1});
    CHECK(parse_partition("0,0,1", 3).map() == std::vector<int>{0, 0, 1});
    CHECK(parse_partition("123", 3).blocks() == 1);
    CHECK_THROWS_AS(parse_partition("12", 3), Error);
    CHECK_THROWS_AS(parse_partition("11|2", 3), Error);
    CHECK_THROWS_AS(parse_partition("14|23", 3), Error);
}

TEST_CASE("suite: substitution text")
{
    Substitution s = parse_substitution("a1=0, a2=1/2,a3=-3");
    CHECK(s.at("a1") == 0);
    CHECK(s.at("a2") == mpq_class(1, 2));
    CHECK(s.at("a3") == -3);
    CHECK_THROWS_AS(parse_substitution("a1"), Error);
    CHECK_THROWS_AS(parse_substitution("a1=a2"), Error);
}

TEST_CASE("suite: named fields")
{
    SigmaConfig cfg(1, 30);
    AlgebraPtr U = CoeffAlgebra::heisenberg(cfg, 3);
    for (auto& nm : field_names()) CHECK(named_field(nm, cfg, U).valid());
    CHECK_THROWS_AS(named_field("gamma", cfg, U), Error);
    EvalContext ctx;
    Field b = Field::beta(cfg, U);
    CHECK((named_field("beta_t", cfg, U).eval(ctx, PhiSeries::one(cfg), 3) - b.eval(ctx, PhiSeries::t(cfg), 3)).is_zero());
}

TEST_CASE("suite: random separation is injective and seeded")
{
    std::mt19937 a(3), b(3);
    for (int k = 0; k < 20; ++k) {
        Substitution s = random_separation(4, a);
        CHECK(s == random_separation(4, b));
        std::set<mpq_class> vals;
        for (auto& [name, v] : s.values()) vals.insert(v);
        CHECK(vals.size() == 4);
    }
}
