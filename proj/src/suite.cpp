#include "chiral/suite.hpp"

#include <algorithm>
#include <set>
#include <sstream>

#include "chiral/residue.hpp"

namespace chiral {

PhiSeries random_series(const SigmaConfig& cfg, std::mt19937& rng, int lo, int hi, int terms, int coef)
{
    std::uniform_int_distribution<int> lvl(lo, hi), pos(0, cfg.n() - 1), c(-coef, coef);
    PhiSeries f(cfg);
    for (int k = 0; k < terms; ++k) f += PhiSeries::basis(cfg, lvl(rng), pos(rng), Scalar(long(c(rng))));
    return f;
}

TwoVarSeries random_poly_tensor(const SigmaConfig& cfg, std::mt19937& rng, int lo, int hi, int terms)
{
    TwoVarSeries x(cfg, Orientation::poly);
    for (int k = 0; k < terms; ++k) x += tensor(random_series(cfg, rng, lo, hi, 2), random_series(cfg, rng, lo, hi, 2));
    return x;
}

Substitution random_separation(int n, std::mt19937& rng)
{
    std::uniform_int_distribution<int> v(-9, 9);
    std::set<int> used;
    Substitution s;
    for (int i = 1; i <= n; ++i) {
        int x;
        do x = v(rng);
        while (!used.insert(x).second);
        s.set("a" + std::to_string(i), mpq_class(x));
    }
    return s;
}

std::vector<std::string> field_names() { return {"beta", "beta_d", "beta_dd", "beta_t", "beta_tt", "q", "unit"}; }

Field named_field(const std::string& name, const SigmaConfig& cfg, const AlgebraPtr& U)
{
    Field b = Field::beta(cfg, U);
    PhiSeries t = PhiSeries::t(cfg);
    if (name == "beta") return b;
    if (name == "beta_d") return b.d();
    if (name == "beta_dd") return b.d().d();
    if (name == "beta_t") return b * t;
    if (name == "beta_tt") return b * (t * t);
    if (name == "q") return r_map(m_r(b, b * t));
    if (name == "unit") return Field::unit(cfg, U, PhiSeries::one(cfg));
    throw Error(ErrorKind::Parse, "unknown field '" + name + "'");
}

Partition parse_partition(const std::string& text, int n)
{
    std::vector<int> block_of(std::size_t(n), -1);
    if (text.find('|') != std::string::npos || (text.find(',') == std::string::npos && int(text.size()) == n)) {
        int b = 0;
        for (char ch : text) {
            if (ch == '|') {
                ++b;
                continue;
            }
            int i = ch - '1';
            if (i < 0 || i >= n || block_of[std::size_t(i)] >= 0) throw Error(ErrorKind::Parse, "bad partition '" + text + "'");
            block_of[std::size_t(i)] = b;
        }
    } else {
        std::istringstream in(text);
        std::string tok;
        for (int i = 0; std::getline(in, tok, ','); ++i) {
            if (i >= n) throw Error(ErrorKind::Parse, "partition '" + text + "' has more than " + std::to_string(n) + " entries");
            block_of[std::size_t(i)] = std::stoi(tok);
        }
    }
    if (std::count(block_of.begin(), block_of.end(), -1)) throw Error(ErrorKind::Parse, "partition '" + text + "' misses a point");
    return Partition(block_of);
}

Substitution parse_substitution(const std::string& text)
{
    Substitution s;
    std::istringstream in(text);
    std::string tok;
    while (std::getline(in, tok, ',')) {
        auto eq = tok.find('=');
        if (eq == std::string::npos) throw Error(ErrorKind::Parse, "bad binding '" + tok + "'");
        Scalar v = parse_scalar(tok.substr(eq + 1));
        if (!v.is_rational()) throw Error(ErrorKind::Parse, "binding '" + tok + "' is not a rational number");
        std::string name = tok.substr(0, eq);
        name.erase(std::remove(name.begin(), name.end(), ' '), name.end());
        s.set(name, v.rational());
    }
    return s;
}

// ------------------------------------------------------------------ suites

Report pairing_suite(int n, int lo, int hi)
{
    Report rep;
    rep.check = "pairing";
    SigmaConfig cfg(n, std::max(hi + 2, 4));
    std::vector<PhiSeries> plus, minus;
    for (int m = lo; m <= hi; ++m)
        for (int i = 0; i < n; ++i) {
            plus.push_back(PhiSeries::basis(cfg, m, i));
            minus.push_back(PhiSeries::minus_basis(cfg, m, i));
        }
    for (std::size_t a = 0; a < plus.size(); ++a)
        for (std::size_t b = 0; b < minus.size(); ++b) {
            int m = lo + int(a) / n, i = int(a) % n, mm = lo + int(b) / n, j = int(b) % n;
            ++rep.cases;
            Scalar expect = (m + mm == -1 && i + j == n - 1) ? Scalar(1) : Scalar(0);
            Scalar got = pairing(plus[a], minus[b]);
            if (got != expect)
                rep.fail("<p+[" + std::to_string(m) + "," + std::to_string(i) + "], p-[" + std::to_string(mm) + "," + std::to_string(j) + "]> = " +
                         got.str());
        }
    rep.note("n", std::to_string(n));
    rep.note("levels", std::to_string(lo) + ".." + std::to_string(hi));
    return rep;
}

Report residue_suite(int n, int samples, int split_samples, unsigned seed)
{
    Report rep;
    rep.check = "residue";
    std::mt19937 rng(seed);
    SigmaConfig cfg(n, 6);
    for (int k = 0; k < samples; ++k) {
        PhiSeries f = random_series(cfg, rng, -4, 4, 6);
        ++rep.cases;
        Scalar r = residue(OneForm(d_dt(f)));
        if (!r.is_zero()) rep.fail("Res(d f) = " + r.str() + " for f = " + f.str());
    }
    for (int k = 0; k < split_samples; ++k) {
        PhiSeries f = random_series(cfg, rng, -3, 2, 4);
        Substitution s = random_separation(n, rng);
        auto parts = residue_split(OneForm(f), s);
        mpq_class sum = 0;
        for (auto& p : parts) sum += p.rational();
        mpq_class whole = substitute(residue(OneForm(f)), s);
        ++rep.cases;
        if (sum != whole) rep.fail("split residues sum to " + rational_str(sum) + ", not " + rational_str(whole) + " at " + s.str());
    }
    rep.note("n", std::to_string(n));
    return rep;
}

Report expansion_suite(int n, int m_pair)
{
    Report rep;
    rep.check = "expand-delta";
    SigmaConfig cfg(n, 2 * m_pair + 2);
    TwoVarSeries one = TwoVarSeries::one(cfg), d = delta(cfg);
    const char* side[] = {"right", "left"};
    for (int s = 0; s < 2; ++s) {
        TwoVarSeries e = s == 0 ? exp_r(1, cfg, m_pair) : exp_l(1, cfg, m_pair);
        TwoVarSeries rest = d * e - one;
        ++rep.cases;
        if (!rest.exact_part().is_zero()) rep.fail(std::string(side[s]) + ": (u-v) exp - 1 = " + to_text(rest.exact_part()));
        // the remainder is the truncation tail at depth m_pair in the expanded slot
        for (auto& [k, c] : rest.coeffs())
            if (cfg.level(k[s == 0 ? 1 : 0]) < m_pair) {
                rep.fail(std::string(side[s]) + ": remainder term above the tail");
                break;
            }
    }
    rep.note("n", std::to_string(n));
    rep.note("M_pair", std::to_string(m_pair));
    return rep;
}

Report cauchy_suite(int n, int M, int m_pair, int max_pole, int samples, unsigned seed)
{
    Report rep;
    rep.check = "cauchy";
    std::mt19937 rng(seed);
    SigmaConfig cfg(n, M);
    int window = m_pair;
    for (int k = 0; k < samples; ++k) {
        TwoVarSeries f = random_poly_tensor(cfg, rng, -max_pole, 2);
        auto res = cauchy_check(f, m_pair);
        window = std::min(window, res.window);
        ++rep.cases;
        if (!res.holds) rep.fail("T_r - T_l != Delta# on " + to_text(f));
    }
    rep.note("n", std::to_string(n));
    rep.note("checked below level", std::to_string(window));
    return rep;
}

Report kashiwara_suite(int samples, unsigned seed)
{
    Report rep;
    rep.check = "kashiwara";
    int K = 3;
    Window w = Window::centered(4);
    {
        SigmaConfig cfg(2, 30);
        AlgebraPtr U = CoeffAlgebra::heisenberg(cfg, K);
        Field b = Field::beta(cfg, U);
        PhiSeries t = PhiSeries::t(cfg);
        EvalContext ctx;
        auto expect = [&](bool ok, const std::string& what) {
            ++rep.cases;
            if (!ok) rep.fail(what);
        };
        for (int h = 0; h <= 3; ++h) {
            auto M = kashiwara_push(b, h);
            std::string at = " at h=" + std::to_string(h);
            expect(M.act_v().agrees(kashiwara_push(b * t, h), w, K, ctx), "v rule" + at);
            expect(M.act_dv_prime().agrees(kashiwara_push(b.d(), h), w, K, ctx), "d_v' rule" + at);
            expect(M.act_dy().agrees(kashiwara_push(b, h + 1), w, K, ctx), "d_y rule" + at);
            auto y = h == 0 ? KashiwaraModule({Field::zero(cfg, U)}) : kashiwara_push(b, h - 1) * Scalar(long(-h));
            expect(M.act_y().agrees(y, w, K, ctx), "y rule" + at);
            expect(M.act_u().agrees(kashiwara_push(b * t, h) + y, w, K, ctx), "u rule" + at);
            expect(M.act_dv().agrees(kashiwara_push(b.d(), h) - kashiwara_push(b, h + 1), w, K, ctx), "d_v rule" + at);
        }
    }
    std::mt19937 rng(seed);
    for (int trial = 0; trial < samples; ++trial) {
        int n = 1 + trial % 2;
        SigmaConfig cfg(n, 30);
        AlgebraPtr U = CoeffAlgebra::heisenberg(cfg, K);
        Field b = Field::beta(cfg, U);
        int h = trial % 3;
        std::vector<Field> comps;
        for (int j = 0; j <= h; ++j) {
            Field X = b * random_series(cfg, rng, 0, 1, 2);
            if (rng() % 2) X = X.d();
            comps.push_back(X);
        }
        KashiwaraModule M(comps);
        auto back = identify_local(M.realize(), h, w, K);
        EvalContext ctx;
        ++rep.cases;
        if (!back.agrees(M, w, K, ctx)) rep.fail("identify_local round trip, instance " + std::to_string(trial));
    }
    rep.note("round trips", std::to_string(samples));
    return rep;
}

namespace {

int pick(const SuiteOptions& o, int fallback) { return o.samples > 0 ? o.samples : fallback; }

Report named(Report r, const std::string& name)
{
    r.check = name;
    return r;
}

Report criterion_pairing(const SuiteOptions&)
{
    Report rep = named(Report(), "dual-basis pairing");
    for (int n = 1; n <= 4; ++n) rep.merge(pairing_suite(n, -4, 3));
    return rep;
}

Report criterion_residue(const SuiteOptions& o)
{
    Report rep = named(Report(), "residue properties");
    int split = pick(o, 100);
    for (int n = 1; n <= 3; ++n) rep.merge(residue_suite(n, pick(o, 200), split / 3 + (n <= split % 3 ? 1 : 0), o.seed + unsigned(n)));
    return rep;
}

Report criterion_expansion(const SuiteOptions&)
{
    Report rep = named(Report(), "expansion inverse");
    for (int n = 1; n <= 3; ++n) rep.merge(expansion_suite(n, 8));
    return rep;
}

Report criterion_cauchy(const SuiteOptions& o)
{
    Report rep = named(Report(), "Cauchy formula");
    for (int n = 1; n <= 3; ++n) rep.merge(cauchy_suite(n, 16, 8, 3, pick(o, 100), o.seed + unsigned(n)));
    return rep;
}

Report criterion_kashiwara(const SuiteOptions& o) { return named(kashiwara_suite(pick(o, 50), o.seed), "Kashiwara local model"); }

Report criterion_locality(const SuiteOptions&)
{
    Report rep = named(Report(), "Heisenberg locality");
    int K = 3;
    for (int n = 1; n <= 3; ++n) {
        SigmaConfig cfg(n, 30);
        AlgebraPtr U = CoeffAlgebra::heisenberg(cfg, K);
        Field b = Field::beta(cfg, U);
        auto r = locality_order(b, b, 4, Window::centered(6), K);
        ++rep.cases;
        if (!r.order || *r.order != 1) rep.fail("locality order of (beta, beta) at n=" + std::to_string(n) + " is " + (r.order ? std::to_string(*r.order) : "none"));
        for (int p = 0; p <= 2; ++p) {
            rep.merge(dong_check_a(b, b, p, Window::centered(4), K));
            rep.merge(dong_check_a(b.d(), b, p, Window::centered(4), K));
        }
    }
    rep.info.clear();
    rep.note("window", "6");
    return rep;
}

Report criterion_unit(const SuiteOptions& o)
{
    Report rep = named(Report(), "unit axiom");
    std::mt19937 rng(o.seed);
    int samples = pick(o, 50);
    for (int trial = 0; trial < samples; ++trial) {
        int n = 1 + trial % 2;
        SigmaConfig cfg(n, 30);
        AlgebraPtr U = CoeffAlgebra::heisenberg(cfg, 3);
        Field b = Field::beta(cfg, U);
        PhiSeries f = random_series(cfg, rng, -1, 1, 2), g = random_series(cfg, rng, -1, 1, 2), h = random_series(cfg, rng, -1, 1, 2);
        Field X = trial % 3 == 0 ? b : trial % 3 == 1 ? b.d() : b * random_series(cfg, rng, 0, 1, 2);
        rep.merge(unit_axiom_check(X, f, g, h, Window::centered(4), 3));
    }
    rep.info.clear();
    rep.note("instances", std::to_string(samples));
    return rep;
}

Report criterion_jacobi(const SuiteOptions&)
{
    Report rep = named(Report(), "Jacobi");
    int K = 3;
    const char* names[] = {"beta", "beta_d", "beta_t"};
    {
        // every ordered triple at one point
        SigmaConfig cfg(1, 30);
        AlgebraPtr U = CoeffAlgebra::heisenberg(cfg, K);
        std::vector<Field> F;
        for (auto nm : names) F.push_back(named_field(nm, cfg, U));
        for (int i = 0; i < 3; ++i)
            for (int j = 0; j < 3; ++j)
                for (int k = 0; k < 3; ++k) rep.merge(jacobi_check({F[std::size_t(i)], F[std::size_t(j)], F[std::size_t(k)]}, {1, 1, 1}, Window::centered(5), K));
        // quadratic fields, where the bracket is not central
        Field q = named_field("q", cfg, U);
        rep.merge(jacobi_check({q, F[0], F[1]}, {1, 1, 1}, Window::centered(5), K));
        rep.merge(jacobi_check({q, q, F[0]}, {1, 1, 1}, Window::centered(4), K));
    }
    {
        SigmaConfig cfg(2, 30);
        AlgebraPtr U = CoeffAlgebra::heisenberg(cfg, K);
        rep.merge(jacobi_check({named_field("beta", cfg, U), named_field("beta_d", cfg, U), named_field("beta_t", cfg, U)}, {1, 1, 1},
                               Window::centered(5), K));
    }
    rep.info.clear();
    rep.note("window", "5");
    return rep;
}

Report criterion_mu12(const SuiteOptions& o)
{
    Report rep = named(Report(), "mu12 compatibility");
    std::mt19937 rng(o.seed);
    for (int n = 1; n <= 2; ++n) {
        SigmaConfig cfg(n, 30);
        AlgebraPtr U = CoeffAlgebra::heisenberg(cfg, 3);
        Field b = Field::beta(cfg, U);
        ThreeVarSeries num = tensor(random_series(cfg, rng, 0, 1, 2), PhiSeries::one(cfg), random_series(cfg, rng, 0, 1, 2));
        for (auto& [X, Y] : {std::pair{b, b}, std::pair{b, b.d()}})
            for (int h = 0; h <= 1; ++h)
                for (int p = 0; p <= 1; ++p)
                    for (int q = 0; q <= 1; ++q) rep.merge(mu12_compat_check(X, Y, h, p, q, num, Window::centered(3), 3));
    }
    rep.info.clear();
    return rep;
}

Report criterion_generation(const SuiteOptions&)
{
    Report rep = named(Report(), "generation closure");
    SigmaConfig cfg(1, 30);
    AlgebraPtr U = CoeffAlgebra::heisenberg(cfg, 3);
    GenerationOptions opt;
    auto res = generate_basic({Field::beta(cfg, U)}, 3, opt);
    rep.merge(res.report);
    ++rep.cases;
    if (res.layers.size() != 4) rep.fail("expected layers V(0..3)");
    rep.merge(generation_probes(res, 1, 1, opt));
    rep.info.clear();
    std::string sizes;
    for (auto& l : res.layers) sizes += (sizes.empty() ? "" : ",") + std::to_string(l.gens.size());
    rep.note("layer sizes", sizes);
    return rep;
}

Report criterion_factorization(const SuiteOptions& o)
{
    Report rep = named(fact_axioms_check(3, 6, pick(o, 6), o.seed), "factorization axioms");
    // mu needs a deeper truncation than the axioms to reach the block thresholds
    SigmaConfig cfg = SigmaConfig(3, 12).substituted({{"a1", 0}, {"a2", 1}, {"a3", 3}});
    for (auto p : {Partition::discrete(3), Partition({0, 0, 1})})
        for (int pole = 0; pole <= 1; ++pole) rep.merge(fact_mu_check(Factorization(cfg, p), pole, Window::centered(3), 3));
    return rep;
}

Report criterion_rmud(const SuiteOptions&)
{
    Report rep = named(Report(), "R mu D");
    SigmaConfig cfg(2, 30);
    AlgebraPtr U = CoeffAlgebra::heisenberg(cfg, 3);
    Field b = Field::beta(cfg, U);
    RmuDForms forms;
    for (int m = 0; m <= 3; ++m) {
        rep.merge(rmud_check(b, b, m, Window::centered(4), 3, &forms));
        rep.merge(rmud_check(b.d(), b * PhiSeries::t(cfg), m, Window::centered(4), 3, &forms));
    }
    rep.info.clear();
    ++rep.cases;
    if (!forms.minus_form) rep.fail("R mu(X (x) Y delta^-m) d != R mu(X (x) Y d delta^-m) - m R mu(X (x) Y delta^-m-1)");
    rep.note("resolved form", "R mu(X (x) Y delta^-m) d = R mu(X (x) Y d delta^-m) - m R mu(X (x) Y delta^-m-1)");
    rep.note("form with trailing d", forms.trailing_d_form ? "holds" : "fails");
    rep.note("form with +m", forms.plus_form ? "holds" : "fails");
    return rep;
}

} // namespace

const std::vector<Criterion>& acceptance_criteria()
{
    static const std::vector<Criterion> all = {
        {1, "dual-basis pairing", 10, criterion_pairing},
        {2, "residue properties", 30, criterion_residue},
        {3, "expansion inverse", 10, criterion_expansion},
        {4, "Cauchy formula", 60, criterion_cauchy},
        {5, "Kashiwara local model", 10, criterion_kashiwara},
        {6, "Heisenberg locality", 60, criterion_locality},
        {7, "unit axiom", 60, criterion_unit},
        {8, "Jacobi", 120, criterion_jacobi},
        {9, "mu12 compatibility", 60, criterion_mu12},
        {10, "generation closure", 60, criterion_generation},
        {11, "factorization axioms", 60, criterion_factorization},
        {12, "R mu D", 30, criterion_rmud},
    };
    return all;
}

} // namespace chiral
