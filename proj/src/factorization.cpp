#include "chiral/factorization.hpp"

#include <algorithm>
#include <mutex>
#include <random>
#include <set>

#include "chiral/residue.hpp"

namespace chiral {

// ------------------------------------------------------------------ partition

Partition::Partition(std::vector<int> block_of) : block_of_(std::move(block_of))
{
    if (block_of_.empty()) throw Error(ErrorKind::Invalid, "partition of an empty set");
    std::set<int> seen(block_of_.begin(), block_of_.end());
    blocks_ = int(seen.size());
    if (*seen.begin() != 0 || *seen.rbegin() != blocks_ - 1)
        throw Error(ErrorKind::Invalid, "partition must be a surjection onto 0.." + std::to_string(blocks_ - 1));
}

Partition Partition::discrete(int n)
{
    std::vector<int> m(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) m[std::size_t(i)] = i;
    return Partition(m);
}

std::vector<int> Partition::members(int b) const
{
    std::vector<int> out;
    for (int i = 0; i < points(); ++i)
        if (block_of_[std::size_t(i)] == b) out.push_back(i);
    return out;
}

bool Partition::refines(const Partition& coarse) const
{
    if (coarse.points() != points()) return false;
    std::vector<int> image(std::size_t(blocks_), -1);
    for (int i = 0; i < points(); ++i) {
        int& slot = image[std::size_t(block_of(i))];
        if (slot >= 0 && slot != coarse.block_of(i)) return false;
        slot = coarse.block_of(i);
    }
    return true;
}

Partition Partition::restricted(const Partition& coarse, int b) const
{
    if (!refines(coarse)) throw Error(ErrorKind::Invalid, str() + " does not refine " + coarse.str());
    std::vector<int> out, order;
    for (int i : coarse.members(b)) {
        int fine = block_of(i);
        auto it = std::find(order.begin(), order.end(), fine);
        if (it == order.end()) {
            order.push_back(fine);
            it = order.end() - 1;
        }
        out.push_back(int(it - order.begin()));
    }
    return Partition(out);
}

std::string Partition::str() const
{
    std::string out;
    for (int b = 0; b < blocks_; ++b) {
        if (b) out += "|";
        for (int i : members(b)) out += std::to_string(i + 1);
    }
    return out;
}

// ------------------------------------------------------------------ CRT

struct FactData {
    int N = 0;
    std::vector<TPoly> phi_b;  // block polynomials
    std::vector<TPoly> cof;    // product of the other blocks
    std::vector<TPoly> inv;    // cof^-1 mod phi_b^N
    std::vector<TPoly> idem;   // e_b mod phi^N
    std::vector<TPoly> phi_bN; // phi_b^N
    TPoly phiN;
};

namespace {

TPoly block_poly(const SigmaConfig& cfg, const std::vector<int>& members)
{
    TPoly p(Scalar(1));
    for (int i : members) p = p * TPoly::linear(cfg.roots()[std::size_t(i)]);
    return p;
}

TPoly pow_mod(const TPoly& p, int e, const TPoly& mod)
{
    TPoly r(Scalar(1)), base = p % mod;
    for (; e > 0; e >>= 1) {
        if (e & 1) r = (r * base) % mod;
        if (e > 1) base = (base * base) % mod;
    }
    return r;
}

std::shared_ptr<const FactData> build_fact(const SigmaConfig& cfg, const Partition& part, int N)
{
    auto d = std::make_shared<FactData>();
    d->N = N;
    int r = part.blocks();
    for (int b = 0; b < r; ++b) d->phi_b.push_back(block_poly(cfg, part.members(b)));
    d->phiN = pow(cfg.phi(), N);
    for (int b = 0; b < r; ++b) {
        TPoly cof(Scalar(1));
        for (int l = 0; l < r; ++l)
            if (l != b) cof = cof * d->phi_b[std::size_t(l)];
        const TPoly& pb = d->phi_b[std::size_t(b)];
        TPoly pbN = pow(pb, N), inv;
        TPoly g = ext_gcd(cof % pb, pb, inv);
        if (g.degree() != 0)
            throw Error(ErrorKind::CollidingBlocks, "block " + std::to_string(b) + " meets another block: gcd degree " + std::to_string(g.degree()));
        // Newton lift of the inverse from phi_b to phi_b^N
        for (int k = 1; k < N;) {
            k = std::min(2 * k, N);
            TPoly mod = pow(pb, k);
            inv = (inv * (TPoly(Scalar(2)) - (cof * inv) % mod)) % mod;
        }
        // e_b = cof^N (cof^-N mod phi_b^N): 1 mod phi_b^N, divisible by every other phi_l^N
        TPoly e = (pow(cof, N) * pow_mod(inv, N, pbN)) % d->phiN;
        d->cof.push_back(cof);
        d->inv.push_back(inv);
        d->idem.push_back(e);
        d->phi_bN.push_back(pbN);
    }
    return d;
}

std::mutex fact_mutex;
std::map<std::string, std::shared_ptr<const FactData>>& fact_cache()
{
    static std::map<std::string, std::shared_ptr<const FactData>> cache;
    return cache;
}

int min_valid(int a, int b) { return std::min(a, b); }

} // namespace

Factorization::Factorization(const SigmaConfig& cfg, const Partition& p, const Substitution& s)
    : merged_(s.empty() ? cfg : cfg.substituted(s)), part_(p), s_(s)
{
    if (p.points() != cfg.n()) throw Error(ErrorKind::Invalid, "partition of " + std::to_string(p.points()) + " points on an n=" + std::to_string(cfg.n()) + " config");
    for (int b = 0; b < p.blocks(); ++b) {
        std::vector<Scalar> roots;
        for (int i : p.members(b)) roots.push_back(merged_.roots()[std::size_t(i)]);
        blocks_.push_back(SigmaConfig::from_roots(roots, merged_.M()));
    }
    data(merged_.M()); // fails early on colliding blocks
}

std::shared_ptr<const FactData> Factorization::data(int N) const
{
    std::string key = merged_.str() + "/" + part_.str() + "/" + std::to_string(N);
    {
        std::lock_guard<std::mutex> lock(fact_mutex);
        auto it = fact_cache().find(key);
        if (it != fact_cache().end()) return it->second;
    }
    auto d = build_fact(merged_, part_, N);
    std::lock_guard<std::mutex> lock(fact_mutex);
    return fact_cache().emplace(key, d).first->second;
}

std::vector<PhiSeries> Factorization::split(const PhiSeries& f) const
{
    PhiSeries fs = f.config().same_roots(merged_) ? f.with_config(merged_) : substitute(f, s_).with_config(merged_);
    if (!fs.config().same_roots(merged_)) throw Error(ErrorKind::ConfigMismatch, "fact split: series over " + f.config().str());
    int M = merged_.M();
    int valid = min_valid(M, fs.valid_below());
    std::vector<PhiSeries> out;
    for (auto& cfg : blocks_) {
        out.emplace_back(cfg);
        out.back().set_valid_below(valid);
    }
    if (fs.is_zero()) return out;
    auto [p, k] = fs.to_monomials();
    if (k >= M) return out;
    int N = M - k;
    auto d = data(N);
    for (std::size_t b = 0; b < blocks_.size(); ++b) {
        const TPoly& mod = d->phi_bN[b];
        TPoly P = k >= 0 ? (p * pow_mod(d->cof[b], k, mod)) % mod : (p * pow_mod(d->inv[b], -k, mod)) % mod;
        out[b] = PhiSeries::from_monomials(P, k, blocks_[b]);
        out[b].set_valid_below(valid);
    }
    return out;
}

PhiSeries Factorization::merge(const std::vector<PhiSeries>& parts) const
{
    if (parts.size() != blocks_.size())
        throw Error(ErrorKind::Invalid, "fact merge: " + std::to_string(parts.size()) + " parts for " + std::to_string(blocks_.size()) + " blocks");
    int M = merged_.M(), k = 0, valid = M;
    for (std::size_t b = 0; b < parts.size(); ++b) {
        if (!parts[b].config().same_roots(blocks_[b])) throw Error(ErrorKind::ConfigMismatch, "fact merge: part " + std::to_string(b) + " over " + parts[b].config().str());
        valid = min_valid(valid, parts[b].valid_below());
        if (!parts[b].is_zero()) k = std::min(k, parts[b].pole_order());
    }
    int N = M - k;
    auto d = data(N);
    TPoly P;
    for (std::size_t b = 0; b < parts.size(); ++b) {
        if (parts[b].is_zero()) continue;
        auto [pb, kb] = parts[b].to_monomials();
        const TPoly& mod = d->phi_bN[b];
        TPoly q = (pb * pow_mod(d->phi_b[b], kb - k, mod)) % mod;
        P += (d->idem[b] * ((q * pow_mod(d->cof[b], -k, mod)) % mod)) % d->phiN;
    }
    PhiSeries out = PhiSeries::from_monomials(P % d->phiN, k, merged_);
    out.set_valid_below(valid);
    return out;
}

PhiSeries Factorization::idempotent(int b, int N) const
{
    return PhiSeries::from_monomials(data(N)->idem.at(std::size_t(b)), 0, merged_);
}

std::vector<PhiSeries> fact_split(const PhiSeries& f, const Partition& p, const Substitution& s)
{
    return Factorization(f.config(), p, s).split(f);
}

PhiSeries fact_merge(const std::vector<PhiSeries>& parts, const Partition& p)
{
    if (int(parts.size()) != p.blocks()) throw Error(ErrorKind::Invalid, "fact merge: part count does not match the partition");
    std::vector<Scalar> roots(std::size_t(p.points()));
    for (int b = 0; b < p.blocks(); ++b) {
        auto mem = p.members(b);
        if (int(mem.size()) != parts[std::size_t(b)].config().n()) throw Error(ErrorKind::Invalid, "fact merge: block size mismatch");
        for (std::size_t k = 0; k < mem.size(); ++k) roots[std::size_t(mem[k])] = parts[std::size_t(b)].config().roots()[k];
    }
    SigmaConfig cfg = SigmaConfig::from_roots(roots, parts.front().config().M());
    return Factorization(cfg, p).merge(parts);
}

// ------------------------------------------------------------------ Ran

namespace {

struct Collision {
    std::vector<int> rep;      // representative point of each class
    std::vector<int> mult;     // class sizes
    std::map<int, Scalar> image; // parameter identifications
};

Collision collision_data(const SigmaConfig& cfg, const Partition& c)
{
    if (c.points() != cfg.n()) throw Error(ErrorKind::Invalid, "collision of " + std::to_string(c.points()) + " points on an n=" + std::to_string(cfg.n()) + " config");
    Collision out;
    for (int i = 0; i < c.blocks(); ++i) {
        auto mem = c.members(i);
        out.rep.push_back(mem.front());
        out.mult.push_back(int(mem.size()));
        const Scalar& target = cfg.roots()[std::size_t(mem.front())];
        for (std::size_t k = 1; k < mem.size(); ++k) {
            const Scalar& r = cfg.roots()[std::size_t(mem[k])];
            auto vars = r.num().variables();
            if (!r.is_polynomial() || vars.size() != 1 || !(r == Scalar(Polynomial::variable(vars[0]))))
                throw Error(ErrorKind::Invalid, "colliding point " + std::to_string(mem[k] + 1) + " has root " + r.str() + ", not a bare parameter");
            out.image[vars[0]] = target;
        }
    }
    return out;
}

TPoly compose_poly(const TPoly& p, const std::map<int, Scalar>& image)
{
    std::vector<Scalar> c;
    for (auto& x : p.coeffs()) c.push_back(compose(x, image));
    return TPoly(c);
}

} // namespace

SigmaConfig ran_config(const SigmaConfig& cfg, const Partition& c, int M)
{
    Collision col = collision_data(cfg, c);
    std::vector<Scalar> roots;
    for (int r : col.rep) roots.push_back(cfg.roots()[std::size_t(r)]);
    return SigmaConfig::from_roots(roots, M > 0 ? M : cfg.M());
}

PhiSeries ran_merge(const PhiSeries& f, const Partition& c, int M)
{
    const SigmaConfig& cfg = f.config();
    if (M <= 0) M = cfg.M();
    Collision col = collision_data(cfg, c);
    int mmin = *std::min_element(col.mult.begin(), col.mult.end());
    int mmax = *std::max_element(col.mult.begin(), col.mult.end());
    if (M > mmin * cfg.M())
        throw Error(ErrorKind::TruncationIncompatible, "target truncation " + std::to_string(M) + " exceeds " + std::to_string(mmin) + " * " +
                                                           std::to_string(cfg.M()));
    SigmaConfig target = ran_config(cfg, c, M);
    int valid = f.valid_below() == kExact ? kExact : mmin * f.valid_below();
    valid = std::min(valid, mmin * cfg.M());
    PhiSeries out(target);
    if (!f.is_zero()) {
        auto [p, k] = f.to_monomials();
        TPoly P = compose_poly(p, col.image);
        int power;
        // phi_J^k = prod (t - a_i)^(k m_i) = phi_I^(k mmax) prod (t - a_i)^(|k| (mmax - m_i)) for k < 0
        if (k >= 0) {
            for (std::size_t i = 0; i < col.rep.size(); ++i) P = P * pow(TPoly::linear(target.roots()[i]), k * col.mult[i]);
            power = 0;
        } else {
            for (std::size_t i = 0; i < col.rep.size(); ++i) P = P * pow(TPoly::linear(target.roots()[i]), -k * (mmax - col.mult[i]));
            power = k * mmax;
        }
        out = PhiSeries::from_monomials(P, power, target);
    }
    out.set_valid_below(std::min(valid, out.valid_below()));
    return out;
}

// ------------------------------------------------------------------ fields

UElement embed_block(const UElement& u, const AlgebraPtr& target, int block)
{
    UElement out(target);
    for (auto& [w, c] : u.terms()) {
        Word moved = w;
        for (auto& g : moved) g.block = block;
        out += UElement::word(target, moved, c);
    }
    return out;
}

namespace {

long floor_div_l(long a, long b) { return a >= 0 ? a / b : -((-a + b - 1) / b); }

class FactFieldNode : public FieldNode {
public:
    FactFieldNode(std::vector<FieldPtr> parts, Factorization fz, AlgebraPtr U)
        : FieldNode(fz.merged_config(), std::move(U), 1), parts_(std::move(parts)), fz_(std::move(fz))
    {
        // a block-b generator of level l and position p counts with code n l + p;
        // the split image of phi_c has block levels >= floor(c/n)
        long n = cfg_.n();
        bounds_ = {0, kNeverNonzero};
        parity_ = parts_.front()->parity();
        for (auto& x : parts_) {
            const Bounds& b = x->bounds();
            if (x->parity() != parity_) parity_ = -1;
            if (b.sigma >= kNeverNonzero) continue;
            long nb = x->config().n();
            long s = floor_div_l(n * (b.sigma - long(b.R) * (2 * nb - 1)), nb) + b.R - 2 * (n - 1);
            bounds_.R = std::max(bounds_.R, b.R);
            bounds_.sigma = std::min(bounds_.sigma, s);
        }
    }
    std::string describe() const override
    {
        std::string out = "fact(";
        for (std::size_t i = 0; i < parts_.size(); ++i) out += (i ? ", " : "") + parts_[i]->describe();
        return out + ")";
    }

protected:
    UElement compute(EvalContext& ctx, const Codes& c, int K) const override
    {
        PhiSeries f(cfg_);
        f.add_term(c[0], Scalar(1));
        auto pieces = fz_.split(f);
        UElement acc(alg_);
        for (std::size_t b = 0; b < parts_.size(); ++b) {
            if (pieces[b].is_zero()) continue;
            UElement v = Field(parts_[b]).eval(ctx, pieces[b], K);
            if (!v.is_zero()) acc += embed_block(v, alg_, int(b));
        }
        return acc.truncate(K);
    }

private:
    std::vector<FieldPtr> parts_;
    Factorization fz_;
};

class BaseChangeNode : public FieldNode {
public:
    BaseChangeNode(FieldPtr X, Substitution s)
        : FieldNode(X->config().substituted(s), X->algebra()->substituted(s), X->arity()), X_(std::move(X)), s_(std::move(s))
    {
        bounds_ = X_->bounds();
        parity_ = X_->parity();
    }
    std::string describe() const override { return "pullback(" + X_->describe() + ", " + s_.str() + ")"; }

protected:
    UElement compute(EvalContext& ctx, const Codes& c, int K) const override
    {
        return X_->value(ctx, c, K).substituted(alg_, s_);
    }

private:
    FieldPtr X_;
    Substitution s_;
};

} // namespace

Field field_split(const std::vector<Field>& parts, const Factorization& fz)
{
    const auto& cfgs = fz.block_configs();
    if (parts.size() != cfgs.size()) throw Error(ErrorKind::Invalid, "field split: one field per block expected");
    int K = parts.front().algebra()->K();
    std::vector<FieldPtr> nodes;
    for (std::size_t b = 0; b < parts.size(); ++b) {
        const Field& X = parts[b];
        if (X.arity() != 1) throw Error(ErrorKind::Invalid, "field split takes one-slot fields");
        if (!X.config().same_roots(cfgs[b])) throw Error(ErrorKind::ConfigMismatch, "field split: block " + std::to_string(b) + " field over " + X.config().str());
        const auto& U = *X.algebra();
        if (U.kind() != CoeffAlgebra::Kind::heisenberg || U.blocks() != 1 || U.K() != K || !U.block_config(0).same_roots(cfgs[b]))
            throw Error(ErrorKind::InstanceMismatch, "field split: block " + std::to_string(b) + " needs the one-block algebra of its points at level " + std::to_string(K));
        nodes.push_back(X.node());
    }
    AlgebraPtr U = CoeffAlgebra::heisenberg(cfgs, K);
    return Field(std::make_shared<FactFieldNode>(std::move(nodes), fz, U));
}

Field field_base_change(const Field& X, const Substitution& s) { return Field(std::make_shared<BaseChangeNode>(X.node(), s)); }

// ------------------------------------------------------------------ checks

namespace {

PhiSeries random_series(const SigmaConfig& cfg, std::mt19937& rng, int lo, int hi, int terms)
{
    std::uniform_int_distribution<int> lvl(lo, hi), pos(0, cfg.n() - 1), c(-4, 4);
    PhiSeries f(cfg);
    for (int k = 0; k < terms; ++k) f += PhiSeries::basis(cfg, lvl(rng), pos(rng), Scalar(long(c(rng))));
    return f;
}

// agreement below the common exactness bound
bool agree(const PhiSeries& a, const PhiSeries& b)
{
    if (!a.config().same_roots(b.config())) return false;
    int v = std::min({a.valid_below(), b.valid_below(), a.config().M()});
    return (a - b).truncated(v).is_zero();
}

// coefficients composed with a parameter map, points unchanged
PhiSeries pull_back(const PhiSeries& f, const std::map<int, Scalar>& image)
{
    PhiSeries out(f.config());
    for (auto& [c, x] : f.coeffs()) out.add_term(c, compose(x, image));
    out.set_valid_below(f.valid_below());
    return out;
}

bool agree(const std::vector<PhiSeries>& a, const std::vector<PhiSeries>& b)
{
    if (a.size() != b.size()) return false;
    for (std::size_t i = 0; i < a.size(); ++i)
        if (!agree(a[i], b[i])) return false;
    return true;
}

} // namespace

Report fact_axioms_check(int n, int M, int samples, unsigned seed)
{
    Report rep;
    rep.check = "fact-axioms";
    std::mt19937 rng(seed);
    SigmaConfig sym(n, M);
    // separated numeric points 0, 1, 3, 6, ...
    Substitution s;
    for (int i = 0; i < n; ++i) s.set("a" + std::to_string(i + 1), mpq_class(i * (i + 1) / 2 + (i > 0 ? i : 0)));
    SigmaConfig num = sym.substituted(s);
    std::vector<Partition> parts = {Partition::discrete(n), Partition::single(n)};
    if (n >= 2) {
        std::vector<int> m(std::size_t(n), 0);
        m.back() = 1;
        parts.insert(parts.begin() + 1, Partition(m)); // {1..n-1 | n}
    }
    // round trips
    for (auto& p : parts) {
        Factorization fz(num, p);
        for (int k = 0; k < samples; ++k) {
            PhiSeries f = random_series(num, rng, -2, 2, 4);
            ++rep.cases;
            if (!agree(fz.merge(fz.split(f)), f)) rep.fail("merge(split(f)) != f for " + p.str() + ": " + f.str());
            std::vector<PhiSeries> pieces;
            for (auto& c : fz.block_configs()) pieces.push_back(random_series(c, rng, -2, 2, 3));
            ++rep.cases;
            if (!agree(fz.split(fz.merge(pieces)), pieces)) rep.fail("split(merge) != id for " + p.str());
        }
        std::vector<PhiSeries> ones;
        for (auto& c : fz.block_configs()) ones.push_back(PhiSeries::one(c));
        ++rep.cases;
        if (!agree(fz.merge(ones), PhiSeries::one(num))) rep.fail("merge(1,...,1) != 1 for " + p.str());
    }
    rep.note("partitions", std::to_string(parts.size()));
    // cocycle: splitting through a coarser partition first gives the same blocks
    for (std::size_t fi = 0; fi < parts.size(); ++fi)
        for (std::size_t ci = fi + 1; ci < parts.size(); ++ci) {
            const Partition &fine = parts[fi], &coarse = parts[ci];
            if (!fine.refines(coarse)) continue;
            Factorization direct(num, fine), first(num, coarse);
            for (int k = 0; k < samples; ++k) {
                PhiSeries f = random_series(num, rng, -2, 2, 4);
                auto want = direct.split(f);
                auto mid = first.split(f);
                std::vector<PhiSeries> got(want.size(), PhiSeries(num));
                for (int b = 0; b < coarse.blocks(); ++b) {
                    Partition sub = fine.restricted(coarse, b);
                    auto pieces = Factorization(first.block_configs()[std::size_t(b)], sub).split(mid[std::size_t(b)]);
                    auto mem = coarse.members(b);
                    for (int j = 0; j < sub.blocks(); ++j) {
                        int fine_block = fine.block_of(mem[std::size_t(sub.members(j).front())]);
                        got[std::size_t(fine_block)] = pieces[std::size_t(j)];
                    }
                }
                ++rep.cases;
                if (!agree(got, want)) rep.fail("cocycle " + fine.str() + " < " + coarse.str() + " fails on " + f.str());
            }
        }
    // Ran transitivity along a chain of collisions n -> n-1 -> ... -> 1
    if (n >= 2) {
        for (int k = 0; k < samples; ++k) {
            PhiSeries f = random_series(sym, rng, -2, 1, 3);
            std::vector<int> all(std::size_t(n), 0);
            PhiSeries direct = ran_merge(f, Partition(all), M);
            PhiSeries chained = f;
            for (int m = n; m > 1; --m) {
                std::vector<int> step(static_cast<std::size_t>(m));
                for (int i = 0; i < m; ++i) step[std::size_t(i)] = std::min(i, m - 2);
                chained = ran_merge(chained, Partition(step), M);
            }
            ++rep.cases;
            if (!agree(direct, chained)) rep.fail("Ran transitivity fails on " + f.str());
            PhiSeries g = random_series(sym, rng, -1, 1, 3);
            ++rep.cases;
            if (!agree(ran_merge(f * g, Partition(all), M), ran_merge(f, Partition(all), M) * ran_merge(g, Partition(all), M)))
                rep.fail("Ran is not multiplicative on " + f.str());
        }
    }
    // mixed: collide inside the first block, then split, against split then collide
    if (n >= 3) {
        // only the colliding point stays symbolic
        Substitution fix{{"a1", 0}};
        for (int i = 3; i <= n; ++i) fix.set("a" + std::to_string(i), mpq_class(i == n ? 7 : 3 * i));
        SigmaConfig mixed = sym.substituted(fix);
        std::vector<int> blocks(std::size_t(n), 0), coll(static_cast<std::size_t>(n));
        blocks.back() = 1;
        for (int i = 0; i < n; ++i) coll[std::size_t(i)] = i < 2 ? 0 : i - 1; // a2 -> a1
        Partition J(blocks), C(coll);
        SigmaConfig after = ran_config(mixed, C, M);
        std::vector<int> blocks_after(std::size_t(n - 1), 0);
        blocks_after.back() = 1;
        Factorization fz_before(mixed, J), fz_after(after, Partition(blocks_after));
        std::vector<int> coll_block(std::size_t(n - 1));
        for (int i = 0; i < n - 1; ++i) coll_block[std::size_t(i)] = i < 2 ? 0 : i - 1;
        std::map<int, Scalar> a2_to_a1{{var_index("a2"), mixed.roots()[0]}};
        for (int k = 0; k < std::max(1, samples / 2); ++k) {
            PhiSeries f = random_series(mixed, rng, -1, 1, 3);
            auto lhs = fz_after.split(ran_merge(f, C, M));
            auto pieces = fz_before.split(f);
            // the untouched block is pulled back along the collision too
            std::vector<PhiSeries> rhs = {ran_merge(pieces[0], Partition(coll_block), M), pull_back(pieces[1], a2_to_a1)};
            ++rep.cases;
            if (!agree(lhs, rhs)) rep.fail("Ran/fact mixed compatibility fails on " + f.str());
        }
    }
    return rep;
}

Report fact_mu_check(const Factorization& fz, int pole, Window w, int K)
{
    Report rep;
    rep.check = "fact-mu";
    rep.window = w;
    rep.K = K;
    const auto& cfgs = fz.block_configs();
    std::vector<Field> bs, bds;
    std::vector<Field> mus;
    for (auto& c : cfgs) {
        AlgebraPtr U = CoeffAlgebra::heisenberg(c, K);
        Field b = Field::beta(c, U);
        bs.push_back(b);
        bds.push_back(b.d());
        mus.push_back(mu(b, b.d(), pole));
    }
    Field X = field_split(bs, fz), Y = field_split(bds, fz);
    Field lhs = mu(X, Y, pole);
    const SigmaConfig& cfg = fz.merged_config();
    auto codes = w.codes(cfg);
    EvalContext ctx;
    long nonzero = 0;
    for (int a : codes)
        for (int b : codes) {
            PhiSeries fa(cfg), fb(cfg);
            fa.add_term(a, Scalar(1));
            fb.add_term(b, Scalar(1));
            auto sa = fz.split(fa), sb = fz.split(fb);
            UElement rhs(X.algebra());
            for (std::size_t j = 0; j < cfgs.size(); ++j) {
                long S = mus[j].bounds().threshold(cfgs[j].n(), K);
                long reach = long(cfgs[j].n()) * cfgs[j].M() + std::min(sa[j].is_zero() ? 0 : sa[j].coeffs().begin()->first,
                                                                        sb[j].is_zero() ? 0 : sb[j].coeffs().begin()->first);
                if (reach < S) throw Error(ErrorKind::WindowTooSmall, "fact-mu: block truncation " + std::to_string(cfgs[j].M()) + " too small");
                UElement v = mus[j].eval(ctx, tensor(sa[j], sb[j]), K);
                rhs += embed_block(v, X.algebra(), int(j));
            }
            ++rep.cases;
            UElement v = lhs.eval(ctx, Codes{a, b, 0}, K);
            if (!v.is_zero_at_level(K)) ++nonzero;
            UElement d = v - rhs;
            if (!d.is_zero_at_level(K)) rep.fail("(" + std::to_string(a) + "," + std::to_string(b) + "): " + d.str());
        }
    rep.note("partition", fz.partition().str());
    rep.note("pole", std::to_string(pole));
    rep.note("nonzero", std::to_string(nonzero));
    return rep;
}

Report base_change_check(const Field& X, const Field& Y, const Substitution& s, Window w, int K)
{
    Report rep;
    rep.check = "base-change";
    rep.window = w;
    rep.K = K;
    Field Xs = field_base_change(X, s), Ys = field_base_change(Y, s);
    const SigmaConfig& cfg = X.config();
    SigmaConfig cs = Xs.config();
    EvalContext ctx;
    auto codes = w.codes(cfg);
    for (int a : codes) {
        ++rep.cases;
        UElement direct = Xs.eval(ctx, Codes{a, 0, 0}, K);
        UElement later = X.eval(ctx, Codes{a, 0, 0}, K).substituted(Xs.algebra(), s);
        if (!(direct - later).is_zero_at_level(K)) rep.fail("eval at " + std::to_string(a));
        // the residue unit field is invariant
        UElement u1 = Field::unit(cs, Xs.algebra(), PhiSeries::one(cs)).eval(ctx, Codes{a, 0, 0}, K);
        UElement u2 = field_base_change(Field::unit(cfg, X.algebra(), PhiSeries::one(cfg)), s).eval(ctx, Codes{a, 0, 0}, K);
        if (!(u1 - u2).is_zero_at_level(K)) rep.fail("unit field at " + std::to_string(a));
    }
    Field lhs = mu(Xs, Ys, 1), rhs = field_base_change(mu(X, Y, 1), s);
    for (int a : codes)
        for (int b : codes) {
            ++rep.cases;
            UElement d = lhs.eval(ctx, Codes{a, b, 0}, K) - rhs.eval(ctx, Codes{a, b, 0}, K);
            if (!d.is_zero_at_level(K)) rep.fail("mu at (" + std::to_string(a) + "," + std::to_string(b) + "): " + d.str());
        }
    return rep;
}

} // namespace chiral
