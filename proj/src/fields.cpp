#include "chiral/fields.hpp"

#include <algorithm>
#include <atomic>
#include <climits>

namespace chiral {

namespace {

long floor_div_l(long a, long b) { return a >= 0 ? a / b : -((-a + b - 1) / b); }
int ceil_div_l(long a, long b) { return int(-floor_div_l(-a, b)); }

bool never(long sigma) { return sigma >= kNeverNonzero / 2; }
long shift_sigma(long sigma, long by) { return never(sigma) ? kNeverNonzero : sigma + by; }

// defect of one product per slot: codes of phi_a phi_b are >= a + b - 2(n-1)
long defect(int n) { return 2L * (n - 1); }

// lower bound for the code sum of expansion terms of delta^-k
long expansion_sum_min(int k, int n)
{
    if (k <= 0) return 0;
    return -long(k) * n - long(k - 1) * 2 * defect(n);
}

template <std::size_t N>
long min_code_sum(const TensorSeries<N>& x)
{
    long m = LONG_MAX;
    for (auto& [k, c] : x.coeffs()) {
        long s = 0;
        for (int v : k) s += v;
        m = std::min(m, s);
    }
    return m == LONG_MAX ? 0 : m;
}

template <std::size_t N>
bool is_one(const TensorSeries<N>& x)
{
    if (x.size() != 1) return false;
    auto& [k, c] = *x.coeffs().begin();
    for (int v : k)
        if (v != 0) return false;
    return c.is_one();
}

int parity_of(const UElement& u)
{
    if (!u.algebra() || u.algebra()->kind() == CoeffAlgebra::Kind::matrix) return 0;
    bool even = false, odd = false;
    for (auto& [w, c] : u.terms()) (w.size() % 2 ? odd : even) = true;
    if (even && odd) return -1;
    return odd ? 1 : 0;
}

int add_parity(int a, int b) { return (a < 0 || b < 0) ? -1 : (a + b) % 2; }

// precision needed on a left factor so that its truncation error times y
// stays in the level-K ideal
int guard_level(int K, const UElement& y)
{
    if (!y.algebra() || y.algebra()->kind() == CoeffAlgebra::Kind::matrix) return K;
    int m = y.min_level();
    return m == INT_MAX ? K : std::max(K, -m);
}

// y x with the Koszul sign (-1)^{|x||y|}
UElement koszul_product(const UElement& y, const UElement& x)
{
    UElement yo = y.odd_part();
    if (yo.is_zero()) return y * x;
    UElement xo = x.odd_part();
    if (xo.is_zero()) return y * x;
    return y * x - (yo * xo) * Scalar(2);
}

Codes slice(const Codes& c, int from, int count)
{
    Codes r{0, 0, 0};
    for (int i = 0; i < count; ++i) r[std::size_t(i)] = c[std::size_t(from + i)];
    return r;
}

// X(cx) Y(cy), right factor first
UElement right_product(EvalContext& ctx, const FieldNode& X, const FieldNode& Y, const Codes& cx, const Codes& cy, int K)
{
    UElement y = Y.value(ctx, cy, K);
    if (y.is_zero()) return y;
    UElement x = X.value(ctx, cx, guard_level(K, y));
    if (x.is_zero()) return x;
    return (x * y).truncate(K);
}

// +-Y(cy) X(cx), X is now the right factor
UElement left_product(EvalContext& ctx, const FieldNode& X, const FieldNode& Y, const Codes& cx, const Codes& cy, int K)
{
    UElement x = X.value(ctx, cx, K);
    if (x.is_zero()) return x;
    UElement y = Y.value(ctx, cy, guard_level(K, x));
    if (y.is_zero()) return y;
    return koszul_product(y, x).truncate(K);
}

// sum of c X(cx) Y(cy) over terms, grouped by the left factor so each X value
// multiplies once
struct ProductTerm {
    Codes cx, cy;
    Scalar c;
};

UElement right_sum(EvalContext& ctx, const FieldNode& X, const FieldNode& Y, const std::vector<ProductTerm>& terms, int K)
{
    std::map<Codes, UElement> ys;
    for (auto& t : terms) {
        UElement y = Y.value(ctx, t.cy, K);
        if (y.is_zero()) continue;
        auto [it, fresh] = ys.try_emplace(t.cx, UElement(Y.algebra()));
        it->second += y * t.c;
    }
    UElement acc(X.algebra());
    for (auto& [cx, y] : ys) {
        if (y.is_zero()) continue;
        UElement x = X.value(ctx, cx, guard_level(K, y));
        if (!x.is_zero()) acc += (x * y).truncate(K);
    }
    return acc;
}

// sum of c (+-Y(cy) X(cx)), grouped by the Y input
UElement left_sum(EvalContext& ctx, const FieldNode& X, const FieldNode& Y, const std::vector<ProductTerm>& terms, int K)
{
    std::map<Codes, UElement> xs;
    for (auto& t : terms) {
        UElement x = X.value(ctx, t.cx, K);
        if (x.is_zero()) continue;
        auto [it, fresh] = xs.try_emplace(t.cy, UElement(X.algebra()));
        it->second += x * t.c;
    }
    UElement acc(X.algebra());
    for (auto& [cy, x] : xs) {
        if (x.is_zero()) continue;
        UElement y = Y.value(ctx, cy, guard_level(K, x));
        if (!y.is_zero()) acc += koszul_product(y, x).truncate(K);
    }
    return acc;
}

template <std::size_t N>
UElement eval_tensor(EvalContext& ctx, const FieldNode& Z, const TensorSeries<N>& x, int K)
{
    UElement acc(Z.algebra());
    for (auto& [k, c] : x.coeffs()) {
        Codes cc{0, 0, 0};
        for (std::size_t s = 0; s < N; ++s) cc[s] = k[s];
        UElement v = Z.value(ctx, cc, K);
        if (!v.is_zero()) acc += v * c;
    }
    return acc.truncate(K);
}

template <std::size_t N>
TensorSeries<N> basis_tensor(const SigmaConfig& cfg, const Codes& c)
{
    TensorSeries<N> x(cfg, Orientation::poly);
    typename TensorSeries<N>::Key k;
    for (std::size_t s = 0; s < N; ++s) k[s] = c[s];
    x.add_term(k, Scalar(1));
    return x;
}

void need_depth(int have, int want, const char* what)
{
    if (have < want)
        throw Error(ErrorKind::WindowTooSmall, std::string(what) + ": expansion exact below level " + std::to_string(have) +
                                                   ", annihilation bound needs " + std::to_string(want));
}

void require_compatible(const Field& X, const Field& Y, const char* where)
{
    if (!X.valid() || !Y.valid()) throw Error(ErrorKind::Invalid, std::string(where) + ": empty field");
    if (!X.config().same_roots(Y.config())) throw Error(ErrorKind::ConfigMismatch, where);
    if (!X.algebra()->same_instance(*Y.algebra())) throw Error(ErrorKind::InstanceMismatch, where);
}

void require_arity(const Field& X, int a, const char* where)
{
    if (X.arity() != a)
        throw Error(ErrorKind::Invalid, std::string(where) + ": expected a field with " + std::to_string(a) + " slot(s)");
}

// ------------------------------------------------------------------ nodes

class BetaNode : public FieldNode {
public:
    BetaNode(const SigmaConfig& cfg, const AlgebraPtr& U, int block) : FieldNode(cfg, U, 1), block_(block)
    {
        if (U->kind() != CoeffAlgebra::Kind::heisenberg) throw Error(ErrorKind::InstanceMismatch, "beta field needs a heisenberg algebra");
        if (!U->block_config(block).same_roots(cfg)) throw Error(ErrorKind::ConfigMismatch, "beta field over other points");
        bounds_ = {1, 1};
        parity_ = 1;
    }
    std::string describe() const override { return block_ ? "beta" + std::to_string(block_) : "beta"; }

protected:
    bool cheap() const override { return true; }
    UElement compute(EvalContext&, const Codes& c, int K) const override
    {
        return UElement::generator(alg_, block_, c[0]).truncate(K);
    }

private:
    int block_;
};

class ConstantNode : public FieldNode {
public:
    ConstantNode(const SigmaConfig& cfg, const UElement& u, const PhiSeries& w, bool unit)
        : FieldNode(cfg, u.algebra(), 1), u_(u), w_(w), unit_(unit)
    {
        require_same(cfg, w.config(), "constant field");
        parity_ = parity_of(u);
        if (u.is_zero() || w.is_zero()) {
            bounds_ = {0, kNeverNonzero};
            return;
        }
        // Res(phi_c w) needs level(c) = -1 - level(w term)
        long smax = -long(cfg.n()) * w.pole_order() - 1;
        long wmin = LONG_MAX;
        int R = 0;
        if (u.algebra()->kind() == CoeffAlgebra::Kind::heisenberg) {
            for (auto& [word, c] : u.terms()) {
                long wt = 0;
                for (auto& g : word) wt += 2L * g.code + 1;
                wmin = std::min(wmin, wt);
                R = std::max(R, int(word.size()));
            }
        } else {
            wmin = 0;
        }
        bounds_ = {R, wmin - 2 * smax};
    }
    std::string describe() const override
    {
        if (unit_) return "unit(" + w_.str() + ")";
        return "const(" + u_.str() + "; " + w_.str() + ")";
    }

protected:
    bool cheap() const override { return true; }
    UElement compute(EvalContext&, const Codes& c, int K) const override
    {
        std::map<int, Scalar> prod;
        for (auto& [code, coef] : w_.coeffs()) accumulate_product(cfg_, c[0], code, coef, prod);
        auto it = prod.find(-1);
        if (it == prod.end() || it->second.is_zero()) return UElement(alg_);
        return (u_ * it->second).truncate(K);
    }

private:
    UElement u_;
    PhiSeries w_;
    bool unit_;
};

class LinNode : public FieldNode {
public:
    explicit LinNode(std::vector<std::pair<Scalar, FieldPtr>> terms)
        : FieldNode(terms.front().second->config(), terms.front().second->algebra(), terms.front().second->arity()),
          terms_(std::move(terms))
    {
        bounds_ = {0, kNeverNonzero};
        parity_ = terms_.front().second->parity();
        for (auto& [c, f] : terms_) {
            bounds_.R = std::max(bounds_.R, f->bounds().R);
            bounds_.sigma = std::min(bounds_.sigma, f->bounds().sigma);
            if (f->parity() != parity_) parity_ = -1;
        }
    }
    std::string describe() const override
    {
        std::string out;
        for (auto& [c, f] : terms_) {
            if (!out.empty()) out += " + ";
            out += "(" + c.str() + ")*" + f->describe();
        }
        return "[" + out + "]";
    }

protected:
    UElement compute(EvalContext& ctx, const Codes& c, int K) const override
    {
        UElement acc(alg_);
        for (auto& [coef, f] : terms_) {
            UElement v = f->value(ctx, c, K);
            if (!v.is_zero()) acc += v * coef;
        }
        return acc;
    }

private:
    std::vector<std::pair<Scalar, FieldPtr>> terms_;
};

// X(g f) on one slot
class RightMulNode : public FieldNode {
public:
    RightMulNode(FieldPtr X, const PhiSeries& g) : FieldNode(X->config(), X->algebra(), 1), X_(std::move(X)), g_(g)
    {
        require_same(cfg_, g.config(), "right multiplication");
        if (g.is_zero()) {
            bounds_ = {0, kNeverNonzero};
        } else {
            long gmin = g.coeffs().begin()->first;
            bounds_ = {X_->bounds().R, shift_sigma(X_->bounds().sigma, 2 * (gmin - defect(cfg_.n())))};
        }
        parity_ = X_->parity();
    }
    std::string describe() const override { return X_->describe() + "*(" + g_.str() + ")"; }

protected:
    UElement compute(EvalContext& ctx, const Codes& c, int K) const override
    {
        std::map<int, Scalar> prod;
        for (auto& [code, coef] : g_.coeffs()) accumulate_product(cfg_, c[0], code, coef, prod);
        UElement acc(alg_);
        for (auto& [code, coef] : prod) {
            if (coef.is_zero()) continue;
            UElement v = X_->value(ctx, Codes{code, 0, 0}, K);
            if (!v.is_zero()) acc += v * coef;
        }
        return acc;
    }

private:
    FieldPtr X_;
    PhiSeries g_;
};

// Z(d_s l)
class DerivNode : public FieldNode {
public:
    DerivNode(FieldPtr Z, int slot) : FieldNode(Z->config(), Z->algebra(), Z->arity()), Z_(std::move(Z)), slot_(slot)
    {
        if (slot < 0 || slot >= arity_) throw Error(ErrorKind::Invalid, "derivative slot out of range");
        bounds_ = {Z_->bounds().R, shift_sigma(Z_->bounds().sigma, -2L * (2 * cfg_.n() - 1))};
        parity_ = Z_->parity();
    }
    std::string describe() const override
    {
        return Z_->describe() + (arity_ == 1 ? "*d" : "*d" + std::to_string(slot_));
    }

protected:
    UElement compute(EvalContext& ctx, const Codes& c, int K) const override
    {
        std::map<int, Scalar> der;
        accumulate_derivative(cfg_, c[std::size_t(slot_)], Scalar(1), der);
        UElement acc(alg_);
        for (auto& [code, coef] : der) {
            if (coef.is_zero()) continue;
            Codes cc = c;
            cc[std::size_t(slot_)] = code;
            UElement v = Z_->value(ctx, cc, K);
            if (!v.is_zero()) acc += v * coef;
        }
        return acc;
    }

private:
    FieldPtr Z_;
    int slot_;
};

// ordered products of an arity-p and an arity-q field
class ProductNode : public FieldNode {
public:
    ProductNode(FieldPtr X, FieldPtr Y, bool right)
        : FieldNode(X->config(), X->algebra(), X->arity() + Y->arity()), X_(std::move(X)), Y_(std::move(Y)), right_(right)
    {
        if (arity_ > 3) throw Error(ErrorKind::Invalid, "products of more than three slots are not supported");
        const Bounds &bx = X_->bounds(), &by = Y_->bounds();
        long s = never(bx.sigma) || never(by.sigma) ? kNeverNonzero
                                                     : bx.sigma + by.sigma - defect(cfg_.n()) * std::min(bx.R, by.R);
        bounds_ = {bx.R + by.R, s};
        parity_ = add_parity(X_->parity(), Y_->parity());
    }
    std::string describe() const override
    {
        return std::string(right_ ? "m_r(" : "m_l(") + X_->describe() + ", " + Y_->describe() + ")";
    }

protected:
    UElement compute(EvalContext& ctx, const Codes& c, int K) const override
    {
        Codes cx = slice(c, 0, X_->arity()), cy = slice(c, X_->arity(), Y_->arity());
        return right_ ? right_product(ctx, *X_, *Y_, cx, cy, K) : left_product(ctx, *X_, *Y_, cx, cy, K);
    }

private:
    FieldPtr X_, Y_;
    bool right_;
};

class MuNode : public FieldNode {
public:
    MuNode(FieldPtr X, FieldPtr Y, const TwoVarSeries& num, int k)
        : FieldNode(X->config(), X->algebra(), 2), X_(std::move(X)), Y_(std::move(Y)), num_(num), k_(k)
    {
        if (k < 0) throw Error(ErrorKind::Invalid, "pole order must be non-negative");
        if (num.orientation() != Orientation::poly) throw Error(ErrorKind::OrientationUnsupported, "pole numerator must be a poly tensor");
        trivial_num_ = is_one(num);
        int n = cfg_.n();
        const Bounds &bx = X_->bounds(), &by = Y_->bounds();
        long shift = 0;
        if (!trivial_num_) shift += min_code_sum(num) - 2 * defect(n);
        if (k > 0) shift += expansion_sum_min(k, n) - 2 * defect(n);
        long s = (never(bx.sigma) || never(by.sigma) || num.is_zero())
                     ? kNeverNonzero
                     : bx.sigma + by.sigma - defect(n) * std::min(bx.R, by.R) + 2 * shift;
        bounds_ = {bx.R + by.R, s};
        parity_ = add_parity(X_->parity(), Y_->parity());
    }
    std::string describe() const override
    {
        std::string pole = k_ ? ", d^-" + std::to_string(k_) : "";
        std::string c = trivial_num_ ? "" : ", <" + std::to_string(num_.size()) + " terms>";
        return "mu(" + X_->describe() + ", " + Y_->describe() + c + pole + ")";
    }

protected:
    UElement compute(EvalContext& ctx, const Codes& c, int K) const override
    {
        int n = cfg_.n();
        TwoVarSeries F = basis_tensor<2>(cfg_, c);
        if (!trivial_num_) F = F * num_;
        DiagonalPole P = localize_diagonal(F, k_);
        UElement acc(alg_);
        if (P.num.is_zero()) return acc;
        if (P.k == 0) {
            for (auto& [key, coef] : P.num.coeffs()) {
                Codes a{key[0], 0, 0}, b{key[1], 0, 0};
                acc += right_product(ctx, *X_, *Y_, a, b, K) * coef;
                acc -= left_product(ctx, *X_, *Y_, a, b, K) * coef;
            }
            return acc.truncate(K);
        }
        // right expansion: v ascends, Y sees the deep side
        long Sy = Y_->bounds().threshold(n, K);
        int Dv = ceil_div_l(Sy, n);
        int depth = Dv - std::min(P.num.min_level(1), 0);
        if (depth > 0) {
            need_depth(cfg_.M(), depth, "mu");
            TwoVarSeries E = P.num * ctx.expansion(true, P.k, cfg_, depth);
            need_depth(E.valid(1), Dv, "mu");
            std::vector<ProductTerm> terms;
            for (auto& [key, coef] : E.coeffs())
                if (key[1] < Sy && cfg_.level(key[1]) < Dv) terms.push_back({Codes{key[0], 0, 0}, Codes{key[1], 0, 0}, coef});
            acc += right_sum(ctx, *X_, *Y_, terms, K);
        }
        long Sx = X_->bounds().threshold(n, K);
        int Du = ceil_div_l(Sx, n);
        depth = Du - std::min(P.num.min_level(0), 0);
        if (depth > 0) {
            need_depth(cfg_.M(), depth, "mu");
            TwoVarSeries E = P.num * ctx.expansion(false, P.k, cfg_, depth);
            need_depth(E.valid(0), Du, "mu");
            std::vector<ProductTerm> terms;
            for (auto& [key, coef] : E.coeffs())
                if (key[0] < Sx && cfg_.level(key[0]) < Du) terms.push_back({Codes{key[0], 0, 0}, Codes{key[1], 0, 0}, coef});
            acc -= left_sum(ctx, *X_, *Y_, terms, K);
        }
        return acc.truncate(K);
    }

private:
    FieldPtr X_, Y_;
    TwoVarSeries num_;
    int k_;
    bool trivial_num_ = true;
};

// F * E1 * E2 with E1 on slots (0,1) and E2 on slots (0,2) (null: 1),
// skipping factor combinations whose level lower bounds fail keep(l0, l1, l2)
template <class Keep>
std::map<std::array<int, 3>, Scalar> expand_joint(EvalContext& ctx, const ThreeVarSeries& F, const TwoVarSeries* E1,
                                                 const TwoVarSeries* E2, Keep keep)
{
    const SigmaConfig& cfg = F.config();
    using Term = std::pair<std::array<int, 2>, Scalar>;
    static const std::vector<Term> unit{{{0, 0}, Scalar(1)}};
    auto terms = [](const TwoVarSeries* E) {
        if (!E) return unit;
        std::vector<Term> out(E->coeffs().begin(), E->coeffs().end());
        return out;
    };
    std::vector<Term> T1 = terms(E1), T2 = terms(E2);
    std::map<std::array<int, 3>, Scalar> acc;
    for (auto& [f, cf] : F.coeffs()) {
        int f0 = cfg.level(f[0]), f1 = cfg.level(f[1]), f2 = cfg.level(f[2]);
        for (auto& [a, ca] : T1) {
            int l0a = f0 + cfg.level(a[0]), l1 = f1 + cfg.level(a[1]);
            if (!keep(l0a, l1, f2)) continue;
            const auto& s1 = ctx.slot_product(cfg, f[1], a[1]);
            for (auto& [b, cb] : T2) {
                int l0 = l0a + cfg.level(b[0]), l2 = f2 + cfg.level(b[1]);
                if (!keep(l0, l1, l2)) continue;
                const auto& s2 = ctx.slot_product(cfg, f[2], b[1]);
                Scalar c = cf * ca * cb;
                for (auto& [p, cp] : ctx.slot_product(cfg, f[0], a[0])) {
                    Scalar cc = c * cp;
                    for (auto& [q, cq] : ctx.slot_product(cfg, p, b[0])) {
                        Scalar c0 = cc * cq;
                        for (auto& [x, cx] : s1) {
                            Scalar c01 = c0 * cx;
                            for (auto& [y, cy] : s2) {
                                auto [it, fresh] = acc.try_emplace(std::array<int, 3>{q, x, y}, Scalar());
                                it->second += c01 * cy;
                            }
                        }
                    }
                }
            }
        }
    }
    for (auto it = acc.begin(); it != acc.end();)
        it = it->second.is_zero() ? acc.erase(it) : std::next(it);
    return acc;
}

class Mu3Node : public FieldNode {
public:
    Mu3Node(FieldPtr X, FieldPtr W, const ThreeVarSeries& num, int e01, int e02)
        : FieldNode(X->config(), X->algebra(), 3), X_(std::move(X)), W_(std::move(W)), num_(num), e01_(e01), e02_(e02)
    {
        if (e01 < 0 || e02 < 0) throw Error(ErrorKind::Invalid, "pole order must be non-negative");
        if (num.orientation() != Orientation::poly) throw Error(ErrorKind::OrientationUnsupported, "pole numerator must be a poly tensor");
        trivial_num_ = is_one(num);
        int n = cfg_.n();
        const Bounds &bx = X_->bounds(), &bw = W_->bounds();
        long shift = 0;
        if (!trivial_num_) shift += min_code_sum(num) - 3 * defect(n);
        if (e01 > 0) shift += expansion_sum_min(e01, n) - 3 * defect(n);
        if (e02 > 0) shift += expansion_sum_min(e02, n) - 3 * defect(n);
        long s = (never(bx.sigma) || never(bw.sigma) || num.is_zero())
                     ? kNeverNonzero
                     : bx.sigma + bw.sigma - defect(n) * std::min(bx.R, bw.R) + 2 * shift;
        bounds_ = {bx.R + bw.R, s};
        parity_ = add_parity(X_->parity(), W_->parity());
    }
    std::string describe() const override
    {
        return "mu3(" + X_->describe() + ", " + W_->describe() + ", d01^-" + std::to_string(e01_) + ", d02^-" +
               std::to_string(e02_) + ")";
    }

protected:
    UElement compute(EvalContext& ctx, const Codes& c, int K) const override
    {
        int n = cfg_.n();
        ThreeVarSeries F = basis_tensor<3>(cfg_, c);
        if (!trivial_num_) F = F * num_;
        UElement acc(alg_);
        if (F.is_zero()) return acc;
        if (e01_ == 0 && e02_ == 0) {
            for (auto& [key, coef] : F.coeffs()) {
                Codes a{key[0], 0, 0}, b{key[1], key[2], 0};
                acc += right_product(ctx, *X_, *W_, a, b, K) * coef;
                acc -= left_product(ctx, *X_, *W_, a, b, K) * coef;
            }
            return acc.truncate(K);
        }
        int L0 = F.min_level(0), L1 = F.min_level(1), L2 = F.min_level(2);
        // right: slots 1 and 2 ascend; W vanishes once their code sum reaches Sw
        long Sw = W_->bounds().threshold(n, K);
        int base = ceil_div_l(Sw, n);
        int D1 = base - L2, D2 = base - L1;
        if (D1 - L1 > 0 && D2 - L2 > 0) {
            const TwoVarSeries* E1 = nullptr;
            const TwoVarSeries* E2 = nullptr;
            if (e01_ > 0) {
                need_depth(cfg_.M(), D1 - L1, "mu3");
                E1 = &ctx.expansion(true, e01_, cfg_, D1 - L1);
                need_depth(E1->valid(1) + L1, D1, "mu3");
            }
            if (e02_ > 0) {
                need_depth(cfg_.M(), D2 - L2, "mu3");
                E2 = &ctx.expansion(true, e02_, cfg_, D2 - L2);
                need_depth(E2->valid(1) + L2, D2, "mu3");
            }
            // product levels are at least the sums of the factor levels
            auto keep = [&](int, int l1, int l2) { return l1 < D1 && l2 < D2 && long(n) * (l1 + l2) < Sw; };
            std::vector<ProductTerm> terms;
            for (auto& [key, coef] : expand_joint(ctx, F, E1, E2, keep))
                if (long(key[1]) + key[2] < Sw && cfg_.level(key[1]) < D1 && cfg_.level(key[2]) < D2)
                    terms.push_back({Codes{key[0], 0, 0}, Codes{key[1], key[2], 0}, coef});
            acc += right_sum(ctx, *X_, *W_, terms, K);
        }
        // left: slot 0 ascends against both
        long Sx = X_->bounds().threshold(n, K);
        int D0 = ceil_div_l(Sx, n);
        if (D0 - L0 > 0) {
            need_depth(cfg_.M(), D0 - L0, "mu3");
            const TwoVarSeries* E1 = e01_ > 0 ? &ctx.expansion(false, e01_, cfg_, D0 - L0) : nullptr;
            const TwoVarSeries* E2 = e02_ > 0 ? &ctx.expansion(false, e02_, cfg_, D0 - L0) : nullptr;
            for (const TwoVarSeries* E : {E1, E2})
                if (E) need_depth(E->valid(0) + L0, D0, "mu3");
            auto keep = [&](int l0, int, int) { return l0 < D0 && long(n) * l0 < Sx; };
            std::vector<ProductTerm> terms;
            for (auto& [key, coef] : expand_joint(ctx, F, E1, E2, keep))
                if (key[0] < Sx && cfg_.level(key[0]) < D0) terms.push_back({Codes{key[0], 0, 0}, Codes{key[1], key[2], 0}, coef});
            acc -= left_sum(ctx, *X_, *W_, terms, K);
        }
        return acc.truncate(K);
    }

private:
    FieldPtr X_, W_;
    ThreeVarSeries num_;
    int e01_, e02_;
    bool trivial_num_ = true;
};

class RNode : public FieldNode {
public:
    explicit RNode(FieldPtr Z) : FieldNode(Z->config(), Z->algebra(), 1), Z_(std::move(Z))
    {
        bounds_ = Z_->bounds();
        parity_ = Z_->parity();
    }
    std::string describe() const override { return "R(" + Z_->describe() + ")"; }

protected:
    bool cheap() const override { return true; }
    UElement compute(EvalContext& ctx, const Codes& c, int K) const override { return Z_->value(ctx, Codes{0, c[0], 0}, K); }

private:
    FieldPtr Z_;
};

class DeltaPushNode : public FieldNode {
public:
    explicit DeltaPushNode(FieldPtr Y) : FieldNode(Y->config(), Y->algebra(), 2), Y_(std::move(Y))
    {
        bounds_ = {Y_->bounds().R, shift_sigma(Y_->bounds().sigma, -2 * defect(cfg_.n()))};
        parity_ = Y_->parity();
    }
    std::string describe() const override { return "push(" + Y_->describe() + ")"; }

protected:
    UElement compute(EvalContext& ctx, const Codes& c, int K) const override
    {
        std::map<int, Scalar> prod;
        accumulate_product(cfg_, c[0], c[1], Scalar(1), prod);
        UElement acc(alg_);
        for (auto& [code, coef] : prod)
            if (!coef.is_zero()) acc += Y_->value(ctx, Codes{code, 0, 0}, K) * coef;
        return acc;
    }

private:
    FieldPtr Y_;
};

template <std::size_t N>
class ActNode : public FieldNode {
public:
    ActNode(FieldPtr Z, const TensorSeries<N>& c) : FieldNode(Z->config(), Z->algebra(), int(N)), Z_(std::move(Z)), c_(c)
    {
        if (c.orientation() != Orientation::poly) throw Error(ErrorKind::OrientationUnsupported, "right action needs a poly tensor");
        bounds_ = {Z_->bounds().R, c.is_zero() ? kNeverNonzero
                                               : shift_sigma(Z_->bounds().sigma, 2 * (min_code_sum(c) - long(N) * defect(cfg_.n())))};
        parity_ = Z_->parity();
    }
    std::string describe() const override { return Z_->describe() + "*<" + std::to_string(c_.size()) + " terms>"; }

protected:
    UElement compute(EvalContext& ctx, const Codes& cc, int K) const override
    {
        return eval_tensor(ctx, *Z_, basis_tensor<N>(cfg_, cc) * c_, K);
    }

private:
    FieldPtr Z_;
    TensorSeries<N> c_;
};

class SwapNode : public FieldNode {
public:
    explicit SwapNode(FieldPtr Z) : FieldNode(Z->config(), Z->algebra(), 2), Z_(std::move(Z))
    {
        bounds_ = Z_->bounds();
        parity_ = Z_->parity();
    }
    std::string describe() const override { return "swap(" + Z_->describe() + ")"; }

protected:
    bool cheap() const override { return true; }
    UElement compute(EvalContext& ctx, const Codes& c, int K) const override { return Z_->value(ctx, Codes{c[1], c[0], 0}, K); }

private:
    FieldPtr Z_;
};

class KashComponentNode : public FieldNode {
public:
    KashComponentNode(FieldPtr Z, int j) : FieldNode(Z->config(), Z->algebra(), 1), Z_(std::move(Z)), j_(j), dj_(TwoVarSeries::one(cfg_))
    {
        for (int i = 0; i < j; ++i) dj_ = dj_ * delta(cfg_);
        mpz_class f = 1;
        for (int i = 2; i <= j; ++i) f *= i;
        inv_fact_ = Scalar(mpq_class(1, f));
        bounds_ = {Z_->bounds().R, shift_sigma(Z_->bounds().sigma, 2 * (min_code_sum(dj_) - 2 * defect(cfg_.n())))};
        parity_ = Z_->parity();
    }
    std::string describe() const override { return "comp" + std::to_string(j_) + "(" + Z_->describe() + ")"; }

protected:
    UElement compute(EvalContext& ctx, const Codes& c, int K) const override
    {
        return eval_tensor(ctx, *Z_, dj_ * basis_tensor<2>(cfg_, Codes{0, c[0], 0}), K) * inv_fact_;
    }

private:
    FieldPtr Z_;
    int j_;
    TwoVarSeries dj_;
    Scalar inv_fact_;
};

class KashRealizeNode : public FieldNode {
public:
    explicit KashRealizeNode(std::vector<FieldPtr> comps)
        : FieldNode(comps.front()->config(), comps.front()->algebra(), 2), comps_(std::move(comps))
    {
        int n = cfg_.n();
        bounds_ = {0, kNeverNonzero};
        parity_ = comps_.front()->parity();
        for (std::size_t j = 0; j < comps_.size(); ++j) {
            const Bounds& b = comps_[j]->bounds();
            bounds_.R = std::max(bounds_.R, b.R);
            bounds_.sigma = std::min(bounds_.sigma, shift_sigma(b.sigma, -2 * (long(j) * (2 * n - 1) + defect(n))));
            if (comps_[j]->parity() != parity_) parity_ = -1;
        }
    }
    std::string describe() const override
    {
        std::string out;
        for (std::size_t j = 0; j < comps_.size(); ++j) out += (j ? " + " : "") + comps_[j]->describe() + "*dy^" + std::to_string(j);
        return "kash(" + out + ")";
    }

protected:
    UElement compute(EvalContext& ctx, const Codes& c, int K) const override
    {
        UElement acc(alg_);
        std::map<int, Scalar> der{{c[0], Scalar(1)}};
        for (std::size_t j = 0; j < comps_.size(); ++j) {
            if (j > 0) {
                std::map<int, Scalar> next;
                for (auto& [code, coef] : der)
                    if (!coef.is_zero()) accumulate_derivative(cfg_, code, coef, next);
                der.swap(next);
            }
            std::map<int, Scalar> prod;
            for (auto& [code, coef] : der)
                if (!coef.is_zero()) accumulate_product(cfg_, c[1], code, coef, prod);
            for (auto& [code, coef] : prod)
                if (!coef.is_zero()) acc += comps_[j]->value(ctx, Codes{code, 0, 0}, K) * coef;
        }
        return acc;
    }

private:
    std::vector<FieldPtr> comps_;
};

} // namespace

// ------------------------------------------------------------------ Bounds / context

long Bounds::threshold(int n, int K) const
{
    if (never(sigma)) return -kNeverNonzero;
    long top = long(R) * (2L * n * K - 1) - sigma;
    return floor_div_l(top, 2) + 1;
}

const UElement* EvalContext::find(const Key& k) const
{
    auto it = table_.find(k);
    return it == table_.end() ? nullptr : &it->second;
}

const UElement& EvalContext::store(const Key& k, UElement v) { return table_.insert_or_assign(k, std::move(v)).first->second; }

const TwoVarSeries& EvalContext::expansion(bool right, int k, const SigmaConfig& cfg, int depth)
{
    auto key = std::make_tuple(right, k, depth, static_cast<const void*>(&cfg.roots()));
    auto it = exps_.find(key);
    if (it != exps_.end()) return it->second;
    TwoVarSeries e = right ? exp_r(k, cfg, depth) : exp_l(k, cfg, depth);
    return exps_.emplace(key, std::move(e)).first->second;
}

const std::vector<std::pair<int, Scalar>>& EvalContext::slot_product(const SigmaConfig& cfg, int a, int b)
{
    auto key = std::make_tuple(a, b, static_cast<const void*>(&cfg.roots()));
    auto it = slots_.find(key);
    if (it != slots_.end()) return it->second;
    std::map<int, Scalar> acc;
    accumulate_product(cfg, a, b, Scalar(1), acc);
    std::vector<std::pair<int, Scalar>> out;
    for (auto& [k, c] : acc)
        if (!c.is_zero()) out.emplace_back(k, c);
    return slots_.emplace(key, std::move(out)).first->second;
}

FieldNode::FieldNode(SigmaConfig cfg, AlgebraPtr alg, int arity) : cfg_(std::move(cfg)), alg_(std::move(alg)), arity_(arity)
{
    static std::atomic<std::uint64_t> next{1};
    id_ = next.fetch_add(1);
}

UElement FieldNode::value(EvalContext& ctx, const Codes& c, int K) const
{
    if (cheap() || !ctx.memo()) return compute(ctx, c, K);
    EvalContext::Key key{id_, c, K};
    if (const UElement* hit = ctx.find(key)) return *hit;
    UElement v = compute(ctx, c, K);
    return ctx.store(key, std::move(v));
}

// ------------------------------------------------------------------ Field

Field Field::beta(const SigmaConfig& cfg, const AlgebraPtr& U, int block) { return Field(std::make_shared<BetaNode>(cfg, U, block)); }

Field Field::unit(const SigmaConfig& cfg, const AlgebraPtr& U, const PhiSeries& w)
{
    return Field(std::make_shared<ConstantNode>(cfg, UElement::one(U), w, true));
}

Field Field::constant(const SigmaConfig& cfg, const UElement& u, const PhiSeries& w)
{
    return Field(std::make_shared<ConstantNode>(cfg, u, w, false));
}

Field Field::zero(const SigmaConfig& cfg, const AlgebraPtr& U, int arity)
{
    Field z = Field(std::make_shared<ConstantNode>(cfg, UElement(U), PhiSeries(cfg), false));
    if (arity == 1) return z;
    Field r = z;
    for (int i = 1; i < arity; ++i) r = m_r(r, z);
    return r;
}

Field Field::operator*(const PhiSeries& g) const
{
    require_arity(*this, 1, "right multiplication");
    return Field(std::make_shared<RightMulNode>(p_, g));
}

Field Field::d() const
{
    require_arity(*this, 1, "derivative");
    return Field(std::make_shared<DerivNode>(p_, 0));
}

Field Field::apply(const DOperator& D) const
{
    require_arity(*this, 1, "differential operator");
    std::vector<std::pair<Scalar, FieldPtr>> terms;
    for (auto& [k, g] : D.terms()) {
        Field t = *this * g;
        for (int i = 0; i < k; ++i) t = t.d();
        terms.emplace_back(Scalar(1), t.p_);
    }
    if (terms.empty()) return zero(config(), algebra());
    if (terms.size() == 1) return Field(terms.front().second);
    return Field(std::make_shared<LinNode>(std::move(terms)));
}

Field Field::operator+(const Field& o) const
{
    require_compatible(*this, o, "field sum");
    if (arity() != o.arity()) throw Error(ErrorKind::Invalid, "field sum: different slot counts");
    return Field(std::make_shared<LinNode>(std::vector<std::pair<Scalar, FieldPtr>>{{Scalar(1), p_}, {Scalar(1), o.p_}}));
}

Field Field::operator-(const Field& o) const
{
    require_compatible(*this, o, "field difference");
    if (arity() != o.arity()) throw Error(ErrorKind::Invalid, "field difference: different slot counts");
    return Field(std::make_shared<LinNode>(std::vector<std::pair<Scalar, FieldPtr>>{{Scalar(1), p_}, {Scalar(-1), o.p_}}));
}

Field Field::operator*(const Scalar& s) const
{
    return Field(std::make_shared<LinNode>(std::vector<std::pair<Scalar, FieldPtr>>{{s, p_}}));
}

UElement Field::eval(const PhiSeries& f, int K) const
{
    EvalContext ctx;
    return eval(ctx, f, K);
}

UElement Field::eval(EvalContext& ctx, const PhiSeries& f, int K) const
{
    require_arity(*this, 1, "eval");
    require_same(config(), f.config(), "field eval");
    if (K <= 0) K = algebra()->K();
    int n = config().n();
    long S = bounds().threshold(n, K);
    if (f.valid_below() != kExact && long(f.valid_below()) * n < S)
        throw Error(ErrorKind::WindowTooSmall, "field eval: input exact below level " + std::to_string(f.valid_below()) +
                                                   ", annihilation bound needs code " + std::to_string(S));
    UElement acc(algebra());
    for (auto& [code, c] : f.coeffs()) {
        if (code >= S) continue;
        UElement v = p_->value(ctx, Codes{code, 0, 0}, K);
        if (!v.is_zero()) acc += v * c;
    }
    return acc.truncate(K);
}

UElement Field::eval(EvalContext& ctx, const TwoVarSeries& x, int K) const
{
    require_arity(*this, 2, "eval");
    if (x.orientation() != Orientation::poly) throw Error(ErrorKind::OrientationUnsupported, "multifield eval takes poly tensors");
    if (K <= 0) K = algebra()->K();
    return eval_tensor(ctx, *p_, x, K);
}

UElement Field::eval(EvalContext& ctx, const ThreeVarSeries& x, int K) const
{
    require_arity(*this, 3, "eval");
    if (x.orientation() != Orientation::poly) throw Error(ErrorKind::OrientationUnsupported, "multifield eval takes poly tensors");
    if (K <= 0) K = algebra()->K();
    return eval_tensor(ctx, *p_, x, K);
}

Field m_r(const Field& X, const Field& Y)
{
    require_compatible(X, Y, "m_r");
    return Field(std::make_shared<ProductNode>(X.node(), Y.node(), true));
}

Field m_l(const Field& X, const Field& Y)
{
    require_compatible(X, Y, "m_l");
    return Field(std::make_shared<ProductNode>(X.node(), Y.node(), false));
}

Field mu(const Field& X, const Field& Y, const TwoVarSeries& num, int k)
{
    require_compatible(X, Y, "mu");
    require_arity(X, 1, "mu");
    require_arity(Y, 1, "mu");
    require_same(X.config(), num.config(), "mu coefficient");
    return Field(std::make_shared<MuNode>(X.node(), Y.node(), num, k));
}

Field mu(const Field& X, const Field& Y, int k) { return mu(X, Y, TwoVarSeries::one(X.config()), k); }

Field mu3(const Field& X, const Field& W, const ThreeVarSeries& num, int e01, int e02)
{
    require_compatible(X, W, "mu3");
    require_arity(X, 1, "mu3");
    require_arity(W, 2, "mu3");
    require_same(X.config(), num.config(), "mu3 coefficient");
    return Field(std::make_shared<Mu3Node>(X.node(), W.node(), num, e01, e02));
}

Field r_map(const Field& Z)
{
    require_arity(Z, 2, "R");
    return Field(std::make_shared<RNode>(Z.node()));
}

Field rmu(const Field& X, const Field& Y, const TwoVarSeries& num, int k) { return r_map(mu(X, Y, num, k)); }
Field rmu(const Field& X, const Field& Y, int k) { return r_map(mu(X, Y, k)); }

Field delta_push(const Field& Y)
{
    require_arity(Y, 1, "pushforward");
    return Field(std::make_shared<DeltaPushNode>(Y.node()));
}

Field act(const Field& Z, const TwoVarSeries& c)
{
    require_arity(Z, 2, "right action");
    require_same(Z.config(), c.config(), "right action");
    return Field(std::make_shared<ActNode<2>>(Z.node(), c));
}

Field act(const Field& Z, const ThreeVarSeries& c)
{
    require_arity(Z, 3, "right action");
    require_same(Z.config(), c.config(), "right action");
    return Field(std::make_shared<ActNode<3>>(Z.node(), c));
}

Field d_slot(const Field& Z, int slot) { return Field(std::make_shared<DerivNode>(Z.node(), slot)); }

Field swap_slots(const Field& Z)
{
    require_arity(Z, 2, "swap");
    return Field(std::make_shared<SwapNode>(Z.node()));
}

Field kashiwara_component(const Field& Z, int j)
{
    require_arity(Z, 2, "Kashiwara component");
    if (j < 0) throw Error(ErrorKind::Invalid, "component index must be non-negative");
    return Field(std::make_shared<KashComponentNode>(Z.node(), j));
}

Field kashiwara_realize(const std::vector<Field>& comps)
{
    if (comps.empty()) throw Error(ErrorKind::Invalid, "Kashiwara realization needs at least one component");
    std::vector<FieldPtr> nodes;
    for (auto& c : comps) {
        require_arity(c, 1, "Kashiwara realization");
        require_compatible(comps.front(), c, "Kashiwara realization");
        nodes.push_back(c.node());
    }
    return Field(std::make_shared<KashRealizeNode>(std::move(nodes)));
}

std::vector<int> Window::codes(const SigmaConfig& cfg) const
{
    std::vector<int> out;
    for (int c = cfg.code(lo, 0); c < cfg.code(hi, 0); ++c) out.push_back(c);
    return out;
}

std::string Window::str() const { return "[" + std::to_string(lo) + "," + std::to_string(hi) + ")"; }

} // namespace chiral
