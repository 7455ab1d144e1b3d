#pragma once

// U-valued fields and multifields as immutable expression trees. A field of
// arity p evaluates on p-fold tensors of basis elements; composite fields
// (products, the chiral bracket mu, the residue map R, Kashiwara
// components) evaluate lazily and memoize per evaluation context.
//
// Values are computed modulo the level-K truncation ideal of U. Infinite
// sums coming from expansions of diagonal poles are cut using a priori
// annihilation bounds carried by every node (see Bounds).

#include <array>
#include <cstdint>
#include <memory>
#include <string>
#include <unordered_map>
#include <vector>

#include "chiral/twovar.hpp"
#include "chiral/ualgebra.hpp"

namespace chiral {

using Codes = std::array<int, 3>;

// Every value X(phi_c1 (x) ... ) with code sum s is a combination of words
// with at most R generators and weight sum(2c+1) >= 2s + sigma.
struct Bounds {
    int R = 0;
    long sigma = 0;
    // smallest input code sum whose values lie in the level-K ideal
    long threshold(int n, int K) const;
};

constexpr long kNeverNonzero = 1L << 40;

class FieldNode;
using FieldPtr = std::shared_ptr<const FieldNode>;

class EvalContext {
public:
    explicit EvalContext(bool memo = true) : memo_(memo) {}
    struct Key {
        std::uint64_t node;
        Codes codes;
        int K;
        bool operator==(const Key& o) const { return node == o.node && codes == o.codes && K == o.K; }
    };
    struct KeyHash {
        std::size_t operator()(const Key& k) const
        {
            std::size_t h = std::hash<std::uint64_t>()(k.node);
            for (int c : k.codes) h = h * 1000003u + std::size_t(c + 7919);
            return h * 31u + std::size_t(k.K);
        }
    };
    const UElement* find(const Key& k) const;
    const UElement& store(const Key& k, UElement v);
    bool memo() const { return memo_; }
    std::size_t size() const { return table_.size(); }

    // cached expansions of delta^-k (two slots)
    const TwoVarSeries& expansion(bool right, int k, const SigmaConfig& cfg, int depth);
    // phi_a phi_b in the basis
    const std::vector<std::pair<int, Scalar>>& slot_product(const SigmaConfig& cfg, int a, int b);

private:
    bool memo_;
    std::unordered_map<Key, UElement, KeyHash> table_;
    std::map<std::tuple<bool, int, int, const void*>, TwoVarSeries> exps_;
    std::map<std::tuple<int, int, const void*>, std::vector<std::pair<int, Scalar>>> slots_;
};

class FieldNode {
public:
    FieldNode(SigmaConfig cfg, AlgebraPtr alg, int arity);
    virtual ~FieldNode() = default;

    const SigmaConfig& config() const { return cfg_; }
    const AlgebraPtr& algebra() const { return alg_; }
    int arity() const { return arity_; }
    const Bounds& bounds() const { return bounds_; }
    // Z/2 degree of all values; -1 when mixed
    int parity() const { return parity_; }

    // value on the basis tensor with the given codes, modulo the level-K ideal
    UElement value(EvalContext& ctx, const Codes& c, int K) const;
    virtual std::string describe() const = 0;

protected:
    virtual UElement compute(EvalContext& ctx, const Codes& c, int K) const = 0;
    virtual bool cheap() const { return false; }
    SigmaConfig cfg_;
    AlgebraPtr alg_;
    int arity_;
    Bounds bounds_;
    int parity_ = 0;

private:
    // memo key; unique for the lifetime of the process
    std::uint64_t id_;
};

class Field {
public:
    Field() = default;
    explicit Field(FieldPtr p) : p_(std::move(p)) {}

    // primitives
    static Field beta(const SigmaConfig& cfg, const AlgebraPtr& U, int block = 0);
    // f -> Res(f w) 1
    static Field unit(const SigmaConfig& cfg, const AlgebraPtr& U, const PhiSeries& w);
    // f -> Res(f w) u
    static Field constant(const SigmaConfig& cfg, const UElement& u, const PhiSeries& w);
    static Field zero(const SigmaConfig& cfg, const AlgebraPtr& U, int arity = 1);

    const FieldPtr& node() const { return p_; }
    bool valid() const { return bool(p_); }
    int arity() const { return p_->arity(); }
    const SigmaConfig& config() const { return p_->config(); }
    const AlgebraPtr& algebra() const { return p_->algebra(); }
    const Bounds& bounds() const { return p_->bounds(); }
    int parity() const { return p_->parity(); }
    std::string describe() const { return p_->describe(); }

    // right D-action on one-slot fields: (X g)(f) = X(g f), (X d)(f) = X(f')
    Field operator*(const PhiSeries& g) const;
    Field d() const;
    Field apply(const DOperator& D) const;

    Field operator+(const Field& o) const;
    Field operator-(const Field& o) const;
    Field operator*(const Scalar& s) const;
    Field operator-() const { return *this * Scalar(-1); }

    UElement eval(EvalContext& ctx, const Codes& c, int K) const { return p_->value(ctx, c, K); }
    // K defaults to the algebra's level
    UElement eval(const PhiSeries& f, int K = 0) const;
    UElement eval(EvalContext& ctx, const PhiSeries& f, int K) const;
    UElement eval(EvalContext& ctx, const TwoVarSeries& x, int K) const;
    UElement eval(EvalContext& ctx, const ThreeVarSeries& x, int K) const;

private:
    FieldPtr p_;
};

using MultiField = Field;

// ordered products: m_r(X,Y)(f (x) g) = X(f) Y(g), m_l(X,Y)(f (x) g) = +-Y(g) X(f)
// (Koszul sign on odd values); arities add up to at most 3
Field m_r(const Field& X, const Field& Y);
Field m_l(const Field& X, const Field& Y);

// the chiral bracket of one-slot fields with coefficient num * delta^-k
Field mu(const Field& X, const Field& Y, const TwoVarSeries& num, int k);
Field mu(const Field& X, const Field& Y, int k = 0);
// bracket of a one-slot field with a two-slot field, block split {0}|{1,2},
// coefficient num * delta01^-e01 * delta02^-e02
Field mu3(const Field& X, const Field& W, const ThreeVarSeries& num, int e01, int e02);

// R(Z)(f) = Z(1 (x) f)
Field r_map(const Field& Z);
Field rmu(const Field& X, const Field& Y, const TwoVarSeries& num, int k);
Field rmu(const Field& X, const Field& Y, int k);
// Delta_* Y: f (x) g -> Y(f g)
Field delta_push(const Field& Y);
// multifield right actions
Field act(const Field& Z, const TwoVarSeries& c);
Field act(const Field& Z, const ThreeVarSeries& c);
Field d_slot(const Field& Z, int slot);
Field swap_slots(const Field& Z);
// X_j(g) = Z(delta^j (1 (x) g)) / j!
Field kashiwara_component(const Field& Z, int j);
// sum_j X_j d_y^j realized as the two-field f (x) g -> sum_j X_j(g d^j f)
Field kashiwara_realize(const std::vector<Field>& comps);

// working window: phi-levels [lo, hi)
struct Window {
    int lo = 0, hi = 0;
    static Window centered(int W) { return Window{-(W / 2), W - W / 2}; }
    int size() const { return hi - lo; }
    std::vector<int> codes(const SigmaConfig& cfg) const;
    std::string str() const;
};

} // namespace chiral
