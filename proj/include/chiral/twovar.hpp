#pragma once

// Tensor expressions over O_Sigma* in two or three slots, the diagonal
// element delta = u - v, and the two one-directional expansions of its
// inverse powers.

#include <array>
#include <map>
#include <optional>
#include <utility>
#include <vector>

#include "chiral/residue.hpp"
#include "chiral/sigma.hpp"

namespace chiral {

enum class Orientation { poly, right, left, mixed };

const char* orientation_name(Orientation o);

// Sparse tensor in the plus basis of each slot. Each slot carries a level
// bound below which its coefficients are exact; the error of a truncated
// series lives in the union of the half-spaces {slot s >= valid[s]}.
template <std::size_t N>
class TensorSeries {
public:
    using Key = std::array<int, N>;

    TensorSeries(SigmaConfig cfg, Orientation o) : cfg_(std::move(cfg)), orient_(o), limit_(cfg_.M())
    {
        valid_.fill(kExact);
    }

    static TensorSeries one(const SigmaConfig& cfg)
    {
        TensorSeries x(cfg, Orientation::poly);
        Key k;
        k.fill(cfg.code(0, 0));
        x.add_term(k, Scalar(1));
        return x;
    }

    const SigmaConfig& config() const { return cfg_; }
    Orientation orientation() const { return orient_; }
    void set_orientation(Orientation o) { orient_ = o; }
    const std::map<Key, Scalar>& coeffs() const { return c_; }
    bool is_zero() const { return c_.empty(); }
    std::size_t size() const { return c_.size(); }

    int valid(std::size_t s) const { return valid_[s]; }
    void set_valid(std::size_t s, int v) { valid_[s] = std::min(valid_[s], v); }
    // terms with a slot level >= limit are dropped (ring truncation)
    int limit() const { return limit_; }
    void set_limit(int l) { limit_ = l; }

    int min_level(std::size_t s) const
    {
        int m = kExact;
        for (auto& [k, c] : c_) m = std::min(m, cfg_.level(k[s]));
        return m;
    }
    int max_level(std::size_t s) const
    {
        int m = INT_MIN;
        for (auto& [k, c] : c_) m = std::max(m, cfg_.level(k[s]));
        return m;
    }

    void add_term(const Key& k, const Scalar& c)
    {
        if (c.is_zero()) return;
        for (std::size_t s = 0; s < N; ++s)
            if (cfg_.level(k[s]) >= limit_) { valid_[s] = std::min(valid_[s], limit_); return; }
        auto [it, fresh] = c_.try_emplace(k, c);
        if (!fresh) {
            it->second += c;
            if (it->second.is_zero()) c_.erase(it);
        }
    }

    TensorSeries operator-() const
    {
        TensorSeries r(*this);
        for (auto& [k, c] : r.c_) c = -c;
        return r;
    }
    TensorSeries& operator+=(const TensorSeries& o)
    {
        check_compatible(o, "add");
        for (auto& [k, c] : o.c_) add_term(k, c);
        for (std::size_t s = 0; s < N; ++s) valid_[s] = std::min(valid_[s], o.valid_[s]);
        if (orient_ == Orientation::poly) orient_ = o.orient_;
        return *this;
    }
    TensorSeries& operator-=(const TensorSeries& o) { return *this += -o; }
    TensorSeries operator+(const TensorSeries& o) const { TensorSeries r(*this); r += o; return r; }
    TensorSeries operator-(const TensorSeries& o) const { TensorSeries r(*this); r += -o; return r; }
    TensorSeries operator*(const Scalar& s) const
    {
        TensorSeries r(cfg_, orient_);
        r.valid_ = valid_;
        r.limit_ = limit_;
        if (s.is_zero()) return r;
        for (auto& [k, c] : c_) r.c_.emplace(k, c * s);
        return r;
    }

    TensorSeries operator*(const TensorSeries& o) const;

    // keep only terms whose slot-s level is below `level`
    TensorSeries truncated(std::size_t s, int level) const
    {
        TensorSeries r(cfg_, orient_);
        r.valid_ = valid_;
        r.limit_ = limit_;
        r.valid_[s] = std::min(r.valid_[s], level);
        for (auto& [k, c] : c_)
            if (cfg_.level(k[s]) < level) r.c_.emplace(k, c);
        return r;
    }

    // coefficients restricted to the exact region
    TensorSeries exact_part() const
    {
        TensorSeries r(cfg_, orient_);
        r.valid_ = valid_;
        r.limit_ = limit_;
        for (auto& [k, c] : c_) {
            bool ok = true;
            for (std::size_t s = 0; s < N; ++s) ok = ok && cfg_.level(k[s]) < valid_[s];
            if (ok) r.c_.emplace(k, c);
        }
        return r;
    }

    bool operator==(const TensorSeries& o) const { return cfg_.same_roots(o.cfg_) && c_ == o.c_; }
    bool operator!=(const TensorSeries& o) const { return !(*this == o); }

private:
    void check_compatible(const TensorSeries& o, const char* where) const
    {
        if (!cfg_.same_roots(o.cfg_)) throw Error(ErrorKind::ConfigMismatch, std::string("tensor ") + where);
        if (orient_ != Orientation::poly && o.orient_ != Orientation::poly && orient_ != o.orient_ &&
            orient_ != Orientation::mixed && o.orient_ != Orientation::mixed)
            throw Error(ErrorKind::OrientationMismatch, std::string("tensor ") + where + ": " + orientation_name(orient_) +
                                                           " vs " + orientation_name(o.orient_));
    }

    SigmaConfig cfg_;
    Orientation orient_;
    std::map<Key, Scalar> c_;
    std::array<int, N> valid_;
    int limit_;
};

using TwoVarSeries = TensorSeries<2>;
using ThreeVarSeries = TensorSeries<3>;

// f(u) g(v)
TwoVarSeries tensor(const PhiSeries& f, const PhiSeries& g);
ThreeVarSeries tensor(const PhiSeries& f, const PhiSeries& g, const PhiSeries& h);
// u - v
TwoVarSeries delta(const SigmaConfig& cfg);
// slot-wise derivative
template <std::size_t N>
TensorSeries<N> d_slot(const TensorSeries<N>& x, std::size_t s);
// two-slot series placed in slots (a, b) of a three-slot tensor, 1 elsewhere
ThreeVarSeries embed(const TwoVarSeries& x, std::size_t a, std::size_t b);
// slot permutation: result slot perm[s] receives slot s
template <std::size_t N>
TensorSeries<N> permute(const TensorSeries<N>& x, const std::array<std::size_t, N>& perm);

TwoVarSeries mul_two(const TwoVarSeries& x, const TwoVarSeries& y);

// Expansion of delta^-k with the first slot descending (right) or the
// second slot descending (left). All terms whose ascending-slot level is
// below `depth` are exact.
TwoVarSeries exp_r(int k, const SigmaConfig& cfg, int depth);
TwoVarSeries exp_l(int k, const SigmaConfig& cfg, int depth);
// single-kernel cross-check: (k) exp(k+1) = d/dv exp(k)
TwoVarSeries exp_r_by_derivative(int k, const SigmaConfig& cfg, int depth);

// h(u,v) with phi(u) - phi(v) = h(u,v) (u - v)
TwoVarSeries diagonal_quotient(const SigmaConfig& cfg);

// Delta#: u, v -> t. Defined on poly tensors only.
PhiSeries diag_restrict(const TwoVarSeries& x);
// restrict slots a and b (a < b) of a three-slot tensor to their diagonal;
// the merged slot takes position a
TwoVarSeries diag_restrict(const ThreeVarSeries& x, std::size_t a, std::size_t b);

// T(f (x) g) = Res(f dt) g on right (resp. left) series
PhiSeries contract_r(const TwoVarSeries& x);
PhiSeries contract_l(const TwoVarSeries& x);

// x * delta^-k, carried symbolically
struct DiagonalPole {
    TwoVarSeries num;
    int k = 0;
};

DiagonalPole localize_diagonal(const TwoVarSeries& x, int k);
DiagonalPole operator*(const DiagonalPole& a, const DiagonalPole& b);
// x / delta when x vanishes on the diagonal
std::optional<TwoVarSeries> divide_by_delta(const TwoVarSeries& x);
// right/left expansion exact for ascending-slot levels below `window`
TwoVarSeries expand_r(const DiagonalPole& p, int window);
TwoVarSeries expand_l(const DiagonalPole& p, int window);

struct CauchyResult {
    PhiSeries lhs_r, lhs_l, rhs;
    int window; // identity checked on phi-levels below this
    bool holds;
};

CauchyResult cauchy_check(const TwoVarSeries& f, int m_pair);

std::string to_text(const TwoVarSeries& x);
TwoVarSeries twovar_from_text(const std::string& text);

} // namespace chiral
