#include "chiral/ualgebra.hpp"

#include <algorithm>
#include <climits>

#include "chiral/residue.hpp"

namespace chiral {

AlgebraPtr CoeffAlgebra::heisenberg(const SigmaConfig& cfg, int K) { return heisenberg(std::vector<SigmaConfig>{cfg}, K); }

AlgebraPtr CoeffAlgebra::heisenberg(const std::vector<SigmaConfig>& blocks, int K)
{
    if (blocks.empty()) throw Error(ErrorKind::Invalid, "heisenberg algebra needs at least one block");
    if (K < 1) throw Error(ErrorKind::Invalid, "truncation level must be positive");
    std::shared_ptr<CoeffAlgebra> a(new CoeffAlgebra());
    a->kind_ = Kind::heisenberg;
    a->K_ = K;
    a->blocks_ = blocks;
    for (auto& cfg : blocks) {
        int n = cfg.n();
        std::vector<Scalar> P(static_cast<std::size_t>(n * n));
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j)
                P[std::size_t(i * n + j)] = pairing(PhiSeries::basis(cfg, -1, i), PhiSeries::basis(cfg, 0, j));
        a->pairing_.push_back(std::move(P));
    }
    return a;
}

AlgebraPtr CoeffAlgebra::matrix(int N)
{
    if (N < 1) throw Error(ErrorKind::Invalid, "matrix dimension must be positive");
    std::shared_ptr<CoeffAlgebra> a(new CoeffAlgebra());
    a->kind_ = Kind::matrix;
    a->N_ = N;
    return a;
}

const Scalar& CoeffAlgebra::anticommutator(const Gen& x, const Gen& y) const
{
    if (x.block != y.block) return zero_;
    const auto& cfg = blocks_[std::size_t(x.block)];
    int n = cfg.n();
    int lx = floor_div(x.code, n), ly = floor_div(y.code, n);
    if (lx + ly != -1) return zero_;
    int i = x.code - lx * n, j = y.code - ly * n;
    return pairing_[std::size_t(x.block)][std::size_t(i * n + j)];
}

bool CoeffAlgebra::same_instance(const CoeffAlgebra& o) const
{
    if (this == &o) return true;
    if (kind_ != o.kind_) return false;
    if (kind_ == Kind::matrix) return N_ == o.N_;
    if (K_ != o.K_ || blocks_.size() != o.blocks_.size()) return false;
    for (std::size_t b = 0; b < blocks_.size(); ++b)
        if (!blocks_[b].same_roots(o.blocks_[b])) return false;
    return true;
}

AlgebraPtr CoeffAlgebra::substituted(const Substitution& s) const
{
    if (kind_ == Kind::matrix) return matrix(N_);
    std::vector<SigmaConfig> b;
    for (auto& c : blocks_) b.push_back(c.substituted(s));
    return heisenberg(b, K_);
}

std::string CoeffAlgebra::str() const
{
    if (kind_ == Kind::matrix) return "matrix(" + std::to_string(N_) + ")";
    std::string out = "heisenberg(K=" + std::to_string(K_);
    for (auto& c : blocks_) out += "; " + c.str();
    return out + ")";
}

// ------------------------------------------------------------------ UElement

UElement::UElement(AlgebraPtr a) : alg_(std::move(a))
{
    if (alg_ && alg_->kind() == CoeffAlgebra::Kind::matrix) entries_.resize(std::size_t(alg_->N() * alg_->N()));
}

UElement UElement::one(const AlgebraPtr& a) { return scalar(a, Scalar(1)); }

UElement UElement::scalar(const AlgebraPtr& a, const Scalar& c)
{
    UElement r(a);
    if (c.is_zero()) return r;
    if (a->kind() == CoeffAlgebra::Kind::matrix)
        for (int i = 0; i < a->N(); ++i) r.entries_[std::size_t(i * a->N() + i)] = c;
    else
        r.terms_.emplace(Word{}, c);
    return r;
}

UElement UElement::generator(const AlgebraPtr& a, int block, int code, const Scalar& c)
{
    if (a->kind() != CoeffAlgebra::Kind::heisenberg) throw Error(ErrorKind::InstanceMismatch, "generators need a heisenberg algebra");
    if (block < 0 || block >= a->blocks()) throw Error(ErrorKind::Invalid, "block index out of range");
    return word(a, Word{Gen{block, code}}, c);
}

UElement UElement::matrix_unit(const AlgebraPtr& a, int i, int j, const Scalar& c)
{
    if (a->kind() != CoeffAlgebra::Kind::matrix) throw Error(ErrorKind::InstanceMismatch, "matrix units need a matrix algebra");
    if (i < 0 || j < 0 || i >= a->N() || j >= a->N()) throw Error(ErrorKind::Invalid, "matrix index out of range");
    UElement r(a);
    r.entries_[std::size_t(i * a->N() + j)] = c;
    return r;
}

namespace {

void accumulate(std::map<Word, Scalar>& acc, const Word& w, const Scalar& c)
{
    if (c.is_zero()) return;
    auto [it, fresh] = acc.try_emplace(w, c);
    if (!fresh) {
        it->second += c;
        if (it->second.is_zero()) acc.erase(it);
    }
}

// (normal-ordered w) * beta_g, accumulated with coefficient c
void times_generator(const CoeffAlgebra& A, const Word& w, const Scalar& c, const Gen& g, std::map<Word, Scalar>& out)
{
    // move g leftwards past every generator that sorts after it
    std::size_t r = w.size(), pos = r;
    while (pos > 0 && g < w[pos - 1]) --pos;
    for (std::size_t k = pos; k < r; ++k) {
        const Scalar& ac = A.anticommutator(w[k], g);
        if (ac.is_zero()) continue;
        // beta_{w_k} beta_g = -beta_g beta_{w_k} + {.,.}; g has already passed r-1-k generators
        Word rest;
        rest.reserve(r - 1);
        for (std::size_t j = 0; j < r; ++j)
            if (j != k) rest.push_back(w[j]);
        Scalar coef = c * ac;
        if ((r - 1 - k) % 2) coef = -coef;
        accumulate(out, rest, coef);
    }
    if (pos > 0 && w[pos - 1] == g) return; // beta_g^2 = 0
    Word ins;
    ins.reserve(r + 1);
    ins.insert(ins.end(), w.begin(), w.begin() + long(pos));
    ins.push_back(g);
    ins.insert(ins.end(), w.begin() + long(pos), w.end());
    accumulate(out, ins, (r - pos) % 2 ? -c : c);
}

} // namespace

UElement UElement::word(const AlgebraPtr& a, const Word& w, const Scalar& c)
{
    if (a->kind() != CoeffAlgebra::Kind::heisenberg) throw Error(ErrorKind::InstanceMismatch, "words need a heisenberg algebra");
    // build by successive right multiplication so that any order is accepted
    std::map<Word, Scalar> cur{{Word{}, c}};
    for (auto& g : w) {
        std::map<Word, Scalar> next;
        for (auto& [u, cu] : cur) times_generator(*a, u, cu, g, next);
        cur.swap(next);
    }
    UElement r(a);
    r.terms_ = std::move(cur);
    return r;
}

bool UElement::is_zero() const
{
    if (!alg_) return true;
    if (alg_->kind() == CoeffAlgebra::Kind::matrix)
        return std::all_of(entries_.begin(), entries_.end(), [](const Scalar& s) { return s.is_zero(); });
    return terms_.empty();
}

void UElement::check(const UElement& o, const char* where) const
{
    if (!alg_ || !o.alg_ || !alg_->same_instance(*o.alg_))
        throw Error(ErrorKind::InstanceMismatch, std::string(where) + ": elements of different algebras");
}

UElement UElement::operator-() const
{
    UElement r(*this);
    for (auto& [w, c] : r.terms_) c = -c;
    for (auto& c : r.entries_) c = -c;
    return r;
}

UElement& UElement::operator+=(const UElement& o)
{
    if (!alg_) { *this = o; return *this; }
    if (!o.alg_) return *this;
    check(o, "add");
    for (auto& [w, c] : o.terms_) accumulate(terms_, w, c);
    for (std::size_t k = 0; k < entries_.size(); ++k) entries_[k] += o.entries_[k];
    return *this;
}

UElement& UElement::operator-=(const UElement& o)
{
    if (!o.alg_) return *this;
    return *this += -o;
}

UElement UElement::operator*(const Scalar& s) const
{
    UElement r(alg_);
    if (s.is_zero()) return r;
    for (auto& [w, c] : terms_) r.terms_.emplace(w, c * s);
    for (std::size_t k = 0; k < entries_.size(); ++k) r.entries_[k] = entries_[k] * s;
    return r;
}

UElement UElement::operator*(const UElement& o) const
{
    check(o, "mul");
    UElement r(alg_);
    if (alg_->kind() == CoeffAlgebra::Kind::matrix) {
        int N = alg_->N();
        for (int i = 0; i < N; ++i)
            for (int k = 0; k < N; ++k) {
                const Scalar& a = entries_[std::size_t(i * N + k)];
                if (a.is_zero()) continue;
                for (int j = 0; j < N; ++j) {
                    const Scalar& b = o.entries_[std::size_t(k * N + j)];
                    if (!b.is_zero()) r.entries_[std::size_t(i * N + j)] += a * b;
                }
            }
        return r;
    }
    for (auto& [w1, c1] : terms_)
        for (auto& [w2, c2] : o.terms_) {
            std::map<Word, Scalar> cur{{w1, c1 * c2}};
            for (auto& g : w2) {
                std::map<Word, Scalar> next;
                for (auto& [u, cu] : cur) times_generator(*alg_, u, cu, g, next);
                cur.swap(next);
            }
            for (auto& [u, cu] : cur) accumulate(r.terms_, u, cu);
        }
    return r;
}

UElement UElement::truncate(int k) const
{
    if (!alg_ || alg_->kind() == CoeffAlgebra::Kind::matrix) return *this; // discrete: the ideals are zero
    UElement r(alg_);
    for (auto& [w, c] : terms_) {
        bool deep = false;
        for (auto& g : w) deep = deep || (g.annihilation() && alg_->level(g) >= k);
        if (!deep) r.terms_.emplace(w, c);
    }
    return r;
}

bool UElement::is_central() const
{
    if (!alg_) return true;
    if (alg_->kind() == CoeffAlgebra::Kind::matrix) {
        int N = alg_->N();
        for (int i = 0; i < N; ++i)
            for (int j = 0; j < N; ++j) {
                const Scalar& e = entries_[std::size_t(i * N + j)];
                if (i != j ? !e.is_zero() : e != entries_[0]) return false;
            }
        return true;
    }
    return terms_.empty() || (terms_.size() == 1 && terms_.begin()->first.empty());
}

Scalar UElement::central_part() const
{
    if (!alg_) return Scalar();
    if (alg_->kind() == CoeffAlgebra::Kind::matrix) {
        Scalar tr;
        for (int i = 0; i < alg_->N(); ++i) tr += entries_[std::size_t(i * alg_->N() + i)];
        return tr * Scalar(mpq_class(1, alg_->N()));
    }
    auto it = terms_.find(Word{});
    return it == terms_.end() ? Scalar() : it->second;
}

UElement UElement::noncentral_part() const { return *this - scalar(alg_, central_part()); }

UElement UElement::even_part() const
{
    if (!alg_ || alg_->kind() == CoeffAlgebra::Kind::matrix) return *this;
    UElement r(alg_);
    for (auto& [w, c] : terms_)
        if (w.size() % 2 == 0) r.terms_.emplace(w, c);
    return r;
}

UElement UElement::odd_part() const
{
    UElement r(alg_);
    if (!alg_ || alg_->kind() == CoeffAlgebra::Kind::matrix) return r;
    for (auto& [w, c] : terms_)
        if (w.size() % 2) r.terms_.emplace(w, c);
    return r;
}

int UElement::min_level() const
{
    int m = INT_MAX;
    if (!alg_ || alg_->kind() == CoeffAlgebra::Kind::matrix) return m;
    for (auto& [w, c] : terms_)
        if (!w.empty()) m = std::min(m, alg_->level(w.front()));
    return m;
}

int UElement::max_word_length() const
{
    int m = 0;
    for (auto& [w, c] : terms_) m = std::max(m, int(w.size()));
    return m;
}

UElement UElement::substituted(const AlgebraPtr& target, const Substitution& s) const
{
    UElement r(target);
    for (auto& [w, c] : terms_) accumulate(r.terms_, w, specialize(c, s));
    for (std::size_t k = 0; k < entries_.size(); ++k) r.entries_[k] = specialize(entries_[k], s);
    return r;
}

bool UElement::operator==(const UElement& o) const
{
    if (is_zero() && o.is_zero()) return true;
    if (!alg_ || !o.alg_ || !alg_->same_instance(*o.alg_)) return false;
    return terms_ == o.terms_ && entries_ == o.entries_;
}

std::string word_str(const Word& w)
{
    std::string out;
    for (auto& g : w) {
        if (!out.empty()) out += " ";
        out += "b";
        if (g.block) out += std::to_string(g.block) + ":";
        out += "[" + std::to_string(g.code) + "]";
    }
    return out.empty() ? "1" : out;
}

std::string UElement::str() const
{
    if (is_zero()) return "0";
    std::string out;
    if (alg_->kind() == CoeffAlgebra::Kind::matrix) {
        int N = alg_->N();
        for (int i = 0; i < N; ++i)
            for (int j = 0; j < N; ++j) {
                const Scalar& e = entries_[std::size_t(i * N + j)];
                if (e.is_zero()) continue;
                if (!out.empty()) out += " + ";
                out += "(" + e.str() + ")*E" + std::to_string(i + 1) + std::to_string(j + 1);
            }
        return out;
    }
    for (auto& [w, c] : terms_) {
        if (!out.empty()) out += " + ";
        out += "(" + c.str() + ")*" + word_str(w);
    }
    return out;
}

UElement u_mul(const UElement& x, const UElement& y) { return x * y; }

UElement supercommutator(const UElement& x, const UElement& y)
{
    UElement xe = x.even_part(), xo = x.odd_part(), ye = y.even_part(), yo = y.odd_part();
    return x * y - ye * x - yo * xe + yo * xo;
}

UElement beta(const PhiSeries& f, const AlgebraPtr& a, int block)
{
    if (a->kind() != CoeffAlgebra::Kind::heisenberg) throw Error(ErrorKind::InstanceMismatch, "beta needs a heisenberg algebra");
    if (!f.config().same_roots(a->block_config(block))) throw Error(ErrorKind::ConfigMismatch, "beta: series over other points");
    UElement r(a);
    for (auto& [code, c] : f.coeffs()) r += UElement::generator(a, block, code, c);
    return r;
}

} // namespace chiral
