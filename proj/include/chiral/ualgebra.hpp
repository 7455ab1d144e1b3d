#pragma once

// Coefficient algebras U for fields: a multipoint Heisenberg-type algebra
// on the phi^+ basis (odd generators, left-ideal truncation by
// annihilation depth) and a plain matrix algebra with discrete topology.

#include <map>
#include <memory>
#include <string>
#include <vector>

#include "chiral/sigma.hpp"

namespace chiral {

// generator beta_{code} of block `block`
struct Gen {
    int block = 0;
    int code = 0;
    bool annihilation() const { return code >= 0; }
    // normal order: creation block first, then (block, code)
    bool operator<(const Gen& o) const
    {
        if (annihilation() != o.annihilation()) return !annihilation();
        return block != o.block ? block < o.block : code < o.code;
    }
    bool operator==(const Gen& o) const { return block == o.block && code == o.code; }
};

using Word = std::vector<Gen>;

class CoeffAlgebra;
using AlgebraPtr = std::shared_ptr<const CoeffAlgebra>;

class CoeffAlgebra {
public:
    enum class Kind { heisenberg, matrix };

    // one block per point configuration; generators of different blocks
    // anticommute
    static AlgebraPtr heisenberg(const SigmaConfig& cfg, int K);
    static AlgebraPtr heisenberg(const std::vector<SigmaConfig>& blocks, int K);
    static AlgebraPtr matrix(int N);

    Kind kind() const { return kind_; }
    int K() const { return K_; }
    int N() const { return N_; }
    int blocks() const { return int(blocks_.size()); }
    const SigmaConfig& block_config(int b) const { return blocks_.at(std::size_t(b)); }

    int level(const Gen& g) const { return floor_div(g.code, blocks_[std::size_t(g.block)].n()); }
    // {beta_x, beta_y}
    const Scalar& anticommutator(const Gen& x, const Gen& y) const;

    bool same_instance(const CoeffAlgebra& o) const;
    AlgebraPtr substituted(const Substitution& s) const;
    std::string str() const;

private:
    CoeffAlgebra() = default;
    Kind kind_ = Kind::matrix;
    int K_ = 1, N_ = 0;
    std::vector<SigmaConfig> blocks_;
    // per block: Res(pi_i pi_j / phi), n x n
    std::vector<std::vector<Scalar>> pairing_;
    Scalar zero_;
};

class UElement {
public:
    UElement() = default;
    explicit UElement(AlgebraPtr a);

    static UElement zero(const AlgebraPtr& a) { return UElement(a); }
    static UElement one(const AlgebraPtr& a);
    static UElement scalar(const AlgebraPtr& a, const Scalar& c);
    static UElement generator(const AlgebraPtr& a, int block, int code, const Scalar& c = Scalar(1));
    static UElement matrix_unit(const AlgebraPtr& a, int i, int j, const Scalar& c = Scalar(1));
    static UElement word(const AlgebraPtr& a, const Word& w, const Scalar& c = Scalar(1));

    const AlgebraPtr& algebra() const { return alg_; }
    bool is_zero() const;
    const std::map<Word, Scalar>& terms() const { return terms_; } // heisenberg
    const std::vector<Scalar>& entries() const { return entries_; } // matrix, row-major

    UElement operator-() const;
    UElement& operator+=(const UElement& o);
    UElement& operator-=(const UElement& o);
    UElement operator+(const UElement& o) const { UElement r(*this); r += o; return r; }
    UElement operator-(const UElement& o) const { UElement r(*this); r -= o; return r; }
    UElement operator*(const UElement& o) const;
    UElement operator*(const Scalar& s) const;

    // projection along the level-k truncation ideal
    UElement truncate(int k) const;
    bool is_zero_at_level(int k) const { return truncate(k).is_zero(); }
    // scalar multiple of the unit?
    bool is_central() const;
    Scalar central_part() const;
    UElement noncentral_part() const;
    // parity components (matrix elements are even)
    UElement even_part() const;
    UElement odd_part() const;
    // smallest generator level occurring (INT_MAX if none)
    int min_level() const;
    int max_word_length() const;

    UElement substituted(const AlgebraPtr& target, const Substitution& s) const;

    bool operator==(const UElement& o) const;
    bool operator!=(const UElement& o) const { return !(*this == o); }
    std::string str() const;

private:
    void check(const UElement& o, const char* where) const;
    AlgebraPtr alg_;
    std::map<Word, Scalar> terms_;
    std::vector<Scalar> entries_;
};

// super-commutator x y - (-1)^{|x||y|} y x on homogeneous parts
UElement supercommutator(const UElement& x, const UElement& y);
UElement u_mul(const UElement& x, const UElement& y);

// the beta generator map on the plus basis of block b
UElement beta(const PhiSeries& f, const AlgebraPtr& a, int block = 0);

std::string word_str(const Word& w);

} // namespace chiral
