#pragma once

// Exact arithmetic in Q(a1,...,an): multivariate polynomials with rational
// coefficients and reduced fractions of them.

#include <gmpxx.h>

#include <cstdint>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "chiral/error.hpp"

namespace chiral {

constexpr int kMaxVars = 8;

// Parameter names are interned process-wide; index order is first-use order.
int var_index(const std::string& name);
const std::string& var_name(int index);
int var_count();

// Exponent vector packed one byte per variable, variable 0 in the top byte,
// so integer comparison of the packed word is lex order.
struct Monomial {
    std::uint64_t bits = 0;

    static Monomial var(int v, int e = 1);
    int exponent(int v) const { return int((bits >> (8 * (kMaxVars - 1 - v))) & 0xff); }
    int degree() const;
    bool is_one() const { return bits == 0; }
    Monomial operator*(Monomial o) const;
    bool divides(Monomial o) const;
    Monomial operator/(Monomial o) const;
    bool operator==(const Monomial& o) const { return bits == o.bits; }
    bool operator!=(const Monomial& o) const { return bits != o.bits; }
};

// graded lex; true when a sorts before b in descending term order
bool grlex_greater(Monomial a, Monomial b);

class Polynomial {
public:
    using Term = std::pair<Monomial, mpq_class>;

    Polynomial() = default;
    Polynomial(long c);
    Polynomial(const mpq_class& c);
    static Polynomial variable(int v);
    static Polynomial variable(const std::string& name) { return variable(var_index(name)); }

    bool is_zero() const { return terms_.empty(); }
    bool is_constant() const { return terms_.empty() || (terms_.size() == 1 && terms_[0].first.is_one()); }
    mpq_class constant_value() const { return terms_.empty() ? mpq_class(0) : terms_[0].second; }
    bool is_one() const { return terms_.size() == 1 && terms_[0].first.is_one() && terms_[0].second == 1; }

    const std::vector<Term>& terms() const { return terms_; }
    const Term& leading() const { return terms_.front(); }
    int total_degree() const;
    int degree_in(int v) const;
    // highest variable index occurring, -1 for constants
    int main_variable() const;
    std::vector<int> variables() const;

    Polynomial operator-() const;
    Polynomial& operator+=(const Polynomial& o);
    Polynomial& operator-=(const Polynomial& o);
    Polynomial operator+(const Polynomial& o) const { Polynomial r(*this); r += o; return r; }
    Polynomial operator-(const Polynomial& o) const { Polynomial r(*this); r -= o; return r; }
    Polynomial operator*(const Polynomial& o) const;
    Polynomial scaled(const mpq_class& c) const;
    Polynomial times_monomial(Monomial m, const mpq_class& c) const;

    // exact division; throws Invalid if d does not divide *this
    Polynomial divide_exact(const Polynomial& d) const;
    bool divides_into(const Polynomial& num, Polynomial* quotient) const;

    // scale so the grlex-leading coefficient is 1
    Polynomial monic() const;

    // coefficients as a polynomial in variable v
    std::map<int, Polynomial> coefficients_in(int v) const;
    static Polynomial from_coefficients_in(int v, const std::map<int, Polynomial>& c);

    bool operator==(const Polynomial& o) const;
    bool operator!=(const Polynomial& o) const { return !(*this == o); }

    std::string str() const;
    std::size_t hash() const;

private:
    friend class PolyBuilder;
    std::vector<Term> terms_; // sorted descending grlex, no zeros
};

Polynomial poly_gcd(const Polynomial& a, const Polynomial& b);
Polynomial pow(const Polynomial& p, int e);

class Scalar {
public:
    Scalar() : den_(1) {}
    Scalar(long c) : num_(c), den_(1) {}
    Scalar(const mpq_class& c) : num_(c), den_(1) {}
    Scalar(const Polynomial& p) : num_(p), den_(1) {}
    Scalar(const Polynomial& num, const Polynomial& den); // normalizes

    static Scalar param(const std::string& name) { return Scalar(Polynomial::variable(name)); }

    const Polynomial& num() const { return num_; }
    const Polynomial& den() const { return den_; }
    bool is_zero() const { return num_.is_zero(); }
    bool is_one() const { return num_.is_one() && den_.is_one(); }
    bool is_polynomial() const { return den_.is_one(); }
    bool is_rational() const { return num_.is_constant() && den_.is_one(); }
    mpq_class rational() const; // requires is_rational()

    Scalar operator-() const;
    Scalar& operator+=(const Scalar& o);
    Scalar& operator-=(const Scalar& o);
    Scalar& operator*=(const Scalar& o);
    Scalar& operator/=(const Scalar& o);
    Scalar operator+(const Scalar& o) const { Scalar r(*this); r += o; return r; }
    Scalar operator-(const Scalar& o) const { Scalar r(*this); r -= o; return r; }
    Scalar operator*(const Scalar& o) const { Scalar r(*this); r *= o; return r; }
    Scalar operator/(const Scalar& o) const { Scalar r(*this); r /= o; return r; }
    Scalar inverse() const;

    bool operator==(const Scalar& o) const { return num_ == o.num_ && den_ == o.den_; }
    bool operator!=(const Scalar& o) const { return !(*this == o); }

    // fully parenthesized text, parsed back by parse_scalar
    std::string str() const;
    std::size_t hash() const { return num_.hash() * 1000003u ^ den_.hash(); }

private:
    Polynomial num_, den_;
};

Scalar parse_scalar(const std::string& text);

// Assignment of rational values to parameters.
class Substitution {
public:
    Substitution() = default;
    Substitution(std::initializer_list<std::pair<const std::string, mpq_class>> init) : values_(init) {}

    void set(const std::string& name, const mpq_class& value) { values_[name] = value; }
    bool binds(const std::string& name) const { return values_.count(name) != 0; }
    const mpq_class& at(const std::string& name) const;
    const std::map<std::string, mpq_class>& values() const { return values_; }
    bool empty() const { return values_.empty(); }
    std::string str() const;

    bool operator==(const Substitution& o) const { return values_ == o.values_; }
    bool operator<(const Substitution& o) const { return values_ < o.values_; }

private:
    std::map<std::string, mpq_class> values_;
};

// Full evaluation to a rational number.
mpq_class substitute(const Scalar& x, const Substitution& s);
mpq_class substitute(const Polynomial& p, const Substitution& s);
// Partial evaluation: bound parameters replaced, others kept.
Scalar specialize(const Scalar& x, const Substitution& s);
Polynomial specialize(const Polynomial& p, const Substitution& s);
// General parameter substitution a_v -> image[v] (unlisted variables kept).
Scalar compose(const Scalar& x, const std::map<int, Scalar>& image);

std::string rational_str(const mpq_class& q);

} // namespace chiral
