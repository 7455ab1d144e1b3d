#pragma once

#include <vector>

#include "chiral/scalar.hpp"

namespace chiral {

// Dense polynomial in t with Scalar coefficients; c[k] is the t^k coefficient.
class TPoly {
public:
    TPoly() = default;
    TPoly(const Scalar& c) { if (!c.is_zero()) c_.push_back(c); }
    explicit TPoly(std::vector<Scalar> c) : c_(std::move(c)) { trim(); }
    static TPoly t() { return TPoly({Scalar(0), Scalar(1)}); }
    static TPoly linear(const Scalar& root) { return TPoly({-root, Scalar(1)}); } // t - root

    int degree() const { return int(c_.size()) - 1; }
    bool is_zero() const { return c_.empty(); }
    const std::vector<Scalar>& coeffs() const { return c_; }
    Scalar coeff(int k) const { return k >= 0 && k < int(c_.size()) ? c_[std::size_t(k)] : Scalar(); }
    const Scalar& leading() const { return c_.back(); }

    TPoly operator-() const;
    TPoly& operator+=(const TPoly& o);
    TPoly& operator-=(const TPoly& o);
    TPoly operator+(const TPoly& o) const { TPoly r(*this); r += o; return r; }
    TPoly operator-(const TPoly& o) const { TPoly r(*this); r -= o; return r; }
    TPoly operator*(const TPoly& o) const;
    TPoly operator*(const Scalar& s) const;
    TPoly shifted(int k) const; // times t^k, k >= 0

    // division with remainder; divisor must be nonzero
    void divmod(const TPoly& d, TPoly& q, TPoly& r) const;
    TPoly operator%(const TPoly& d) const { TPoly q, r; divmod(d, q, r); return r; }
    TPoly derivative() const;
    Scalar eval(const Scalar& x) const;
    TPoly monic() const;
    TPoly map(Scalar (*fn)(const Scalar&, const void*), const void* ctx) const;

    bool operator==(const TPoly& o) const { return c_ == o.c_; }
    bool operator!=(const TPoly& o) const { return !(c_ == o.c_); }

private:
    void trim() { while (!c_.empty() && c_.back().is_zero()) c_.pop_back(); }
    std::vector<Scalar> c_;
};

TPoly pow(const TPoly& p, int e);
// returns gcd (monic) and s with s*a ≡ gcd (mod b)
TPoly ext_gcd(const TPoly& a, const TPoly& b, TPoly& s);

} // namespace chiral
