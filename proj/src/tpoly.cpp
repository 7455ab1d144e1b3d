#include "chiral/tpoly.hpp"

#include <algorithm>

namespace chiral {

TPoly TPoly::operator-() const
{
    TPoly r(*this);
    for (auto& c : r.c_) c = -c;
    return r;
}

TPoly& TPoly::operator+=(const TPoly& o)
{
    if (o.c_.size() > c_.size()) c_.resize(o.c_.size());
    for (std::size_t k = 0; k < o.c_.size(); ++k) c_[k] += o.c_[k];
    trim();
    return *this;
}

TPoly& TPoly::operator-=(const TPoly& o)
{
    if (o.c_.size() > c_.size()) c_.resize(o.c_.size());
    for (std::size_t k = 0; k < o.c_.size(); ++k) c_[k] -= o.c_[k];
    trim();
    return *this;
}

TPoly TPoly::operator*(const TPoly& o) const
{
    if (is_zero() || o.is_zero()) return TPoly();
    std::vector<Scalar> r(c_.size() + o.c_.size() - 1);
    for (std::size_t i = 0; i < c_.size(); ++i) {
        if (c_[i].is_zero()) continue;
        for (std::size_t j = 0; j < o.c_.size(); ++j)
            if (!o.c_[j].is_zero()) r[i + j] += c_[i] * o.c_[j];
    }
    return TPoly(std::move(r));
}

TPoly TPoly::operator*(const Scalar& s) const
{
    if (s.is_zero()) return TPoly();
    TPoly r(*this);
    for (auto& c : r.c_) c *= s;
    return r;
}

TPoly TPoly::shifted(int k) const
{
    if (is_zero()) return *this;
    std::vector<Scalar> r(static_cast<std::size_t>(k));
    r.insert(r.end(), c_.begin(), c_.end());
    return TPoly(std::move(r));
}

void TPoly::divmod(const TPoly& d, TPoly& q, TPoly& r) const
{
    if (d.is_zero()) throw Error(ErrorKind::DivisionByZero, "polynomial division by zero");
    r = *this;
    int dd = d.degree();
    if (degree() < dd) { q = TPoly(); return; }
    std::vector<Scalar> qc(static_cast<std::size_t>(degree() - dd + 1));
    bool monic = d.leading().is_one();
    Scalar inv = monic ? Scalar(1) : d.leading().inverse();
    while (!r.is_zero() && r.degree() >= dd) {
        int s = r.degree() - dd;
        Scalar c = monic ? r.leading() : r.leading() * inv;
        qc[std::size_t(s)] = c;
        for (int k = 0; k <= dd; ++k)
            if (!d.c_[std::size_t(k)].is_zero()) r.c_[std::size_t(k + s)] -= c * d.c_[std::size_t(k)];
        r.c_.back() = Scalar(); // exact cancellation of the leading term
        r.trim();
    }
    q = TPoly(std::move(qc));
}

TPoly TPoly::derivative() const
{
    if (c_.size() <= 1) return TPoly();
    std::vector<Scalar> r(c_.size() - 1);
    for (std::size_t k = 1; k < c_.size(); ++k) r[k - 1] = c_[k] * Scalar(long(k));
    return TPoly(std::move(r));
}

Scalar TPoly::eval(const Scalar& x) const
{
    Scalar acc;
    for (std::size_t k = c_.size(); k-- > 0;) acc = acc * x + c_[k];
    return acc;
}

TPoly TPoly::monic() const
{
    if (is_zero() || leading().is_one()) return *this;
    return *this * leading().inverse();
}

TPoly TPoly::map(Scalar (*fn)(const Scalar&, const void*), const void* ctx) const
{
    std::vector<Scalar> r;
    r.reserve(c_.size());
    for (auto& c : c_) r.push_back(fn(c, ctx));
    return TPoly(std::move(r));
}

TPoly pow(const TPoly& p, int e)
{
    TPoly r(Scalar(1)), b = p;
    while (e > 0) {
        if (e & 1) r = r * b;
        e >>= 1;
        if (e) b = b * b;
    }
    return r;
}

TPoly ext_gcd(const TPoly& a, const TPoly& b, TPoly& s)
{
    // invariant: r0 ≡ s0*a, r1 ≡ s1*a (mod b)
    TPoly r0 = a % b, r1 = b, s0(Scalar(1)), s1;
    std::swap(r0, r1);
    std::swap(s0, s1);
    // now r0 = b (s0 = 0), r1 = a mod b (s1 = 1)
    while (!r1.is_zero()) {
        TPoly q, r;
        r0.divmod(r1, q, r);
        TPoly sn = s0 - q * s1;
        r0 = std::move(r1);
        r1 = std::move(r);
        s0 = std::move(s1);
        s1 = std::move(sn);
    }
    Scalar inv = r0.leading().inverse();
    s = (s0 * inv) % b;
    return r0 * inv;
}

} // namespace chiral
