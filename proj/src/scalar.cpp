#include "chiral/scalar.hpp"

#include <algorithm>
#include <cctype>
#include <mutex>
#include <sstream>

namespace chiral {

const char* error_kind_name(ErrorKind k)
{
    switch (k) {
    case ErrorKind::DivisionByZero: return "DivisionByZero";
    case ErrorKind::DenominatorVanishes: return "DenominatorVanishes";
    case ErrorKind::UnboundParameter: return "UnboundParameter";
    case ErrorKind::ConfigMismatch: return "ConfigMismatch";
    case ErrorKind::OrientationMismatch: return "OrientationMismatch";
    case ErrorKind::OrientationUnsupported: return "OrientationUnsupported";
    case ErrorKind::WindowTooSmall: return "WindowTooSmall";
    case ErrorKind::InstanceMismatch: return "InstanceMismatch";
    case ErrorKind::CollidingPoints: return "CollidingPoints";
    case ErrorKind::CollidingBlocks: return "CollidingBlocks";
    case ErrorKind::TruncationIncompatible: return "TruncationIncompatible";
    case ErrorKind::NotLocalAtWindow: return "NotLocalAtWindow";
    case ErrorKind::NotLocal: return "NotLocal";
    case ErrorKind::Parse: return "ParseError";
    case ErrorKind::Overflow: return "Overflow";
    case ErrorKind::Invalid: return "Invalid";
    }
    return "Error";
}

// ---------------------------------------------------------------- variables

namespace {

struct VarTable {
    std::mutex mu;
    std::vector<std::string> names;
};

VarTable& vars()
{
    static VarTable t;
    return t;
}

} // namespace

int var_index(const std::string& name)
{
    auto& t = vars();
    std::lock_guard<std::mutex> lk(t.mu);
    for (std::size_t i = 0; i < t.names.size(); ++i)
        if (t.names[i] == name) return int(i);
    if (int(t.names.size()) >= kMaxVars)
        throw Error(ErrorKind::Overflow, "too many distinct parameters (max 8): " + name);
    t.names.push_back(name);
    return int(t.names.size()) - 1;
}

const std::string& var_name(int index)
{
    auto& t = vars();
    std::lock_guard<std::mutex> lk(t.mu);
    return t.names.at(std::size_t(index));
}

int var_count()
{
    auto& t = vars();
    std::lock_guard<std::mutex> lk(t.mu);
    return int(t.names.size());
}

// ---------------------------------------------------------------- monomials

namespace {
constexpr std::uint64_t kHigh = 0x8080808080808080ull;
}

Monomial Monomial::var(int v, int e)
{
    if (e < 0 || e > 255) throw Error(ErrorKind::Overflow, "exponent out of range");
    return Monomial{std::uint64_t(e) << (8 * (kMaxVars - 1 - v))};
}

int Monomial::degree() const
{
    int d = 0;
    for (std::uint64_t b = bits; b; b >>= 8) d += int(b & 0xff);
    return d;
}

Monomial Monomial::operator*(Monomial o) const
{
    if (((bits | o.bits) & kHigh) != 0) {
        for (int v = 0; v < kMaxVars; ++v)
            if (exponent(v) + o.exponent(v) > 255) throw Error(ErrorKind::Overflow, "monomial exponent overflow");
    }
    return Monomial{bits + o.bits};
}

bool Monomial::divides(Monomial o) const
{
    for (int v = 0; v < kMaxVars; ++v)
        if (exponent(v) > o.exponent(v)) return false;
    return true;
}

Monomial Monomial::operator/(Monomial o) const { return Monomial{bits - o.bits}; }

bool grlex_greater(Monomial a, Monomial b)
{
    int da = a.degree(), db = b.degree();
    if (da != db) return da > db;
    return a.bits > b.bits;
}

// -------------------------------------------------------------- polynomials

Polynomial::Polynomial(long c)
{
    if (c != 0) terms_.emplace_back(Monomial{}, mpq_class(c));
}

Polynomial::Polynomial(const mpq_class& c)
{
    if (c != 0) terms_.emplace_back(Monomial{}, c);
}

Polynomial Polynomial::variable(int v)
{
    Polynomial p;
    p.terms_.emplace_back(Monomial::var(v), mpq_class(1));
    return p;
}

int Polynomial::total_degree() const { return terms_.empty() ? -1 : terms_.front().first.degree(); }

int Polynomial::degree_in(int v) const
{
    int d = terms_.empty() ? -1 : 0;
    for (auto& t : terms_) d = std::max(d, t.first.exponent(v));
    return d;
}

int Polynomial::main_variable() const
{
    int best = -1;
    for (auto& t : terms_)
        for (int v = kMaxVars - 1; v > best; --v)
            if (t.first.exponent(v)) { best = v; break; }
    return best;
}

std::vector<int> Polynomial::variables() const
{
    std::uint64_t all = 0;
    for (auto& t : terms_) all |= t.first.bits;
    std::vector<int> out;
    for (int v = 0; v < kMaxVars; ++v)
        if ((all >> (8 * (kMaxVars - 1 - v))) & 0xff) out.push_back(v);
    return out;
}

Polynomial Polynomial::operator-() const
{
    Polynomial r(*this);
    for (auto& t : r.terms_) t.second = -t.second;
    return r;
}

namespace {

void merge_add(std::vector<Polynomial::Term>& out, const std::vector<Polynomial::Term>& a,
               const std::vector<Polynomial::Term>& b, bool negate_b)
{
    out.clear();
    out.reserve(a.size() + b.size());
    std::size_t i = 0, j = 0;
    while (i < a.size() || j < b.size()) {
        if (j == b.size() || (i < a.size() && grlex_greater(a[i].first, b[j].first))) {
            out.push_back(a[i++]);
        } else if (i == a.size() || grlex_greater(b[j].first, a[i].first)) {
            out.push_back(b[j++]);
            if (negate_b) out.back().second = -out.back().second;
        } else {
            mpq_class c = negate_b ? mpq_class(a[i].second - b[j].second) : mpq_class(a[i].second + b[j].second);
            if (c != 0) out.emplace_back(a[i].first, std::move(c));
            ++i;
            ++j;
        }
    }
}

bool term_order(const Polynomial::Term& x, const Polynomial::Term& y) { return grlex_greater(x.first, y.first); }

} // namespace

Polynomial& Polynomial::operator+=(const Polynomial& o)
{
    if (o.terms_.empty()) return *this;
    if (terms_.empty()) { terms_ = o.terms_; return *this; }
    std::vector<Term> out;
    merge_add(out, terms_, o.terms_, false);
    terms_.swap(out);
    return *this;
}

Polynomial& Polynomial::operator-=(const Polynomial& o)
{
    if (o.terms_.empty()) return *this;
    std::vector<Term> out;
    merge_add(out, terms_, o.terms_, true);
    terms_.swap(out);
    return *this;
}

Polynomial Polynomial::operator*(const Polynomial& o) const
{
    Polynomial r;
    if (terms_.empty() || o.terms_.empty()) return r;
    if (o.is_constant()) return scaled(o.terms_[0].second);
    if (is_constant()) return o.scaled(terms_[0].second);
    std::vector<Term> prods;
    prods.reserve(terms_.size() * o.terms_.size());
    for (auto& x : terms_)
        for (auto& y : o.terms_) prods.emplace_back(x.first * y.first, x.second * y.second);
    std::sort(prods.begin(), prods.end(), term_order);
    for (auto& t : prods) {
        if (!r.terms_.empty() && r.terms_.back().first == t.first)
            r.terms_.back().second += t.second;
        else {
            if (!r.terms_.empty() && r.terms_.back().second == 0) r.terms_.pop_back();
            r.terms_.push_back(std::move(t));
        }
    }
    if (!r.terms_.empty() && r.terms_.back().second == 0) r.terms_.pop_back();
    return r;
}

Polynomial Polynomial::scaled(const mpq_class& c) const
{
    Polynomial r;
    if (c == 0) return r;
    r.terms_ = terms_;
    if (c != 1)
        for (auto& t : r.terms_) t.second *= c;
    return r;
}

Polynomial Polynomial::times_monomial(Monomial m, const mpq_class& c) const
{
    Polynomial r;
    if (c == 0) return r;
    r.terms_.reserve(terms_.size());
    for (auto& t : terms_) r.terms_.emplace_back(t.first * m, t.second * c);
    return r;
}

bool Polynomial::divides_into(const Polynomial& num, Polynomial* quotient) const
{
    if (is_zero()) throw Error(ErrorKind::DivisionByZero, "polynomial division by zero");
    Polynomial r = num, q;
    const Term& lt = terms_.front();
    while (!r.is_zero()) {
        const Term& rt = r.terms_.front();
        if (!lt.first.divides(rt.first)) return false;
        Monomial m = rt.first / lt.first;
        mpq_class c = rt.second / lt.second;
        q.terms_.emplace_back(m, c);
        r -= times_monomial(m, c);
    }
    if (quotient) *quotient = std::move(q);
    return true;
}

Polynomial Polynomial::divide_exact(const Polynomial& d) const
{
    Polynomial q;
    if (!d.divides_into(*this, &q)) throw Error(ErrorKind::Invalid, "inexact polynomial division");
    return q;
}

Polynomial Polynomial::monic() const
{
    if (terms_.empty()) return *this;
    mpq_class c = terms_.front().second;
    if (c == 1) return *this;
    return scaled(1 / c);
}

std::map<int, Polynomial> Polynomial::coefficients_in(int v) const
{
    std::map<int, Polynomial> out;
    for (auto& t : terms_) {
        int e = t.first.exponent(v);
        Monomial rest{t.first.bits - Monomial::var(v, e).bits};
        out[e].terms_.emplace_back(rest, t.second);
    }
    // sub-lists inherit a valid order: removing the same power of v from
    // monomials of equal v-exponent preserves grlex order
    return out;
}

Polynomial Polynomial::from_coefficients_in(int v, const std::map<int, Polynomial>& c)
{
    Polynomial r;
    for (auto& [e, p] : c) r += p.times_monomial(Monomial::var(v, e), 1);
    return r;
}

bool Polynomial::operator==(const Polynomial& o) const
{
    if (terms_.size() != o.terms_.size()) return false;
    for (std::size_t i = 0; i < terms_.size(); ++i)
        if (terms_[i].first != o.terms_[i].first || terms_[i].second != o.terms_[i].second) return false;
    return true;
}

std::string rational_str(const mpq_class& q)
{
    if (q.get_den() == 1) return q.get_num().get_str();
    return q.get_num().get_str() + "/" + q.get_den().get_str();
}

std::string Polynomial::str() const
{
    if (terms_.empty()) return "0";
    std::string out;
    for (std::size_t k = 0; k < terms_.size(); ++k) {
        const auto& [m, c] = terms_[k];
        std::string coef = rational_str(c);
        bool wrap = c < 0 || c.get_den() != 1;
        std::string vars_part;
        for (int v = 0; v < kMaxVars; ++v) {
            int e = m.exponent(v);
            if (!e) continue;
            if (!vars_part.empty()) vars_part += "*";
            vars_part += var_name(v);
            if (e > 1) vars_part += "^" + std::to_string(e);
        }
        std::string term;
        if (vars_part.empty())
            term = wrap ? "(" + coef + ")" : coef;
        else if (c == 1)
            term = vars_part;
        else
            term = (wrap ? "(" + coef + ")" : coef) + "*" + vars_part;
        if (k) out += " + ";
        out += term;
    }
    if (terms_.size() > 1) out = "(" + out + ")";
    return out;
}

std::size_t Polynomial::hash() const
{
    std::size_t h = 1469598103934665603ull;
    for (auto& [m, c] : terms_) {
        h ^= m.bits + 0x9e3779b97f4a7c15ull + (h << 6) + (h >> 2);
        h ^= std::size_t(mpz_get_si(c.get_num_mpz_t())) * 31 + std::size_t(mpz_get_ui(c.get_den_mpz_t()));
        h *= 1099511628211ull;
    }
    return h;
}

Polynomial pow(const Polynomial& p, int e)
{
    Polynomial r(1), b = p;
    while (e > 0) {
        if (e & 1) r = r * b;
        e >>= 1;
        if (e) b = b * b;
    }
    return r;
}

// --------------------------------------------------------------------- gcd

namespace {

// univariate view: index = degree in the main variable
using UPoly = std::vector<Polynomial>;

UPoly to_upoly(const Polynomial& p, int v)
{
    auto c = p.coefficients_in(v);
    UPoly u(c.empty() ? 0 : std::size_t(c.rbegin()->first + 1));
    for (auto& [e, q] : c) u[std::size_t(e)] = q;
    return u;
}

Polynomial from_upoly(const UPoly& u, int v)
{
    Polynomial r;
    for (std::size_t e = 0; e < u.size(); ++e)
        if (!u[e].is_zero()) r += u[e].times_monomial(Monomial::var(v, int(e)), 1);
    return r;
}

void trim(UPoly& u)
{
    while (!u.empty() && u.back().is_zero()) u.pop_back();
}

Polynomial content(const UPoly& u)
{
    Polynomial g;
    for (auto& c : u) {
        if (c.is_zero()) continue;
        g = g.is_zero() ? c.monic() : poly_gcd(g, c);
        if (g.is_constant()) return Polynomial(1);
    }
    return g;
}

UPoly primitive(const UPoly& u)
{
    Polynomial c = content(u);
    UPoly r(u.size());
    for (std::size_t i = 0; i < u.size(); ++i)
        r[i] = u[i].is_zero() || c.is_one() ? u[i] : u[i].divide_exact(c);
    // fix the rational scale too, otherwise PRS coefficients grow
    mpq_class s = 1 / r.back().leading().second;
    for (auto& p : r) p = p.scaled(s);
    return r;
}

UPoly pseudo_remainder(UPoly a, const UPoly& b)
{
    std::size_t db = b.size() - 1;
    const Polynomial& lb = b.back();
    while (!a.empty() && a.size() - 1 >= db) {
        std::size_t da = a.size() - 1;
        Polynomial la = a.back();
        for (auto& c : a) c = c * lb;
        for (std::size_t i = 0; i <= db; ++i) a[da - db + i] -= la * b[i];
        trim(a);
    }
    return a;
}

} // namespace

Polynomial poly_gcd(const Polynomial& a, const Polynomial& b)
{
    if (a.is_zero()) return b.monic();
    if (b.is_zero()) return a.monic();
    if (a.is_constant() || b.is_constant()) return Polynomial(1);
    if (a == b) return a.monic();
    int v = std::max(a.main_variable(), b.main_variable());
    int da = a.degree_in(v), db = b.degree_in(v);
    if (da == 0) return poly_gcd(a, content(to_upoly(b, v)));
    if (db == 0) return poly_gcd(content(to_upoly(a, v)), b);

    UPoly ua = to_upoly(a, v), ub = to_upoly(b, v);
    Polynomial ca = content(ua), cb = content(ub);
    Polynomial cg = poly_gcd(ca, cb);
    ua = primitive(ua);
    ub = primitive(ub);
    if (ua.size() < ub.size()) std::swap(ua, ub);
    while (!ub.empty()) {
        if (ub.size() == 1) { ua = UPoly{Polynomial(1)}; break; }
        UPoly r = pseudo_remainder(ua, ub);
        ua = std::move(ub);
        ub = r.empty() ? UPoly{} : primitive(r);
    }
    ua = primitive(ua);
    return (cg * from_upoly(ua, v)).monic();
}

// ------------------------------------------------------------------ scalars

Scalar::Scalar(const Polynomial& num, const Polynomial& den) : num_(num), den_(den)
{
    if (den_.is_zero()) throw Error(ErrorKind::DivisionByZero, "zero denominator");
    if (num_.is_zero()) { den_ = Polynomial(1); return; }
    if (den_.is_constant()) {
        num_ = num_.scaled(1 / den_.constant_value());
        den_ = Polynomial(1);
        return;
    }
    Polynomial g = poly_gcd(num_, den_);
    if (!g.is_one()) {
        num_ = num_.divide_exact(g);
        den_ = den_.divide_exact(g);
    }
    mpq_class lc = den_.leading().second;
    if (lc != 1) {
        num_ = num_.scaled(1 / lc);
        den_ = den_.scaled(1 / lc);
    }
}

mpq_class Scalar::rational() const
{
    if (!is_rational()) throw Error(ErrorKind::Invalid, "scalar is not a rational constant: " + str());
    return num_.constant_value();
}

Scalar Scalar::operator-() const
{
    Scalar r(*this);
    r.num_ = -r.num_;
    return r;
}

Scalar& Scalar::operator+=(const Scalar& o)
{
    if (o.is_zero()) return *this;
    if (den_.is_one() && o.den_.is_one()) { num_ += o.num_; return *this; }
    if (den_ == o.den_) { *this = Scalar(num_ + o.num_, den_); return *this; }
    *this = Scalar(num_ * o.den_ + o.num_ * den_, den_ * o.den_);
    return *this;
}

Scalar& Scalar::operator-=(const Scalar& o)
{
    if (o.is_zero()) return *this;
    if (den_.is_one() && o.den_.is_one()) { num_ -= o.num_; return *this; }
    if (den_ == o.den_) { *this = Scalar(num_ - o.num_, den_); return *this; }
    *this = Scalar(num_ * o.den_ - o.num_ * den_, den_ * o.den_);
    return *this;
}

Scalar& Scalar::operator*=(const Scalar& o)
{
    if (is_zero() || o.is_zero()) { *this = Scalar(); return *this; }
    if (o.is_rational()) { num_ = num_.scaled(o.num_.constant_value()); return *this; }
    if (is_rational()) { mpq_class c = num_.constant_value(); *this = o; num_ = num_.scaled(c); return *this; }
    if (den_.is_one() && o.den_.is_one()) { num_ = num_ * o.num_; return *this; }
    if (is_zero() || o.is_zero()) { *this = Scalar(); return *this; }
    *this = Scalar(num_ * o.num_, den_ * o.den_);
    return *this;
}

Scalar Scalar::inverse() const
{
    if (is_zero()) throw Error(ErrorKind::DivisionByZero, "inverse of zero");
    return Scalar(den_, num_);
}

Scalar& Scalar::operator/=(const Scalar& o)
{
    if (o.is_zero()) throw Error(ErrorKind::DivisionByZero, "division by zero scalar");
    if (o.is_rational()) {
        num_ = num_.scaled(1 / o.num_.constant_value());
        return *this;
    }
    *this = Scalar(num_ * o.den_, den_ * o.num_);
    return *this;
}

std::string Scalar::str() const
{
    if (den_.is_one()) return num_.str();
    auto wrap = [](const std::string& s) { return s.front() == '(' ? s : "(" + s + ")"; };
    return "(" + wrap(num_.str()) + "/" + wrap(den_.str()) + ")";
}

// ------------------------------------------------------------------ parsing

namespace {

class Parser {
public:
    explicit Parser(const std::string& s) : s_(s) {}

    Scalar parse()
    {
        Scalar v = expr();
        skip();
        if (pos_ != s_.size()) fail("trailing input");
        return v;
    }

private:
    const std::string& s_;
    std::size_t pos_ = 0;

    [[noreturn]] void fail(const std::string& what)
    {
        throw Error(ErrorKind::Parse, what + " at offset " + std::to_string(pos_) + " in '" + s_ + "'");
    }
    void skip()
    {
        while (pos_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[pos_]))) ++pos_;
    }
    bool eat(char c)
    {
        skip();
        if (pos_ < s_.size() && s_[pos_] == c) { ++pos_; return true; }
        return false;
    }

    Scalar expr()
    {
        Scalar v = term();
        for (;;) {
            if (eat('+')) v += term();
            else if (eat('-')) v -= term();
            else return v;
        }
    }
    Scalar term()
    {
        Scalar v = power();
        for (;;) {
            if (eat('*')) v *= power();
            else if (eat('/')) v /= power();
            else return v;
        }
    }
    Scalar power()
    {
        Scalar b = unary();
        if (eat('^')) {
            skip();
            bool neg = eat('-');
            skip();
            std::size_t start = pos_;
            while (pos_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[pos_]))) ++pos_;
            if (start == pos_) fail("expected exponent");
            int e = std::stoi(s_.substr(start, pos_ - start));
            Scalar r(1);
            for (int k = 0; k < e; ++k) r *= b;
            return neg ? r.inverse() : r;
        }
        return b;
    }
    Scalar unary()
    {
        if (eat('-')) return -unary();
        if (eat('+')) return unary();
        return atom();
    }
    Scalar atom()
    {
        skip();
        if (eat('(')) {
            Scalar v = expr();
            if (!eat(')')) fail("expected ')'");
            return v;
        }
        if (pos_ >= s_.size()) fail("unexpected end");
        char c = s_[pos_];
        if (std::isdigit(static_cast<unsigned char>(c))) {
            std::size_t start = pos_;
            while (pos_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[pos_]))) ++pos_;
            return Scalar(mpq_class(mpz_class(s_.substr(start, pos_ - start))));
        }
        if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
            std::size_t start = pos_;
            while (pos_ < s_.size() && (std::isalnum(static_cast<unsigned char>(s_[pos_])) || s_[pos_] == '_')) ++pos_;
            return Scalar::param(s_.substr(start, pos_ - start));
        }
        fail(std::string("unexpected character '") + c + "'");
    }
};

} // namespace

Scalar parse_scalar(const std::string& text) { return Parser(text).parse(); }

// ------------------------------------------------------------- substitution

const mpq_class& Substitution::at(const std::string& name) const
{
    auto it = values_.find(name);
    if (it == values_.end()) throw Error(ErrorKind::UnboundParameter, "parameter '" + name + "' is not bound");
    return it->second;
}

std::string Substitution::str() const
{
    std::string out = "{";
    bool first = true;
    for (auto& [k, v] : values_) {
        if (!first) out += ", ";
        first = false;
        out += k + "=" + rational_str(v);
    }
    return out + "}";
}

namespace {

mpq_class mpq_pow(const mpq_class& b, int e)
{
    mpq_class r(1);
    for (int k = 0; k < e; ++k) r *= b;
    return r;
}

} // namespace

mpq_class substitute(const Polynomial& p, const Substitution& s)
{
    std::vector<const mpq_class*> val(kMaxVars, nullptr);
    for (int v : p.variables()) val[std::size_t(v)] = &s.at(var_name(v));
    mpq_class total(0);
    for (auto& [m, c] : p.terms()) {
        mpq_class t = c;
        for (int v = 0; v < kMaxVars; ++v)
            if (int e = m.exponent(v)) t *= mpq_pow(*val[std::size_t(v)], e);
        total += t;
    }
    return total;
}

mpq_class substitute(const Scalar& x, const Substitution& s)
{
    mpq_class d = substitute(x.den(), s);
    if (d == 0) throw Error(ErrorKind::DenominatorVanishes, "denominator " + x.den().str() + " vanishes at " + s.str());
    return substitute(x.num(), s) / d;
}

Polynomial specialize(const Polynomial& p, const Substitution& s)
{
    std::vector<int> bound;
    for (int v : p.variables())
        if (s.binds(var_name(v))) bound.push_back(v);
    if (bound.empty()) return p;
    Polynomial r;
    for (auto& [m, c] : p.terms()) {
        mpq_class coef = c;
        Monomial rest = m;
        for (int v : bound) {
            int e = m.exponent(v);
            if (!e) continue;
            coef *= mpq_pow(s.at(var_name(v)), e);
            rest = rest / Monomial::var(v, e);
        }
        r += Polynomial(coef).times_monomial(rest, 1);
    }
    return r;
}

Scalar specialize(const Scalar& x, const Substitution& s)
{
    Polynomial d = specialize(x.den(), s);
    if (d.is_zero()) throw Error(ErrorKind::DenominatorVanishes, "denominator " + x.den().str() + " vanishes at " + s.str());
    return Scalar(specialize(x.num(), s), d);
}

Scalar compose(const Scalar& x, const std::map<int, Scalar>& image)
{
    auto eval = [&](const Polynomial& p) {
        Scalar total;
        for (auto& [m, c] : p.terms()) {
            Scalar t(c);
            Monomial rest = m;
            for (int v = 0; v < kMaxVars; ++v) {
                int e = m.exponent(v);
                if (!e) continue;
                auto it = image.find(v);
                if (it == image.end()) continue;
                for (int k = 0; k < e; ++k) t *= it->second;
                rest = rest / Monomial::var(v, e);
            }
            total += t * Scalar(Polynomial(1).times_monomial(rest, 1));
        }
        return total;
    };
    Scalar d = eval(x.den());
    if (d.is_zero()) throw Error(ErrorKind::DenominatorVanishes, "denominator vanishes under parameter identification");
    return eval(x.num()) / d;
}

} // namespace chiral
