#include "chiral/sigma.hpp"

#include <algorithm>
#include <set>
#include <sstream>

namespace chiral {

namespace {

std::vector<Scalar> pi_coordinates(const std::vector<Scalar>& roots, TPoly r)
{
    // Newton form: r = c0 + (t-a0)(c1 + (t-a1)(c2 + ...))
    std::size_t n = roots.size();
    std::vector<Scalar> out(n);
    for (std::size_t i = 0; i < n && !r.is_zero(); ++i) {
        out[i] = r.eval(roots[i]);
        TPoly q, rem;
        (r - TPoly(out[i])).divmod(TPoly::linear(roots[i]), q, rem);
        r = q;
    }
    return out;
}

std::vector<BasisTerm> expand_levels(const std::vector<Scalar>& roots, const TPoly& phi, TPoly p)
{
    std::vector<BasisTerm> out;
    for (int j = 0; !p.is_zero(); ++j) {
        TPoly q, r;
        p.divmod(phi, q, r);
        auto c = pi_coordinates(roots, r);
        for (std::size_t k = 0; k < c.size(); ++k)
            if (!c[k].is_zero()) out.push_back({j, int(k), c[k]});
        p = q;
    }
    return out;
}

} // namespace

std::shared_ptr<const SigmaConfig::Data> SigmaConfig::build(const std::vector<Scalar>& roots, int M)
{
    if (roots.empty()) throw Error(ErrorKind::Invalid, "a configuration needs at least one point");
    if (M < 1) throw Error(ErrorKind::Invalid, "truncation order must be positive");
    auto d = std::make_shared<Data>();
    int n = int(roots.size());
    d->n = n;
    d->M = M;
    d->roots = roots;
    d->pi.push_back(TPoly(Scalar(1)));
    d->rho.push_back(TPoly(Scalar(1)));
    for (int i = 0; i < n; ++i) {
        d->pi.push_back(d->pi.back() * TPoly::linear(roots[std::size_t(i)]));
        d->rho.push_back(d->rho.back() * TPoly::linear(roots[std::size_t(n - 1 - i)]));
    }
    d->phi = d->pi.back();
    TPoly dphi = d->phi.derivative();
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            d->prod.push_back(expand_levels(roots, d->phi, d->pi[std::size_t(i)] * d->pi[std::size_t(j)]));
    for (int i = 0; i < n; ++i) {
        d->dphi.push_back(expand_levels(roots, d->phi, dphi * d->pi[std::size_t(i)]));
        d->dpi.push_back(expand_levels(roots, d->phi, d->pi[std::size_t(i)].derivative()));
        d->rho_in_pi.push_back(pi_coordinates(roots, d->rho[std::size_t(i)]));
    }
    // invert the unitriangular change of basis
    for (int i = 0; i < n; ++i) {
        std::vector<Scalar> p(static_cast<std::size_t>(n));
        p[std::size_t(i)] = Scalar(1);
        for (int k = 0; k < i; ++k) {
            const Scalar& r = d->rho_in_pi[std::size_t(i)][std::size_t(k)];
            if (r.is_zero()) continue;
            for (int l = 0; l < n; ++l) p[std::size_t(l)] -= r * d->pi_in_rho[std::size_t(k)][std::size_t(l)];
        }
        d->pi_in_rho.push_back(std::move(p));
    }
    return d;
}

SigmaConfig::SigmaConfig(int n, int M)
{
    std::vector<Scalar> roots;
    for (int i = 1; i <= n; ++i) roots.push_back(Scalar::param("a" + std::to_string(i)));
    d_ = build(roots, M);
}

SigmaConfig::SigmaConfig(const std::vector<std::string>& params, int M)
{
    std::vector<Scalar> roots;
    for (auto& p : params) roots.push_back(Scalar::param(p));
    d_ = build(roots, M);
}

SigmaConfig SigmaConfig::from_roots(const std::vector<Scalar>& roots, int M) { return SigmaConfig(build(roots, M)); }

std::vector<std::string> SigmaConfig::params() const
{
    std::set<int> vs;
    for (auto& r : d_->roots) {
        for (int v : r.num().variables()) vs.insert(v);
        for (int v : r.den().variables()) vs.insert(v);
    }
    std::vector<std::string> out;
    for (int v : vs) out.push_back(var_name(v));
    return out;
}

SigmaConfig SigmaConfig::with_truncation(int M) const
{
    if (M == d_->M) return *this;
    auto d = std::make_shared<Data>(*d_);
    if (M < 1) throw Error(ErrorKind::Invalid, "truncation order must be positive");
    d->M = M;
    return SigmaConfig(std::shared_ptr<const Data>(std::move(d)));
}

SigmaConfig SigmaConfig::substituted(const Substitution& s) const
{
    std::vector<Scalar> roots;
    for (auto& r : d_->roots) roots.push_back(specialize(r, s));
    return from_roots(roots, d_->M);
}

std::vector<Scalar> SigmaConfig::to_pi_basis(const TPoly& r) const { return pi_coordinates(d_->roots, r); }

std::string SigmaConfig::str() const
{
    std::string out = "n=" + std::to_string(n()) + " M=" + std::to_string(M()) + " roots=";
    for (std::size_t i = 0; i < d_->roots.size(); ++i) out += (i ? "," : "") + d_->roots[i].str();
    return out;
}

void require_same(const SigmaConfig& a, const SigmaConfig& b, const char* where)
{
    if (!a.same_roots(b) || a.M() != b.M())
        throw Error(ErrorKind::ConfigMismatch, std::string(where) + ": " + a.str() + " vs " + b.str());
}

// ---------------------------------------------------------------- PhiSeries

PhiSeries PhiSeries::basis(const SigmaConfig& cfg, int m, int i, const Scalar& c)
{
    if (i < 0 || i >= cfg.n()) throw Error(ErrorKind::Invalid, "basis position out of range");
    PhiSeries f(cfg);
    f.add_term(cfg.code(m, i), c);
    return f;
}

PhiSeries PhiSeries::minus_basis(const SigmaConfig& cfg, int m, int i, const Scalar& c)
{
    if (i < 0 || i >= cfg.n()) throw Error(ErrorKind::Invalid, "basis position out of range");
    PhiSeries f(cfg);
    const auto& r = cfg.rho_in_pi(i);
    for (int k = 0; k < cfg.n(); ++k)
        if (!r[std::size_t(k)].is_zero()) f.add_term(cfg.code(m, k), c * r[std::size_t(k)]);
    return f;
}

PhiSeries PhiSeries::t(const SigmaConfig& cfg) { return from_monomials(TPoly::t(), 0, cfg); }

PhiSeries PhiSeries::from_monomials(const TPoly& p, int phi_power, const SigmaConfig& cfg)
{
    PhiSeries f(cfg);
    TPoly rest = p;
    for (int level = phi_power; !rest.is_zero(); ++level) {
        if (level >= cfg.M()) { f.valid_ = cfg.M(); break; }
        TPoly q, r;
        rest.divmod(cfg.phi(), q, r);
        auto c = cfg.to_pi_basis(r);
        for (int k = 0; k < cfg.n(); ++k)
            if (!c[std::size_t(k)].is_zero()) f.add_term(cfg.code(level, k), c[std::size_t(k)]);
        rest = q;
    }
    return f;
}

Scalar PhiSeries::coeff(int m, int i) const
{
    auto it = c_.find(cfg_.code(m, i));
    return it == c_.end() ? Scalar() : it->second;
}

std::pair<TPoly, int> PhiSeries::to_monomials() const
{
    if (c_.empty()) return {TPoly(), 0};
    int k = pole_order();
    TPoly p, phik(Scalar(1));
    int cur = k;
    for (auto& [code, c] : c_) {
        int m = cfg_.level(code);
        while (cur < m) { phik = phik * cfg_.phi(); ++cur; }
        p += cfg_.pi(cfg_.pos(code)) * phik * c;
    }
    return {p, k};
}

std::map<int, Scalar> PhiSeries::minus_coeffs() const
{
    std::map<int, Scalar> out;
    int n = cfg_.n();
    for (auto& [code, c] : c_) {
        int m = cfg_.level(code), i = cfg_.pos(code);
        const auto& row = cfg_.pi_in_rho(i);
        for (int k = 0; k < n; ++k) {
            if (row[std::size_t(k)].is_zero()) continue;
            Scalar& slot = out[cfg_.code(m, k)];
            slot += c * row[std::size_t(k)];
        }
    }
    for (auto it = out.begin(); it != out.end();) it = it->second.is_zero() ? out.erase(it) : std::next(it);
    return out;
}

void PhiSeries::add_term(int code, const Scalar& c)
{
    if (c.is_zero()) return;
    if (cfg_.level(code) >= cfg_.M()) { valid_ = std::min(valid_, cfg_.M()); return; }
    auto [it, fresh] = c_.try_emplace(code, c);
    if (!fresh) {
        it->second += c;
        if (it->second.is_zero()) c_.erase(it);
    }
}

PhiSeries PhiSeries::operator-() const
{
    PhiSeries r(*this);
    for (auto& [k, c] : r.c_) c = -c;
    return r;
}

PhiSeries& PhiSeries::operator+=(const PhiSeries& o)
{
    require_same(cfg_, o.cfg_, "PhiSeries::add");
    for (auto& [k, c] : o.c_) add_term(k, c);
    valid_ = std::min(valid_, o.valid_);
    return *this;
}

PhiSeries& PhiSeries::operator-=(const PhiSeries& o)
{
    require_same(cfg_, o.cfg_, "PhiSeries::sub");
    for (auto& [k, c] : o.c_) add_term(k, -c);
    valid_ = std::min(valid_, o.valid_);
    return *this;
}

PhiSeries PhiSeries::operator*(const Scalar& s) const
{
    PhiSeries r(cfg_);
    r.valid_ = valid_;
    if (s.is_zero()) return r;
    for (auto& [k, c] : c_) r.c_.emplace(k, c * s);
    return r;
}

void accumulate_product(const SigmaConfig& cfg, int code_a, int code_b, const Scalar& c, std::map<int, Scalar>& out)
{
    int m = cfg.level(code_a) + cfg.level(code_b);
    for (auto& t : cfg.product_table(cfg.pos(code_a), cfg.pos(code_b))) {
        Scalar& slot = out[cfg.code(m + t.dl, t.k)];
        slot += c * t.c;
    }
}

void accumulate_derivative(const SigmaConfig& cfg, int code, const Scalar& c, std::map<int, Scalar>& out)
{
    int m = cfg.level(code), i = cfg.pos(code);
    if (m != 0) {
        Scalar cm = c * Scalar(long(m));
        for (auto& t : cfg.dphi_table(i)) out[cfg.code(m - 1 + t.dl, t.k)] += cm * t.c;
    }
    for (auto& t : cfg.dpi_table(i)) out[cfg.code(m + t.dl, t.k)] += c * t.c;
}

namespace {

int shifted_valid(int v, int order)
{
    if (v == kExact || order == kExact) return kExact;
    return v + order;
}

} // namespace

PhiSeries PhiSeries::operator*(const PhiSeries& o) const
{
    require_same(cfg_, o.cfg_, "PhiSeries::mul");
    std::map<int, Scalar> acc;
    for (auto& [a, ca] : c_)
        for (auto& [b, cb] : o.c_) accumulate_product(cfg_, a, b, ca * cb, acc);
    PhiSeries r(cfg_);
    r.valid_ = std::min(shifted_valid(valid_, o.pole_order()), shifted_valid(o.valid_, pole_order()));
    for (auto& [k, c] : acc) r.add_term(k, c);
    return r;
}

PhiSeries PhiSeries::truncated(int level) const
{
    PhiSeries r(cfg_);
    r.valid_ = std::min(valid_, level);
    for (auto& [k, c] : c_)
        if (cfg_.level(k) < level) r.c_.emplace(k, c);
    return r;
}

PhiSeries PhiSeries::with_config(const SigmaConfig& cfg) const
{
    if (!cfg.same_roots(cfg_)) throw Error(ErrorKind::ConfigMismatch, "with_config: different points");
    PhiSeries r(cfg);
    r.valid_ = valid_;
    for (auto& [k, c] : c_) r.add_term(k, c);
    return r;
}

std::string PhiSeries::str() const
{
    if (c_.empty()) return "0";
    std::string out;
    for (auto& [k, c] : c_) {
        if (!out.empty()) out += " + ";
        out += c.str() + "*p[" + std::to_string(cfg_.level(k)) + "," + std::to_string(cfg_.pos(k)) + "]";
    }
    return out;
}

PhiSeries mul(const PhiSeries& f, const PhiSeries& g) { return f * g; }

PhiSeries d_dt(const PhiSeries& f)
{
    const auto& cfg = f.config();
    std::map<int, Scalar> acc;
    for (auto& [k, c] : f.coeffs()) accumulate_derivative(cfg, k, c, acc);
    PhiSeries r(cfg);
    if (f.valid_below() != kExact) r.set_valid_below(f.valid_below() - 1);
    for (auto& [k, c] : acc) r.add_term(k, c);
    return r;
}

PhiSeries substitute(const PhiSeries& f, const Substitution& s)
{
    PhiSeries r(f.config().substituted(s));
    r.set_valid_below(f.valid_below());
    for (auto& [k, c] : f.coeffs()) r.add_term(k, specialize(c, s));
    return r;
}

void DOperator::add(const PhiSeries& g, int k)
{
    if (k < 0) throw Error(ErrorKind::Invalid, "negative derivative order");
    auto it = terms_.find(k);
    if (it == terms_.end()) terms_.emplace(k, g);
    else it->second += g;
    if (terms_.at(k).is_zero()) terms_.erase(k);
}

PhiSeries apply_dop(const DOperator& D, const PhiSeries& f)
{
    PhiSeries out(f.config());
    for (auto& [k, g] : D.terms()) {
        require_same(g.config(), f.config(), "apply_dop");
        PhiSeries h = f;
        for (int j = 0; j < k; ++j) h = d_dt(h);
        out += g * h;
    }
    return out;
}

// ------------------------------------------------------------------- text

std::string config_header(const SigmaConfig& cfg)
{
    std::string out = "roots:";
    for (std::size_t i = 0; i < cfg.roots().size(); ++i) out += (i ? "; " : " ") + cfg.roots()[i].str();
    out += "\nM: " + std::to_string(cfg.M()) + "\n";
    return out;
}

std::string to_text(const PhiSeries& f)
{
    std::string out = "# phiseries v1\n" + config_header(f.config());
    for (auto& [k, c] : f.coeffs())
        out += std::to_string(f.config().level(k)) + " " + std::to_string(f.config().pos(k)) + " " + c.str() + "\n";
    return out;
}

PhiSeries phiseries_from_text(const std::string& text)
{
    std::istringstream in(text);
    std::string line;
    std::vector<Scalar> roots;
    int M = -1;
    std::vector<std::tuple<int, int, Scalar>> terms;
    while (std::getline(in, line)) {
        auto first = line.find_first_not_of(" \t\r");
        if (first == std::string::npos || line[first] == '#') continue;
        if (line.rfind("roots:", first) == first) {
            std::istringstream rs(line.substr(first + 6));
            std::string tok;
            while (std::getline(rs, tok, ';')) roots.push_back(parse_scalar(tok));
        } else if (line.rfind("M:", first) == first) {
            M = std::stoi(line.substr(first + 2));
        } else {
            std::istringstream ts(line);
            int m, i;
            if (!(ts >> m >> i)) throw Error(ErrorKind::Parse, "bad term line: " + line);
            std::string rest;
            std::getline(ts, rest);
            terms.emplace_back(m, i, parse_scalar(rest));
        }
    }
    if (roots.empty() || M < 1) throw Error(ErrorKind::Parse, "phiseries text needs 'roots:' and 'M:' lines");
    auto cfg = SigmaConfig::from_roots(roots, M);
    PhiSeries f(cfg);
    for (auto& [m, i, c] : terms) f += PhiSeries::basis(cfg, m, i, c);
    return f;
}

} // namespace chiral
