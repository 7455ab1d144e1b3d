#include "chiral/twovar.hpp"

#include <sstream>

namespace chiral {

const char* orientation_name(Orientation o)
{
    switch (o) {
    case Orientation::poly: return "poly";
    case Orientation::right: return "right";
    case Orientation::left: return "left";
    case Orientation::mixed: return "mixed";
    }
    return "?";
}

namespace {

int shifted(int v, int by)
{
    if (v == kExact || by == kExact) return kExact;
    return v + by;
}

Orientation combine(Orientation a, Orientation b)
{
    if (a == Orientation::poly) return b;
    if (b == Orientation::poly) return a;
    if (a == b) return a;
    return Orientation::mixed;
}

using Slot = std::vector<std::pair<int, Scalar>>;

} // namespace

template <std::size_t N>
TensorSeries<N> TensorSeries<N>::operator*(const TensorSeries& o) const
{
    check_compatible(o, "mul");
    TensorSeries r(cfg_, combine(orient_, o.orient_));
    r.limit_ = std::min(limit_, o.limit_);
    for (std::size_t s = 0; s < N; ++s) {
        int a = shifted(valid_[s], o.min_level(s)), b = shifted(o.valid_[s], min_level(s));
        r.valid_[s] = std::min(a, b);
    }
    if (c_.empty() || o.c_.empty()) return r;

    // slot products repeat a lot; memoize them per call
    std::map<std::pair<int, int>, Slot> memo;
    auto slot_product = [&](int a, int b) -> const Slot& {
        auto key = std::make_pair(a, b);
        auto it = memo.find(key);
        if (it != memo.end()) return it->second;
        std::map<int, Scalar> acc;
        accumulate_product(cfg_, a, b, Scalar(1), acc);
        Slot out;
        for (auto& [k, c] : acc)
            if (!c.is_zero()) out.emplace_back(k, c);
        return memo.emplace(key, std::move(out)).first->second;
    };

    std::map<Key, Scalar> acc;
    for (auto& [ka, ca] : c_)
        for (auto& [kb, cb] : o.c_) {
            std::array<const Slot*, N> parts;
            for (std::size_t s = 0; s < N; ++s) parts[s] = &slot_product(ka[s], kb[s]);
            Scalar c = ca * cb;
            std::array<std::size_t, N> idx{};
            // odometer over the per-slot expansions
            while (true) {
                Key k;
                Scalar v = c;
                for (std::size_t s = 0; s < N; ++s) {
                    k[s] = (*parts[s])[idx[s]].first;
                    v *= (*parts[s])[idx[s]].second;
                }
                acc[k] += v;
                std::size_t s = N;
                while (s-- > 0) {
                    if (++idx[s] < parts[s]->size()) break;
                    idx[s] = 0;
                }
                if (s == std::size_t(-1)) break;
            }
        }
    for (auto& [k, c] : acc) r.add_term(k, c);
    return r;
}

template class TensorSeries<2>;
template class TensorSeries<3>;

TwoVarSeries tensor(const PhiSeries& f, const PhiSeries& g)
{
    if (!f.config().same_roots(g.config())) throw Error(ErrorKind::ConfigMismatch, "tensor: different points");
    TwoVarSeries x(f.config(), Orientation::poly);
    x.set_valid(0, f.valid_below());
    x.set_valid(1, g.valid_below());
    for (auto& [a, ca] : f.coeffs())
        for (auto& [b, cb] : g.coeffs()) x.add_term({a, b}, ca * cb);
    return x;
}

ThreeVarSeries tensor(const PhiSeries& f, const PhiSeries& g, const PhiSeries& h)
{
    if (!f.config().same_roots(g.config()) || !f.config().same_roots(h.config()))
        throw Error(ErrorKind::ConfigMismatch, "tensor: different points");
    ThreeVarSeries x(f.config(), Orientation::poly);
    x.set_valid(0, f.valid_below());
    x.set_valid(1, g.valid_below());
    x.set_valid(2, h.valid_below());
    for (auto& [a, ca] : f.coeffs())
        for (auto& [b, cb] : g.coeffs())
            for (auto& [c, cc] : h.coeffs()) x.add_term({a, b, c}, ca * cb * cc);
    return x;
}

TwoVarSeries delta(const SigmaConfig& cfg)
{
    PhiSeries t = PhiSeries::t(cfg), one = PhiSeries::one(cfg);
    return tensor(t, one) - tensor(one, t);
}

template <std::size_t N>
TensorSeries<N> d_slot(const TensorSeries<N>& x, std::size_t s)
{
    const auto& cfg = x.config();
    TensorSeries<N> r(cfg, x.orientation());
    r.set_limit(x.limit());
    for (std::size_t j = 0; j < N; ++j) {
        int v = x.valid(j);
        r.set_valid(j, j == s && v != kExact ? v - 1 : v);
    }
    for (auto& [k, c] : x.coeffs()) {
        std::map<int, Scalar> acc;
        accumulate_derivative(cfg, k[s], c, acc);
        for (auto& [code, d] : acc) {
            auto key = k;
            key[s] = code;
            r.add_term(key, d);
        }
    }
    return r;
}

template TwoVarSeries d_slot(const TwoVarSeries&, std::size_t);
template ThreeVarSeries d_slot(const ThreeVarSeries&, std::size_t);

ThreeVarSeries embed(const TwoVarSeries& x, std::size_t a, std::size_t b)
{
    if (a == b || a > 2 || b > 2) throw Error(ErrorKind::Invalid, "embed: bad slots");
    std::size_t other = 3 - a - b;
    ThreeVarSeries r(x.config(), x.orientation());
    r.set_limit(x.limit());
    r.set_valid(a, x.valid(0));
    r.set_valid(b, x.valid(1));
    int unit = x.config().code(0, 0);
    for (auto& [k, c] : x.coeffs()) {
        ThreeVarSeries::Key key;
        key[a] = k[0];
        key[b] = k[1];
        key[other] = unit;
        r.add_term(key, c);
    }
    return r;
}

template <std::size_t N>
TensorSeries<N> permute(const TensorSeries<N>& x, const std::array<std::size_t, N>& perm)
{
    TensorSeries<N> r(x.config(), x.orientation());
    r.set_limit(x.limit());
    for (std::size_t s = 0; s < N; ++s) r.set_valid(perm[s], x.valid(s));
    for (auto& [k, c] : x.coeffs()) {
        typename TensorSeries<N>::Key key;
        for (std::size_t s = 0; s < N; ++s) key[perm[s]] = k[s];
        r.add_term(key, c);
    }
    return r;
}

template TwoVarSeries permute(const TwoVarSeries&, const std::array<std::size_t, 2>&);
template ThreeVarSeries permute(const ThreeVarSeries&, const std::array<std::size_t, 3>&);

TwoVarSeries mul_two(const TwoVarSeries& x, const TwoVarSeries& y) { return x * y; }

TwoVarSeries exp_r(int k, const SigmaConfig& cfg, int depth)
{
    if (k < 1) throw Error(ErrorKind::Invalid, "expansion power must be positive");
    int n = cfg.n();
    TwoVarSeries e(cfg, Orientation::right);
    for (int m = 0; m < depth; ++m)
        for (int i = 0; i < n; ++i) {
            const auto& r = cfg.rho_in_pi(n - i - 1);
            for (int j = 0; j < n; ++j) e.add_term({cfg.code(-m - 1, j), cfg.code(m, i)}, r[std::size_t(j)]);
        }
    e.set_valid(1, depth);
    if (k == 1) return e;
    TwoVarSeries p = e;
    for (int j = 1; j < k; ++j) p = (p * e).truncated(1, depth);
    return p;
}

TwoVarSeries exp_l(int k, const SigmaConfig& cfg, int depth)
{
    if (k < 1) throw Error(ErrorKind::Invalid, "expansion power must be positive");
    int n = cfg.n();
    TwoVarSeries e(cfg, Orientation::left);
    for (int m = 0; m < depth; ++m)
        for (int i = 0; i < n; ++i) {
            const auto& r = cfg.rho_in_pi(i);
            for (int j = 0; j < n; ++j) e.add_term({cfg.code(m, j), cfg.code(-m - 1, n - i - 1)}, -r[std::size_t(j)]);
        }
    e.set_valid(0, depth);
    if (k == 1) return e;
    TwoVarSeries p = e;
    for (int j = 1; j < k; ++j) p = (p * e).truncated(0, depth);
    return p;
}

TwoVarSeries exp_r_by_derivative(int k, const SigmaConfig& cfg, int depth)
{
    TwoVarSeries e = exp_r(1, cfg, depth + k - 1);
    for (int j = 1; j < k; ++j) e = d_slot(e, 1) * Scalar(mpq_class(1, j));
    return e.truncated(1, depth);
}

TwoVarSeries diagonal_quotient(const SigmaConfig& cfg)
{
    int n = cfg.n();
    TwoVarSeries h(cfg, Orientation::poly);
    for (int i = 0; i < n; ++i) h += tensor(PhiSeries::minus_basis(cfg, 0, n - 1 - i), PhiSeries::basis(cfg, 0, i));
    return h;
}

PhiSeries diag_restrict(const TwoVarSeries& x)
{
    if (x.orientation() != Orientation::poly)
        throw Error(ErrorKind::OrientationUnsupported,
                    std::string("diagonal restriction of a ") + orientation_name(x.orientation()) + " series");
    const auto& cfg = x.config();
    std::map<int, Scalar> acc;
    for (auto& [k, c] : x.coeffs()) accumulate_product(cfg, k[0], k[1], c, acc);
    PhiSeries r(cfg.with_truncation(x.limit()));
    int v = std::min(shifted(x.valid(0), x.min_level(1)), shifted(x.valid(1), x.min_level(0)));
    r.set_valid_below(v);
    for (auto& [k, c] : acc) r.add_term(k, c);
    return r;
}

TwoVarSeries diag_restrict(const ThreeVarSeries& x, std::size_t a, std::size_t b)
{
    if (a >= b || b > 2) throw Error(ErrorKind::Invalid, "diag_restrict: need slots a < b");
    std::size_t other = 3 - a - b;
    const auto& cfg = x.config();
    // merged slot at position a; remaining slot keeps relative order
    std::size_t pm = a < other ? 0 : 1, po = 1 - pm;
    TwoVarSeries r(cfg, Orientation::poly);
    r.set_limit(x.limit());
    r.set_valid(pm, std::min(shifted(x.valid(a), x.min_level(b)), shifted(x.valid(b), x.min_level(a))));
    r.set_valid(po, x.valid(other));
    std::map<int, Scalar> acc;
    for (auto& [k, c] : x.coeffs()) {
        acc.clear();
        accumulate_product(cfg, k[a], k[b], c, acc);
        for (auto& [code, d] : acc) {
            TwoVarSeries::Key key;
            key[pm] = code;
            key[po] = k[other];
            r.add_term(key, d);
        }
    }
    return r;
}

namespace {

PhiSeries contract(const TwoVarSeries& x, Orientation want)
{
    if (x.orientation() != Orientation::poly && x.orientation() != want)
        throw Error(ErrorKind::OrientationMismatch,
                    std::string("contraction expects ") + orientation_name(want) + ", got " + orientation_name(x.orientation()));
    if (x.valid(0) <= -1) throw Error(ErrorKind::WindowTooSmall, "residue level of the contracted slot is not exact");
    const auto& cfg = x.config();
    SigmaConfig out_cfg = cfg.with_truncation(x.limit());
    PhiSeries r(out_cfg);
    r.set_valid_below(x.valid(1));
    // Res over the contracted slot is its (-1, n-1) coefficient
    int target = cfg.code(-1, cfg.n() - 1);
    for (auto& [k, c] : x.coeffs())
        if (k[0] == target) r.add_term(k[1], c);
    return r;
}

} // namespace

PhiSeries contract_r(const TwoVarSeries& x) { return contract(x, Orientation::right); }
PhiSeries contract_l(const TwoVarSeries& x) { return contract(x, Orientation::left); }

std::optional<TwoVarSeries> divide_by_delta(const TwoVarSeries& x)
{
    const auto& cfg = x.config();
    if (x.is_zero()) return x;
    int ku = x.min_level(0), kv = x.min_level(1);
    // x = P(u,v) phi(u)^ku phi(v)^kv, P stored as sum_d u^d p_d(v)
    std::vector<TPoly> phipow{TPoly(Scalar(1))};
    auto phi_to = [&](int e) -> const TPoly& {
        while (int(phipow.size()) <= e) phipow.push_back(phipow.back() * cfg.phi());
        return phipow[std::size_t(e)];
    };
    std::map<int, TPoly> P;
    for (auto& [k, c] : x.coeffs()) {
        TPoly U = phi_to(cfg.level(k[0]) - ku) * cfg.pi(cfg.pos(k[0]));
        TPoly V = phi_to(cfg.level(k[1]) - kv) * cfg.pi(cfg.pos(k[1])) * c;
        for (int d = 0; d <= U.degree(); ++d)
            if (!U.coeff(d).is_zero()) P[d] += V * U.coeff(d);
    }
    int D = P.rbegin()->first;
    // synthetic division by (u - v) in u with coefficients in F[v]
    std::vector<TPoly> q(static_cast<std::size_t>(std::max(D, 0)));
    TPoly carry;
    for (int d = D; d >= 1; --d) {
        auto it = P.find(d);
        carry = (it == P.end() ? TPoly() : it->second) + carry.shifted(1);
        q[std::size_t(d - 1)] = carry;
    }
    TPoly rem = (P.count(0) ? P.at(0) : TPoly()) + carry.shifted(1);
    if (!rem.is_zero()) return std::nullopt;

    TwoVarSeries r(cfg, Orientation::poly);
    r.set_limit(x.limit());
    SigmaConfig wide = cfg.with_truncation(x.limit());
    for (int d = 0; d < D; ++d) {
        if (q[std::size_t(d)].is_zero()) continue;
        TPoly ud(Scalar(1));
        ud = ud.shifted(d);
        r += tensor(PhiSeries::from_monomials(ud, ku, wide), PhiSeries::from_monomials(q[std::size_t(d)], kv, wide));
    }
    return r;
}

DiagonalPole localize_diagonal(const TwoVarSeries& x, int k)
{
    if (k < 0) throw Error(ErrorKind::Invalid, "diagonal pole order must be non-negative");
    if (x.orientation() != Orientation::poly)
        throw Error(ErrorKind::OrientationUnsupported, "localization needs a poly tensor");
    DiagonalPole p{x, k};
    if (p.num.is_zero()) { p.k = 0; return p; }
    while (p.k > 0 && diag_restrict(p.num).is_zero()) {
        auto q = divide_by_delta(p.num);
        if (!q) break;
        p.num = *q;
        --p.k;
    }
    return p;
}

DiagonalPole operator*(const DiagonalPole& a, const DiagonalPole& b) { return localize_diagonal(a.num * b.num, a.k + b.k); }

TwoVarSeries expand_r(const DiagonalPole& p, int window)
{
    TwoVarSeries out(p.num.config(), Orientation::right);
    if (p.num.is_zero()) return out;
    if (p.k == 0) {
        out += p.num;
        out.set_orientation(Orientation::right);
        return out.truncated(1, window);
    }
    int depth = window - std::min(p.num.min_level(1), 0);
    return (p.num * exp_r(p.k, p.num.config(), depth)).truncated(1, window);
}

TwoVarSeries expand_l(const DiagonalPole& p, int window)
{
    TwoVarSeries out(p.num.config(), Orientation::left);
    if (p.num.is_zero()) return out;
    if (p.k == 0) {
        out += p.num;
        out.set_orientation(Orientation::left);
        return out.truncated(0, window);
    }
    int depth = window - std::min(p.num.min_level(0), 0);
    return (p.num * exp_l(p.k, p.num.config(), depth)).truncated(0, window);
}

CauchyResult cauchy_check(const TwoVarSeries& f, int m_pair)
{
    if (f.orientation() != Orientation::poly)
        throw Error(ErrorKind::OrientationUnsupported, "the Cauchy identity takes a poly tensor");
    const auto& cfg = f.config();
    int P = 0;
    if (!f.is_zero()) P = std::max({0, -f.min_level(0), -f.min_level(1)});
    if (m_pair < P + 2)
        throw Error(ErrorKind::WindowTooSmall,
                    "pole order " + std::to_string(P) + " needs pair depth >= " + std::to_string(P + 2));
    PhiSeries lr = contract_r(f * exp_r(1, cfg, m_pair));
    PhiSeries ll = contract_l(f * exp_l(1, cfg, m_pair));
    PhiSeries rhs = diag_restrict(f);
    int w = std::min({lr.valid_below(), ll.valid_below(), rhs.valid_below(), cfg.M()});
    PhiSeries lhs = lr.with_config(rhs.config()) - ll.with_config(rhs.config());
    bool ok = lhs.truncated(w) == rhs.truncated(w);
    return {lr, ll, rhs, w, ok};
}

std::string to_text(const TwoVarSeries& x)
{
    const auto& cfg = x.config();
    std::string out = "# twovar v1\norientation: " + std::string(orientation_name(x.orientation())) + "\n" + config_header(cfg);
    for (auto& [k, c] : x.coeffs())
        out += std::to_string(cfg.level(k[0])) + " " + std::to_string(cfg.pos(k[0])) + " " + std::to_string(cfg.level(k[1])) +
               " " + std::to_string(cfg.pos(k[1])) + " " + c.str() + "\n";
    return out;
}

TwoVarSeries twovar_from_text(const std::string& text)
{
    std::istringstream in(text);
    std::string line;
    std::vector<Scalar> roots;
    int M = -1;
    Orientation o = Orientation::poly;
    std::vector<std::tuple<int, int, int, int, Scalar>> terms;
    while (std::getline(in, line)) {
        auto first = line.find_first_not_of(" \t\r");
        if (first == std::string::npos || line[first] == '#') continue;
        std::string body = line.substr(first);
        if (body.rfind("roots:", 0) == 0) {
            std::istringstream rs(body.substr(6));
            std::string tok;
            while (std::getline(rs, tok, ';')) roots.push_back(parse_scalar(tok));
        } else if (body.rfind("M:", 0) == 0) {
            M = std::stoi(body.substr(2));
        } else if (body.rfind("orientation:", 0) == 0) {
            std::string name = body.substr(12);
            name.erase(0, name.find_first_not_of(' '));
            if (name == "poly") o = Orientation::poly;
            else if (name == "right") o = Orientation::right;
            else if (name == "left") o = Orientation::left;
            else throw Error(ErrorKind::Parse, "unknown orientation " + name);
        } else {
            std::istringstream ts(body);
            int m1, i1, m2, i2;
            if (!(ts >> m1 >> i1 >> m2 >> i2)) throw Error(ErrorKind::Parse, "bad term line: " + line);
            std::string rest;
            std::getline(ts, rest);
            terms.emplace_back(m1, i1, m2, i2, parse_scalar(rest));
        }
    }
    if (roots.empty() || M < 1) throw Error(ErrorKind::Parse, "twovar text needs 'roots:' and 'M:' lines");
    auto cfg = SigmaConfig::from_roots(roots, M);
    TwoVarSeries x(cfg, o);
    int n = cfg.n();
    for (auto& [m1, i1, m2, i2, c] : terms) {
        if (i1 < 0 || i1 >= n || i2 < 0 || i2 >= n) throw Error(ErrorKind::Parse, "basis position out of range");
        x.add_term({cfg.code(m1, i1), cfg.code(m2, i2)}, c);
    }
    return x;
}

} // namespace chiral
