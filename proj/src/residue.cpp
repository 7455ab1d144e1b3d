#include "chiral/residue.hpp"

#include <map>

namespace chiral {

Scalar residue(const OneForm& w)
{
    auto [p, k] = w.density.to_monomials();
    if (p.is_zero() || k >= 0) return Scalar();
    int K = -k;
    TPoly D = pow(w.density.config().phi(), K);
    int nK = D.degree();
    int top = p.degree() - nK;
    if (top < -1) return Scalar();
    // long division continued into negative powers of t; stop at t^-1
    std::map<int, Scalar> R;
    for (int e = 0; e <= p.degree(); ++e)
        if (!p.coeff(e).is_zero()) R[e] = p.coeff(e);
    for (int e = top; e >= -1; --e) {
        auto it = R.find(nK + e);
        if (it == R.end() || it->second.is_zero()) continue;
        Scalar c = it->second;
        if (e == -1) return c;
        for (int j = 0; j <= nK; ++j)
            if (!D.coeff(j).is_zero()) R[e + j] -= c * D.coeff(j);
    }
    return Scalar();
}

Scalar pairing(const PhiSeries& f, const PhiSeries& g)
{
    require_same(f.config(), g.config(), "pairing");
    // Res(phi^m pi_i dt) is 1 at (m, i) = (-1, n-1) and 0 elsewhere, so only
    // that product coefficient is needed
    const SigmaConfig& cfg = f.config();
    int top = cfg.n() - 1;
    Scalar acc;
    for (auto& [a, ca] : f.coeffs())
        for (auto& [b, cb] : g.coeffs()) {
            int m = cfg.level(a) + cfg.level(b);
            for (auto& t : cfg.product_table(cfg.pos(a), cfg.pos(b)))
                if (m + t.dl == -1 && t.k == top) acc += ca * cb * t.c;
        }
    return acc;
}

namespace {

// power series in x truncated at x^N
std::vector<Scalar> series_div(const std::vector<Scalar>& a, const std::vector<Scalar>& b, int N)
{
    std::vector<Scalar> q(static_cast<std::size_t>(N));
    Scalar inv = b[0].inverse();
    for (int k = 0; k < N; ++k) {
        Scalar acc = k < int(a.size()) ? a[std::size_t(k)] : Scalar();
        for (int j = 1; j <= k && j < int(b.size()); ++j) acc -= b[std::size_t(j)] * q[std::size_t(k - j)];
        q[std::size_t(k)] = acc * inv;
    }
    return q;
}

TPoly shift(const TPoly& p, const Scalar& b)
{
    // p(b + x) by Horner in x
    TPoly x_plus_b({b, Scalar(1)});
    TPoly acc;
    for (int k = p.degree(); k >= 0; --k) acc = acc * x_plus_b + TPoly(p.coeff(k));
    return acc;
}

} // namespace

std::vector<Scalar> residue_split(const OneForm& w, const Substitution& s)
{
    PhiSeries g = substitute(w.density, s);
    const auto& cfg = g.config();
    const auto& b = cfg.roots();
    int n = cfg.n();
    for (auto& r : b)
        if (!r.is_rational()) throw Error(ErrorKind::UnboundParameter, "substitution leaves root " + r.str() + " symbolic");
    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j)
            if (b[std::size_t(i)] == b[std::size_t(j)])
                throw Error(ErrorKind::CollidingPoints, "points " + std::to_string(i + 1) + " and " + std::to_string(j + 1) + " coincide");
    std::vector<Scalar> out(static_cast<std::size_t>(n));
    auto [p, k] = g.to_monomials();
    if (p.is_zero() || k >= 0) return out;
    int K = -k;
    for (int i = 0; i < n; ++i) {
        TPoly num = shift(p, b[std::size_t(i)]);
        TPoly den(Scalar(1));
        for (int j = 0; j < n; ++j)
            if (j != i) den = den * pow(TPoly({b[std::size_t(i)] - b[std::size_t(j)], Scalar(1)}), K);
        auto q = series_div(num.coeffs(), den.coeffs(), K);
        out[std::size_t(i)] = q[std::size_t(K - 1)];
    }
    return out;
}

} // namespace chiral
