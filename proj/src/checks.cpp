#include "chiral/checks.hpp"

#include <atomic>
#include <cstdlib>
#include <exception>
#include <mutex>
#include <thread>

namespace chiral {

void Report::fail(const std::string& what)
{
    pass = false;
    if (residuals.size() < 8) residuals.push_back(what);
}

void Report::merge(const Report& o)
{
    pass = pass && o.pass;
    cases += o.cases;
    for (auto& r : o.residuals)
        if (residuals.size() < 8) residuals.push_back(r);
    for (auto& i : o.info) info.push_back(i);
}

int worker_count()
{
    int hw = int(std::thread::hardware_concurrency());
    if (hw < 1) hw = 1;
    if (const char* env = std::getenv("CHIRAL_THREADS")) {
        int cap = std::atoi(env);
        if (cap >= 1) hw = std::min(hw, cap);
    }
    return hw;
}

void parallel_for(long count, const std::function<void(long, EvalContext&)>& body)
{
    int workers = int(std::min<long>(worker_count(), std::max<long>(count, 1)));
    if (workers <= 1) {
        EvalContext ctx;
        for (long i = 0; i < count; ++i) body(i, ctx);
        return;
    }
    std::atomic<long> next{0};
    std::exception_ptr err;
    std::mutex m;
    std::vector<std::thread> pool;
    for (int t = 0; t < workers; ++t)
        pool.emplace_back([&] {
            EvalContext ctx;
            try {
                for (long i = next++; i < count; i = next++) body(i, ctx);
            } catch (...) {
                std::lock_guard<std::mutex> lock(m);
                if (!err) err = std::current_exception();
                next = count;
            }
        });
    for (auto& th : pool) th.join();
    if (err) std::rethrow_exception(err);
}

namespace {

TwoVarSeries delta_power(const SigmaConfig& cfg, int k)
{
    TwoVarSeries d = TwoVarSeries::one(cfg);
    for (int i = 0; i < k; ++i) d = d * delta(cfg);
    return d;
}

std::string codes_str(std::initializer_list<int> cs)
{
    std::string out = "(";
    for (int c : cs) out += (out.size() > 1 ? "," : "") + std::to_string(c);
    return out + ")";
}

// Z vanishes modulo the ideal on all window pairs?
bool vanishes_on_pairs(const Field& Z, const std::vector<int>& codes, int K, long* count = nullptr)
{
    std::atomic<bool> ok{true};
    long n = long(codes.size());
    parallel_for(n * n, [&](long i, EvalContext& ctx) {
        if (!ok) return;
        int a = codes[std::size_t(i / n)], b = codes[std::size_t(i % n)];
        if (!Z.eval(ctx, Codes{a, b, 0}, K).is_zero_at_level(K)) ok = false;
    });
    if (count) *count += n * n;
    return ok;
}

// Z1 == Z2 on window tuples of the given arity, with failures recorded
void compare_on(Report& rep, const Field& Z1, const Field& Z2, const std::vector<int>& codes, int K, const std::string& what)
{
    int ar = Z1.arity();
    long n = long(codes.size()), total = 1;
    for (int i = 0; i < ar; ++i) total *= n;
    std::mutex m;
    parallel_for(total, [&](long i, EvalContext& ctx) {
        Codes c{0, 0, 0};
        long r = i;
        for (int s = ar - 1; s >= 0; --s) {
            c[std::size_t(s)] = codes[std::size_t(r % n)];
            r /= n;
        }
        UElement d = Z1.eval(ctx, c, K) - Z2.eval(ctx, c, K);
        if (!d.is_zero_at_level(K)) {
            std::lock_guard<std::mutex> lock(m);
            rep.fail(what + " at " + codes_str({c[0], c[1], c[2]}) + ": " + d.str());
        }
    });
    rep.cases += total;
}

int sign_pow(int e) { return e % 2 ? -1 : 1; }

} // namespace

// ------------------------------------------------------------------ locality

LocalityResult locality_order(const Field& Z, int max_k, Window w, int K)
{
    if (Z.arity() != 2) throw Error(ErrorKind::Invalid, "locality needs a two-slot field");
    LocalityResult r;
    r.max_k = max_k;
    r.window = w;
    r.K = K;
    auto codes = w.codes(Z.config());
    for (int k = 0; k <= max_k; ++k) {
        Field Zk = k == 0 ? Z : act(Z, delta_power(Z.config(), k));
        if (vanishes_on_pairs(Zk, codes, K, &r.pairs)) {
            r.order = k;
            return r;
        }
    }
    return r;
}

LocalityResult locality_order(const Field& X, const Field& Y, int max_k, Window w, int K)
{
    return locality_order(mu(X, Y), max_k, w, K);
}

// ------------------------------------------------------------------ Kashiwara

KashiwaraModule::KashiwaraModule(std::vector<Field> comps) : comps_(std::move(comps))
{
    if (comps_.empty()) throw Error(ErrorKind::Invalid, "Kashiwara module needs at least one component");
}

KashiwaraModule KashiwaraModule::push(const Field& X, int h)
{
    if (h < 0) throw Error(ErrorKind::Invalid, "derivative order must be non-negative");
    std::vector<Field> c(std::size_t(h + 1), Field::zero(X.config(), X.algebra()));
    c[std::size_t(h)] = X;
    return KashiwaraModule(std::move(c));
}

KashiwaraModule kashiwara_push(const Field& X, int h) { return KashiwaraModule::push(X, h); }

KashiwaraModule KashiwaraModule::act_v() const
{
    std::vector<Field> c;
    PhiSeries t = PhiSeries::t(comps_.front().config());
    for (auto& x : comps_) c.push_back(x * t);
    return KashiwaraModule(std::move(c));
}

KashiwaraModule KashiwaraModule::act_y() const
{
    const Field& f = comps_.front();
    std::vector<Field> c;
    for (std::size_t j = 1; j < comps_.size(); ++j) c.push_back(comps_[j] * Scalar(-long(j)));
    if (c.empty()) c.push_back(Field::zero(f.config(), f.algebra()));
    return KashiwaraModule(std::move(c));
}

KashiwaraModule KashiwaraModule::act_dv_prime() const
{
    std::vector<Field> c;
    for (auto& x : comps_) c.push_back(x.d());
    return KashiwaraModule(std::move(c));
}

KashiwaraModule KashiwaraModule::act_dy() const
{
    const Field& f = comps_.front();
    std::vector<Field> c{Field::zero(f.config(), f.algebra())};
    for (auto& x : comps_) c.push_back(x);
    return KashiwaraModule(std::move(c));
}

KashiwaraModule KashiwaraModule::act_u() const { return act_y() + act_v(); }
KashiwaraModule KashiwaraModule::act_dv() const { return act_dv_prime() - act_dy(); }

KashiwaraModule KashiwaraModule::operator+(const KashiwaraModule& o) const
{
    std::size_t n = std::max(comps_.size(), o.comps_.size());
    std::vector<Field> c;
    for (std::size_t j = 0; j < n; ++j) {
        if (j >= comps_.size()) c.push_back(o.comps_[j]);
        else if (j >= o.comps_.size()) c.push_back(comps_[j]);
        else c.push_back(comps_[j] + o.comps_[j]);
    }
    return KashiwaraModule(std::move(c));
}

KashiwaraModule KashiwaraModule::operator-(const KashiwaraModule& o) const { return *this + o * Scalar(-1); }

KashiwaraModule KashiwaraModule::operator*(const Scalar& s) const
{
    std::vector<Field> c;
    for (auto& x : comps_) c.push_back(x * s);
    return KashiwaraModule(std::move(c));
}

bool KashiwaraModule::agrees(const KashiwaraModule& o, Window w, int K, EvalContext& ctx) const
{
    auto codes = w.codes(comps_.front().config());
    std::size_t n = std::max(comps_.size(), o.comps_.size());
    for (std::size_t j = 0; j < n; ++j)
        for (int c : codes) {
            const auto& U = comps_.front().algebra();
            UElement a = j < comps_.size() ? comps_[j].eval(ctx, Codes{c, 0, 0}, K) : UElement(U);
            UElement b = j < o.comps_.size() ? o.comps_[j].eval(ctx, Codes{c, 0, 0}, K) : UElement(U);
            if (!(a - b).is_zero_at_level(K)) return false;
        }
    return true;
}

KashiwaraModule identify_local(const Field& Z, int h, Window w, int K)
{
    if (Z.arity() != 2) throw Error(ErrorKind::Invalid, "identify_local needs a two-slot field");
    auto codes = w.codes(Z.config());
    if (!vanishes_on_pairs(act(Z, delta_power(Z.config(), h + 1)), codes, K))
        throw Error(ErrorKind::NotLocalAtWindow, "two-field is not killed by delta^" + std::to_string(h + 1) + " on window " + w.str());
    std::vector<Field> comps;
    for (int j = 0; j <= h; ++j) comps.push_back(kashiwara_component(Z, j));
    KashiwaraModule M(std::move(comps));
    Report rep;
    compare_on(rep, M.realize(), Z, codes, K, "reconstruction");
    if (!rep.pass) throw Error(ErrorKind::NotLocalAtWindow, "reconstruction differs: " + rep.residuals.front());
    return M;
}

// ------------------------------------------------------------------ unit

Report unit_axiom_check(const Field& X, const PhiSeries& f, const PhiSeries& g, const PhiSeries& h, Window w, int K)
{
    Report rep;
    rep.check = "unit-axiom";
    rep.window = w;
    rep.K = K;
    const auto& cfg = X.config();
    Field unit = Field::unit(cfg, X.algebra(), f);
    compare_on(rep, mu(unit, X), Field::zero(cfg, X.algebra(), 2), w.codes(cfg), K, "regular");
    // Phi: the two-field l -> X(f g h Delta#(l))
    Field lhs = mu(unit, X, tensor(g, h), 1);
    Field rhs = delta_push(X * (f * g * h));
    compare_on(rep, lhs, rhs, w.codes(cfg), K, "Phi");
    return rep;
}

// ------------------------------------------------------------------ Jacobi

Report jacobi_check(const std::array<Field, 3>& X, const std::array<int, 3>& poles, Window w, int K)
{
    Report rep;
    rep.check = "jacobi";
    rep.window = w;
    rep.K = K;
    const auto& cfg = X[0].config();
    auto pole = [&](int i, int j) {
        if (i > j) std::swap(i, j);
        return i == 0 ? (j == 1 ? poles[0] : poles[1]) : poles[2];
    };
    // (x_i - x_j)^-e for i > j is (-1)^e (x_j - x_i)^-e
    auto orient = [&](int i, int j) { return i < j ? 1 : sign_pow(pole(i, j)); };
    for (auto& f : X)
        if (f.parity() < 0) throw Error(ErrorKind::Invalid, "jacobi: fields must have a definite parity");
    // mu^{p,{q,r}}(X_p (x) mu(X_q (x) X_r)) read in the slot order (p,q,r)
    auto term = [&](int p, int q, int r) {
        Field inner = mu(X[std::size_t(q)], X[std::size_t(r)], TwoVarSeries::one(cfg) * Scalar(long(orient(q, r))), pole(q, r));
        ThreeVarSeries num = ThreeVarSeries::one(cfg) * Scalar(long(orient(p, q) * orient(p, r)));
        Field outer = mu3(X[std::size_t(p)], inner, num, pole(p, q), pole(p, r));
        // Koszul sign of moving the fields into the order (p,q,r)
        int order[3] = {p, q, r}, sign = 1;
        for (int i = 0; i < 3; ++i)
            for (int j = i + 1; j < 3; ++j)
                if (order[i] > order[j] && X[std::size_t(order[i])].parity() * X[std::size_t(order[j])].parity() % 2) sign = -sign;
        return std::make_pair(outer, sign);
    };
    std::array<std::pair<Field, int>, 3> terms = {term(0, 1, 2), term(2, 0, 1), term(1, 2, 0)};
    auto codes = w.codes(cfg);
    long n = long(codes.size());
    std::mutex m;
    parallel_for(n * n * n, [&](long i, EvalContext& ctx) {
        int l[3] = {codes[std::size_t(i / (n * n))], codes[std::size_t((i / n) % n)], codes[std::size_t(i % n)]};
        UElement sum(X[0].algebra());
        for (int t = 0; t < 3; ++t) {
            int p = t == 0 ? 0 : t == 1 ? 2 : 1;
            int q = (p + 1) % 3, r = (p + 2) % 3;
            UElement v = terms[std::size_t(t)].first.eval(ctx, Codes{l[p], l[q], l[r]}, K);
            sum += terms[std::size_t(t)].second > 0 ? v : -v;
        }
        if (!sum.truncate(K).is_zero()) {
            std::lock_guard<std::mutex> lock(m);
            rep.fail("triple " + codes_str({l[0], l[1], l[2]}) + ": " + sum.str());
        }
    });
    rep.cases = n * n * n;
    rep.note("poles", codes_str({poles[0], poles[1], poles[2]}));
    return rep;
}

// ------------------------------------------------------------------ mu^{1,2}

namespace {

// two-field pulled back to three slots along the merge of slots 1 and 2:
// (a, b, c) -> Z(a, phi_b phi_c); with deriv, phi_b is differentiated first
class MergeNode : public FieldNode {
public:
    MergeNode(FieldPtr Z, bool deriv) : FieldNode(Z->config(), Z->algebra(), 3), Z_(std::move(Z)), deriv_(deriv)
    {
        bounds_ = Z_->bounds();
        bounds_.sigma -= 4L * (cfg_.n() - 1) + (deriv ? 2L * (2 * cfg_.n() - 1) : 0);
        parity_ = Z_->parity();
    }
    std::string describe() const override { return "merge(" + Z_->describe() + (deriv_ ? ", d" : "") + ")"; }

protected:
    UElement compute(EvalContext& ctx, const Codes& c, int K) const override
    {
        std::map<int, Scalar> first{{c[1], Scalar(1)}};
        if (deriv_) {
            first.clear();
            accumulate_derivative(cfg_, c[1], Scalar(1), first);
        }
        std::map<int, Scalar> prod;
        for (auto& [code, coef] : first)
            if (!coef.is_zero()) accumulate_product(cfg_, code, c[2], coef, prod);
        UElement acc(alg_);
        for (auto& [code, coef] : prod)
            if (!coef.is_zero()) acc += Z_->value(ctx, Codes{c[0], code, 0}, K) * coef;
        return acc;
    }

private:
    FieldPtr Z_;
    bool deriv_;
};

Field merge(const Field& Z, bool deriv) { return Field(std::make_shared<MergeNode>(Z.node(), deriv)); }

} // namespace

Report mu12_compat_check(const Field& X, const Field& Y, int h, int p, int q, const ThreeVarSeries& num, Window w, int K)
{
    if (h < 0 || h > 1) throw Error(ErrorKind::Invalid, "mu12 compatibility is implemented for h in {0, 1}");
    Report rep;
    rep.check = "mu12";
    rep.window = w;
    rep.K = K;
    rep.note("h", std::to_string(h));
    rep.note("poles", codes_str({p, q}));
    const auto& cfg = X.config();
    Field Yt = delta_push(Y);
    if (h == 1) Yt = d_slot(Yt, 0);
    Field lhs = mu3(X, Yt, num, p, q);
    TwoVarSeries merged = diag_restrict(num, 1, 2);
    Field rhs = merge(mu(X, Y, merged, p + q), h == 1);
    if (h == 1) {
        // (Z d_2) f = (Z f) d_2 + Z (d_2 f), with d_2 delta01^-p = p delta01^-p-1
        TwoVarSeries dnum = diag_restrict(d_slot(num, 1), 1, 2);
        rhs = rhs + merge(mu(X, Y, dnum, p + q), false);
        if (p > 0) rhs = rhs + merge(mu(X, Y, merged * Scalar(long(p)), p + q + 1), false);
    }
    compare_on(rep, lhs, rhs, w.codes(cfg), K, "mu12");
    return rep;
}

// ------------------------------------------------------------------ R mu D

Report rmud_check(const Field& X, const Field& Y, int m, Window w, int K, RmuDForms* forms)
{
    Report rep;
    rep.check = "rmud";
    rep.window = w;
    rep.K = K;
    const auto& cfg = X.config();
    auto codes = w.codes(cfg);
    Field L = rmu(X, Y, m).d();
    Field A = rmu(X, Y.d(), m);
    Field B = rmu(X, Y, m + 1) * Scalar(long(m));
    Report minus, trailing, plus;
    compare_on(minus, L, A - B, codes, K, "minus form");
    compare_on(trailing, L, A.d() - B, codes, K, "trailing d form");
    compare_on(plus, L, A + B, codes, K, "plus form");
    RmuDForms f{minus.pass, trailing.pass, plus.pass};
    if (forms) {
        forms->minus_form = forms->minus_form && f.minus_form;
        forms->trailing_d_form = forms->trailing_d_form && f.trailing_d_form;
        forms->plus_form = forms->plus_form && f.plus_form;
    }
    rep.cases = minus.cases;
    rep.note("m", std::to_string(m));
    rep.note("minus_form", f.minus_form ? "holds" : "fails");
    rep.note("trailing_d_form", f.trailing_d_form ? "holds" : "fails");
    rep.note("plus_form", f.plus_form ? "holds" : "fails");
    if (!f.minus_form && !f.trailing_d_form && !f.plus_form) {
        rep.pass = false;
        for (auto& r : minus.residuals) rep.fail(r);
    }
    return rep;
}

// ------------------------------------------------------------------ Dong

namespace {

int require_order(const Field& X, const Field& Y, Window w, int K, int max_k = 8)
{
    auto r = locality_order(X, Y, max_k, w, K);
    if (!r.order) throw Error(ErrorKind::NotLocal, X.describe() + " and " + Y.describe() + " not local below order " + std::to_string(max_k));
    return *r.order;
}

} // namespace

Report dong_check_a(const Field& X, const Field& Y, int n, Window w, int K)
{
    Report rep;
    rep.check = "dong-a";
    rep.window = w;
    rep.K = K;
    int ord = require_order(X, Y, w, K);
    int h = std::max(ord - 1, 0);
    int bound = h + n + 1;
    auto r = locality_order(mu(X, Y, n), bound, w, K);
    rep.cases = r.pairs;
    rep.note("pole", std::to_string(n));
    rep.note("bound", std::to_string(bound));
    rep.note("observed", r.order ? std::to_string(*r.order) : "none");
    if (!r.order) rep.fail("mu(X (x) Y delta^-" + std::to_string(n) + ") not killed by delta^" + std::to_string(bound));
    return rep;
}

Report dong_check_b(const Field& X, const Field& Y, Window w, int K)
{
    Report rep;
    rep.check = "dong-b";
    rep.window = w;
    rep.K = K;
    int ord = require_order(X, Y, w, K);
    auto r = locality_order(X.d(), Y, ord + 1, w, K);
    rep.cases = r.pairs;
    rep.note("order", std::to_string(ord));
    rep.note("derived", r.order ? std::to_string(*r.order) : "none");
    if (!r.order) rep.fail("derivative raised the locality order by more than one");
    return rep;
}

Report dong_check_c(const Field& X, const Field& Y, const Field& Z, int n, Window w, int K)
{
    Report rep;
    rep.check = "dong-c";
    rep.window = w;
    rep.K = K;
    int hyz = std::max(require_order(Y, Z, w, K) - 1, 0);
    int m = hyz + n;
    int m1 = std::max(require_order(X, Y, w, K), require_order(X, Z, w, K)) - 1;
    int bound = 3 * std::max(m, m1) + 1;
    auto r = locality_order(X, rmu(Y, Z, n), bound, w, K);
    rep.cases = r.pairs;
    rep.note("bound", std::to_string(bound));
    rep.note("observed", r.order ? std::to_string(*r.order) : "none");
    if (!r.order) rep.fail("no locality order below " + std::to_string(bound));
    return rep;
}

// ------------------------------------------------------------------ generation

namespace {

using Coord = std::pair<int, Word>;
using Vec = std::map<Coord, Scalar>;

// window vector of the non-central part of (X g)(phi_d), g = phi_c (c < 0: g = 1)
Vec window_vector(EvalContext& ctx, const Field& X, int c, const std::vector<int>& codes, int K)
{
    const auto& cfg = X.config();
    Vec v;
    for (int d : codes) {
        std::map<int, Scalar> prod;
        if (c >= 0) accumulate_product(cfg, c, d, Scalar(1), prod);
        else prod[d] = Scalar(1);
        UElement acc(X.algebra());
        for (auto& [code, coef] : prod)
            if (!coef.is_zero()) acc += X.eval(ctx, Codes{code, 0, 0}, K) * coef;
        acc = acc.truncate(K);
        for (auto& [w, coef] : acc.terms())
            if (!w.empty()) v.emplace(Coord{d, w}, coef);
    }
    return v;
}

// row echelon basis keyed by pivot coordinate
class Echelon {
public:
    // reduce v; true if it is in the span
    bool reduce(Vec& v) const
    {
        for (auto& [piv, row] : rows_) {
            auto it = v.find(piv);
            if (it == v.end()) continue;
            Scalar f = it->second;
            for (auto& [k, c] : row) {
                auto [jt, fresh] = v.try_emplace(k, Scalar());
                jt->second -= f * c;
                if (jt->second.is_zero()) v.erase(jt);
            }
        }
        return v.empty();
    }
    bool add(Vec v)
    {
        if (reduce(v)) return false;
        Coord piv = v.begin()->first;
        Scalar inv = v.begin()->second.inverse();
        for (auto& [k, c] : v) c *= inv;
        // keep rows fully reduced against the new pivot
        for (auto& [p, row] : rows_) {
            auto it = row.find(piv);
            if (it == row.end()) continue;
            Scalar f = it->second;
            for (auto& [k, c] : v) {
                auto [jt, fresh] = row.try_emplace(k, Scalar());
                jt->second -= f * c;
                if (jt->second.is_zero()) row.erase(jt);
            }
        }
        rows_.emplace(piv, std::move(v));
        return true;
    }
    std::size_t rank() const { return rows_.size(); }

private:
    std::map<Coord, Vec> rows_;
};

// largest multiplier code c such that X phi_c can be nonzero on the window
int multiplier_bound(const Field& X, Window w, int K)
{
    int n = X.config().n();
    long S = X.bounds().threshold(n, K);
    long c = S - long(n) * w.lo + 2L * (n - 1);
    return int(std::max<long>(c, 0));
}

void span_layer(Echelon& E, EvalContext& ctx, const Field& X, Window w, int K)
{
    auto codes = w.codes(X.config());
    E.add(window_vector(ctx, X, -1, codes, K));
    int C = multiplier_bound(X, w, K);
    for (int c = 0; c < C; ++c) E.add(window_vector(ctx, X, c, codes, K));
}

} // namespace

bool in_layer(const Field& P, const GenerationLayer& V, Window w, int K)
{
    EvalContext ctx;
    Echelon E;
    for (auto& g : V.gens) span_layer(E, ctx, g, w, K);
    Vec v = window_vector(ctx, P, -1, w.codes(P.config()), K);
    return E.reduce(v);
}

GenerationResult generate_basic(const std::vector<Field>& G, int steps, const GenerationOptions& opt)
{
    GenerationResult res;
    Report& rep = res.report;
    rep.check = "generate";
    rep.window = opt.window;
    rep.K = opt.K;
    EvalContext ctx;
    Echelon E;
    GenerationLayer V0;
    int idx = 0;
    for (auto& g : G) {
        if (g.arity() != 1) throw Error(ErrorKind::Invalid, "generators must be one-slot fields");
        Vec v = window_vector(ctx, g, -1, opt.window.codes(g.config()), opt.K);
        Echelon probe = E;
        if (probe.reduce(v)) continue; // central or dependent
        span_layer(E, ctx, g, opt.window, opt.K);
        V0.gens.push_back(g);
        V0.labels.push_back("g" + std::to_string(idx++));
    }
    res.layers.push_back(V0);
    rep.note("V0", std::to_string(V0.gens.size()));
    for (int s = 0; s < steps; ++s) {
        const GenerationLayer& cur = res.layers.back();
        GenerationLayer next = cur;
        std::vector<std::pair<Field, std::string>> cands;
        for (std::size_t i = 0; i < cur.gens.size(); ++i) cands.emplace_back(cur.gens[i].d(), cur.labels[i] + "*d");
        for (std::size_t i = 0; i < cur.gens.size(); ++i)
            for (std::size_t j = 0; j < cur.gens.size(); ++j) {
                auto loc = locality_order(cur.gens[i], cur.gens[j], opt.max_locality, opt.window, opt.K);
                if (!loc.order)
                    throw Error(ErrorKind::NotLocal, cur.labels[i] + " and " + cur.labels[j] + " are not local below order " +
                                                         std::to_string(opt.max_locality));
                const auto& cfg = cur.gens[i].config();
                std::string lab = "R mu(" + cur.labels[i] + ", " + cur.labels[j];
                cands.emplace_back(rmu(cur.gens[i], cur.gens[j], 1), lab + ", d^-1)");
                for (int e = 0; e < *loc.order; ++e)
                    cands.emplace_back(rmu(cur.gens[i], cur.gens[j], delta_power(cfg, e), 0), lab + ", d^" + std::to_string(e) + ")");
            }
        for (auto& [f, lab] : cands) {
            Vec v = window_vector(ctx, f, -1, opt.window.codes(f.config()), opt.K);
            if (E.reduce(v)) continue;
            span_layer(E, ctx, f, opt.window, opt.K);
            next.gens.push_back(f);
            next.labels.push_back(lab);
        }
        rep.note("V" + std::to_string(s + 1), std::to_string(next.gens.size()));
        res.layers.push_back(std::move(next));
    }
    rep.note("rank", std::to_string(E.rank()));
    return res;
}

Report generation_probes(const GenerationResult& gen, int max_n, int max_m, const GenerationOptions& opt)
{
    Report rep;
    rep.check = "generate-probes";
    rep.window = opt.window;
    rep.K = opt.K;
    int top = int(gen.layers.size()) - 1;
    for (int n = 0; n <= max_n; ++n)
        for (int m = 0; m <= max_m; ++m) {
            int target = n + 2 * m;
            if (target > top) {
                rep.fail("layer V(" + std::to_string(target) + ") was not generated");
                continue;
            }
            const auto& Vn = gen.layers[std::size_t(n)];
            const auto& Vt = gen.layers[std::size_t(target)];
            EvalContext ctx;
            Echelon E;
            for (auto& g : Vt.gens) span_layer(E, ctx, g, opt.window, opt.K);
            for (std::size_t i = 0; i < Vn.gens.size(); ++i)
                for (std::size_t j = 0; j < Vn.gens.size(); ++j) {
                    const auto& cfg = Vn.gens[i].config();
                    PhiSeries one = PhiSeries::one(cfg), t = PhiSeries::t(cfg);
                    // numerators 1, t (x) 1 and 1 (x) t against delta^-m
                    std::vector<TwoVarSeries> nums = {TwoVarSeries::one(cfg), tensor(t, one), tensor(one, t)};
                    for (std::size_t k = 0; k < nums.size(); ++k) {
                        Field P = rmu(Vn.gens[i], Vn.gens[j], nums[k], m);
                        Vec v = window_vector(ctx, P, -1, opt.window.codes(cfg), opt.K);
                        ++rep.cases;
                        if (!E.reduce(v))
                            rep.fail("R mu(" + Vn.labels[i] + ", " + Vn.labels[j] + ") numerator " + std::to_string(k) + " pole " +
                                     std::to_string(m) + " not in V(" + std::to_string(target) + ")");
                    }
                }
        }
    return rep;
}

} // namespace chiral
