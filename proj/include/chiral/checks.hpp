#pragma once

// Verification procedures for fields: locality, the Kashiwara local model,
// the unit axiom, Jacobi, the mu^{1,2} compatibility, the derivative
// identity for R mu, Dong bounds and the basic generation of a chiral
// algebra. Every check is exact on a finite window of basis inputs,
// modulo the level-K truncation ideal of U.

#include <functional>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "chiral/fields.hpp"

namespace chiral {

struct Report {
    std::string check;
    bool pass = true;
    Window window;
    int K = 0;
    long cases = 0;
    std::vector<std::string> residuals; // first failing cases
    std::vector<std::pair<std::string, std::string>> info;

    void fail(const std::string& what);
    void note(const std::string& key, const std::string& value) { info.emplace_back(key, value); }
    void merge(const Report& o);
};

// worker count: CHIRAL_THREADS caps the hardware concurrency
int worker_count();
// runs body(i, ctx) for i in [0, count) on worker_count() threads, one
// evaluation context per thread
void parallel_for(long count, const std::function<void(long, EvalContext&)>& body);

// smallest k <= max_k with Z(delta^k (phi_a (x) phi_b)) in the level-K
// ideal for all window basis pairs
struct LocalityResult {
    std::optional<int> order;
    int max_k = 0;
    Window window;
    int K = 0;
    long pairs = 0;
};
LocalityResult locality_order(const Field& Z, int max_k, Window w, int K);
LocalityResult locality_order(const Field& X, const Field& Y, int max_k, Window w, int K);

// sum_j X_j d_y^j with the local action rules
class KashiwaraModule {
public:
    explicit KashiwaraModule(std::vector<Field> comps);
    // X d_y^h
    static KashiwaraModule push(const Field& X, int h);

    const std::vector<Field>& components() const { return comps_; }
    int order() const { return int(comps_.size()) - 1; }

    // m d^n . v = (m t) d^n
    KashiwaraModule act_v() const;
    // m d^n . y = -n m d^(n-1)
    KashiwaraModule act_y() const;
    // m d^n . d_v' = (m d_t) d^n
    KashiwaraModule act_dv_prime() const;
    // m d^n . d_y = m d^(n+1)
    KashiwaraModule act_dy() const;
    // u = y + v and d_v = d_v' - d_y
    KashiwaraModule act_u() const;
    KashiwaraModule act_dv() const;

    KashiwaraModule operator+(const KashiwaraModule& o) const;
    KashiwaraModule operator-(const KashiwaraModule& o) const;
    KashiwaraModule operator*(const Scalar& s) const;

    Field realize() const { return kashiwara_realize(comps_); }
    // component-wise agreement on the window
    bool agrees(const KashiwaraModule& o, Window w, int K, EvalContext& ctx) const;

private:
    std::vector<Field> comps_;
};

KashiwaraModule kashiwara_push(const Field& X, int h);
// components X_0..X_h of a two-field killed by J^{h+1}; NotLocalAtWindow
// if the window shows otherwise or the reconstruction differs
KashiwaraModule identify_local(const Field& Z, int h, Window w, int K);

// mu(1(w) (x) X) = 0 on regular tensors and
// mu(1(f dt) (x) X)((g (x) h)/delta)(l) = X(f g h Delta#(l))
Report unit_axiom_check(const Field& X, const PhiSeries& f, const PhiSeries& g, const PhiSeries& h, Window w, int K);

// nu + rho nu + rho^2 nu on window basis triples; poles = (e01, e02, e12)
Report jacobi_check(const std::array<Field, 3>& X, const std::array<int, 3>& poles, Window w, int K);

// mu^{1,{23}} against mu on the merged slots, poles delta01^-p delta02^-q
Report mu12_compat_check(const Field& X, const Field& Y, int h, int p, int q, const ThreeVarSeries& num, Window w, int K);

// R mu(X (x) Y delta^-m) . d against the candidate forms; the report names
// the form that holds
struct RmuDForms {
    bool minus_form = true;      // = R mu(X (x) Y d delta^-m) - m R mu(X (x) Y delta^-m-1)
    bool trailing_d_form = true; // = R mu(X (x) Y d delta^-m) . d - m R mu(X (x) Y delta^-m-1)
    bool plus_form = true;       // = R mu(X (x) Y d delta^-m) + m R mu(X (x) Y delta^-m-1)
};
Report rmud_check(const Field& X, const Field& Y, int m, Window w, int K, RmuDForms* forms = nullptr);

// Dong bounds: (a) exponent h+n+1, (b) derivative adds at most one,
// (c) X against R mu(Y (x) Z delta^-n) within 3 max(m, m1) + 1
Report dong_check_a(const Field& X, const Field& Y, int n, Window w, int K);
Report dong_check_b(const Field& X, const Field& Y, Window w, int K);
Report dong_check_c(const Field& X, const Field& Y, const Field& Z, int n, Window w, int K);

// basic construction V(0..steps) from G
struct GenerationLayer {
    std::vector<Field> gens; // spanning set modulo O-multiples and central fields
    std::vector<std::string> labels;
};
struct GenerationOptions {
    Window window = Window::centered(4);
    int K = 3;
    int max_locality = 4;
};
struct GenerationResult {
    std::vector<GenerationLayer> layers;
    Report report;
};
GenerationResult generate_basic(const std::vector<Field>& G, int steps, const GenerationOptions& opt);
// is P in V (O-span of the generators plus central fields) on the window?
bool in_layer(const Field& P, const GenerationLayer& V, Window w, int K);
// closure probes R mu(V(n) (x) V(n)(m Delta)) in V(n + 2m)
Report generation_probes(const GenerationResult& gen, int max_n, int max_m, const GenerationOptions& opt);

} // namespace chiral
