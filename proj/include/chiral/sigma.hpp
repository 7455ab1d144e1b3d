#pragma once

// Truncated phi-adic completion of F[t] along the marked points a_1..a_n and
// its localization at phi, stored in the phi^+ basis.

#include <climits>
#include <map>
#include <memory>
#include <string>
#include <vector>

#include "chiral/scalar.hpp"
#include "chiral/tpoly.hpp"

namespace chiral {

constexpr int kExact = INT_MAX; // "no truncation loss" marker for valid windows

inline int floor_div(int a, int b) { return a >= 0 ? a / b : -((-a + b - 1) / b); }

enum class Sign { plus, minus };

struct BasisIndex {
    Sign sign = Sign::plus;
    int m = 0;
    int i = 0;
    bool operator<(const BasisIndex& o) const
    {
        if (sign != o.sign) return sign < o.sign;
        return m != o.m ? m < o.m : i < o.i;
    }
    bool operator==(const BasisIndex& o) const { return sign == o.sign && m == o.m && i == o.i; }
};

// A linear combination entry (level offset, basis position, coefficient).
struct BasisTerm {
    int dl;
    int k;
    Scalar c;
};

class SigmaConfig {
public:
    // symbolic parameters a1..an (or the given names)
    SigmaConfig(int n, int M);
    SigmaConfig(const std::vector<std::string>& params, int M);
    // explicit roots, e.g. after substitution
    static SigmaConfig from_roots(const std::vector<Scalar>& roots, int M);

    int n() const { return d_->n; }
    int M() const { return d_->M; }
    const std::vector<Scalar>& roots() const { return d_->roots; }
    std::vector<std::string> params() const; // parameter names the roots depend on
    const TPoly& phi() const { return d_->phi; }
    const TPoly& pi(int i) const { return d_->pi[std::size_t(i)]; }
    const TPoly& rho(int i) const { return d_->rho[std::size_t(i)]; }

    SigmaConfig with_truncation(int M) const;
    SigmaConfig substituted(const Substitution& s) const;

    // packed basis codes: code = m*n + i preserves (m, i) order
    int code(int m, int i) const { return m * d_->n + i; }
    int level(int code) const { return floor_div(code, d_->n); }
    int pos(int code) const { return code - level(code) * d_->n; }

    // pi_i * pi_j in the plus basis relative to phi^0
    const std::vector<BasisTerm>& product_table(int i, int j) const { return d_->prod[std::size_t(i * d_->n + j)]; }
    // d/dt (phi^m pi_i) = m * A_i shifted to m-1 + B_i shifted to m
    const std::vector<BasisTerm>& dphi_table(int i) const { return d_->dphi[std::size_t(i)]; }
    const std::vector<BasisTerm>& dpi_table(int i) const { return d_->dpi[std::size_t(i)]; }
    // rho_i in the pi basis and pi_i in the rho basis (both unitriangular)
    const std::vector<Scalar>& rho_in_pi(int i) const { return d_->rho_in_pi[std::size_t(i)]; }
    const std::vector<Scalar>& pi_in_rho(int i) const { return d_->pi_in_rho[std::size_t(i)]; }

    // coefficients c_0..c_{n-1} with r = sum c_i pi_i, for deg r < n
    std::vector<Scalar> to_pi_basis(const TPoly& r) const;

    bool same_roots(const SigmaConfig& o) const { return d_ == o.d_ || d_->roots == o.d_->roots; }
    bool operator==(const SigmaConfig& o) const { return d_ == o.d_ || (d_->M == o.d_->M && d_->roots == o.d_->roots); }
    bool operator!=(const SigmaConfig& o) const { return !(*this == o); }
    std::string str() const;

private:
    struct Data {
        int n = 0, M = 0;
        std::vector<Scalar> roots;
        TPoly phi;
        std::vector<TPoly> pi, rho;
        std::vector<std::vector<BasisTerm>> prod, dphi, dpi;
        std::vector<std::vector<Scalar>> rho_in_pi, pi_in_rho;
    };
    explicit SigmaConfig(std::shared_ptr<const Data> d) : d_(std::move(d)) {}
    static std::shared_ptr<const Data> build(const std::vector<Scalar>& roots, int M);
    std::shared_ptr<const Data> d_;
};

class PhiSeries {
public:
    explicit PhiSeries(SigmaConfig cfg) : cfg_(std::move(cfg)) {}

    static PhiSeries zero(const SigmaConfig& cfg) { return PhiSeries(cfg); }
    static PhiSeries one(const SigmaConfig& cfg) { return basis(cfg, 0, 0); }
    static PhiSeries constant(const SigmaConfig& cfg, const Scalar& c) { return basis(cfg, 0, 0, c); }
    static PhiSeries basis(const SigmaConfig& cfg, int m, int i, const Scalar& c = Scalar(1));
    static PhiSeries minus_basis(const SigmaConfig& cfg, int m, int i, const Scalar& c = Scalar(1));
    static PhiSeries t(const SigmaConfig& cfg);
    static PhiSeries from_monomials(const TPoly& p, int phi_power, const SigmaConfig& cfg);

    const SigmaConfig& config() const { return cfg_; }
    const std::map<int, Scalar>& coeffs() const { return c_; }
    bool is_zero() const { return c_.empty(); }
    std::size_t size() const { return c_.size(); }
    Scalar coeff(int m, int i) const;
    // smallest phi-level present (kExact for zero)
    int pole_order() const { return c_.empty() ? kExact : cfg_.level(c_.begin()->first); }
    int top_level() const { return c_.empty() ? INT_MIN : cfg_.level(c_.rbegin()->first); }
    bool in_filtration(int k) const { return c_.empty() || pole_order() >= -k; }
    // coefficients are exact for phi-levels below this bound
    int valid_below() const { return valid_; }
    void set_valid_below(int v) { valid_ = v; }

    // (p, k) with f = p * phi^k, k = pole order (0 for zero series)
    std::pair<TPoly, int> to_monomials() const;
    // coefficients in the phi^- basis, keyed by packed code
    std::map<int, Scalar> minus_coeffs() const;

    void add_term(int code, const Scalar& c); // drops levels >= M
    PhiSeries operator-() const;
    PhiSeries& operator+=(const PhiSeries& o);
    PhiSeries& operator-=(const PhiSeries& o);
    PhiSeries operator+(const PhiSeries& o) const { PhiSeries r(*this); r += o; return r; }
    PhiSeries operator-(const PhiSeries& o) const { PhiSeries r(*this); r -= o; return r; }
    PhiSeries operator*(const PhiSeries& o) const;
    PhiSeries operator*(const Scalar& s) const;
    PhiSeries truncated(int level) const;
    PhiSeries with_config(const SigmaConfig& cfg) const; // same coefficients, other truncation

    bool operator==(const PhiSeries& o) const { return cfg_.same_roots(o.cfg_) && c_ == o.c_; }
    bool operator!=(const PhiSeries& o) const { return !(*this == o); }

    std::string str() const;

private:
    SigmaConfig cfg_;
    std::map<int, Scalar> c_;
    int valid_ = kExact;
};

PhiSeries mul(const PhiSeries& f, const PhiSeries& g);
PhiSeries d_dt(const PhiSeries& f);
PhiSeries substitute(const PhiSeries& f, const Substitution& s);

// phi^m pi_i times phi^l pi_k accumulated into out (plus basis, packed codes)
void accumulate_product(const SigmaConfig& cfg, int code_a, int code_b, const Scalar& c, std::map<int, Scalar>& out);
void accumulate_derivative(const SigmaConfig& cfg, int code, const Scalar& c, std::map<int, Scalar>& out);

struct OneForm {
    PhiSeries density;
    explicit OneForm(PhiSeries f) : density(std::move(f)) {}
};

// finite sum of g * d^k
class DOperator {
public:
    DOperator() = default;
    static DOperator multiplication(const PhiSeries& g) { DOperator d; d.add(g, 0); return d; }
    static DOperator derivative(const SigmaConfig& cfg, int k = 1) { DOperator d; d.add(PhiSeries::one(cfg), k); return d; }
    void add(const PhiSeries& g, int k);
    const std::map<int, PhiSeries>& terms() const { return terms_; }

private:
    std::map<int, PhiSeries> terms_;
};

PhiSeries apply_dop(const DOperator& D, const PhiSeries& f);

void require_same(const SigmaConfig& a, const SigmaConfig& b, const char* where);

// text form: header line then "m i scalar" per term
std::string to_text(const PhiSeries& f);
PhiSeries phiseries_from_text(const std::string& text);
std::string config_header(const SigmaConfig& cfg);

} // namespace chiral
