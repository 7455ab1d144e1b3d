#pragma once

// Property suites shared by the command line tool and the acceptance runner:
// random inputs, named fields and one entry per acceptance criterion.

#include <functional>
#include <random>
#include <string>
#include <vector>

#include "chiral/factorization.hpp"

namespace chiral {

PhiSeries random_series(const SigmaConfig& cfg, std::mt19937& rng, int lo, int hi, int terms, int coef = 3);
TwoVarSeries random_poly_tensor(const SigmaConfig& cfg, std::mt19937& rng, int lo, int hi, int terms = 3);
// separated integer values for a1..an
Substitution random_separation(int n, std::mt19937& rng);

// beta, beta_d, beta_dd, beta_t, beta_tt, q (= R m_r(beta, beta t)), unit
Field named_field(const std::string& name, const SigmaConfig& cfg, const AlgebraPtr& U);
std::vector<std::string> field_names();

// "12|3" (blocks of 1-based points) or "0,0,1"
Partition parse_partition(const std::string& text, int n);
// "a1=0,a2=1/2"
Substitution parse_substitution(const std::string& text);

struct SuiteOptions {
    unsigned seed = 1;
    int samples = 0; // 0: the criterion's default
};

struct Criterion {
    int id;
    std::string name;
    double budget_s;
    std::function<Report(const SuiteOptions&)> run;
};

const std::vector<Criterion>& acceptance_criteria();

// suites also reachable from the command line
Report pairing_suite(int n, int lo, int hi);
Report residue_suite(int n, int samples, int split_samples, unsigned seed);
Report expansion_suite(int n, int m_pair);
Report cauchy_suite(int n, int M, int m_pair, int max_pole, int samples, unsigned seed);
Report kashiwara_suite(int samples, unsigned seed);

} // namespace chiral
