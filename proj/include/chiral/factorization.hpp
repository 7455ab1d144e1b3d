#pragma once

// Factorization maps. fact splits a series over n marked points into one
// series per block of a partition (CRT over the block polynomials once the
// blocks are separated); ran merges by colliding parameters, re-expressing
// phi_J as phi_I powers. Fields split along the same maps.

#include <memory>
#include <vector>

#include "chiral/checks.hpp"

namespace chiral {

// surjection J ->> I given as the block index of each point
class Partition {
public:
    explicit Partition(std::vector<int> block_of);
    static Partition discrete(int n);
    static Partition single(int n) { return Partition(std::vector<int>(std::size_t(n), 0)); }

    int points() const { return int(block_of_.size()); }
    int blocks() const { return blocks_; }
    int block_of(int i) const { return block_of_.at(std::size_t(i)); }
    const std::vector<int>& map() const { return block_of_; }
    // points of block b in increasing order
    std::vector<int> members(int b) const;
    // does every block of *this lie inside a block of coarse?
    bool refines(const Partition& coarse) const;
    // *this restricted to block b of coarse, blocks renumbered in order
    Partition restricted(const Partition& coarse, int b) const;
    std::string str() const;

private:
    std::vector<int> block_of_;
    int blocks_ = 0;
};

struct FactData;

// CRT data for (config, partition, substitution); cached per truncation
class Factorization {
public:
    Factorization(const SigmaConfig& cfg, const Partition& p, const Substitution& s = {});

    const SigmaConfig& merged_config() const { return merged_; }
    const std::vector<SigmaConfig>& block_configs() const { return blocks_; }
    const Partition& partition() const { return part_; }

    std::vector<PhiSeries> split(const PhiSeries& f) const;
    PhiSeries merge(const std::vector<PhiSeries>& parts) const;
    // e_b with e_b = 1 mod phi_b^N and 0 mod the other blocks
    PhiSeries idempotent(int b, int N) const;

private:
    std::shared_ptr<const FactData> data(int N) const;
    SigmaConfig merged_;
    std::vector<SigmaConfig> blocks_;
    Partition part_;
    Substitution s_;
};

std::vector<PhiSeries> fact_split(const PhiSeries& f, const Partition& p, const Substitution& s = {});
PhiSeries fact_merge(const std::vector<PhiSeries>& parts, const Partition& p);

// collision a_j -> a_rep(c(j)) with rep the first point of each class;
// colliding points must carry bare parameters
SigmaConfig ran_config(const SigmaConfig& cfg, const Partition& c, int M);
// TruncationIncompatible unless M <= (smallest multiplicity) * cfg.M()
PhiSeries ran_merge(const PhiSeries& f, const Partition& c, int M = 0);

// X((f_b)) = sum_b X_b(f_b), block b of the result algebra holding X_b
Field field_split(const std::vector<Field>& parts, const Factorization& fz);
// X pulled back along the substitution
Field field_base_change(const Field& X, const Substitution& s);
// u_b -> the same word in block b of target
UElement embed_block(const UElement& u, const AlgebraPtr& target, int block);

// round trips, cocycle and mixed compatibility, Ran transitivity
Report fact_axioms_check(int n, int M, int samples, unsigned seed);
// mu(fact X (x) fact Y) = sum_b mu(X_b (x) Y_b) on split inputs, beta fields
Report fact_mu_check(const Factorization& fz, int pole, Window w, int K);
// mu and eval commute with base change
Report base_change_check(const Field& X, const Field& Y, const Substitution& s, Window w, int K);

} // namespace chiral
