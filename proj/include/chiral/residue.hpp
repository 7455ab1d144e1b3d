#pragma once

#include <vector>

#include "chiral/sigma.hpp"

namespace chiral {

// Total residue along the marked points: the t^-1 coefficient of the
// density expanded at infinity.
Scalar residue(const OneForm& w);

// Res(f g dt)
Scalar pairing(const PhiSeries& f, const PhiSeries& g);

// Single-point residues after substituting pairwise distinct values.
std::vector<Scalar> residue_split(const OneForm& w, const Substitution& s);

// Coefficient of phi+_{-1,n-1}; equals residue() and serves as a cheap path
// for code that already holds basis coordinates.
inline Scalar residue_coefficient(const PhiSeries& f) { return f.coeff(-1, f.config().n() - 1); }

} // namespace chiral
