#pragma once

#include <utility>

#include "juliacert/dyadic.hpp"

namespace juliacert {

// Koebe-style distortion bounds for univalent maps on a euclidean ball
// B^e(z0, r), as pure certified functions.  Rounding directions follow one
// rule: every returned lower bound is a floor, every upper bound a ceiling,
// so classifier decisions built on them err toward "no report".

// Two-sided bounds on the distortion level
//   gamma_r(a) = max(1 - 1/(1+a/r)^2, 1/(1-a/r)^2 - 1)
// incurred by moving the basepoint by at most `a` inside a ball of radius r.
// Throws std::domain_error unless 0 < a < r.
std::pair<Dyadic, Dyadic> gamma_r_a(const Dyadic& a, const Dyadic& r, long w);

// Largest offset a (on the 2^-w grid) with a certified gamma_r(a) <= gamma.
Dyadic offset_for_gamma(const Dyadic& r, const mpq_class& gamma, long w);

// Bounds on the displacement of a univalent map: for t = d_e(z,z0)/r < 1,
//   t*r/(1+t)^2  <=  d_e(g(z),g(z0)) / |g'(z0)|_e  <=  t*r/(1-t)^2.
// Returns the two outer quantities as a rounded (lo, hi) pair.
std::pair<Dyadic, Dyadic> koebe_factors(const mpq_class& t, const Dyadic& r, long w);

// Derivative shift through a basepoint move at distortion level gamma:
//   (1-3*gamma)/(1+gamma) < |g'(w0)|/|g'(z0)| < 3*(1+gamma)/(1-gamma).
// Requires 0 <= gamma < 1/3.
std::pair<Dyadic, Dyadic> deriv_shift_factors(const mpq_class& gamma, long w);

// Exact rational c(gamma) = (1-3*gamma)(1-gamma)/(1+gamma): half the image
// diameter of a sigma-ball is at least |g'(z0)|_e * sigma * c(gamma).
mpq_class diam_lower_coeff_exact(const mpq_class& gamma);

// Same, rounded down to the 2^-w grid.  Requires 0 <= gamma <= 1/3.
Dyadic diam_lower_coeff(const mpq_class& gamma, long w);

// Cover side-length budget b = delta * c(gamma) / (16*sqrt2*(1+gamma)),
// rounded down, then capped at the offset radius a.
Dyadic side_bound_b(const Dyadic& delta, const mpq_class& gamma, const Dyadic& a, long w);

}  // namespace juliacert
