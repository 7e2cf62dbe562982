#include "juliacert/distortion.hpp"

#include <stdexcept>

namespace juliacert {

namespace {

Dyadic sqrt_upper_q(const mpq_class& q, long w) {
    return sqrt_upper(dyadic_ceil(q, 2 * w), w);
}

mpq_class gamma_exact(const mpq_class& t) {
    mpq_class up = 1 + t, dn = 1 - t;
    mpq_class b1 = 1 - 1 / (up * up);
    mpq_class b2 = 1 / (dn * dn) - 1;
    return b2 > b1 ? b2 : b1;
}

}  // namespace

std::pair<Dyadic, Dyadic> gamma_r_a(const Dyadic& a, const Dyadic& r, long w) {
    if (!(a.sign() > 0 && a < r)) throw std::domain_error("need 0 < a < r");
    mpq_class g = gamma_exact(a.to_mpq() / r.to_mpq());
    return {dyadic_floor(g, w), dyadic_ceil(g, w)};
}

Dyadic offset_for_gamma(const Dyadic& r, const mpq_class& gamma, long w) {
    if (!(gamma > 0)) throw std::domain_error("gamma must be positive");
    // gamma_r is dominated by its second branch, so the largest admissible
    // ratio is t = 1 - 1/sqrt(1+gamma); round everything toward smaller a.
    Dyadic inv = sqrt_upper_q(1 / (1 + gamma), w);
    Dyadic t_lo = (Dyadic(1) - inv);
    Dyadic a = (r * t_lo).floor_to(w);
    while (a.sign() > 0 && gamma_exact(a.to_mpq() / r.to_mpq()) > gamma)
        a = a - Dyadic::pow2(-w);  // paranoia notch; rounding already undershoots
    if (a.sign() <= 0) throw std::domain_error("precision too coarse for this gamma");
    return a;
}

std::pair<Dyadic, Dyadic> koebe_factors(const mpq_class& t, const Dyadic& r, long w) {
    if (!(t >= 0 && t < 1)) throw std::domain_error("need 0 <= t < 1");
    mpq_class rq = r.to_mpq();
    mpq_class up = 1 + t, dn = 1 - t;
    mpq_class lo = t * rq / (up * up);
    mpq_class hi = t * rq / (dn * dn);
    return {dyadic_floor(lo, w), dyadic_ceil(hi, w)};
}

std::pair<Dyadic, Dyadic> deriv_shift_factors(const mpq_class& gamma, long w) {
    if (!(gamma >= 0 && gamma < mpq_class(1, 3)))
        throw std::domain_error("need 0 <= gamma < 1/3");
    mpq_class lo = (1 - 3 * gamma) / (1 + gamma);
    mpq_class hi = 3 * (1 + gamma) / (1 - gamma);
    return {dyadic_floor(lo, w), dyadic_ceil(hi, w)};
}

mpq_class diam_lower_coeff_exact(const mpq_class& gamma) {
    return (1 - 3 * gamma) * (1 - gamma) / (1 + gamma);
}

Dyadic diam_lower_coeff(const mpq_class& gamma, long w) {
    if (!(gamma >= 0 && gamma <= mpq_class(1, 3)))
        throw std::domain_error("need 0 <= gamma <= 1/3");
    return dyadic_floor(diam_lower_coeff_exact(gamma), w);
}

Dyadic side_bound_b(const Dyadic& delta, const mpq_class& gamma, const Dyadic& a, long w) {
    // b = delta*c/(16*sqrt2*(1+gamma)) = delta*c*sqrt2/(32*(1+gamma)),
    // with sqrt2 taken from below so b is never overestimated.
    mpq_class c = diam_lower_coeff_exact(gamma);
    mpq_class flat = delta.to_mpq() * c / (32 * (1 + gamma));
    mpq_class b = flat * sqrt_lower(Dyadic(2), 2 * w).to_mpq();
    return min(dyadic_floor(b, w), a);
}

}  // namespace juliacert
