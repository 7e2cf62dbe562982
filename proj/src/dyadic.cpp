#include "juliacert/dyadic.hpp"

namespace juliacert {

namespace {

// floor(x * 4^w) as an integer; pre: x >= 0.
mpz_class scale_floor(const Dyadic& x, long w) {
    mpz_class t;
    long s = x.e + 2 * w;
    if (s >= 0) {
        mpz_mul_2exp(t.get_mpz_t(), x.m.get_mpz_t(), static_cast<mp_bitcnt_t>(s));
    } else {
        mpz_fdiv_q_2exp(t.get_mpz_t(), x.m.get_mpz_t(), static_cast<mp_bitcnt_t>(-s));
    }
    return t;
}

mpz_class scale_ceil(const Dyadic& x, long w) {
    mpz_class t;
    long s = x.e + 2 * w;
    if (s >= 0) {
        mpz_mul_2exp(t.get_mpz_t(), x.m.get_mpz_t(), static_cast<mp_bitcnt_t>(s));
    } else {
        mpz_cdiv_q_2exp(t.get_mpz_t(), x.m.get_mpz_t(), static_cast<mp_bitcnt_t>(-s));
    }
    return t;
}

}  // namespace

Dyadic sqrt_lower(const Dyadic& x, long w) {
    assert(x.sign() >= 0);
    if (x.is_zero()) return Dyadic();
    mpz_class t = scale_floor(x, w);
    if (t < 0) return Dyadic();  // x positive but below grid resolution
    mpz_class s;
    mpz_sqrt(s.get_mpz_t(), t.get_mpz_t());  // s = isqrt(t) <= sqrt(x)*2^w
    return Dyadic(s, -w);
}

Dyadic sqrt_upper(const Dyadic& x, long w) {
    assert(x.sign() >= 0);
    if (x.is_zero()) return Dyadic();
    mpz_class t = scale_ceil(x, w);
    mpz_class s;
    mpz_sqrt(s.get_mpz_t(), t.get_mpz_t());
    if (s * s < t) s += 1;  // round the integer sqrt up unless t is a square
    return Dyadic(s, -w);
}

Log2Bounds log2_bounds(const Dyadic& x, long f) {
    assert(x.sign() > 0 && f >= 1);
    // x = 2^k * y with y in [1, 2): k from the mantissa bit length.
    long bits = static_cast<long>(mpz_sizeinbase(x.m.get_mpz_t(), 2));
    long k = x.e + bits - 1;
    if (x.m == 1) {
        Dyadic exact(k);
        return {exact, exact};
    }
    Dyadic y(x.m, -(bits - 1));

    // Digit extraction: square, compare against 2, halve on a 1-bit.  Both
    // ends tracked with directed rounding so the emitted bits are the true
    // binary expansion; a straddle stops early with a one-bit-wide bracket.
    const long K = f + 8;
    Dyadic ylo = y.floor_to(K);
    Dyadic yhi = y.ceil_to(K);
    const Dyadic two(2);
    mpz_class frac = 0;
    for (long j = 1; j <= f; ++j) {
        ylo = (ylo * ylo).floor_to(K);
        yhi = (yhi * yhi).ceil_to(K);
        if (ylo >= two) {
            ylo = ylo.mul_pow2(-1);
            yhi = yhi.mul_pow2(-1);
            frac = 2 * frac + 1;
        } else if (yhi < two) {
            frac = 2 * frac;
        } else {
            long done = j - 1;
            Dyadic lo = Dyadic(k) + Dyadic(frac, -done);
            return {lo, lo + Dyadic::pow2(-done)};
        }
    }
    Dyadic lo = Dyadic(k) + Dyadic(frac, -f);
    return {lo, lo + Dyadic::pow2(-f)};
}

}  // namespace juliacert
