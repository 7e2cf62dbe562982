#pragma once

#include <gmpxx.h>

#include <cassert>
#include <cstdint>
#include <string>
#include <utility>

namespace juliacert {

// Exact binary rational m * 2^e with odd mantissa (or m == 0, e == 0).
// All arithmetic here is exact; precision enters only through the directed
// rounding helpers floor_to / ceil_to and the certified sqrt / log2 bounds.
struct Dyadic {
    mpz_class m;
    long e = 0;

    Dyadic() = default;
    Dyadic(long v) : m(v) { normalize(); }
    Dyadic(const mpz_class& mm, long ee) : m(mm), e(ee) { normalize(); }

    static Dyadic pow2(long k) { return Dyadic(1, k); }

    bool is_zero() const { return m == 0; }
    int sign() const { return sgn(m); }

    void normalize() {
        if (m == 0) {
            e = 0;
            return;
        }
        mp_bitcnt_t tz = mpz_scan1(m.get_mpz_t(), 0);
        if (tz > 0) {
            m >>= tz;
            e += static_cast<long>(tz);
        }
    }

    Dyadic operator-() const {
        Dyadic r;
        r.m = -m;
        r.e = e;
        return r;
    }

    Dyadic abs() const {
        Dyadic r = *this;
        if (r.m < 0) r.m = -r.m;
        return r;
    }

    // Exact scaling by 2^k: no normalization needed, mantissa untouched.
    Dyadic mul_pow2(long k) const {
        if (is_zero()) return Dyadic();
        Dyadic r = *this;
        r.e += k;
        return r;
    }

    friend Dyadic operator+(const Dyadic& a, const Dyadic& b) {
        if (a.is_zero()) return b;
        if (b.is_zero()) return a;
        long e0 = a.e < b.e ? a.e : b.e;
        mpz_class s;
        mpz_mul_2exp(s.get_mpz_t(), a.m.get_mpz_t(),
                     static_cast<mp_bitcnt_t>(a.e - e0));
        mpz_class t;
        mpz_mul_2exp(t.get_mpz_t(), b.m.get_mpz_t(),
                     static_cast<mp_bitcnt_t>(b.e - e0));
        s += t;
        return Dyadic(s, e0);
    }

    friend Dyadic operator-(const Dyadic& a, const Dyadic& b) { return a + (-b); }

    friend Dyadic operator*(const Dyadic& a, const Dyadic& b) {
        if (a.is_zero() || b.is_zero()) return Dyadic();
        Dyadic r;
        r.m = a.m * b.m;  // odd * odd stays odd, already canonical
        r.e = a.e + b.e;
        return r;
    }

    Dyadic& operator+=(const Dyadic& o) { return *this = *this + o; }
    Dyadic& operator-=(const Dyadic& o) { return *this = *this - o; }
    Dyadic& operator*=(const Dyadic& o) { return *this = *this * o; }

    // Sign of (*this - b) without constructing the difference when avoidable.
    int cmp(const Dyadic& b) const {
        int sa = sign(), sb = b.sign();
        if (sa != sb) return sa < sb ? -1 : 1;
        if (sa == 0) return 0;
        Dyadic d = *this - b;
        return d.sign();
    }

    friend bool operator<(const Dyadic& a, const Dyadic& b) { return a.cmp(b) < 0; }
    friend bool operator>(const Dyadic& a, const Dyadic& b) { return a.cmp(b) > 0; }
    friend bool operator<=(const Dyadic& a, const Dyadic& b) { return a.cmp(b) <= 0; }
    friend bool operator>=(const Dyadic& a, const Dyadic& b) { return a.cmp(b) >= 0; }
    friend bool operator==(const Dyadic& a, const Dyadic& b) {
        return a.e == b.e && a.m == b.m;  // canonical form makes this exact
    }
    friend bool operator!=(const Dyadic& a, const Dyadic& b) { return !(a == b); }

    // Largest multiple of 2^-w that is <= *this.
    Dyadic floor_to(long w) const {
        if (is_zero() || e >= -w) return *this;
        mpz_class q;
        mpz_fdiv_q_2exp(q.get_mpz_t(), m.get_mpz_t(),
                        static_cast<mp_bitcnt_t>(-w - e));
        return Dyadic(q, -w);
    }

    // Smallest multiple of 2^-w that is >= *this.
    Dyadic ceil_to(long w) const {
        if (is_zero() || e >= -w) return *this;
        mpz_class q;
        mpz_cdiv_q_2exp(q.get_mpz_t(), m.get_mpz_t(),
                        static_cast<mp_bitcnt_t>(-w - e));
        return Dyadic(q, -w);
    }

    mpq_class to_mpq() const {
        mpq_class q(m);
        if (e >= 0) {
            mpz_class num = m;
            mpz_mul_2exp(num.get_mpz_t(), num.get_mpz_t(),
                         static_cast<mp_bitcnt_t>(e));
            q = mpq_class(num);
        } else {
            mpz_class den = 1;
            mpz_mul_2exp(den.get_mpz_t(), den.get_mpz_t(),
                         static_cast<mp_bitcnt_t>(-e));
            q = mpq_class(m, den);
            q.canonicalize();
        }
        return q;
    }

    double approx() const { return mpq_get_d(to_mpq().get_mpq_t()); }

    std::string mantissa_str() const { return m.get_str(); }
};

inline const Dyadic& min(const Dyadic& a, const Dyadic& b) { return b < a ? b : a; }
inline const Dyadic& max(const Dyadic& a, const Dyadic& b) { return a < b ? b : a; }

// Directed rounding of an exact rational to the 2^-w grid.
inline Dyadic dyadic_floor(const mpq_class& q, long w) {
    mpz_class num = q.get_num();
    mpz_mul_2exp(num.get_mpz_t(), num.get_mpz_t(), static_cast<mp_bitcnt_t>(w));
    mpz_class r;
    mpz_fdiv_q(r.get_mpz_t(), num.get_mpz_t(), q.get_den().get_mpz_t());
    return Dyadic(r, -w);
}

inline Dyadic dyadic_ceil(const mpq_class& q, long w) {
    mpz_class num = q.get_num();
    mpz_mul_2exp(num.get_mpz_t(), num.get_mpz_t(), static_cast<mp_bitcnt_t>(w));
    mpz_class r;
    mpz_cdiv_q(r.get_mpz_t(), num.get_mpz_t(), q.get_den().get_mpz_t());
    return Dyadic(r, -w);
}

// Certified square root brackets on the 2^-w grid.  Both are exact when
// x * 4^w is a perfect square, so e.g. sqrt of 25 at any w returns (5, 5).
Dyadic sqrt_lower(const Dyadic& x, long w);
Dyadic sqrt_upper(const Dyadic& x, long w);

inline std::pair<Dyadic, Dyadic> sqrt2_bounds(long w) {
    return {sqrt_lower(Dyadic(2), w), sqrt_upper(Dyadic(2), w)};
}

struct Log2Bounds {
    Dyadic lo, hi;
};

// lo <= log2(x) <= hi with hi - lo <= 2^-f.  Exact (lo == hi) at powers of
// two.  pre: x > 0.
Log2Bounds log2_bounds(const Dyadic& x, long f);

struct DyadicComplex {
    Dyadic re, im;

    DyadicComplex() = default;
    DyadicComplex(Dyadic r, Dyadic i) : re(std::move(r)), im(std::move(i)) {}

    friend DyadicComplex operator+(const DyadicComplex& a, const DyadicComplex& b) {
        return {a.re + b.re, a.im + b.im};
    }
    friend DyadicComplex operator-(const DyadicComplex& a, const DyadicComplex& b) {
        return {a.re - b.re, a.im - b.im};
    }
    friend DyadicComplex operator*(const DyadicComplex& a, const DyadicComplex& b) {
        return {a.re * b.re - a.im * b.im, a.re * b.im + a.im * b.re};
    }
    friend bool operator==(const DyadicComplex& a, const DyadicComplex& b) {
        return a.re == b.re && a.im == b.im;
    }

    Dyadic abs_sq() const { return re * re + im * im; }
};

inline Dyadic dist_linf(const DyadicComplex& a, const DyadicComplex& b) {
    return max((a.re - b.re).abs(), (a.im - b.im).abs());
}

}  // namespace juliacert
