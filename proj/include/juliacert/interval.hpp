#pragma once

#include <optional>

#include "juliacert/dyadic.hpp"

namespace juliacert {

// Closed real interval with exact dyadic endpoints.
struct DyInterval {
    Dyadic lo, hi;

    bool valid() const { return lo <= hi; }
    Dyadic width() const { return hi - lo; }
    bool straddles_zero() const { return lo.sign() <= 0 && hi.sign() >= 0; }

    // Exact product range (min/max of the four endpoint products).
    friend DyInterval operator*(const DyInterval& a, const DyInterval& b) {
        Dyadic p1 = a.lo * b.lo, p2 = a.lo * b.hi, p3 = a.hi * b.lo, p4 = a.hi * b.hi;
        return {min(min(p1, p2), min(p3, p4)), max(max(p1, p2), max(p3, p4))};
    }
    friend DyInterval operator+(const DyInterval& a, const DyInterval& b) {
        return {a.lo + b.lo, a.hi + b.hi};
    }
    friend DyInterval operator-(const DyInterval& a, const DyInterval& b) {
        return {a.lo - b.hi, a.hi - b.lo};
    }

    // |x| range over the interval, exact.
    DyInterval abs_range() const {
        Dyadic far = max(lo.abs(), hi.abs());
        Dyadic near = straddles_zero() ? Dyadic() : min(lo.abs(), hi.abs());
        return {near, far};
    }
};

// Axis-aligned closed rectangle in C, the working enclosure type.
struct RectInterval {
    Dyadic re_lo, re_hi, im_lo, im_hi;

    RectInterval() = default;
    RectInterval(Dyadic rl, Dyadic rh, Dyadic il, Dyadic ih)
        : re_lo(std::move(rl)), re_hi(std::move(rh)), im_lo(std::move(il)), im_hi(std::move(ih)) {}

    static RectInterval point(const DyadicComplex& z) {
        return {z.re, z.re, z.im, z.im};
    }

    bool valid() const { return re_lo <= re_hi && im_lo <= im_hi; }

    DyInterval re() const { return {re_lo, re_hi}; }
    DyInterval im() const { return {im_lo, im_hi}; }

    // Exact midpoint: endpoint sums are dyadic, halving is an exponent shift.
    DyadicComplex midpoint() const {
        return {(re_lo + re_hi).mul_pow2(-1), (im_lo + im_hi).mul_pow2(-1)};
    }

    Dyadic re_width() const { return re_hi - re_lo; }
    Dyadic im_width() const { return im_hi - im_lo; }
    Dyadic width() const { return max(re_width(), im_width()); }
    Dyadic radius_linf() const { return width().mul_pow2(-1); }

    bool contains(const DyadicComplex& z) const {
        return re_lo <= z.re && z.re <= re_hi && im_lo <= z.im && z.im <= im_hi;
    }
    bool contains_rect(const RectInterval& o) const {
        return re_lo <= o.re_lo && o.re_hi <= re_hi && im_lo <= o.im_lo && o.im_hi <= im_hi;
    }
    bool intersects(const RectInterval& o) const {
        return !(o.re_lo > re_hi || re_lo > o.re_hi || o.im_lo > im_hi || im_lo > o.im_hi);
    }

    RectInterval round_out(long w) const {
        return {re_lo.floor_to(w), re_hi.ceil_to(w), im_lo.floor_to(w), im_hi.ceil_to(w)};
    }

    RectInterval inflate(const Dyadic& r) const {
        return {re_lo - r, re_hi + r, im_lo - r, im_hi + r};
    }

    friend RectInterval operator+(const RectInterval& a, const RectInterval& b) {
        return {a.re_lo + b.re_lo, a.re_hi + b.re_hi, a.im_lo + b.im_lo, a.im_hi + b.im_hi};
    }
    friend RectInterval operator-(const RectInterval& a) {
        return {-a.re_hi, -a.re_lo, -a.im_hi, -a.im_lo};
    }

    friend bool operator==(const RectInterval& a, const RectInterval& b) {
        return a.re_lo == b.re_lo && a.re_hi == b.re_hi && a.im_lo == b.im_lo &&
               a.im_hi == b.im_hi;
    }
};

inline RectInterval rect_hull(const RectInterval& a, const RectInterval& b) {
    return {min(a.re_lo, b.re_lo), max(a.re_hi, b.re_hi), min(a.im_lo, b.im_lo),
            max(a.im_hi, b.im_hi)};
}

inline std::optional<RectInterval> rect_intersect(const RectInterval& a, const RectInterval& b) {
    RectInterval r{max(a.re_lo, b.re_lo), min(a.re_hi, b.re_hi), max(a.im_lo, b.im_lo),
                   min(a.im_hi, b.im_hi)};
    if (!r.valid()) return std::nullopt;
    return r;
}

// Complex product enclosure.  The component ranges are exact (endpoint
// products), only the final outward rounding to the 2^-w grid loses width.
RectInterval rect_mul(const RectInterval& a, const RectInterval& b, long w);

// Two-sided bounds on the Euclidean modulus |z|_e over the rectangle,
// rounded outward on the 2^-w grid.
std::pair<Dyadic, Dyadic> euclid_abs_bounds(const RectInterval& s, long w);

// L-inf ball: the cover/cell currency of the whole pipeline.
struct BoxLInf {
    DyadicComplex center;
    Dyadic radius;

    RectInterval to_rect() const {
        return {center.re - radius, center.re + radius, center.im - radius,
                center.im + radius};
    }
};

// Exact closed-set disjointness of two rectangles (no conservatism: both
// sets are closed, so "disjoint" means a strictly positive gap on an axis).
inline bool rect_disjoint_box(const RectInterval& a, const RectInterval& b) {
    return !a.intersects(b);
}

// Strict containment: b's interior engulfs a with room to spare on every
// side.  Callers that must report a *strict* distance bound rely on the
// strictness here, so the comparisons are deliberately `<`, not `<=`.
inline bool rect_inside_box(const RectInterval& a, const RectInterval& b) {
    return b.re_lo < a.re_lo && a.re_hi < b.re_hi && b.im_lo < a.im_lo && a.im_hi < b.im_hi;
}

// True iff every Euclidean disk B^e(z, rho) with z ranging over `centers`
// misses `box` entirely: min-over-centers distance to the box exceeds rho.
// Exact squared-distance comparison; rho must be an upper bound on the true
// radius for a sound "disjoint" verdict.
bool disk_box_separated(const RectInterval& centers, const Dyadic& rho, const RectInterval& box);

// True iff every Euclidean disk B^e(z, rho), z in `centers`, strictly
// contains `box` (max corner distance < rho).  rho must be a lower bound on
// the true radius for a sound "contains" verdict; strictness is load-bearing.
bool disk_box_engulfs(const RectInterval& centers, const Dyadic& rho, const RectInterval& box);

}  // namespace juliacert
