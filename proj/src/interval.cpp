#include "juliacert/interval.hpp"

namespace juliacert {

RectInterval rect_mul(const RectInterval& a, const RectInterval& b, long w) {
    DyInterval re = a.re() * b.re() - a.im() * b.im();
    DyInterval im = a.re() * b.im() + a.im() * b.re();
    return RectInterval{re.lo, re.hi, im.lo, im.hi}.round_out(w);
}

std::pair<Dyadic, Dyadic> euclid_abs_bounds(const RectInterval& s, long w) {
    DyInterval ar = s.re().abs_range();
    DyInterval ai = s.im().abs_range();
    Dyadic near_sq = ar.lo * ar.lo + ai.lo * ai.lo;
    Dyadic far_sq = ar.hi * ar.hi + ai.hi * ai.hi;
    return {sqrt_lower(near_sq, w), sqrt_upper(far_sq, w)};
}

namespace {

// Largest |q - c| over q in [q_lo, q_hi], c in [c_lo, c_hi], one axis.
Dyadic axis_max_gap(const Dyadic& q_lo, const Dyadic& q_hi, const Dyadic& c_lo,
                    const Dyadic& c_hi) {
    return max((q_hi - c_lo).abs(), (c_hi - q_lo).abs());
}

// Smallest |q - c| over the same ranges: zero if the intervals meet.
Dyadic axis_min_gap(const Dyadic& q_lo, const Dyadic& q_hi, const Dyadic& c_lo,
                    const Dyadic& c_hi) {
    if (c_lo > q_hi) return c_lo - q_hi;
    if (q_lo > c_hi) return q_lo - c_hi;
    return Dyadic();
}

}  // namespace

bool disk_box_separated(const RectInterval& centers, const Dyadic& rho,
                        const RectInterval& box) {
    Dyadic gx = axis_min_gap(box.re_lo, box.re_hi, centers.re_lo, centers.re_hi);
    Dyadic gy = axis_min_gap(box.im_lo, box.im_hi, centers.im_lo, centers.im_hi);
    return gx * gx + gy * gy > rho * rho;
}

bool disk_box_engulfs(const RectInterval& centers, const Dyadic& rho,
                      const RectInterval& box) {
    Dyadic hx = axis_max_gap(box.re_lo, box.re_hi, centers.re_lo, centers.re_hi);
    Dyadic hy = axis_max_gap(box.im_lo, box.im_hi, centers.im_lo, centers.im_hi);
    return hx * hx + hy * hy < rho * rho;
}

}  // namespace juliacert
