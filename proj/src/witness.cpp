#include "juliacert/witness.hpp"

#include <algorithm>
#include <complex>
#include <deque>
#include <unordered_set>

namespace juliacert {

namespace {

Dyadic dyadic_from_double(double x) {
    // Doubles are dyadic rationals, so this conversion is exact.
    return dyadic_floor(mpq_class(x), 80);
}

// Component interval division a / [n_lo, n_hi] with 0 < n_lo <= n_hi,
// rounded outward on the 2^-w grid.
DyInterval interval_div_pos(const DyInterval& a, const Dyadic& n_lo, const Dyadic& n_hi,
                            long w) {
    mpq_class ql = a.lo.to_mpq() / (a.lo.sign() >= 0 ? n_hi : n_lo).to_mpq();
    mpq_class qh = a.hi.to_mpq() / (a.hi.sign() >= 0 ? n_lo : n_hi).to_mpq();
    return {dyadic_floor(ql, w), dyadic_ceil(qh, w)};
}

// Enclosure of u / V for a point u and a rectangle V bounded away from 0,
// via u * conj(V) / |V|^2.
std::optional<RectInterval> rect_div_point(const DyadicComplex& u, const RectInterval& V,
                                           long w) {
    auto [m_lo, m_hi] = euclid_abs_bounds(V, w);
    if (!(m_lo.sign() > 0)) return std::nullopt;
    const Dyadic n_lo = m_lo * m_lo, n_hi = m_hi * m_hi;
    const RectInterval conjV{V.re_lo, V.re_hi, -V.im_hi, -V.im_lo};
    const RectInterval num = rect_mul(RectInterval::point(u), conjV, w);
    DyInterval re = interval_div_pos(num.re(), n_lo, n_hi, w);
    DyInterval im = interval_div_pos(num.im(), n_lo, n_hi, w);
    return RectInterval{re.lo, re.hi, im.lo, im.hi};
}

// Principal square root of a rectangle that avoids the cut (-inf, 0]:
// exact midpoint square root by the half-angle formulas, inflated by the
// solved Lipschitz bound err <= s - sqrt(s^2 - d) where s bounds |sqrt(m)|
// from below and d the offset |z - m| from above.
std::optional<RectInterval> sqrt_principal(const RectInterval& q, long w) {
    const long wg = w + 8;
    const DyadicComplex m = q.midpoint();
    const Dyadic h2 = m.abs_sq();
    if (!(h2.sign() > 0)) return std::nullopt;
    const Dyadic h_lo = sqrt_lower(h2, wg), h_hi = sqrt_upper(h2, wg);

    const Dyadic zero;
    Dyadic u_sq_lo = (h_lo + m.re).mul_pow2(-1);
    if (u_sq_lo.sign() < 0) u_sq_lo = zero;
    const Dyadic u_sq_hi = (h_hi + m.re).mul_pow2(-1);
    Dyadic v_sq_lo = (h_lo - m.re).mul_pow2(-1);
    if (v_sq_lo.sign() < 0) v_sq_lo = zero;
    const Dyadic v_sq_hi = (h_hi - m.re).mul_pow2(-1);

    const Dyadic u_lo = sqrt_lower(u_sq_lo, wg), u_hi = sqrt_upper(u_sq_hi, wg);
    const Dyadic v_abs_lo = sqrt_lower(v_sq_lo, wg), v_abs_hi = sqrt_upper(v_sq_hi, wg);

    RectInterval w0;
    w0.re_lo = u_lo;
    w0.re_hi = u_hi;
    if (m.im.sign() > 0) {
        w0.im_lo = v_abs_lo;
        w0.im_hi = v_abs_hi;
    } else if (m.im.sign() < 0) {
        w0.im_lo = -v_abs_hi;
        w0.im_hi = -v_abs_lo;
    } else {
        // Cut avoidance forces m.re > 0 here, where the root is real.
        if (!(m.re.sign() > 0)) return std::nullopt;
        w0.im_lo = -v_abs_hi;
        w0.im_hi = v_abs_hi;
    }

    // |sqrt(m)| = h^(1/2) = (h2)^(1/4) from below.
    const Dyadic s_lo = sqrt_lower(h_lo, wg);
    if (!(s_lo.sign() > 0)) return std::nullopt;

    const Dyadic rhw = q.re_width().mul_pow2(-1), ihw = q.im_width().mul_pow2(-1);
    const Dyadic d_up = sqrt_upper(rhw * rhw + ihw * ihw, wg);

    // err * (2s - err) <= d pins err under the smaller root of the parabola
    // as long as d < s^2 (the two root regions are separated, and err is 0
    // at the midpoint and continuous over the connected, cut-free input).
    const Dyadic s2 = s_lo * s_lo;
    if (!(d_up < s2)) return std::nullopt;
    const Dyadic err = s_lo - sqrt_lower(s2 - d_up, wg);
    return w0.inflate(err).round_out(w);
}

std::uint64_t hash_mix(std::uint64_t x) {
    x ^= x >> 33;
    x *= 0xff51afd7ed558ccdULL;
    x ^= x >> 33;
    return x;
}

// One interval Newton step for f(z) = z^2 - z + c on the rect R, c ranging
// over c_rect.  Contraction into the interior proves a unique fixed point.
std::optional<RectInterval> fixed_point_newton(const RectInterval& c_rect,
                                               const RectInterval& R, long wg) {
    const DyadicComplex m0 = R.midpoint();
    const DyadicComplex m0sq{m0.re * m0.re - m0.im * m0.im, (m0.re * m0.im).mul_pow2(1)};
    const DyadicComplex fm{m0sq.re - m0.re, m0sq.im - m0.im};
    const RectInterval fval = RectInterval::point(fm) + c_rect;
    const RectInterval fprime{R.re_lo.mul_pow2(1) - Dyadic(1), R.re_hi.mul_pow2(1) - Dyadic(1),
                              R.im_lo.mul_pow2(1), R.im_hi.mul_pow2(1)};
    // The numerator is a rect (the coefficient oracle may be a ball), so
    // divide its midpoint and spread the residue over inf |f'|.
    const DyadicComplex fmid = fval.midpoint();
    std::optional<RectInterval> quot = rect_div_point(fmid, fprime, wg);
    if (!quot) return std::nullopt;
    auto [dp_lo, dp_hi] = euclid_abs_bounds(fprime, wg);
    (void)dp_hi;
    if (!(dp_lo.sign() > 0)) return std::nullopt;
    const Dyadic rhw = fval.re_width().mul_pow2(-1), ihw = fval.im_width().mul_pow2(-1);
    const Dyadic res_num = sqrt_upper(rhw * rhw + ihw * ihw, wg);
    const Dyadic spread = dyadic_ceil(mpq_class(res_num.to_mpq() / dp_lo.to_mpq()), wg);
    const RectInterval shifted = quot->inflate(spread);
    return RectInterval{m0.re - shifted.re_hi, m0.re - shifted.re_lo, m0.im - shifted.im_hi,
                        m0.im - shifted.im_lo};
}

}  // namespace

std::optional<RectInterval> sqrt_rect_branch(const RectInterval& q, bool negate, long w) {
    std::optional<RectInterval> out;
    if (q.re_lo.sign() > 0 || q.im_lo.sign() > 0 || q.im_hi.sign() < 0) {
        out = sqrt_principal(q, w);
    } else if (q.re_hi.sign() < 0) {
        // Clear of the positive real axis instead: sqrt(q) = i * sqrt(-q),
        // and -q is clear of the negative one, so the principal formulas
        // apply there.  Multiplying a rect by i is an exact quarter turn.
        std::optional<RectInterval> r = sqrt_principal(-q, w);
        if (r) out = RectInterval{-r->im_hi, -r->im_lo, r->re_lo, r->re_hi};
    }
    if (!out) return std::nullopt;
    return negate ? -*out : *out;
}

bool verify_fixed_point_box(const PolyHandle& p, const BoxLInf& box, long w) {
    if (p.degree() != 2 || !(box.radius.sign() > 0)) return false;
    const long wg = std::max(w, 96L);
    const RectInterval c_rect = (*p.coeff_rects(wg))[0];
    const RectInterval sq = box.to_rect();
    std::optional<RectInterval> N = fixed_point_newton(c_rect, sq, wg);
    if (!N || !rect_inside_box(*N, sq)) return false;
    auto [ab_lo, ab_hi] = euclid_abs_bounds(sq, wg);
    (void)ab_hi;
    return ab_lo.mul_pow2(1) > Dyadic(1);
}

std::vector<BoxLInf> repelling_fixed_points(const PolyHandle& p, long w) {
    std::vector<BoxLInf> out;
    if (p.degree() != 2) return out;
    const long wg = std::max(w, 96L);
    const RectInterval c_rect = (*p.coeff_rects(wg))[0];

    auto newton = [&](const RectInterval& R) { return fixed_point_newton(c_rect, R, wg); };

    const DyadicComplex cm = c_rect.midpoint();
    const std::complex<double> cd(cm.re.approx(), cm.im.approx());
    const std::complex<double> disc = std::sqrt(std::complex<double>(1.0) - 4.0 * cd);
    const std::complex<double> cand[2] = {(1.0 + disc) / 2.0, (1.0 - disc) / 2.0};

    for (const std::complex<double>& z0 : cand) {
        const DyadicComplex zc{dyadic_from_double(z0.real()), dyadic_from_double(z0.imag())};
        for (long k = 32; k >= 12; k -= 6) {
            const Dyadic rad = Dyadic::pow2(-k);
            RectInterval R = RectInterval::point(zc).inflate(rad);
            std::optional<RectInterval> N = newton(R);
            if (!N || !rect_inside_box(*N, R)) continue;
            // Contraction proves a unique fixed point in R; tighten it.
            for (int it = 0; it < 3; ++it) {
                auto cap = rect_intersect(*N, R);
                if (!cap) break;
                R = *cap;
                N = newton(R);
                if (!N) break;
            }
            // Store a centered square and re-run the test on exactly what
            // is stored, since verification sees only the square.
            const DyadicComplex ctr = R.midpoint();
            const Dyadic half = R.width().mul_pow2(-1) + Dyadic::pow2(-wg);
            const BoxLInf box{ctr, half};
            if (!verify_fixed_point_box(p, box, wg)) break;
            out.push_back(box);
            break;
        }
    }

    std::sort(out.begin(), out.end(), [](const BoxLInf& a, const BoxLInf& b) {
        int c = a.center.re.cmp(b.center.re);
        if (c != 0) return c < 0;
        return a.center.im.cmp(b.center.im) < 0;
    });
    out.erase(std::unique(out.begin(), out.end(),
                          [](const BoxLInf& a, const BoxLInf& b) {
                              return dist_linf(a.center, b.center) < Dyadic::pow2(-10);
                          }),
              out.end());
    return out;
}

std::vector<RectInterval> build_witness_net(const PolyHandle& p,
                                            const std::vector<BoxLInf>& roots,
                                            const WitnessParams& params, const Dyadic& R) {
    std::vector<RectInterval> kept;
    if (p.degree() != 2 || roots.empty()) return kept;
    const RectInterval c_rect = (*p.coeff_rects(params.prec))[0];
    const RectInterval neg_c = -c_rect;
    const Grid gd(params.dedup_level, R);
    const long ee = gd.eps_exp();
    const std::uint32_t side = gd.side();

    auto key_of = [&](const DyadicComplex& z) -> std::optional<std::uint64_t> {
        auto axis = [&](const Dyadic& x) -> std::optional<std::uint32_t> {
            Dyadic t = (x + R).mul_pow2(-ee).floor_to(0);
            mpz_class n = t.to_mpq().get_num();
            if (n < 0 || n >= long(side)) return std::nullopt;
            return std::uint32_t(n.get_ui());
        };
        auto i = axis(z.re);
        auto j = axis(z.im);
        if (!i || !j) return std::nullopt;
        return Grid::code(*i, *j);
    };

    struct Node {
        RectInterval rect;
        int depth;
    };
    std::deque<Node> queue;
    std::unordered_set<std::uint64_t> seen;
    seen.reserve(1 << 16);

    for (const BoxLInf& r : roots) {
        RectInterval rect = r.to_rect();
        auto key = key_of(rect.midpoint());
        if (!key) continue;
        if (seen.insert(hash_mix(*key)).second) {
            kept.push_back(rect);
            queue.push_back({std::move(rect), 0});
        }
    }

    while (!queue.empty()) {
        Node node = std::move(queue.front());
        queue.pop_front();
        if (node.depth >= params.depth) continue;
        const RectInterval q = node.rect + neg_c;
        for (int sgn = 0; sgn < 2; ++sgn) {
            std::optional<RectInterval> w = sqrt_rect_branch(q, sgn == 1, params.prec);
            if (!w) continue;
            auto key = key_of(w->midpoint());
            if (!key) continue;
            if (!seen.insert(hash_mix(*key)).second) continue;
            kept.push_back(*w);
            queue.push_back({std::move(*w), node.depth + 1});
        }
    }
    return kept;
}

std::vector<bool> mark_witnessed(const std::vector<RectInterval>& net, const Grid& grid,
                                 const Dyadic& beta, const std::vector<std::uint64_t>& cells) {
    std::vector<bool> out(cells.size(), false);
    const long ee = grid.eps_exp();
    const std::uint32_t side = grid.side();

    // A rect can only fit inside the inflation of a cell whose center is
    // within beta + eps/2 of it, so probe the small index window around the
    // rect's midpoint.
    mpq_class ratio = beta.to_mpq() / grid.eps().to_mpq();
    mpz_class kfloor = ratio.get_num() / ratio.get_den();
    const std::uint32_t K =
        kfloor.fits_ulong_p() && kfloor.get_ui() < 64 ? std::uint32_t(kfloor.get_ui()) + 2 : 64;

    for (const RectInterval& w : net) {
        const DyadicComplex mid = w.midpoint();
        auto axis = [&](const Dyadic& x) -> std::optional<std::uint32_t> {
            Dyadic t = (x + grid.R).mul_pow2(-ee).floor_to(0);
            mpz_class n = t.to_mpq().get_num();
            if (n < 0 || n >= long(side)) return std::nullopt;
            return std::uint32_t(n.get_ui());
        };
        auto i0 = axis(mid.re);
        auto j0 = axis(mid.im);
        if (!i0 || !j0) continue;
        const std::uint32_t ilo = *i0 > K ? *i0 - K : 0;
        const std::uint32_t ihi = std::min(side - 1, *i0 + K);
        const std::uint32_t jlo = *j0 > K ? *j0 - K : 0;
        const std::uint32_t jhi = std::min(side - 1, *j0 + K);
        for (std::uint32_t i = ilo; i <= ihi; ++i) {
            for (std::uint32_t j = jlo; j <= jhi; ++j) {
                const std::uint64_t code = Grid::code(i, j);
                auto it = std::lower_bound(cells.begin(), cells.end(), code);
                if (it == cells.end() || *it != code) continue;
                const std::size_t idx = std::size_t(it - cells.begin());
                if (out[idx]) continue;
                if (grid.cell_rect(code).inflate(beta).contains_rect(w)) out[idx] = true;
            }
        }
    }
    return out;
}

}  // namespace juliacert
