#include "juliacert/verifier.hpp"

#include <cmath>
#include <complex>
#include <random>

namespace juliacert {

namespace {

struct QPoint {
    mpq_class x, y;
};

// exact circle point at half-angle parameter t; the left half mirrors x
QPoint circle_point(const mpq_class& t, bool left) {
    mpq_class den = 1 + t * t;
    mpq_class x = (1 - t * t) / den;
    if (left) x = -x;
    return {x, 2 * t / den};
}

mpq_class axis_gap(const mpq_class& v, const mpq_class& lo, const mpq_class& hi) {
    if (v < lo) return lo - v;
    if (v > hi) return v - hi;
    return 0;
}

mpq_class dist_point(const mpq_class& zx, const mpq_class& zy, const QPoint& p) {
    mpq_class dx = abs(zx - p.x), dy = abs(zy - p.y);
    return dx > dy ? dx : dy;
}

struct Arc {
    mpq_class a, b;  // parameter interval, within [-1,0] or [0,1]
    bool left;
};

// tight bounding rectangle of an arc: both coordinates are monotone once
// the parameter interval avoids straddling 0
mpq_class dist_rect(const mpq_class& zx, const mpq_class& zy, const Arc& arc) {
    QPoint pa = circle_point(arc.a, arc.left);
    QPoint pb = circle_point(arc.b, arc.left);
    mpq_class xlo = pa.x, xhi = pb.x;
    if (xlo > xhi) std::swap(xlo, xhi);
    mpq_class ylo = pa.y, yhi = pb.y;
    if (ylo > yhi) std::swap(ylo, yhi);
    mpq_class gx = axis_gap(zx, xlo, xhi), gy = axis_gap(zy, ylo, yhi);
    return gx > gy ? gx : gy;
}

}  // namespace

std::pair<Dyadic, Dyadic> circle_distance_linf(const DyadicComplex& z, long w) {
    mpq_class zx = z.re.to_mpq(), zy = z.im.to_mpq();
    std::vector<Arc> arcs;
    for (bool left : {false, true}) {
        arcs.push_back({mpq_class(-1), mpq_class(0), left});
        arcs.push_back({mpq_class(0), mpq_class(1), left});
    }
    mpq_class upper = dist_point(zx, zy, circle_point(0, false));
    auto consider = [&](const mpq_class& t, bool left) {
        mpq_class d = dist_point(zx, zy, circle_point(t, left));
        if (d < upper) upper = d;
    };
    consider(0, true);
    consider(1, false);   // (0, 1) and (0, -1) are shared by both halves
    consider(-1, false);

    mpq_class tol(1, 1);
    tol >>= static_cast<unsigned long>(w + 2);
    mpq_class lower(0);
    for (long round = 0; round < w + 60; ++round) {
        lower = -1;
        for (const Arc& arc : arcs) {
            mpq_class d = dist_rect(zx, zy, arc);
            if (lower < 0 || d < lower) lower = d;
        }
        if (upper - lower <= tol) break;
        std::vector<Arc> next;
        next.reserve(arcs.size() * 2);
        for (const Arc& arc : arcs) {
            if (dist_rect(zx, zy, arc) > upper) continue;  // cannot hold the minimum
            mpq_class mid = (arc.a + arc.b) / 2;
            consider(mid, arc.left);
            next.push_back({arc.a, mid, arc.left});
            next.push_back({mid, arc.b, arc.left});
        }
        arcs = std::move(next);
    }
    // round on a grid two bits finer so the bracket keeps width <= 2^-w
    return {dyadic_floor(lower, w + 2), dyadic_ceil(upper, w + 2)};
}

Dyadic dyadic_from_double(double v) {
    if (v == 0.0) return Dyadic(0);
    int e = 0;
    double m = std::frexp(v, &e);
    auto mi = static_cast<long long>(std::ldexp(m, 53));
    return Dyadic(mpz_class(static_cast<long>(mi)), e - 53);
}

CloudSample inverse_iteration_cloud(const DyadicComplex& c, int depth, std::size_t count,
                                    std::uint64_t seed) {
    CloudSample cloud;
    cloud.c = c;
    cloud.depth = depth;
    cloud.seed = seed;
    std::complex<double> cd(c.re.approx(), c.im.approx());
    std::complex<double> disc = std::sqrt(std::complex<double>(1.0, 0.0) - 4.0 * cd);
    std::complex<double> f1 = (1.0 + disc) / 2.0, f2 = (1.0 - disc) / 2.0;
    std::complex<double> beta = std::abs(f1) >= std::abs(f2) ? f1 : f2;  // repelling root
    std::mt19937_64 rng(seed);
    cloud.points.reserve(count);
    for (std::size_t k = 0; k < count; ++k) {
        std::complex<double> zt = beta;
        for (int d = 0; d < depth; ++d) {
            zt = std::sqrt(zt - cd);
            if (rng() & 1) zt = -zt;
        }
        cloud.points.push_back({dyadic_from_double(zt.real()), dyadic_from_double(zt.imag())});
    }
    return cloud;
}

PseudoOrbitReport pseudo_orbit_check(const Grid& g, const BoxGraph& bg, const PolyHandle& p,
                                     std::size_t samples, std::uint64_t seed) {
    PseudoOrbitReport rep;
    if (bg.vertex_count() == 0) return rep;
    std::mt19937_64 rng(seed);
    std::uniform_int_distribution<std::size_t> vd(0, bg.vertex_count() - 1);
    std::uniform_int_distribution<int> od(0, 32);
    const long w = std::max<long>(64, g.level + 48);
    const Dyadic step = Dyadic::pow2(g.eps_exp() - 5);
    for (std::size_t s = 0; s < samples; ++s) {
        std::size_t v = vd(rng);
        RectInterval box = g.cell_rect(bg.cells[v]);
        DyadicComplex x{box.re_lo + Dyadic(od(rng)) * step, box.im_lo + Dyadic(od(rng)) * step};
        RectInterval img = eval_rect(p, RectInterval::point(x), w);
        // Any surviving box that provably contains the image point must be an
        // out-neighbor. A sliver enclosure straddling a grid line pins down no
        // box; such samples verify nothing.
        DyadicComplex mid = img.midpoint();
        for (std::uint64_t code : g.cells_containing(mid.re, mid.im)) {
            if (!g.cell_rect(code).contains_rect(img)) continue;
            auto j = bg.find_cell(code);
            if (!j) continue;
            ++rep.checked;
            if (!bg.has_edge(v, *j)) {
                rep.pass = false;
                rep.violations.emplace_back(bg.cells[v], code);
            }
        }
    }
    return rep;
}

}  // namespace juliacert
