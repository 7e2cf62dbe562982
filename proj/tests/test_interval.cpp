#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "juliacert/interval.hpp"

using namespace juliacert;

namespace {

std::mt19937_64 rng(20260817);

Dyadic rand_dy(long emin = -12, long emax = 4) {
    std::uniform_int_distribution<long> edist(emin, emax);
    std::uniform_int_distribution<long> mdist(-4096, 4096);
    return Dyadic(mpz_class(mdist(rng)), edist(rng));
}

RectInterval rand_rect() {
    Dyadic a = rand_dy(), b = rand_dy(), c = rand_dy(), d = rand_dy();
    return {min(a, b), max(a, b), min(c, d), max(c, d)};
}

DyadicComplex sample_in(const RectInterval& r, int i, int n) {
    // deterministic interior grid point (i of n^2): lo + width * (2i+1)/(2n)
    long ix = i % n, iy = i / n;
    mpq_class frac_x(2 * ix + 1, 2 * n), frac_y(2 * iy + 1, 2 * n);
    Dyadic wx = dyadic_floor(mpq_class(r.re_width().to_mpq() * frac_x), 40);
    Dyadic wy = dyadic_floor(mpq_class(r.im_width().to_mpq() * frac_y), 40);
    return {r.re_lo + wx, r.im_lo + wy};
}

}  // namespace

TEST_CASE("euclid_abs_bounds") {
    SUBCASE("real segment") {
        RectInterval s{Dyadic(1), Dyadic(2), Dyadic(0), Dyadic(0)};
        auto [lo, hi] = euclid_abs_bounds(s, 30);
        CHECK(lo == Dyadic(1));
        CHECK(hi == Dyadic(2));
    }
    SUBCASE("origin") {
        RectInterval s{Dyadic(0), Dyadic(0), Dyadic(0), Dyadic(0)};
        auto [lo, hi] = euclid_abs_bounds(s, 10);
        CHECK(lo == Dyadic(0));
        CHECK(hi == Dyadic(0));
    }
    SUBCASE("pythagorean point is exact at every precision") {
        RectInterval s{Dyadic(3), Dyadic(3), Dyadic(4), Dyadic(4)};
        for (long w : {2L, 10L, 40L}) {
            auto [lo, hi] = euclid_abs_bounds(s, w);
            CHECK(lo == Dyadic(5));
            CHECK(hi == Dyadic(5));
        }
    }
    SUBCASE("brackets sampled moduli") {
        for (int t = 0; t < 200; ++t) {
            RectInterval s = rand_rect();
            auto [lo, hi] = euclid_abs_bounds(s, 40);
            for (int i = 0; i < 9; ++i) {
                DyadicComplex z = sample_in(s, i, 3);
                Dyadic m2 = z.abs_sq();
                CHECK(lo * lo <= m2);
                CHECK(m2 <= hi * hi);
            }
        }
    }
}

TEST_CASE("rect_mul") {
    SUBCASE("degenerate real points") {
        RectInterval a = RectInterval::point({Dyadic(2), Dyadic(0)});
        RectInterval b = RectInterval::point({Dyadic(3), Dyadic(0)});
        for (long w : {8L, 20L, 50L}) {
            RectInterval r = rect_mul(a, b, w);
            CHECK(r.contains({Dyadic(6), Dyadic(0)}));
            CHECK(r.width() <= Dyadic(6) * Dyadic::pow2(1 - w));
        }
    }
    SUBCASE("i squared") {
        RectInterval i = RectInterval::point({Dyadic(0), Dyadic(1)});
        RectInterval r = rect_mul(i, i, 30);
        CHECK(r.contains({Dyadic(-1), Dyadic(0)}));
    }
    SUBCASE("contains all corner products") {
        for (int t = 0; t < 300; ++t) {
            RectInterval a = rand_rect(), b = rand_rect();
            RectInterval r = rect_mul(a, b, 48);
            Dyadic ares[2] = {a.re_lo, a.re_hi}, aims[2] = {a.im_lo, a.im_hi};
            Dyadic bres[2] = {b.re_lo, b.re_hi}, bims[2] = {b.im_lo, b.im_hi};
            for (int i = 0; i < 16; ++i) {
                DyadicComplex x{ares[i & 1], aims[(i >> 1) & 1]};
                DyadicComplex y{bres[(i >> 2) & 1], bims[(i >> 3) & 1]};
                CHECK(r.contains(x * y));
            }
        }
    }
    SUBCASE("interior samples stay enclosed") {
        for (int t = 0; t < 100; ++t) {
            RectInterval a = rand_rect(), b = rand_rect();
            RectInterval r = rect_mul(a, b, 48);
            for (int i = 0; i < 4; ++i)
                CHECK(r.contains(sample_in(a, i, 2) * sample_in(b, 3 - i, 2)));
        }
    }
    SUBCASE("higher precision never widens") {
        for (int t = 0; t < 100; ++t) {
            RectInterval a = rand_rect(), b = rand_rect();
            RectInterval coarse = rect_mul(a, b, 16);
            RectInterval fine = rect_mul(a, b, 32);
            CHECK(coarse.contains_rect(fine));
        }
    }
}

TEST_CASE("rect plumbing") {
    RectInterval a{Dyadic(0), Dyadic(1), Dyadic(0), Dyadic(1)};
    RectInterval b{Dyadic(2), Dyadic(3), Dyadic(0), Dyadic(1)};
    CHECK(rect_disjoint_box(a, b));
    RectInterval touching{Dyadic(1), Dyadic(2), Dyadic(0), Dyadic(1)};
    CHECK(!rect_disjoint_box(a, touching));  // closed sets sharing an edge meet

    RectInterval inner{Dyadic(1, -2), Dyadic(1, -1), Dyadic(1, -2), Dyadic(1, -1)};
    CHECK(rect_inside_box(inner, a));
    CHECK(!rect_inside_box(a, a));  // strict: a rect is not inside itself

    CHECK(rect_hull(a, b).contains_rect(a));
    CHECK(rect_hull(a, b).contains_rect(b));
    CHECK(!rect_intersect(a, b).has_value());
    auto meet = rect_intersect(a, touching);
    REQUIRE(meet.has_value());
    CHECK(meet->re_lo == Dyadic(1));
    CHECK(meet->re_hi == Dyadic(1));

    BoxLInf cell{{Dyadic(1, -1), Dyadic(-1, -1)}, Dyadic(1, -2)};
    RectInterval cr = cell.to_rect();
    CHECK(cr.re_lo == Dyadic(1, -2));
    CHECK(cr.re_hi == Dyadic(3, -2));
    CHECK(cr.midpoint() == cell.center);
    CHECK(cr.radius_linf() == cell.radius);
}

TEST_CASE("disk predicates") {
    RectInterval z = RectInterval::point({Dyadic(0), Dyadic(0)});
    RectInterval box{Dyadic(3), Dyadic(4), Dyadic(0), Dyadic(1)};
    SUBCASE("separation is strict at the boundary") {
        CHECK(disk_box_separated(z, Dyadic(2), box));
        CHECK(!disk_box_separated(z, Dyadic(3), box));  // disk touches the box corner
        CHECK(!disk_box_separated(z, Dyadic(4), box));
    }
    SUBCASE("engulfing is strict at the boundary") {
        // farthest corner of box from 0 is (4,1), |.|^2 = 17
        CHECK(!disk_box_engulfs(z, Dyadic(4), box));
        CHECK(disk_box_engulfs(z, Dyadic(5), box));
        RectInterval unit{Dyadic(-1), Dyadic(1), Dyadic(-1), Dyadic(1)};
        CHECK(!disk_box_engulfs(z, Dyadic(1), unit));  // corner exactly at radius sqrt2 > 1
    }
    SUBCASE("center ranging widens both tests") {
        RectInterval zr{Dyadic(-1), Dyadic(1), Dyadic(0), Dyadic(0)};
        // nearest center (1,0): gap to box is 2; farthest center (-1,0): corner (4,1)
        CHECK(disk_box_separated(zr, Dyadic(1), box));
        CHECK(!disk_box_separated(zr, Dyadic(2), box));
        CHECK(!disk_box_engulfs(zr, Dyadic(5), box));  // sqrt(26) > 5
        CHECK(disk_box_engulfs(zr, Dyadic(6), box));
    }
    SUBCASE("sampled consistency") {
        for (int t = 0; t < 300; ++t) {
            RectInterval centers = rand_rect(), bx = rand_rect();
            Dyadic rho = rand_dy(-6, 3).abs() + Dyadic(1, -6);
            bool sep = disk_box_separated(centers, rho, bx);
            bool eng = disk_box_engulfs(centers, rho, bx);
            CHECK(!(sep && eng));
            for (int i = 0; i < 4; ++i) {
                DyadicComplex c = sample_in(centers, i, 2);
                DyadicComplex q = sample_in(bx, 3 - i, 2);
                Dyadic d2 = (c - q).abs_sq();
                if (sep) CHECK(d2 > rho * rho);
                if (eng) CHECK(d2 < rho * rho);
            }
        }
    }
}

TEST_CASE("dist_linf metric on random triples") {
    for (int t = 0; t < 300; ++t) {
        DyadicComplex a{rand_dy(), rand_dy()}, b{rand_dy(), rand_dy()}, c{rand_dy(), rand_dy()};
        CHECK(dist_linf(a, b) == dist_linf(b, a));
        CHECK(dist_linf(a, a) == Dyadic(0));
        CHECK(dist_linf(a, c) <= dist_linf(a, b) + dist_linf(b, c));
        if (!(a == b)) CHECK(dist_linf(a, b) > Dyadic(0));
    }
}
