#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "juliacert/polynomial.hpp"

using namespace juliacert;

namespace {

// exact complex rational arithmetic, the independent oracle for this module
struct CQ {
    mpq_class re, im;
    CQ operator*(const CQ& o) const { return {re * o.re - im * o.im, re * o.im + im * o.re}; }
    CQ operator+(const CQ& o) const { return {re + o.re, im + o.im}; }
    mpq_class abs_sq() const { return re * re + im * im; }
};

CQ eval_exact(const std::vector<CQ>& lower, const CQ& z) {
    // monic centered: z^d + lower[d-2] z^{d-2} + ... + lower[0]
    std::size_t d = lower.size() + 1;
    CQ acc = z;  // z^1, builds z^d by repeated multiply below
    for (std::size_t i = 1; i < d; ++i) acc = acc * z;
    CQ r = acc;
    CQ zp{1, 0};
    for (std::size_t k = 0; k < lower.size(); ++k) {
        r = r + (lower[k] * zp);
        zp = zp * z;
    }
    return r;
}

bool rect_contains_q(const RectInterval& r, const CQ& z) {
    return r.re_lo.to_mpq() <= z.re && z.re <= r.re_hi.to_mpq() &&
           r.im_lo.to_mpq() <= z.im && z.im <= r.im_hi.to_mpq();
}

}  // namespace

TEST_CASE("parser") {
    SUBCASE("classic forms") {
        PolyHandle p = parse_poly("z^2-1");
        CHECK(p.degree() == 2);
        auto* o = dynamic_cast<const RationalOracle*>(&p.oracle());
        REQUIRE(o != nullptr);
        CHECK(o->exact_coeff(0).first == -1);
        CHECK(o->exact_coeff(0).second == 0);

        PolyHandle q = parse_poly("z^2 + (-0.1226 + 0.7449i)");
        auto* oq = dynamic_cast<const RationalOracle*>(&q.oracle());
        mpq_class re_ref(-1226, 10000), im_ref(7449, 10000);
        re_ref.canonicalize();
        im_ref.canonicalize();
        CHECK(oq->exact_coeff(0).first == re_ref);
        CHECK(oq->exact_coeff(0).second == im_ref);

        PolyHandle r = parse_poly("z^3+0.5z-i");
        CHECK(r.degree() == 3);
        auto* orr = dynamic_cast<const RationalOracle*>(&r.oracle());
        CHECK(orr->exact_coeff(1).first == mpq_class(1, 2));
        CHECK(orr->exact_coeff(0).second == -1);

        CHECK(parse_poly("z^2+0.25").identity() == parse_poly("z^2 + 1/4").identity());
    }
    SUBCASE("rejections") {
        CHECK_THROWS(parse_poly("z^2+z"));      // z^{d-1} must vanish
        CHECK_THROWS(parse_poly("2z^2-1"));     // not monic
        CHECK_THROWS(parse_poly("z+1"));        // degree too small
        CHECK_THROWS(parse_poly(""));
        CHECK_THROWS(parse_poly("z^2+bogus"));
    }
    SUBCASE("coefficient lists") {
        PolyHandle p = parse_poly_coeffs(3, "-1,0;0.5,0");
        CHECK(p.identity() == parse_poly("z^3+0.5z-1").identity());
    }
    SUBCASE("identity hash separates polynomials") {
        CHECK(parse_poly("z^2-1").identity_hash() != parse_poly("z^2+1").identity_hash());
        CHECK(parse_poly("z^2-1").identity_hash() == parse_poly("z^2 - 1").identity_hash());
    }
}

TEST_CASE("eval_rect point behavior") {
    PolyHandle sq = parse_poly("z^2");
    SUBCASE("fixed point of z^2") {
        for (long w : {10L, 30L, 60L}) {
            RectInterval r = eval_rect(sq, RectInterval::point({Dyadic(1), Dyadic(0)}), w);
            CHECK(r.contains({Dyadic(1), Dyadic(0)}));
            CHECK(r.width() <= Dyadic::pow2(2 - w));
        }
    }
    SUBCASE("i squared") {
        RectInterval r = eval_rect(sq, RectInterval::point({Dyadic(0), Dyadic(1)}), 30);
        CHECK(r.contains({Dyadic(-1), Dyadic(0)}));
    }
}

TEST_CASE("eval_rect encloses dense samples") {
    PolyHandle p = parse_poly("z^2-1");
    // s = [0.4, 0.6] x [-0.1, 0.1], endpoints rounded out to the dyadic grid
    RectInterval s{dyadic_floor(mpq_class(2, 5), 20), dyadic_ceil(mpq_class(3, 5), 20),
                   dyadic_floor(mpq_class(-1, 10), 20), dyadic_ceil(mpq_class(1, 10), 20)};
    RectInterval img = eval_rect(p, s, 40);
    std::vector<CQ> lower{{mpq_class(-1), mpq_class(0)}};
    for (int i = 0; i < 10; ++i) {
        for (int j = 0; j < 10; ++j) {
            mpq_class x = s.re_lo.to_mpq() +
                          (s.re_hi.to_mpq() - s.re_lo.to_mpq()) * mpq_class(i, 9);
            mpq_class y = s.im_lo.to_mpq() +
                          (s.im_hi.to_mpq() - s.im_lo.to_mpq()) * mpq_class(j, 9);
            CHECK(rect_contains_q(img, eval_exact(lower, {x, y})));
        }
    }
}

TEST_CASE("eval_rect random-polynomial enclosure and precision nesting") {
    std::mt19937_64 rng(31337);
    std::uniform_int_distribution<int> deg(2, 5), num(-8, 8);
    for (int t = 0; t < 60; ++t) {
        int d = deg(rng);
        std::vector<std::pair<mpq_class, mpq_class>> cs;
        std::vector<CQ> lower;
        for (int i = 0; i + 1 < d; ++i) {
            mpq_class re(num(rng), 4), im(num(rng), 4);
            cs.emplace_back(re, im);
            lower.push_back({re, im});
        }
        PolyHandle p(std::make_shared<RationalOracle>(d, cs));
        RectInterval s{Dyadic(num(rng), -3), Dyadic(0), Dyadic(num(rng), -3), Dyadic(0)};
        s.re_hi = s.re_lo + Dyadic(1, -3);
        s.im_hi = s.im_lo + Dyadic(1, -3);
        RectInterval coarse = eval_rect(p, s, 20);
        RectInterval fine = eval_rect(p, s, 45);
        CHECK(coarse.contains_rect(fine));
        for (int i = 0; i < 9; ++i) {
            mpq_class x = s.re_lo.to_mpq() + mpq_class(i % 3, 2) * Dyadic(1, -3).to_mpq();
            mpq_class y = s.im_lo.to_mpq() + mpq_class(i / 3, 2) * Dyadic(1, -3).to_mpq();
            CHECK(rect_contains_q(fine, eval_exact(lower, {x, y})));
        }
        // overshoot bound is nonnegative and no wider than the enclosure
        Dyadic ov = eval_overshoot_bound(p, s, 45);
        CHECK(ov >= Dyadic(0));
        CHECK(ov <= fine.width() + Dyadic::pow2(-40));
    }
}

TEST_CASE("derivative rects") {
    PolyHandle p = parse_poly("z^3+0.5z-1");
    // p' = 3z^2 + 0.5 ; p'' = 6z
    RectInterval s = RectInterval::point({Dyadic(2), Dyadic(0)});
    RectInterval d1 = eval_deriv_rect(p, s, 40);
    CHECK(rect_contains_q(d1, CQ{mpq_class(25, 2), 0}));
    CHECK(d1.width() <= Dyadic::pow2(-30));
    RectInterval d2 = eval_second_deriv_rect(p, s, 40);
    CHECK(rect_contains_q(d2, CQ{12, 0}));
}

TEST_CASE("iter_derivative_abs_bounds") {
    PolyHandle sq = parse_poly("z^2");
    SUBCASE("powers of two at the fixed point") {
        auto blocks = iter_derivative_abs_bounds(sq, 1, {Dyadic(1), Dyadic(0)}, 3, 50);
        REQUIRE(blocks.size() == 4);
        for (std::size_t j = 0; j <= 3; ++j) {
            Dyadic tgt = Dyadic::pow2(static_cast<long>(j));
            CHECK(blocks[j].deriv_lo <= tgt);
            CHECK(tgt <= blocks[j].deriv_hi);
            CHECK(blocks[j].deriv_hi - blocks[j].deriv_lo <= Dyadic::pow2(-30));
        }
        CHECK(blocks[3].z.contains({Dyadic(1), Dyadic(0)}));
    }
    SUBCASE("critical fixed point pins zero") {
        auto blocks = iter_derivative_abs_bounds(sq, 1, {Dyadic(0), Dyadic(0)}, 4, 50);
        for (std::size_t j = 1; j <= 4; ++j) {
            CHECK(blocks[j].deriv_lo == Dyadic(0));
            CHECK(blocks[j].deriv_hi <= Dyadic::pow2(-30));
        }
    }
    SUBCASE("brackets the exact chain product for z^2-1") {
        PolyHandle p = parse_poly("z^2-1");
        CQ z{mpq_class(1, 10), mpq_class(1, 10)};
        auto blocks = iter_derivative_abs_bounds(
            p, 1, {dyadic_floor(z.re, 30), dyadic_floor(z.im, 30)}, 4, 60);
        // exact |Dp^4(z)|^2 = prod |2 p^i(z)|^2
        CQ zc{dyadic_floor(z.re, 30).to_mpq(), dyadic_floor(z.im, 30).to_mpq()};
        mpq_class prod_sq(1);
        std::vector<CQ> lower{{mpq_class(-1), mpq_class(0)}};
        CQ cur = zc;
        for (int i = 0; i < 4; ++i) {
            CQ dz{2 * cur.re, 2 * cur.im};
            prod_sq *= dz.abs_sq();
            cur = eval_exact(lower, cur);
        }
        auto& last = blocks[4];
        CHECK((last.deriv_lo * last.deriv_lo).to_mpq() <= prod_sq);
        CHECK(prod_sq <= (last.deriv_hi * last.deriv_hi).to_mpq());
    }
    SUBCASE("nu blocks group substeps") {
        PolyHandle p = parse_poly("z^2-1");
        DyadicComplex z{Dyadic(1, -2), Dyadic(1, -3)};
        auto nu2 = iter_derivative_abs_bounds(p, 2, z, 2, 60);
        auto nu1 = iter_derivative_abs_bounds(p, 1, z, 4, 60);
        REQUIRE(nu2.size() == 3);
        // block j of the nu=2 run corresponds to substep 2j of the nu=1 run
        CHECK(nu2[1].deriv_lo <= nu1[2].deriv_hi);
        CHECK(nu1[2].deriv_lo <= nu2[1].deriv_hi);
        CHECK(nu2[2].z.intersects(nu1[4].z));
    }
    SUBCASE("random chain-rule bracketing, exact oracle") {
        // rational orbits square their denominators every step, so keep the
        // seeds coarse and the iteration count moderate
        std::mt19937_64 rng(777);
        std::uniform_int_distribution<int> num(-6, 6), kk(1, 12);
        PolyHandle sq2 = parse_poly("z^2");
        for (int t = 0; t < 100; ++t) {
            mpq_class x(num(rng), 16), y(num(rng), 16);
            std::size_t k = static_cast<std::size_t>(kk(rng));
            DyadicComplex z{dyadic_floor(x, 20), dyadic_floor(y, 20)};
            std::vector<OrbitBlock> blocks;
            try {
                blocks = iter_derivative_abs_bounds(sq2, 1, z, k, 80);
            } catch (const PrecisionExhausted&) {
                continue;  // deep orbits near the boundary may blow up; fine
            }
            CQ cur{z.re.to_mpq(), z.im.to_mpq()};
            mpq_class prod_sq(1);
            for (std::size_t j = 1; j <= k; ++j) {
                CQ dz{2 * cur.re, 2 * cur.im};
                prod_sq *= dz.abs_sq();
                cur = cur * cur;
                CHECK((blocks[j].deriv_lo * blocks[j].deriv_lo).to_mpq() <= prod_sq);
                CHECK(prod_sq <= (blocks[j].deriv_hi * blocks[j].deriv_hi).to_mpq());
                CHECK(rect_contains_q(blocks[j].z, cur));
            }
        }
    }
}

TEST_CASE("precision exhaustion signals instead of lying") {
    // iterate far outside the escape radius: enclosures must blow up
    PolyHandle sq = parse_poly("z^2");
    CHECK_THROWS_AS(
        iter_derivative_abs_bounds(sq, 1, {Dyadic(3), Dyadic(0)}, 200, 8),
        PrecisionExhausted);
}

TEST_CASE("escape_radius") {
    CHECK(escape_radius(parse_poly("z^2")) == Dyadic(2));
    CHECK(escape_radius(parse_poly("z^2-1")) == Dyadic(2));
    CHECK(escape_radius(parse_poly("z^2+4")) == Dyadic(8));
    CHECK(escape_radius(parse_poly("z^2+(-0.1226+0.7449i)")) == Dyadic(2));
    CHECK(escape_radius(parse_poly("z^3+2z+2")) == Dyadic(8));
}

TEST_CASE("second derivative iterate upper bound") {
    // g = p^1 with p = z^2: |D^2 g| = 2 everywhere
    PolyHandle sq = parse_poly("z^2");
    RectInterval s{Dyadic(1, -2), Dyadic(1, -1), Dyadic(0), Dyadic(1, -2)};
    Dyadic up = iter_second_deriv_abs_upper(sq, 1, s, 40);
    CHECK(up >= Dyadic(2));
    CHECK(up <= Dyadic(2) + Dyadic::pow2(-20));
    // nu = 2: D^2(p^2) = 12 z^2, on s the sup is 12 |corner|^2
    Dyadic up2 = iter_second_deriv_abs_upper(sq, 2, s, 40);
    CHECK(up2 >= Dyadic(3));  // 12 * |(1/2,1/4)|^2 = 12*(5/16) = 3.75 >= 3 sanity
    CHECK(up2 <= Dyadic(6));
}

TEST_CASE("ball oracle widens and changes identity") {
    PolyHandle base = parse_poly("z^2-1");
    auto inner = std::make_shared<RationalOracle>(
        2, std::vector<std::pair<mpq_class, mpq_class>>{{mpq_class(-1), mpq_class(0)}});
    PolyHandle ball(std::make_shared<BallOracle>(inner, Dyadic(1, -6)));
    CHECK(ball.identity_hash() != base.identity_hash());
    RectInterval r = ball.oracle().coeff_rect(0, 30);
    CHECK(r.re_width() >= Dyadic(1, -5));  // 2 * ball radius
    CHECK(r.contains({Dyadic(-1) + Dyadic(1, -6), Dyadic(0)}));
    // evaluation covers the whole coefficient ball
    RectInterval img = eval_rect(ball, RectInterval::point({Dyadic(0), Dyadic(0)}), 40);
    CHECK(img.contains({Dyadic(-1) - Dyadic(1, -6), Dyadic(0)}));
    CHECK(img.contains({Dyadic(-1) + Dyadic(1, -6), Dyadic(0)}));
}
