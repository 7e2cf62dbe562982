#include "juliacert/classify.hpp"

#include <algorithm>
#include <cassert>
#include <stdexcept>

namespace juliacert {

namespace {

// Index arithmetic is exact; the clamp only caps windows that already cover
// the whole grid many times over.
constexpr long kIndexClamp = 1L << 40;

long int_of(const Dyadic& d) {
    mpz_class n = d.to_mpq().get_num();
    if (n < -kIndexClamp) return -kIndexClamp;
    if (n > kIndexClamp) return kIndexClamp;
    return n.get_si();
}

// floor(x / 2^ee) and ceil(x / 2^ee), exact.
long ifloor(const Dyadic& x, long ee) { return int_of(x.mul_pow2(-ee).floor_to(0)); }
long iceil(const Dyadic& x, long ee) { return int_of(x.mul_pow2(-ee).ceil_to(0)); }

// Enclosures of g^k(z) for g = p^nu along with rounded two-sided bounds on
// |D(g^k)(z)|_e.  Same recurrence as the batch helper in the polynomial
// module, but grown one block at a time: stage-2 tests usually settle a
// pixel after a handful of iterates, and orbits that leave the dynamical
// plane would be unrepresentable long before the iterate budget.
struct OrbitWalk {
    const PolyHandle* p = nullptr;
    unsigned nu = 1;
    long w = 0;
    DyadicComplex z0;
    std::vector<OrbitBlock> blocks;
    bool dead = false;  // enclosure outgrew this precision

    void reset(long w_) {
        w = w_;
        dead = false;
        blocks.clear();
        blocks.push_back({RectInterval::point(z0), Dyadic(1), Dyadic(1)});
    }

    bool ensure(std::size_t k) {
        const Dyadic far = Dyadic::pow2(62);
        while (!dead && blocks.size() <= k) {
            RectInterval zr = blocks.back().z;
            Dyadic lo = blocks.back().deriv_lo;
            Dyadic hi = blocks.back().deriv_hi;
            for (unsigned s = 0; s < nu && !dead; ++s) {
                RectInterval dr = eval_deriv_rect(*p, zr, w);
                auto [dl, dh] = euclid_abs_bounds(dr, w);
                lo = (lo * dl).floor_to(2 * w);
                hi = (hi * dh).ceil_to(2 * w);
                zr = eval_rect(*p, zr, w);
                if (zr.width() > Dyadic(1) ||
                    max(max(zr.re_hi.abs(), zr.re_lo.abs()),
                        max(zr.im_hi.abs(), zr.im_lo.abs())) > far)
                    dead = true;
            }
            if (!dead) blocks.push_back({zr, lo, hi});
        }
        return blocks.size() > k;
    }
};

}  // namespace

const char* halt_step_name(HaltStep s) {
    switch (s) {
        case HaltStep::OutOfFrame: return "OutOfFrame";
        case HaltStep::S1d: return "S1d";
        case HaltStep::S1e: return "S1e";
        case HaltStep::S1f: return "S1f";
        case HaltStep::S2c: return "S2c";
        case HaltStep::S2d: return "S2d";
        case HaltStep::S2e: return "S2e";
        case HaltStep::S2f: return "S2f";
    }
    return "?";
}

void CoverIndex::ColumnTable::build(const std::vector<std::uint64_t>& v) {
    codes = &v;
    cols.clear();
    std::uint32_t prev = 0;
    bool first = true;
    for (std::uint32_t idx = 0; idx < v.size(); ++idx) {
        std::uint32_t i = Grid::code_i(v[idx]);
        if (first || i != prev) {
            cols.emplace_back(i, idx);
            prev = i;
            first = false;
        }
    }
}

CoverIndex::CoverIndex(const ReferenceCover& rc) : rc_(&rc), grid_(rc.grid()) {
    all_.resize(rc.cells.size() + rc.extra_cells.size());
    std::merge(rc.cells.begin(), rc.cells.end(), rc.extra_cells.begin(), rc.extra_cells.end(),
               all_.begin());
    full_.build(all_);
    witnessed_.build(rc.cells);
}

CoverIndex::IndexWindow CoverIndex::meets_window(const RectInterval& q) const {
    const long ee = grid_.eps_exp();
    const Dyadic& R = grid_.R;
    const Dyadic& b = rc_->beta;
    const long side = grid_.side();
    IndexWindow wnd;
    wnd.i_lo = std::max(iceil(q.re_lo + R - b, ee) - 1, 0L);
    wnd.i_hi = std::min(ifloor(q.re_hi + R + b, ee), side - 1);
    wnd.j_lo = std::max(iceil(q.im_lo + R - b, ee) - 1, 0L);
    wnd.j_hi = std::min(ifloor(q.im_hi + R + b, ee), side - 1);
    return wnd;
}

CoverIndex::IndexWindow CoverIndex::inside_window(const RectInterval& q) const {
    const long ee = grid_.eps_exp();
    const Dyadic& R = grid_.R;
    const Dyadic& b = rc_->beta;
    const long side = grid_.side();
    IndexWindow wnd;
    wnd.i_lo = std::max(ifloor(q.re_lo + R + b, ee) + 1, 0L);
    wnd.i_hi = std::min(iceil(q.re_hi + R - b, ee) - 2, side - 1);
    wnd.j_lo = std::max(ifloor(q.im_lo + R + b, ee) + 1, 0L);
    wnd.j_hi = std::min(iceil(q.im_hi + R - b, ee) - 2, side - 1);
    return wnd;
}

RectInterval CoverIndex::box_rect(std::uint64_t code) const {
    return grid_.cell_rect(code).inflate(rc_->beta);
}

template <typename Fn>
bool CoverIndex::scan(const ColumnTable& t, const IndexWindow& wnd, Fn&& fn) const {
    if (wnd.empty() || t.codes == nullptr || t.codes->empty()) return false;
    const auto& codes = *t.codes;
    auto cb = std::lower_bound(t.cols.begin(), t.cols.end(), wnd.i_lo,
                               [](const std::pair<std::uint32_t, std::uint32_t>& a, long v) {
                                   return long(a.first) < v;
                               });
    for (; cb != t.cols.end() && long(cb->first) <= wnd.i_hi; ++cb) {
        const std::size_t lo = cb->second;
        const std::size_t hi = (cb + 1 != t.cols.end()) ? (cb + 1)->second : codes.size();
        auto it = std::lower_bound(codes.begin() + lo, codes.begin() + hi,
                                   Grid::code(cb->first, std::uint32_t(wnd.j_lo)));
        for (; it != codes.begin() + hi && long(Grid::code_j(*it)) <= wnd.j_hi; ++it)
            if (!fn(*it)) return true;
    }
    return false;
}

bool CoverIndex::any_box_meets_square(const DyadicComplex& z, const Dyadic& rho) const {
    RectInterval q{z.re - rho, z.re + rho, z.im - rho, z.im + rho};
    return scan(full_, meets_window(q), [](std::uint64_t) { return false; });
}

bool CoverIndex::witnessed_box_inside_square(const DyadicComplex& z, const Dyadic& rho) const {
    RectInterval q{z.re - rho, z.re + rho, z.im - rho, z.im + rho};
    return scan(witnessed_, inside_window(q), [](std::uint64_t) { return false; });
}

bool CoverIndex::all_boxes_euclid_beyond(const RectInterval& E, const Dyadic& r) const {
    if (all_.empty()) return true;
    // A radius reaching any box at all settles the question without a scan;
    // this also keeps huge radii (late iterates) from walking the window.
    if (!disk_box_separated(E, r, box_rect(all_.front()))) return false;
    return !scan(full_, meets_window(E.inflate(r)), [&](std::uint64_t c) {
        return disk_box_separated(E, r, box_rect(c));
    });
}

bool CoverIndex::witnessed_box_euclid_within(const RectInterval& E, const Dyadic& r) const {
    return scan(witnessed_, inside_window(E.inflate(r)), [&](std::uint64_t c) {
        return !disk_box_engulfs(E, r, box_rect(c));
    });
}

bool CoverIndex::any_box_euclid_near(const RectInterval& E, const Dyadic& d) const {
    return scan(full_, meets_window(E.inflate(d)), [&](std::uint64_t c) {
        return disk_box_separated(E, d, box_rect(c));
    });
}

int k_max(int N, const HyperbolicityCertificate& cert) {
    if (N < 0) throw std::invalid_argument("negative pixel level");
    const mpq_class Lq = cert.expansion.L.to_mpq();
    if (!(Lq > 1)) throw std::invalid_argument("certificate carries no expansion factor");
    // 2^(N+3) * 2 beta' sqrt2 / c, sqrt2 from above so the budget is never
    // under the true ceiling.
    mpq_class target = cert.cover.beta_prime.to_mpq() * mpq_class(665857, 470832) * 2 /
                       cert.distortion.c_lo.to_mpq();
    target *= mpq_class(mpz_class(1) << unsigned(N + 3));
    mpq_class pw(1);
    int k = 0;
    while (pw < target) {
        pw *= Lq;
        if (++k > 100000) throw std::invalid_argument("iterate budget diverged");
    }
    return k;
}

PixelVerdict classify_pixel(const PolyHandle& p, const IdealPoint& zp,
                            const HyperbolicityCertificate& cert, const CoverIndex& idx,
                            long w0) {
    if (!zp.valid())
        throw std::invalid_argument("pixel is not on the dyadic lattice of its level");
    const int N = zp.N;
    const DyadicComplex& z = zp.z;

    const Dyadic frame = cert.R + Dyadic(1);
    if (z.re < -frame || frame < z.re || z.im < -frame || frame < z.im)
        return {0, HaltStep::OutOfFrame, 0, 0};

    if (!idx.any_box_meets_square(z, Dyadic::pow2(-N - 2))) return {0, HaltStep::S1d, 0, 0};
    if (idx.witnessed_box_inside_square(z, Dyadic::pow2(-N - 1)))
        return {1, HaltStep::S1e, 0, 0};
    if (Dyadic::pow2(-N - 2) > cert.cover.beta_prime.mul_pow2(-1))
        return {0, HaltStep::S1f, 0, 0};

    long w = w0 > 0 ? w0 : N + 32;
    const long wmax = 16 * w;
    const int kN = k_max(N, cert);
    const Dyadic slack = Dyadic::pow2(-N - 4);
    // With gamma = 3/32 and sigma = 2^-(N+3): the outward test radius is
    // 3 sigma (1 + gamma) per unit of derivative, the inward one
    // 4 sigma (1 - gamma).
    const Dyadic cup = Dyadic(105).mul_pow2(-N - 8);
    const Dyadic cdn = Dyadic(29).mul_pow2(-N - 6);
    const mpq_class sigma_c =
        Dyadic::pow2(-N - 3).to_mpq() * cert.distortion.c_lo.to_mpq();
    const mpq_class expansion_goal =
        2 * cert.cover.beta_prime.to_mpq() * mpq_class(665857, 470832);
#ifndef NDEBUG
    const Dyadic half_delta = cert.expansion.delta.mul_pow2(-1);
#endif

    OrbitWalk ow;
    ow.p = &p;
    ow.nu = cert.expansion.nu;
    ow.z0 = z;
    ow.reset(w);

    // A test left undecided at the precision cap poisons the fall-through
    // verdict; any test that does fire later still stands on its own.
    bool poisoned = false;
    for (int k = 1; k <= kN; ++k) {
        for (;;) {
            if (!ow.ensure(std::size_t(k))) {
                if (w >= wmax) {
                    poisoned = true;
                    k = kN;  // nothing further can be iterated
                    break;
                }
                w = std::min(2 * w, wmax);
                ow.reset(w);
                continue;
            }
#ifndef NDEBUG
            // Indecision at every earlier step confines the orbit to a
            // delta/2 neighbourhood of the cover; a violation here means a
            // test above let an escaping orbit through.
            assert(idx.any_box_euclid_near(ow.blocks[std::size_t(k) - 1].z, half_delta));
#endif
            const OrbitBlock& b = ow.blocks[std::size_t(k)];
            if (idx.all_boxes_euclid_beyond(b.z, (b.deriv_hi * cup).ceil_to(2 * w)))
                return {0, HaltStep::S2c, k, w};
            if (idx.witnessed_box_euclid_within(b.z, (b.deriv_lo * cdn).floor_to(2 * w)))
                return {1, HaltStep::S2d, k, w};
            if (b.deriv_lo.to_mpq() * sigma_c > expansion_goal)
                return {0, HaltStep::S2e, k, w};
            if (b.z.width() < slack) break;  // honest miss, move on
            if (w >= wmax) {
                poisoned = true;
                break;
            }
            w = std::min(2 * w, wmax);
            ow.reset(w);
        }
    }
    if (poisoned)
        throw PrecisionExhausted(wmax, std::size_t(kN),
                                 "pixel undecidable at the precision cap");
    return {0, HaltStep::S2f, kN, w};
}

}  // namespace juliacert
