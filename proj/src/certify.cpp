#include "juliacert/certify.hpp"

#include <algorithm>
#include <optional>
#include <set>
#include <utility>

#include "juliacert/witness.hpp"

namespace juliacert {

namespace {

// min over `cells` of the certified lower bound of |D(p^nu)| on the cell
// rectangle inflated by rho.  Returns nullopt as soon as one cell fails to
// clear `bail`, so callers can ladder cheaply.
std::optional<Dyadic> min_deriv_lower(const PolyHandle& p, const Grid& g,
                                      const std::vector<std::uint64_t>& cells, unsigned nu,
                                      const Dyadic& rho, const Dyadic& bail, long w) {
    std::optional<Dyadic> best;
    for (std::uint64_t c : cells) {
        RectInterval rect = g.cell_rect(c);
        if (rho.sign() > 0) rect = rect.inflate(rho);
        RectDerivBounds b = iter_derivative_abs_bounds_rect(p, nu, rect, w);
        if (b.exhausted || !(b.lo > bail)) return std::nullopt;
        if (!best || b.lo < *best) best = b.lo;
    }
    return best;
}

long level_precision(long base, int level) { return std::max(base, 24L + 2L * level); }

// Cell of g whose interior holds z, or nullopt when z is outside the frame
// or sits exactly on a lattice line.  Box centers of this grid and of every
// refinement of it are always interior, which is what the callers feed in.
std::optional<std::uint64_t> cell_code_of_center(const Grid& g, const DyadicComplex& z) {
    auto axis = [&](const Dyadic& x) -> std::optional<std::uint32_t> {
        Dyadic t = (x + g.R).mul_pow2(-g.eps_exp()).floor_to(0);
        mpz_class n = t.to_mpq().get_num();  // t is a canonical integer
        if (n < 0 || n >= long(g.side())) return std::nullopt;
        return std::uint32_t(n.get_ui());
    };
    auto i = axis(z.re);
    auto j = axis(z.im);
    if (!i || !j) return std::nullopt;
    return Grid::code(*i, *j);
}

}  // namespace

std::vector<ComponentClass> classify_expansion(const PolyHandle& p, const BoxGraph& bg,
                                               const SCCDecomposition& d, unsigned nu_max,
                                               long w) {
    std::vector<ComponentClass> out(d.count);
    for (std::size_t ci = 0; ci < d.count; ++ci) {
        ComponentClass& cc = out[ci];
        for (unsigned nu = 1; nu <= nu_max && cc.tag == ComponentTag::Undetermined; nu <<= 1) {
            Dyadic lo_min, hi_max;
            bool first = true;
            bool hi_valid = true;
            for (std::uint32_t v : d.members[ci]) {
                RectDerivBounds b =
                    iter_derivative_abs_bounds_rect(p, nu, bg.grid.cell_rect(bg.cells[v]), w);
                lo_min = first ? b.lo : min(lo_min, b.lo);
                if (b.exhausted) {
                    hi_valid = false;
                } else {
                    hi_max = (first || !hi_valid) ? b.hi : max(hi_max, b.hi);
                }
                first = false;
                // Neither verdict can still happen: skip to the next iterate.
                if (!(lo_min > Dyadic(1)) && (!hi_valid || !(hi_max < Dyadic(1)))) break;
            }
            if (lo_min > Dyadic(1)) {
                cc = {ComponentTag::Expanding, nu, lo_min, hi_max};
            } else if (hi_valid && hi_max < Dyadic(1)) {
                cc = {ComponentTag::Contracting, nu, lo_min, hi_max};
            }
        }
    }
    return out;
}

ExpansionCertificate build_N1(const PolyHandle& p, const Grid& g,
                              const std::vector<std::uint64_t>& expanding_cells,
                              const Dyadic& lambda_prime, unsigned nu, long w) {
    ExpansionCertificate ec;
    ec.nu = nu;
    ec.lambda_prime = lambda_prime;
    ec.L = Dyadic(1) + lambda_prime.mul_pow2(-1);
    ec.level = g.level;
    ec.R = g.R;
    ec.cells = expanding_cells;
    const Dyadic eps = g.eps();
    for (int k = 1; k <= 24; ++k) {
        Dyadic delta = eps.mul_pow2(-k);
        auto dlo = min_deriv_lower(p, g, expanding_cells, nu, delta.mul_pow2(1), ec.L, w);
        if (!dlo) continue;
        ec.delta = delta;
        ec.dlo = *dlo;
        const Dyadic rad = eps.mul_pow2(-1) + delta.mul_pow2(1);
        ec.N1.reserve(expanding_cells.size());
        for (std::uint64_t c : expanding_cells) ec.N1.push_back({g.cell_rect(c).midpoint(), rad});
        return ec;
    }
    throw NoMarginFound{};
}

DistortionConstants distortion_constants(const Dyadic& delta, long w) {
    if (!(delta.sign() > 0)) throw std::invalid_argument("delta must be positive");
    DistortionConstants dc;
    const mpq_class gq(3, 32);
    dc.gamma = Dyadic(3).mul_pow2(-5);
    dc.r = (Dyadic(3) * delta).mul_pow2(-2);
    dc.a = offset_for_gamma(dc.r, gq, w);
    const mpq_class cq = diam_lower_coeff_exact(gq);
    dc.c_lo = dyadic_floor(cq, w);
    dc.c_hi = dyadic_ceil(cq, w);
    dc.b = side_bound_b(delta, gq, dc.a, w);
    int n = 0;
    while (!(Dyadic::pow2(-n - 1) < dc.a && Dyadic::pow2(-n) < delta)) {
        if (++n > 4096) throw std::invalid_argument("resolution floor out of range");
    }
    dc.N_prime = n;
    return dc;
}

Dyadic shadowing_radius(const PolyHandle& p, const ExpansionCertificate& ec, long w) {
    Dyadic d2;
    for (const BoxLInf& box : ec.N1)
        d2 = max(d2, iter_second_deriv_abs_upper(p, ec.nu, box.to_rect(), w));
    if (d2.sign() <= 0) return ec.delta;
    mpq_class q = ec.lambda_prime.to_mpq() * ec.dlo.to_mpq() / (2 * d2.to_mpq());
    return min(ec.delta, dyadic_floor(q, w));
}

int t_from_alpha(const Dyadic& alpha, const Dyadic& threshold) {
    if (!(threshold.sign() > 0)) throw std::invalid_argument("threshold must be positive");
    int t = 0;
    Dyadic x = alpha;
    while (!(x < threshold)) {
        x = x.mul_pow2(-1);
        if (++t > 200) throw std::invalid_argument("alpha does not reach the threshold");
    }
    return t;
}

ShadowingConstants shadowing_constants(const PolyHandle& p, const ExpansionCertificate& ec,
                                       const DistortionConstants& dc, Grid& grid,
                                       BoxGraph& working, long w, int jobs,
                                       long long max_cells) {
    ShadowingConstants sc;
    sc.r_prime = shadowing_radius(p, ec, std::max<long>(w, 64));
    if (!(sc.r_prime.sign() > 0)) throw BudgetExceeded("injectivity radius underflow");

    // Refining quadruples the cell count in the worst case; once a level
    // has been built the observed ratio predicts the next one.
    double growth = 4.0;
    auto can_step = [&] {
        return double(working.vertex_count()) * growth <= double(max_cells);
    };
    auto step = [&] {
        if (grid.level >= 30) throw BudgetExceeded("grid depth limit reached");
        const double before = double(working.vertex_count());
        auto [g2, b2] = refine(p, working, 1, level_precision(w, grid.level + 1), jobs);
        grid = std::move(g2);
        working = std::move(b2);
        if (working.vertex_count() == 0)
            throw BudgetExceeded("expanding boxes vanished under refinement");
        growth = std::clamp(double(working.vertex_count()) / before, 2.0, 4.0);
    };

    // The pixel-side bound has to dominate the cell side before
    // beta = min(r', delta, (b - eps)/2) can come out positive; pushing eps
    // down to b/8 keeps (b - eps)/2 near its ceiling instead of leaving a
    // sliver that the later alpha refinements would have to pay for.
    while (!(grid.eps().mul_pow2(3) <= dc.b)) {
        if (!can_step()) break;
        step();
    }
    if (!(grid.eps() < dc.b))
        throw BudgetExceeded("cell budget too small for a positive cover inflation");

    sc.beta = min(min(sc.r_prime, ec.delta), (dc.b - grid.eps()).mul_pow2(-1));
    const Dyadic threshold =
        min(sc.r_prime.mul_pow2(1), (ec.lambda_prime * sc.beta).mul_pow2(-2));
    if (!(threshold.sign() > 0)) throw BudgetExceeded("shadowing threshold underflow");

    sc.t_prime = 0;
    sc.alpha = alpha_bound(grid, working).alpha;
    sc.threshold_met = sc.alpha < threshold;
    while (!sc.threshold_met) {
        if (!can_step()) break;
        step();
        ++sc.t_prime;
        sc.alpha = alpha_bound(grid, working).alpha;
        sc.threshold_met = sc.alpha < threshold;
    }
    return sc;
}

ReferenceCover build_N2(const ExpansionCertificate& ec, const DistortionConstants& dc,
                        const ShadowingConstants& sc, const Grid& grid,
                        const BoxGraph& working) {
    (void)ec;
    ReferenceCover rc;
    rc.level = grid.level;
    rc.R = grid.R;
    rc.beta = sc.beta;
    const Dyadic eps_f = grid.eps();
    rc.beta_prime = eps_f + sc.beta.mul_pow2(1);
    if (!(rc.beta_prime <= dc.b)) throw std::logic_error("cover side exceeds the pixel bound");

    // Lattice-neighbor inflations overlap almost entirely, so one
    // representative per M x M block of cells keeps the union while cutting
    // the box count by ~M^2.  M - 1 <= beta/eps keeps every dropped cell
    // inside its representative's inflation.
    mpq_class ratio = sc.beta.to_mpq() / eps_f.to_mpq();
    mpz_class mfloor = ratio.get_num() / ratio.get_den();
    const std::uint32_t M =
        mfloor.fits_ulong_p() && mfloor.get_ui() < (1u << 20) ? std::uint32_t(mfloor.get_ui()) + 1
                                                              : (1u << 20);
    std::set<std::uint64_t> blocks;
    for (std::uint64_t c : working.cells) {
        std::uint64_t bc = Grid::code(Grid::code_i(c) / M, Grid::code_j(c) / M);
        if (blocks.insert(bc).second) rc.cells.push_back(c);
    }
    return rc;
}

HyperbolicityCertificate build_certificate(const PolyHandle& p, const CertifyOptions& opt) {
    if (opt.start_level < 1 || opt.start_level > opt.max_level || opt.nu_max == 0)
        throw std::invalid_argument("bad certification budget");
    const Dyadic R = escape_radius(p);
    int level = opt.start_level;
    Grid g(level, R);
    BoxGraph bg = trim_to_cycles(
        build_edges(p, g, g.all_cells(), level_precision(opt.precision, level), opt.jobs));

    ExpansionCertificate ec;
    bool have = false;
    while (!have) {
        const long w = level_precision(opt.precision, level);
        if (bg.vertex_count() != 0) {
            SCCDecomposition d = scc(bg);
            std::vector<ComponentClass> tags = classify_expansion(p, bg, d, opt.nu_max, w);
            bool undecided = std::any_of(tags.begin(), tags.end(), [](const ComponentClass& t) {
                return t.tag == ComponentTag::Undetermined;
            });
            if (!undecided) {
                std::vector<std::uint64_t> expanding;
                for (std::size_t ci = 0; ci < d.count; ++ci)
                    if (tags[ci].tag == ComponentTag::Expanding)
                        for (std::uint32_t v : d.members[ci]) expanding.push_back(bg.cells[v]);
                std::sort(expanding.begin(), expanding.end());
                if (!expanding.empty()) {
                    // One iterate has to clear 1 on all expanding boxes at
                    // once; the per-component tags do not transfer.
                    unsigned nu = 0;
                    Dyadic margin;
                    for (unsigned k = 1; k <= opt.nu_max; k <<= 1) {
                        auto lo = min_deriv_lower(p, g, expanding, k, Dyadic(0), Dyadic(1), w);
                        if (lo) {
                            nu = k;
                            margin = *lo - Dyadic(1);
                            break;
                        }
                    }
                    if (nu != 0) {
                        try {
                            ec = build_N1(p, g, expanding, margin, nu, w);
                            have = true;
                        } catch (const NoMarginFound&) {
                            // margin too thin at this resolution; refine
                        }
                    }
                }
            }
        }
        if (!have) {
            if (level >= opt.max_level)
                throw BudgetExceeded("no expansion certificate within the level budget");
            auto [g2, b2] = refine(p, bg, 1, level_precision(opt.precision, level + 1), opt.jobs);
            g = std::move(g2);
            bg = std::move(b2);
            ++level;
        }
    }

    DistortionConstants dc =
        distortion_constants(ec.delta, std::max<long>(level_precision(opt.precision, level), 64));

    // Working copy restricted to the expanding cells.  Target ranges are
    // pure geometry, so the restriction stays exact; eta is inherited as a
    // valid (if generous) overshoot bound until the first refinement.
    Grid gw = g;
    BoxGraph working;
    working.grid = g;
    working.eta = bg.eta;
    for (std::size_t i = 0; i < bg.cells.size(); ++i) {
        if (std::binary_search(ec.cells.begin(), ec.cells.end(), bg.cells[i])) {
            working.cells.push_back(bg.cells[i]);
            working.targets.push_back(bg.targets[i]);
        }
    }
    working = trim_to_cycles(working);
    if (working.vertex_count() == 0) throw BudgetExceeded("expanding boxes are not recurrent");

    ShadowingConstants sc = shadowing_constants(p, ec, dc, gw, working, opt.precision, opt.jobs,
                                                opt.max_refine_cells);
    ReferenceCover cover = build_N2(ec, dc, sc, gw, working);

    if (!sc.threshold_met) {
        // The cell budget ran out before the pseudo-orbit bound certified
        // the per-box Julia points.  Quadratics can recover the claim box
        // by box: seed an inverse-iteration net at certified repelling
        // fixed points and keep as the cover proper only the boxes that
        // provably catch a net rect; the rest stay for disjointness tests.
        if (p.degree() != 2)
            throw BudgetExceeded("pseudo-orbit threshold out of reach within the cell budget");
        std::vector<BoxLInf> roots = repelling_fixed_points(p, opt.witness_prec);
        if (roots.empty())
            throw BudgetExceeded("no certified repelling fixed point to seed witnesses");
        WitnessParams wp;
        wp.depth = opt.witness_depth;
        wp.dedup_level = std::max(1, gw.level - opt.witness_dedup_coarsen);
        wp.prec = opt.witness_prec;
        std::vector<RectInterval> net = build_witness_net(p, roots, wp, cover.R);
        std::vector<bool> hit = mark_witnessed(net, gw, cover.beta, cover.cells);
        std::vector<std::uint64_t> witnessed, plain;
        for (std::size_t i = 0; i < cover.cells.size(); ++i)
            (hit[i] ? witnessed : plain).push_back(cover.cells[i]);
        if (witnessed.empty())
            throw BudgetExceeded("witness net reached no cover box");
        cover.cells = std::move(witnessed);
        cover.extra_cells = std::move(plain);
        cover.attest = CoverAttestation::WitnessNet;
        cover.witness.roots = std::move(roots);
        cover.witness.depth = wp.depth;
        cover.witness.dedup_level = wp.dedup_level;
        cover.witness.prec = wp.prec;
    }

    HyperbolicityCertificate cert;
    cert.poly_text = p.identity();
    cert.expansion = std::move(ec);
    cert.distortion = std::move(dc);
    cert.shadowing = std::move(sc);
    cert.cover = std::move(cover);
    cert.R = R;
    cert.meta.base_level = cert.expansion.level;
    cert.meta.final_level = cert.cover.level;
    cert.meta.precision = opt.precision;
    cert.meta.nu_max = opt.nu_max;
    return cert;
}

VerifyReport verify_certificate(const PolyHandle& p, const HyperbolicityCertificate& cert,
                                long w) {
    VerifyReport rep;
    const ExpansionCertificate& ec = cert.expansion;
    const DistortionConstants& dc = cert.distortion;
    const ShadowingConstants& sc = cert.shadowing;
    const ReferenceCover& rc = cert.cover;

    if (cert.poly_text != p.identity()) rep.fail("certificate names a different polynomial");
    if (!(cert.R == escape_radius(p))) rep.fail("frame radius does not match the polynomial");
    if (cert.R.m != 1 || !(rc.R == cert.R) || ec.level < 0 || ec.level > 30 ||
        rc.level < ec.level || rc.level > 30 || sc.t_prime < 0 || sc.t_prime > rc.level ||
        dc.N_prime < 0 || dc.N_prime > 4096) {
        rep.fail("certificate geometry fields are out of range");
        return rep;
    }
    const Grid gb(ec.level, cert.R);
    const Grid gf(rc.level, cert.R);

    // Expansion data.
    if (ec.nu == 0 || (ec.nu & (ec.nu - 1u)) != 0) rep.fail("iterate is not a power of two");
    if (!(ec.lambda_prime.sign() > 0)) rep.fail("expansion margin is not positive");
    if (!(ec.L == Dyadic(1) + ec.lambda_prime.mul_pow2(-1))) rep.fail("L is not 1 + margin/2");
    if (!(ec.delta.sign() > 0)) rep.fail("inflation margin is not positive");
    if (ec.N1.empty()) rep.fail("expansion cover is empty");

    const Dyadic rad1 = gb.eps().mul_pow2(-1) + ec.delta.mul_pow2(1);
    std::vector<std::uint64_t> base_codes;
    base_codes.reserve(ec.N1.size());
    bool geom_ok = !ec.N1.empty();
    for (const BoxLInf& b : ec.N1) {
        auto c = cell_code_of_center(gb, b.center);
        if (!(b.radius == rad1) || !c || !(gb.cell_rect(*c).midpoint() == b.center)) {
            rep.fail("expansion cover box is not a uniformly inflated grid cell");
            geom_ok = false;
            break;
        }
        base_codes.push_back(*c);
    }
    std::sort(base_codes.begin(), base_codes.end());
    if (geom_ok && !ec.cells.empty()) {
        std::vector<std::uint64_t> sorted = ec.cells;
        std::sort(sorted.begin(), sorted.end());
        if (sorted != base_codes) rep.fail("cell list disagrees with the cover boxes");
    }

    bool expansion_ok = !ec.N1.empty() && ec.nu != 0;
    Dyadic dlo_v;
    bool have_dlo = false;
    if (expansion_ok) {
        for (const BoxLInf& b : ec.N1) {
            RectDerivBounds db = iter_derivative_abs_bounds_rect(p, ec.nu, b.to_rect(), w);
            if (db.exhausted || !(db.lo > ec.L)) {
                rep.fail("derivative bound does not clear L on the expansion cover");
                expansion_ok = false;
                break;
            }
            dlo_v = have_dlo ? min(dlo_v, db.lo) : db.lo;
            have_dlo = true;
        }
    }

    // Distortion constants against their defining formulas.
    const mpq_class gq(3, 32);
    if (!(dc.gamma == Dyadic(3).mul_pow2(-5))) rep.fail("distortion budget is not 3/32");
    if (!(dc.r == (Dyadic(3) * ec.delta).mul_pow2(-2))) rep.fail("ball radius is not 3*delta/4");
    if (!(dc.a.sign() > 0) || !(dc.a < dc.r)) {
        rep.fail("concentric offset is outside (0, r)");
    } else if (!(gamma_r_a(dc.a, dc.r, std::max<long>(w, 64)).second <= dc.gamma)) {
        rep.fail("offset distortion exceeds the budget");
    }
    const mpq_class cq = diam_lower_coeff_exact(gq);
    if (!(dc.c_lo.to_mpq() <= cq && cq <= dc.c_hi.to_mpq()))
        rep.fail("diameter coefficient bracket misses the exact value");
    if (!(dc.b.sign() > 0)) rep.fail("pixel side bound is not positive");
    if (!(dc.b <= dc.a)) rep.fail("pixel side bound exceeds the offset");
    {
        // b <= delta * c * sqrt(2) / (32 (1+gamma)); both sides are
        // positive, so squaring turns the sqrt into exact rational terms.
        mpq_class lhs = 32 * (1 + gq) * dc.b.to_mpq();
        mpq_class rhs = ec.delta.to_mpq() * cq;
        if (!(lhs * lhs <= 2 * rhs * rhs))
            rep.fail("pixel side bound exceeds the distortion formula");
    }
    if (!(Dyadic::pow2(-dc.N_prime - 1) < dc.a && Dyadic::pow2(-dc.N_prime) < ec.delta))
        rep.fail("resolution floor fails its defining inequalities");
    else if (dc.N_prime > 0 && Dyadic::pow2(-dc.N_prime) < dc.a &&
             Dyadic::pow2(-dc.N_prime + 1) < ec.delta)
        rep.fail("resolution floor is not minimal");

    // Shadowing constants.
    if (!(sc.r_prime.sign() > 0)) rep.fail("injectivity radius is not positive");
    if (!(sc.r_prime <= ec.delta)) rep.fail("injectivity radius exceeds delta");
    if (expansion_ok && have_dlo) {
        Dyadic d2;
        for (const BoxLInf& b : ec.N1)
            d2 = max(d2, iter_second_deriv_abs_upper(p, ec.nu, b.to_rect(), w));
        if (d2.sign() > 0 && !(sc.r_prime * d2.mul_pow2(1) <= ec.lambda_prime * dlo_v))
            rep.fail("injectivity radius exceeds the curvature formula");
    }
    {
        const Grid gm(rc.level - sc.t_prime, cert.R);
        const Dyadic beta_ref =
            min(min(sc.r_prime, ec.delta), (dc.b - gm.eps()).mul_pow2(-1));
        if (!(sc.beta == beta_ref)) rep.fail("cover inflation is not the stated minimum");
    }
    if (sc.threshold_met) {
        const Dyadic threshold =
            min(sc.r_prime.mul_pow2(1), (ec.lambda_prime * sc.beta).mul_pow2(-2));
        if (!(sc.alpha < threshold))
            rep.fail("pseudo-orbit bound does not clear the shadowing threshold");
    } else if (rc.attest != CoverAttestation::WitnessNet) {
        rep.fail("unmet shadowing threshold without witness attestation");
    }
    if (sc.alpha < gf.eps()) rep.fail("pseudo-orbit bound is below the cell side");

    // Reference cover geometry and nesting.  Boxes are derived from the
    // cell codes, so the per-box checks run over both code lists.
    if (rc.cells.empty()) rep.fail("reference cover is empty");
    if (!(rc.beta.sign() > 0)) rep.fail("cover inflation is not positive");
    if (!(rc.beta == sc.beta)) rep.fail("cover inflation disagrees with the shadowing constants");
    if (!(rc.beta <= ec.delta)) rep.fail("cover inflation exceeds delta");
    if (!(rc.beta_prime == gf.eps() + rc.beta.mul_pow2(1)))
        rep.fail("cover side is not eps + 2*beta");
    if (!(rc.beta_prime <= dc.b)) rep.fail("cover side exceeds the pixel bound");

    auto check_cover_cells = [&](const std::vector<std::uint64_t>& codes) {
        std::uint64_t prev = 0;
        bool first = true;
        for (std::uint64_t code : codes) {
            if (!first && !(prev < code)) {
                rep.fail("cover cell codes are not strictly increasing");
                return;
            }
            first = false;
            prev = code;
            if (Grid::code_i(code) >= gf.side() || Grid::code_j(code) >= gf.side()) {
                rep.fail("cover cell code is outside the grid");
                return;
            }
            const BoxLInf b = rc.box_of(code);
            auto cb = cell_code_of_center(gb, b.center);
            if (!cb || !std::binary_search(base_codes.begin(), base_codes.end(), *cb)) {
                rep.fail("cover box has no expanding ancestor");
                return;
            }
            RectInterval big = gb.cell_rect(*cb).inflate(ec.delta.mul_pow2(1));
            if (!big.contains_rect(b.to_rect().inflate(ec.delta))) {
                rep.fail("delta-inflated cover box escapes the expansion cover");
                return;
            }
        }
    };
    check_cover_cells(rc.cells);
    check_cover_cells(rc.extra_cells);

    if (rc.attest == CoverAttestation::Shadowing) {
        if (!rc.extra_cells.empty())
            rep.fail("shadowing attestation cannot carry unwitnessed cover boxes");
        if (!rc.witness.roots.empty()) rep.fail("shadowing attestation carries witness seeds");
    } else {
        // Witness-net attestation: re-certify the seeds, rebuild the net
        // with the recorded parameters, and re-derive which boxes catch a
        // witness.  The stored split must match exactly.
        if (p.degree() != 2) rep.fail("witness attestation requires a quadratic");
        if (rc.witness.roots.empty()) rep.fail("witness attestation without seeds");
        if (rc.witness.depth < 1 || rc.witness.depth > 128 || rc.witness.dedup_level < 1 ||
            rc.witness.dedup_level > rc.level || rc.witness.prec < 64 ||
            rc.witness.prec > 4096) {
            rep.fail("witness net parameters are out of range");
        } else if (rep.pass) {
            for (const BoxLInf& root : rc.witness.roots) {
                if (!verify_fixed_point_box(p, root, rc.witness.prec)) {
                    rep.fail("witness seed is not a certified repelling fixed point");
                    break;
                }
            }
            if (rep.pass) {
                WitnessParams wp;
                wp.depth = rc.witness.depth;
                wp.dedup_level = rc.witness.dedup_level;
                wp.prec = rc.witness.prec;
                std::vector<RectInterval> net = build_witness_net(p, rc.witness.roots, wp, rc.R);
                std::vector<std::uint64_t> all;
                all.reserve(rc.cells.size() + rc.extra_cells.size());
                std::merge(rc.cells.begin(), rc.cells.end(), rc.extra_cells.begin(),
                           rc.extra_cells.end(), std::back_inserter(all));
                std::vector<bool> hit = mark_witnessed(net, gf, rc.beta, all);
                std::vector<std::uint64_t> witnessed;
                for (std::size_t i = 0; i < all.size(); ++i)
                    if (hit[i]) witnessed.push_back(all[i]);
                if (witnessed != rc.cells)
                    rep.fail("witnessed box set disagrees with the rebuilt net");
            }
        }
    }

    if (cert.meta.base_level != ec.level || cert.meta.final_level != rc.level)
        rep.fail("metadata levels disagree with the certificate");
    return rep;
}

}  // namespace juliacert
