#include "juliacert/boxchain.hpp"

#include <algorithm>
#include <stdexcept>
#include <thread>

#include <json.hpp>

namespace juliacert {

namespace {

// floor of (x + R) / eps together with "landed exactly on a grid line".
// eps is a power of two, so the quotient is an exact dyadic; a canonical
// dyadic is an integer exactly when its exponent is >= 0.
std::pair<mpz_class, bool> floor_scaled(const Dyadic& x, const Dyadic& R, long eps_exp) {
    Dyadic t = (x + R).mul_pow2(-eps_exp);
    if (t.is_zero()) return {mpz_class(0), true};
    if (t.e >= 0) {
        mpz_class v = t.m << t.e;
        return {v, true};
    }
    mpz_class q;
    mpz_fdiv_q_2exp(q.get_mpz_t(), t.m.get_mpz_t(), static_cast<mp_bitcnt_t>(-t.e));
    return {q, false};
}

void clamp_axis(const mpz_class& lo_raw, const mpz_class& hi_raw, std::uint32_t side,
                std::uint32_t& lo_out, std::uint32_t& hi_out) {
    mpz_class lo = lo_raw < 0 ? mpz_class(0) : lo_raw;
    mpz_class max_idx(static_cast<unsigned long>(side - 1));
    mpz_class hi = hi_raw > max_idx ? max_idx : hi_raw;
    if (lo > hi) {
        lo_out = 1;
        hi_out = 0;
        return;
    }
    lo_out = static_cast<std::uint32_t>(lo.get_ui());
    hi_out = static_cast<std::uint32_t>(hi.get_ui());
}

// Cells met by a closed rectangle. A bound exactly on a grid line pulls in
// the cell on the far side too: closed cells share their edges.
TargetRange range_of(const Grid& g, const RectInterval& img) {
    long ee = g.eps_exp();
    auto [ilo_f, ilo_exact] = floor_scaled(img.re_lo, g.R, ee);
    auto [ihi_f, ihi_exact] = floor_scaled(img.re_hi, g.R, ee);
    auto [jlo_f, jlo_exact] = floor_scaled(img.im_lo, g.R, ee);
    auto [jhi_f, jhi_exact] = floor_scaled(img.im_hi, g.R, ee);
    (void)ihi_exact;
    (void)jhi_exact;
    mpz_class ilo = ilo_exact ? mpz_class(ilo_f - 1) : ilo_f;
    mpz_class jlo = jlo_exact ? mpz_class(jlo_f - 1) : jlo_f;
    TargetRange tr;
    clamp_axis(ilo, ihi_f, g.side(), tr.i_lo, tr.i_hi);
    clamp_axis(jlo, jhi_f, g.side(), tr.j_lo, tr.j_hi);
    return tr;
}

nlohmann::ordered_json dyadic_json(const Dyadic& d) {
    return {{"m", d.mantissa_str()}, {"e", d.e}};
}

}  // namespace

Grid::Grid(int n, Dyadic frame) : level(n), R(std::move(frame)) {
    if (n < 0 || n > 30) throw std::invalid_argument("grid level out of range");
    if (R.sign() <= 0 || R.m != 1) throw std::invalid_argument("frame half-side must be a power of two");
}

RectInterval Grid::cell_rect(std::uint64_t c) const {
    Dyadic ep = eps();
    Dyadic x0 = Dyadic(mpz_class(static_cast<unsigned long>(code_i(c))), eps_exp()) - R;
    Dyadic y0 = Dyadic(mpz_class(static_cast<unsigned long>(code_j(c))), eps_exp()) - R;
    return RectInterval{x0, x0 + ep, y0, y0 + ep};
}

BoxLInf Grid::cell_box(std::uint64_t c) const {
    RectInterval r = cell_rect(c);
    return BoxLInf{r.midpoint(), Dyadic::pow2(eps_exp() - 1)};
}

std::vector<std::uint64_t> Grid::cells_containing(const Dyadic& x, const Dyadic& y) const {
    auto axis = [&](const Dyadic& v) {
        std::vector<std::uint32_t> idx;
        auto [f, exact] = floor_scaled(v, R, eps_exp());
        mpz_class cands[2];
        int nc = 0;
        if (exact) {
            cands[nc++] = f - 1;
            cands[nc++] = f;
        } else {
            cands[nc++] = f;
        }
        mpz_class max_idx(static_cast<unsigned long>(side() - 1));
        for (int t = 0; t < nc; ++t)
            if (cands[t] >= 0 && cands[t] <= max_idx)
                idx.push_back(static_cast<std::uint32_t>(cands[t].get_ui()));
        return idx;
    };
    std::vector<std::uint64_t> out;
    for (std::uint32_t i : axis(x))
        for (std::uint32_t j : axis(y)) out.push_back(code(i, j));
    std::sort(out.begin(), out.end());
    return out;
}

std::vector<std::uint64_t> Grid::all_cells() const {
    std::vector<std::uint64_t> out;
    std::uint32_t s = side();
    out.reserve(std::size_t{s} * s);
    for (std::uint32_t i = 0; i < s; ++i)
        for (std::uint32_t j = 0; j < s; ++j) out.push_back(code(i, j));
    return out;
}

std::optional<std::size_t> BoxGraph::find_cell(std::uint64_t c) const {
    auto it = std::lower_bound(cells.begin(), cells.end(), c);
    if (it == cells.end() || *it != c) return std::nullopt;
    return std::size_t(it - cells.begin());
}

std::size_t BoxGraph::edge_count() const {
    std::size_t n = 0;
    for (std::size_t v = 0; v < vertex_count(); ++v) for_each_out(v, [&](std::size_t) { ++n; });
    return n;
}

RangeAdjacency::Cursor RangeAdjacency::open(std::uint32_t v) const {
    Cursor cur;
    const TargetRange& tr = bg_->targets[v];
    if (tr.empty()) return cur;  // stays exhausted
    cur.i = tr.i_lo;
    cur.i_hi = tr.i_hi;
    cur.j_lo = tr.j_lo;
    cur.j_hi = tr.j_hi;
    seek_row(cur);
    return cur;
}

void RangeAdjacency::seek_row(Cursor& cur) const {
    const auto& cells = bg_->cells;
    auto lo = std::lower_bound(cells.begin(), cells.end(), Grid::code(cur.i, cur.j_lo));
    auto hi = std::upper_bound(lo, cells.end(), Grid::code(cur.i, cur.j_hi));
    cur.pos = std::size_t(lo - cells.begin());
    cur.row_end = std::size_t(hi - cells.begin());
}

bool RangeAdjacency::next(Cursor& cur, std::uint32_t& out) const {
    while (true) {
        if (cur.pos < cur.row_end) {
            out = static_cast<std::uint32_t>(cur.pos++);
            return true;
        }
        if (cur.i >= cur.i_hi) return false;
        ++cur.i;
        seek_row(cur);
    }
}

BoxGraph build_edges(const PolyHandle& p, const Grid& g,
                     const std::vector<std::uint64_t>& active, long w, int jobs) {
    BoxGraph bg;
    bg.grid = g;
    bg.cells = active;
    if (!std::is_sorted(bg.cells.begin(), bg.cells.end()))
        std::sort(bg.cells.begin(), bg.cells.end());
    const std::size_t nv = bg.cells.size();
    bg.targets.resize(nv);
    bg.eta = Dyadic(0);

    auto work = [&](std::size_t lo, std::size_t hi, Dyadic* eta_out) {
        Dyadic local(0);
        for (std::size_t v = lo; v < hi; ++v) {
            RectInterval box = g.cell_rect(bg.cells[v]);
            RectInterval img = eval_rect(p, box, w);
            bg.targets[v] = range_of(g, img);
            Dyadic ov = eval_overshoot_bound(p, box, w, img.width());
            if (local < ov) local = ov;
        }
        *eta_out = local;
    };

    int nt = jobs < 1 ? 1 : jobs;
    if (nt > 1 && nv >= 64) {
        std::size_t chunk = (nv + nt - 1) / std::size_t(nt);
        std::vector<Dyadic> etas(std::size_t(nt), Dyadic(0));
        std::vector<std::thread> threads;
        for (int t = 0; t < nt; ++t) {
            std::size_t lo = std::size_t(t) * chunk;
            if (lo >= nv) break;
            std::size_t hi = std::min(nv, lo + chunk);
            threads.emplace_back(work, lo, hi, &etas[std::size_t(t)]);
        }
        for (auto& th : threads) th.join();
        for (const auto& e : etas)
            if (bg.eta < e) bg.eta = e;
    } else {
        work(0, nv, &bg.eta);
    }
    return bg;
}

BoxGraph trim_to_cycles(const BoxGraph& bg) {
    RangeAdjacency adj(bg);
    std::vector<char> keep = cycle_vertices(adj);
    BoxGraph out;
    out.grid = bg.grid;
    out.eta = bg.eta;
    for (std::size_t v = 0; v < bg.vertex_count(); ++v) {
        if (!keep[v]) continue;
        out.cells.push_back(bg.cells[v]);
        out.targets.push_back(bg.targets[v]);
    }
    return out;
}

SCCDecomposition scc(const BoxGraph& bg) {
    SCCDecomposition d;
    RangeAdjacency adj(bg);
    d.comp = strongly_connected_components(adj, d.count);
    d.members.assign(d.count, {});
    for (std::uint32_t v = 0; v < bg.vertex_count(); ++v) d.members[d.comp[v]].push_back(v);
    for (std::size_t v = 0; v < bg.vertex_count(); ++v) {
        bg.for_each_out(v, [&](std::size_t w) {
            if (d.comp[v] != d.comp[w]) d.dag_edges.emplace_back(d.comp[v], d.comp[w]);
        });
    }
    std::sort(d.dag_edges.begin(), d.dag_edges.end());
    d.dag_edges.erase(std::unique(d.dag_edges.begin(), d.dag_edges.end()), d.dag_edges.end());
    return d;
}

AlphaBound alpha_bound(const Grid& g, const BoxGraph& bg) {
    return AlphaBound{g.level, g.eps() + bg.eta};
}

std::pair<Grid, BoxGraph> refine(const PolyHandle& p, const BoxGraph& bg, int t, long w,
                                 int jobs) {
    if (t < 1) throw std::invalid_argument("refinement depth must be positive");
    Grid fine(bg.grid.level + t, bg.grid.R);
    std::vector<std::uint64_t> kids;
    std::uint32_t f = std::uint32_t{1} << t;
    kids.reserve(bg.cells.size() << (2 * t));
    for (std::uint64_t c : bg.cells) {
        std::uint32_t i0 = Grid::code_i(c) << t, j0 = Grid::code_j(c) << t;
        for (std::uint32_t di = 0; di < f; ++di)
            for (std::uint32_t dj = 0; dj < f; ++dj) kids.push_back(Grid::code(i0 + di, j0 + dj));
    }
    std::sort(kids.begin(), kids.end());
    BoxGraph fine_bg = build_edges(p, fine, kids, w, jobs);
    return {fine, trim_to_cycles(fine_bg)};
}

std::string graph_to_json(const BoxGraph& bg) {
    nlohmann::ordered_json j;
    j["level"] = bg.grid.level;
    j["frame"] = dyadic_json(bg.grid.R);
    j["eps"] = dyadic_json(bg.grid.eps());
    j["radius"] = dyadic_json(Dyadic::pow2(bg.grid.eps_exp() - 1));
    j["eta"] = dyadic_json(bg.eta);
    j["cells"] = nlohmann::ordered_json::array();
    for (std::size_t v = 0; v < bg.vertex_count(); ++v) {
        std::uint64_t c = bg.cells[v];
        DyadicComplex ctr = bg.grid.cell_box(c).center;
        nlohmann::ordered_json jc;
        jc["i"] = Grid::code_i(c);
        jc["j"] = Grid::code_j(c);
        jc["center"] = {ctr.re.mantissa_str(), ctr.re.e, ctr.im.mantissa_str(), ctr.im.e};
        auto out = nlohmann::ordered_json::array();
        bg.for_each_out(v, [&](std::size_t w) { out.push_back(w); });
        jc["out"] = std::move(out);
        j["cells"].push_back(std::move(jc));
    }
    return j.dump();
}

}  // namespace juliacert
