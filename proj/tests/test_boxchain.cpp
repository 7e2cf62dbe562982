#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>
#include <set>

#include <json.hpp>

#include "juliacert/boxchain.hpp"

using namespace juliacert;

namespace {

// cells of g whose closed box contains the exact rational point (x, y)
std::vector<std::uint64_t> cells_containing_q(const Grid& g, const mpq_class& x,
                                              const mpq_class& y) {
    auto axis = [&](const mpq_class& v) {
        mpq_class q = (v + g.R.to_mpq()) / g.eps().to_mpq();
        q.canonicalize();
        std::vector<long> out;
        if (q.get_den() == 1) {
            long m = q.get_num().get_si();
            out.push_back(m - 1);
            out.push_back(m);
        } else {
            mpz_class f;
            mpz_fdiv_q(f.get_mpz_t(), q.get_num().get_mpz_t(), q.get_den().get_mpz_t());
            out.push_back(f.get_si());
        }
        std::vector<std::uint32_t> keep;
        for (long c : out)
            if (c >= 0 && c < long(g.side())) keep.push_back(std::uint32_t(c));
        return keep;
    };
    std::vector<std::uint64_t> cs;
    for (auto i : axis(x))
        for (auto j : axis(y)) cs.push_back(Grid::code(i, j));
    return cs;
}

// exact z^2 + c on dyadic points
DyadicComplex quad_step(const DyadicComplex& z, const DyadicComplex& c) {
    return z * z + c;
}

// exact L-infinity distance from a dyadic point to a closed rect
Dyadic dist_point_rect(const DyadicComplex& p, const RectInterval& r) {
    auto gap = [](const Dyadic& v, const Dyadic& lo, const Dyadic& hi) {
        if (v < lo) return lo - v;
        if (v > hi) return v - hi;
        return Dyadic(0);
    };
    return max(gap(p.re, r.re_lo, r.re_hi), gap(p.im, r.im_lo, r.im_hi));
}

std::vector<std::vector<std::uint32_t>> random_digraph(std::mt19937_64& rng, int max_n) {
    std::uniform_int_distribution<int> nd(1, max_n);
    int n = nd(rng);
    std::uniform_real_distribution<double> pd(0.0, 1.0);
    double p = 2.5 / n;
    std::vector<std::vector<std::uint32_t>> adj(n);
    for (int u = 0; u < n; ++u)
        for (int v = 0; v < n; ++v)
            if (pd(rng) < p) adj[u].push_back(std::uint32_t(v));
    return adj;
}

// transitive closure with paths of length >= 1
std::vector<std::vector<bool>> closure(const std::vector<std::vector<std::uint32_t>>& adj) {
    std::size_t n = adj.size();
    std::vector<std::vector<bool>> r(n, std::vector<bool>(n, false));
    for (std::size_t u = 0; u < n; ++u)
        for (auto v : adj[u]) r[u][v] = true;
    for (std::size_t k = 0; k < n; ++k)
        for (std::size_t u = 0; u < n; ++u) {
            if (!r[u][k]) continue;
            for (std::size_t v = 0; v < n; ++v)
                if (r[k][v]) r[u][v] = true;
        }
    return r;
}

}  // namespace

TEST_CASE("grid geometry") {
    Grid g(2, Dyadic(2));  // eps = 1, cells [-2,2]^2
    CHECK(g.eps() == Dyadic(1));
    CHECK(g.side() == 4);
    RectInterval c00 = g.cell_rect(Grid::code(0, 0));
    CHECK(c00.re_lo == Dyadic(-2));
    CHECK(c00.re_hi == Dyadic(-1));
    CHECK(c00.im_lo == Dyadic(-2));
    CHECK(c00.im_hi == Dyadic(-1));
    BoxLInf b = g.cell_box(Grid::code(3, 2));
    CHECK(b.center.re == Dyadic(3, -1));
    CHECK(b.center.im == Dyadic(1, -1));
    CHECK(b.radius == Dyadic(1, -1));

    // a grid-line point lies in several closed cells
    CHECK(g.cells_containing(Dyadic(0), Dyadic(0)).size() == 4);
    CHECK(g.cells_containing(Dyadic(-2), Dyadic(-2)).size() == 1);  // frame corner
    auto two = g.cells_containing(Dyadic(1, -1), Dyadic(0));
    CHECK(two.size() == 2);
    for (auto c : two) CHECK(Grid::code_i(c) == 2);

    auto all = g.all_cells();
    CHECK(all.size() == 16);
    CHECK(std::is_sorted(all.begin(), all.end()));

    CHECK_THROWS_AS(Grid(3, Dyadic(3)), std::invalid_argument);  // not a power of two
}

TEST_CASE("edges at fixed points of z^2") {
    PolyHandle p = parse_poly("z^2");
    Grid g(4, Dyadic(2));  // eps = 1/4
    BoxGraph bg = build_edges(p, g, g.all_cells(), 30);

    // every closed cell touching 0 maps over 0, so each must carry a self-loop
    for (auto c : g.cells_containing(Dyadic(0), Dyadic(0))) {
        auto v = bg.find_cell(c);
        REQUIRE(v.has_value());
        CHECK(bg.has_edge(*v, *v));
    }
    // cells touching the fixed point 1 must all reach one another
    auto ones = g.cells_containing(Dyadic(1), Dyadic(0));
    CHECK(ones.size() == 4);  // (1,0) sits on both grid lines
    for (auto ck : ones)
        for (auto cj : ones) {
            auto k = bg.find_cell(ck), j = bg.find_cell(cj);
            REQUIRE(k.has_value());
            REQUIRE(j.has_value());
            CHECK(bg.has_edge(*k, *j));
        }
    // the outer corner cell's image leaves the frame entirely
    auto far = bg.find_cell(Grid::code(15, 15));
    REQUIRE(far.has_value());
    CHECK(bg.targets[*far].empty());
}

TEST_CASE("sampled edge guarantee") {
    std::mt19937_64 rng(12021);
    for (const char* poly : {"z^2", "z^2-1"}) {
        PolyHandle p = parse_poly(poly);
        DyadicComplex shift{std::string(poly) == "z^2" ? Dyadic(0) : Dyadic(-1), Dyadic(0)};
        Grid g(5, Dyadic(2));
        BoxGraph bg = build_edges(p, g, g.all_cells(), 32);
        std::uniform_int_distribution<std::size_t> vd(0, bg.vertex_count() - 1);
        std::uniform_int_distribution<int> od(0, 16);
        for (int trial = 0; trial < 500; ++trial) {
            std::size_t v = vd(rng);
            RectInterval box = g.cell_rect(bg.cells[v]);
            Dyadic step = Dyadic::pow2(g.eps_exp() - 4);
            DyadicComplex z{box.re_lo + Dyadic(od(rng)) * step,
                            box.im_lo + Dyadic(od(rng)) * step};
            DyadicComplex img = quad_step(z, shift);
            for (auto c : g.cells_containing(img.re, img.im)) {
                auto j = bg.find_cell(c);
                REQUIRE(j.has_value());
                CHECK(bg.has_edge(v, *j));
            }
        }
    }
}

TEST_CASE("tarjan matches brute force") {
    std::mt19937_64 rng(7331);
    for (int trial = 0; trial < 400; ++trial) {
        auto lists = random_digraph(rng, 30);
        std::size_t n = lists.size();
        auto r = closure(lists);
        VecAdjacency adj(lists);
        std::size_t count = 0;
        auto comp = strongly_connected_components(adj, count);
        CHECK(count >= 1);
        for (std::size_t u = 0; u < n; ++u)
            for (std::size_t v = u + 1; v < n; ++v) {
                bool same = comp[u] == comp[v];
                bool mutual = r[u][v] && r[v][u];
                CHECK(same == mutual);
            }
        // component ids come out in reverse topological order
        for (std::size_t u = 0; u < n; ++u)
            for (auto v : lists[u])
                if (comp[u] != comp[v]) CHECK(comp[u] > comp[v]);
    }
}

TEST_CASE("cycle membership matches brute force") {
    std::mt19937_64 rng(99);
    for (int trial = 0; trial < 600; ++trial) {
        auto lists = random_digraph(rng, 30);
        auto r = closure(lists);
        VecAdjacency adj(lists);
        auto on = cycle_vertices(adj);
        for (std::size_t v = 0; v < lists.size(); ++v) CHECK(bool(on[v]) == bool(r[v][v]));
    }
}

TEST_CASE("cycle filter on handcrafted graphs") {
    // two 2-cycles joined by a one-way bridge: everything but nothing survives
    // (bridge endpoints sit on their own cycles, the bridge edge is incidental)
    VecAdjacency bridge({{1}, {0, 2}, {3}, {2}});
    auto on = cycle_vertices(bridge);
    CHECK(on == std::vector<char>({1, 1, 1, 1}));
    // a path has no cycle at all
    VecAdjacency path({{1}, {2}, {}});
    CHECK(cycle_vertices(path) == std::vector<char>({0, 0, 0}));
    // lone self-loop
    VecAdjacency loop(std::vector<std::vector<std::uint32_t>>{{0}});
    CHECK(cycle_vertices(loop) == std::vector<char>({1}));
    // a cycle with a dangling tail keeps only the cycle
    VecAdjacency tail({{1}, {2}, {0, 3}, {4}, {}});
    CHECK(cycle_vertices(tail) == std::vector<char>({1, 1, 1, 0, 0}));
}

TEST_CASE("trim on box graphs") {
    Grid g(2, Dyadic(2));
    SUBCASE("self-loop survives") {
        BoxGraph bg;
        bg.grid = g;
        bg.cells = {Grid::code(1, 1)};
        bg.targets = {TargetRange{1, 1, 1, 1}};
        bg.eta = Dyadic(0);
        BoxGraph t = trim_to_cycles(bg);
        CHECK(t.cells == bg.cells);
    }
    SUBCASE("pure path dies") {
        BoxGraph bg;
        bg.grid = g;
        bg.cells = {Grid::code(0, 0), Grid::code(0, 1), Grid::code(0, 2)};
        bg.targets = {TargetRange{0, 0, 1, 1}, TargetRange{0, 0, 2, 2},
                      TargetRange{3, 3, 3, 3}};
        bg.eta = Dyadic(0);
        CHECK(trim_to_cycles(bg).cells.empty());
    }
    SUBCASE("vertical 3-cycle is one component") {
        BoxGraph bg;
        bg.grid = g;
        bg.cells = {Grid::code(0, 0), Grid::code(0, 1), Grid::code(0, 2)};
        bg.targets = {TargetRange{0, 0, 1, 1}, TargetRange{0, 0, 2, 2},
                      TargetRange{0, 0, 0, 0}};
        bg.eta = Dyadic(0);
        BoxGraph t = trim_to_cycles(bg);
        CHECK(t.cells.size() == 3);
        auto d = scc(t);
        CHECK(d.count == 1);
        CHECK(d.members[0].size() == 3);
        CHECK(d.dag_edges.empty());
    }
    SUBCASE("two disjoint self-loops are two components") {
        BoxGraph bg;
        bg.grid = g;
        bg.cells = {Grid::code(0, 0), Grid::code(2, 2)};
        bg.targets = {TargetRange{0, 0, 0, 0}, TargetRange{2, 2, 2, 2}};
        bg.eta = Dyadic(0);
        auto d = scc(trim_to_cycles(bg));
        CHECK(d.count == 2);
        CHECK(d.dag_edges.empty());
    }
}

TEST_CASE("trimmed unit-circle model") {
    PolyHandle p = parse_poly("z^2");
    Grid g(6, Dyadic(2));  // eps = 1/16
    BoxGraph full = build_edges(p, g, g.all_cells(), 32);
    BoxGraph bg = trim_to_cycles(full);
    CHECK(bg.vertex_count() > 0);
    CHECK(bg.vertex_count() < full.vertex_count() / 4);

    SUBCASE("idempotent") {
        BoxGraph again = trim_to_cycles(bg);
        CHECK(again.cells == bg.cells);
        CHECK(again.eta == bg.eta);
    }

    SUBCASE("covers the unit circle") {
        // exact rational points on the circle via the half-angle parametrization
        for (int k = 0; k < 500; ++k) {
            mpq_class t(2 * k - 499, 500);  // in (-1, 1)
            mpq_class den = 1 + t * t;
            mpq_class x = (1 - t * t) / den, y = 2 * t / den;
            for (const mpq_class& xx : {x, mpq_class(-x)}) {
                auto cs = cells_containing_q(g, xx, y);
                bool covered = false;
                for (auto c : cs) covered = covered || bg.find_cell(c).has_value();
                CHECK(covered);
            }
        }
    }

    SUBCASE("alpha exceeds cell size and pays for enclosure slack") {
        AlphaBound a = alpha_bound(g, bg);
        CHECK(a.level == 6);
        CHECK(a.alpha > g.eps());
        CHECK(a.alpha < g.eps() + g.eps());  // eta stays well under eps here
    }

    SUBCASE("edges admit alpha pseudo-orbit jumps") {
        AlphaBound a = alpha_bound(g, bg);
        int checked = 0;
        for (std::size_t v = 0; v < bg.vertex_count() && checked < 120; v += 3) {
            RectInterval box = g.cell_rect(bg.cells[v]);
            std::vector<std::size_t> outs;
            bg.for_each_out(v, [&](std::size_t w) { outs.push_back(w); });
            if (outs.empty()) continue;
            std::size_t w = outs[checked % outs.size()];
            RectInterval target = g.cell_rect(bg.cells[w]);
            // a true image point of the source box must come alpha-close
            Dyadic best(1000);
            Dyadic step = Dyadic::pow2(g.eps_exp() - 4);
            for (int i = 0; i <= 16; ++i)
                for (int j = 0; j <= 16; ++j) {
                    DyadicComplex z{box.re_lo + Dyadic(i) * step,
                                    box.im_lo + Dyadic(j) * step};
                    best = min(best, dist_point_rect(quad_step(z, {Dyadic(0), Dyadic(0)}),
                                                     target));
                }
            CHECK(best <= a.alpha);
            ++checked;
        }
        CHECK(checked >= 60);
    }

    SUBCASE("deterministic across thread counts") {
        BoxGraph bg3 = build_edges(p, g, g.all_cells(), 32, 3);
        CHECK(bg3.eta == full.eta);
        CHECK(bg3.cells == full.cells);
        bool same = true;
        for (std::size_t v = 0; v < full.vertex_count(); ++v) {
            const TargetRange &x = bg3.targets[v], &y = full.targets[v];
            same = same && x.i_lo == y.i_lo && x.i_hi == y.i_hi && x.j_lo == y.j_lo &&
                   x.j_hi == y.j_hi;
        }
        CHECK(same);
    }
}

TEST_CASE("basilica two-cycle survives trimming") {
    PolyHandle p = parse_poly("z^2-1");
    Grid g(6, Dyadic(2));
    BoxGraph bg = trim_to_cycles(build_edges(p, g, g.all_cells(), 32));
    // the critical orbit 0 <-> -1 is superattracting, so its cells persist
    for (auto [x, y] : {std::pair<int, int>{0, 0}, {-1, 0}}) {
        bool found = false;
        for (auto c : g.cells_containing(Dyadic(x), Dyadic(y)))
            found = found || bg.find_cell(c).has_value();
        CHECK(found);
    }
    // and cells at 0 keep an edge toward a surviving cell at -1
    bool linked = false;
    for (auto c0 : g.cells_containing(Dyadic(0), Dyadic(0))) {
        auto v = bg.find_cell(c0);
        if (!v) continue;
        for (auto c1 : g.cells_containing(Dyadic(-1), Dyadic(0))) {
            auto w = bg.find_cell(c1);
            if (w && bg.has_edge(*v, *w)) linked = true;
        }
    }
    CHECK(linked);
}

TEST_CASE("refinement") {
    PolyHandle p = parse_poly("z^2");
    Grid g(6, Dyadic(2));
    BoxGraph bg = trim_to_cycles(build_edges(p, g, g.all_cells(), 32));

    SUBCASE("children nest inside surviving parents") {
        auto [fine, fbg] = refine(p, bg, 2, 36);
        CHECK(fine.level == 8);
        CHECK(fbg.vertex_count() > bg.vertex_count());
        for (auto c : fbg.cells) {
            std::uint64_t parent = Grid::code(Grid::code_i(c) >> 2, Grid::code_j(c) >> 2);
            CHECK(bg.find_cell(parent).has_value());
        }
        // alpha strictly decreases and the fine cover still hits the circle
        CHECK(alpha_bound(fine, fbg).alpha < alpha_bound(g, bg).alpha);
        for (int k = 0; k < 100; ++k) {
            mpq_class t(2 * k - 99, 100);
            mpq_class den = 1 + t * t;
            auto cs = cells_containing_q(fine, (1 - t * t) / den, 2 * t / den);
            bool covered = false;
            for (auto c : cs) covered = covered || fbg.find_cell(c).has_value();
            CHECK(covered);
        }
    }

    SUBCASE("empty graph stays empty") {
        BoxGraph empty;
        empty.grid = g;
        empty.eta = Dyadic(0);
        auto [fine, fbg] = refine(p, empty, 1, 36);
        CHECK(fine.level == 7);
        CHECK(fbg.vertex_count() == 0);
    }

    SUBCASE("fixed point cell keeps a surviving child") {
        auto [fine, fbg] = refine(p, bg, 1, 36);
        bool found = false;
        for (auto c : fine.cells_containing(Dyadic(1), Dyadic(0)))
            found = found || fbg.find_cell(c).has_value();
        CHECK(found);
    }

    SUBCASE("depth must be positive") {
        CHECK_THROWS_AS(refine(p, bg, 0, 36), std::invalid_argument);
    }
}

TEST_CASE("alpha arithmetic") {
    Grid g(6, Dyadic(2));  // eps = 1/16
    BoxGraph bg;
    bg.grid = g;
    bg.eta = Dyadic(1, -6);  // 1/64
    AlphaBound a = alpha_bound(g, bg);
    CHECK(a.alpha == Dyadic(5, -6));  // 5/64
}

TEST_CASE("json dump") {
    PolyHandle p = parse_poly("z^2");
    Grid g(3, Dyadic(2));
    BoxGraph bg = trim_to_cycles(build_edges(p, g, g.all_cells(), 24));
    auto j = nlohmann::json::parse(graph_to_json(bg));
    CHECK(j["level"] == 3);
    CHECK(j["frame"]["m"] == "1");
    CHECK(j["frame"]["e"] == 1);
    CHECK(j["cells"].size() == bg.vertex_count());
    for (std::size_t v = 0; v < bg.vertex_count(); ++v) {
        std::vector<std::size_t> outs;
        bg.for_each_out(v, [&](std::size_t w) { outs.push_back(w); });
        REQUIRE(j["cells"][v]["out"].size() == outs.size());
        for (std::size_t k = 0; k < outs.size(); ++k)
            CHECK(j["cells"][v]["out"][k] == outs[k]);
    }
}
