#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "juliacert/polynomial.hpp"

namespace juliacert {

// Dyadic grid over the square frame [-R,R]^2, split into 2^n x 2^n closed
// cells of side eps = 2R/2^n. Cells are addressed by (i,j) with i along the
// real axis and j along the imaginary axis, packed into a 64-bit code. The
// grid itself is just geometry; the set of cells under study lives in
// BoxGraph so it can shrink as trimming discards vertices.
struct Grid {
    int level = 0;  // n
    Dyadic R;       // frame half-side, a power of two

    Grid() = default;
    Grid(int n, Dyadic frame);

    long eps_exp() const { return R.e + 1 - level; }  // eps = 2^eps_exp
    Dyadic eps() const { return Dyadic::pow2(eps_exp()); }
    std::uint32_t side() const { return std::uint32_t{1} << level; }

    static std::uint64_t code(std::uint32_t i, std::uint32_t j) {
        return (std::uint64_t{i} << 32) | j;
    }
    static std::uint32_t code_i(std::uint64_t c) { return std::uint32_t(c >> 32); }
    static std::uint32_t code_j(std::uint64_t c) { return std::uint32_t(c & 0xffffffffu); }

    RectInterval cell_rect(std::uint64_t c) const;
    BoxLInf cell_box(std::uint64_t c) const;

    // All cells of this grid whose closed box contains the point (closed
    // cells share edges, so a point on a grid line lies in 2 or 4 of them).
    std::vector<std::uint64_t> cells_containing(const Dyadic& x, const Dyadic& y) const;

    // Every cell of the full 2^n x 2^n tiling, sorted by code. Only sensible
    // at small n; deeper levels are reached by refining survivors.
    std::vector<std::uint64_t> all_cells() const;
};

// Image of one cell, expressed as the (clamped) index rectangle of grid
// cells met by the cell's image enclosure. Out-neighbors of a vertex are
// exactly the active cells inside its range, so the edge list never has to
// be materialized.
struct TargetRange {
    std::uint32_t i_lo = 1, i_hi = 0, j_lo = 1, j_hi = 0;  // default: empty
    bool empty() const { return i_lo > i_hi || j_lo > j_hi; }
    bool covers(std::uint64_t c) const {
        std::uint32_t i = Grid::code_i(c), j = Grid::code_j(c);
        return i_lo <= i && i <= i_hi && j_lo <= j && j <= j_hi;
    }
};

// Directed graph of grid cells with the certified edge relation: an edge
// k -> j is present exactly when the image enclosure of cell k meets the
// closed cell j. Presence is therefore guaranteed whenever the true image
// p(B_k) meets B_j, and absence guarantees a positive gap between p(B_k)
// and B_j. eta bounds the Hausdorff overshoot of every enclosure over the
// true image, which is what the pseudo-orbit parameter alpha pays for.
struct BoxGraph {
    Grid grid;
    std::vector<std::uint64_t> cells;   // sorted vertex codes
    std::vector<TargetRange> targets;   // aligned with cells
    Dyadic eta;                         // max enclosure overshoot over all vertices

    std::size_t vertex_count() const { return cells.size(); }
    std::optional<std::size_t> find_cell(std::uint64_t c) const;
    bool has_edge(std::size_t from, std::size_t to) const {
        return targets[from].covers(cells[to]);
    }

    template <class F>
    void for_each_out(std::size_t v, F&& f) const;

    std::size_t edge_count() const;
};

struct SCCDecomposition {
    std::vector<std::uint32_t> comp;                // component id per vertex
    std::size_t count = 0;                          // number of components
    std::vector<std::vector<std::uint32_t>> members;// vertices per component
    std::vector<std::pair<std::uint32_t, std::uint32_t>> dag_edges;  // condensed, deduped
};

struct AlphaBound {
    int level = 0;
    Dyadic alpha;  // eps + eta
};

// Compute image enclosures and target ranges for every cell in `active`
// (sorted codes) at precision w. `jobs` splits the per-cell work across
// threads; results are deterministic regardless of thread count.
BoxGraph build_edges(const PolyHandle& p, const Grid& g,
                     const std::vector<std::uint64_t>& active, long w, int jobs = 1);

// Maximal subgraph in which every vertex lies on a directed cycle
// (vertices of SCCs of size >= 2, plus self-loop vertices). Idempotent.
BoxGraph trim_to_cycles(const BoxGraph& bg);

SCCDecomposition scc(const BoxGraph& bg);

AlphaBound alpha_bound(const Grid& g, const BoxGraph& bg);

// Split every surviving cell into 4^t subcells, rebuild edges at level
// n + t, and trim. Every returned cell sits inside a surviving parent.
std::pair<Grid, BoxGraph> refine(const PolyHandle& p, const BoxGraph& bg, int t, long w,
                                 int jobs = 1);

// Debug dump: adjacency plus cell geometry as JSON text.
std::string graph_to_json(const BoxGraph& bg);

// --- adjacency cursors ------------------------------------------------
//
// Both the production range adjacency and the plain vector adjacency used
// in tests expose the same cursor shape, so the SCC routine below works on
// either. open(v) positions a cursor; next(cur, out) yields successors.

class RangeAdjacency {
  public:
    explicit RangeAdjacency(const BoxGraph& bg) : bg_(&bg) {}

    struct Cursor {
        std::uint32_t i = 1, i_hi = 0, j_lo = 1, j_hi = 0;
        std::size_t pos = 0, row_end = 0;
    };

    std::size_t size() const { return bg_->vertex_count(); }
    Cursor open(std::uint32_t v) const;
    bool next(Cursor& cur, std::uint32_t& out) const;

  private:
    void seek_row(Cursor& cur) const;
    const BoxGraph* bg_;
};

class VecAdjacency {
  public:
    explicit VecAdjacency(std::vector<std::vector<std::uint32_t>> adj)
        : adj_(std::move(adj)) {}

    struct Cursor {
        std::uint32_t v = 0;
        std::size_t pos = 0;
    };

    std::size_t size() const { return adj_.size(); }
    Cursor open(std::uint32_t v) const { return {v, 0}; }
    bool next(Cursor& cur, std::uint32_t& out) const {
        if (cur.pos >= adj_[cur.v].size()) return false;
        out = adj_[cur.v][cur.pos++];
        return true;
    }

  private:
    std::vector<std::vector<std::uint32_t>> adj_;
};

// Iterative Tarjan; component ids are assigned in the order components
// complete (reverse topological order of the condensation).
template <class Adj>
std::vector<std::uint32_t> strongly_connected_components(const Adj& adj, std::size_t& count);

// Marks the vertices lying on a directed cycle: members of an SCC of size
// two or more, plus vertices with a self-loop.
template <class Adj>
std::vector<char> cycle_vertices(const Adj& adj) {
    std::size_t count = 0;
    std::vector<std::uint32_t> comp = strongly_connected_components(adj, count);
    std::vector<std::uint32_t> csize(count, 0);
    for (std::uint32_t c : comp) ++csize[c];
    std::vector<char> on(adj.size(), 0);
    for (std::uint32_t v = 0; v < adj.size(); ++v) {
        if (csize[comp[v]] >= 2) {
            on[v] = 1;
            continue;
        }
        auto cur = adj.open(v);
        std::uint32_t w = 0;
        while (adj.next(cur, w)) {
            if (w == v) {
                on[v] = 1;
                break;
            }
        }
    }
    return on;
}

template <class F>
void BoxGraph::for_each_out(std::size_t v, F&& f) const {
    RangeAdjacency adj(*this);
    auto cur = adj.open(std::uint32_t(v));
    std::uint32_t w;
    while (adj.next(cur, w)) f(std::size_t{w});
}

template <class Adj>
std::vector<std::uint32_t> strongly_connected_components(const Adj& adj, std::size_t& count) {
    const std::uint32_t kUnset = 0xffffffffu;
    const std::size_t nv = adj.size();
    std::vector<std::uint32_t> index(nv, kUnset), low(nv, 0), comp(nv, 0);
    std::vector<std::uint32_t> stack;
    std::vector<bool> on_stack(nv, false);
    struct Frame {
        std::uint32_t v;
        typename Adj::Cursor cur;
    };
    std::vector<Frame> frames;
    std::uint32_t next_index = 0;
    std::uint32_t ncomp = 0;

    for (std::uint32_t root = 0; root < nv; ++root) {
        if (index[root] != kUnset) continue;
        index[root] = low[root] = next_index++;
        stack.push_back(root);
        on_stack[root] = true;
        frames.push_back({root, adj.open(root)});
        while (!frames.empty()) {
            Frame& f = frames.back();
            std::uint32_t v = f.v;
            std::uint32_t w = 0;
            bool descended = false;
            while (adj.next(f.cur, w)) {
                if (index[w] == kUnset) {
                    index[w] = low[w] = next_index++;
                    stack.push_back(w);
                    on_stack[w] = true;
                    frames.push_back({w, adj.open(w)});  // invalidates f
                    descended = true;
                    break;
                }
                if (on_stack[w] && index[w] < low[v]) low[v] = index[w];
            }
            if (descended) continue;
            if (low[v] == index[v]) {
                while (true) {
                    std::uint32_t x = stack.back();
                    stack.pop_back();
                    on_stack[x] = false;
                    comp[x] = ncomp;
                    if (x == v) break;
                }
                ++ncomp;
            }
            frames.pop_back();
            if (!frames.empty()) {
                std::uint32_t parent = frames.back().v;
                if (low[v] < low[parent]) low[parent] = low[v];
            }
        }
    }
    count = ncomp;
    return comp;
}

}  // namespace juliacert
