#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "juliacert/boxchain.hpp"
#include "juliacert/interval.hpp"
#include "juliacert/polynomial.hpp"

namespace juliacert {

// Julia-point witnesses by certified inverse iteration, for quadratics.
//
// A witness is a tiny rectangle that provably contains a point of the Julia
// set.  Seeds are repelling fixed points certified by an interval Newton
// step; children are square-root enclosures of (parent - c), so by full
// invariance every rectangle in the chain inherits a Julia point from its
// parent.  A breadth-first sweep with spatial deduplication turns the chains
// into a near-uniform net of the whole set, cheap enough to attach one
// witness to each cover box without ever iterating forward.

// Enclosure of one square-root branch over a rectangle: a rect W with
// branch_sqrt(q) in W for every q in `q`, where the branch is the principal
// square root (or its i-rotation when `q` clears the positive real axis
// instead of the negative one), negated when `negate` is set.  The rect is
// built from the exact midpoint square root plus a Lipschitz inflation, so
// it stays roughly as tight as the input.  Returns nullopt when `q` touches
// both half-axes (no continuous branch) or is too wide for the inflation
// argument.
std::optional<RectInterval> sqrt_rect_branch(const RectInterval& q, bool negate, long w);

// Fixed points of a monic centered quadratic certified by an interval
// Newton contraction, filtered to the repelling ones (|p'| > 1 on the
// enclosing rect).  Repelling fixed points lie in the Julia set, which is
// what makes them valid witness seeds.  Empty when the polynomial is not
// degree 2 or neither fixed point certifies.
std::vector<BoxLInf> repelling_fixed_points(const PolyHandle& p, long w);

// Re-runs the interval Newton contraction and the repelling bound on
// exactly this box: true when the box provably contains a unique fixed
// point with |p'| > 1 there.  What verifiers call on stored seeds.
bool verify_fixed_point_box(const PolyHandle& p, const BoxLInf& box, long w);

struct WitnessParams {
    int depth = 48;       // breadth-first preimage depth
    int dedup_level = 0;  // grid level whose cells key the deduplication
    long prec = 96;       // working precision of the chain rects
};

// Breadth-first preimage net: starting from `roots`, repeatedly encloses
// both square-root branches of (rect - c), keeping the first rect whose
// midpoint lands in each fresh cell of the deduplication grid.  Every kept
// rect contains a Julia point.  Deterministic: strict FIFO order, sign +
// before sign -, no parallelism.
std::vector<RectInterval> build_witness_net(const PolyHandle& p,
                                            const std::vector<BoxLInf>& roots,
                                            const WitnessParams& params, const Dyadic& R);

// Marks which cover cells catch a witness: cell i is marked when some net
// rect lies inside its box (the cell rect inflated by beta).  `cells` must
// be sorted.  Each net rect only probes the few cells whose inflation can
// reach it, so the pass is linear in the net size.
std::vector<bool> mark_witnessed(const std::vector<RectInterval>& net, const Grid& grid,
                                 const Dyadic& beta, const std::vector<std::uint64_t>& cells);

}  // namespace juliacert
