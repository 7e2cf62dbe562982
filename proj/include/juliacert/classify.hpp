#pragma once

#include <cstdint>
#include <vector>

#include "juliacert/certify.hpp"

namespace juliacert {

// Lattice point of the pixel grid at level N: both coordinates are integer
// multiples of 2^-(N+2).
struct IdealPoint {
    DyadicComplex z;
    int N = 0;

    bool valid() const {
        return N >= 0 && z.re.e >= -long(N) - 2 && z.im.e >= -long(N) - 2;
    }
};

// Which test settled the pixel.  The names follow the stage layout of the
// decision procedure: stage 1 is pure cover geometry around the pixel,
// stage 2 walks the forward orbit.
enum class HaltStep : std::uint8_t {
    OutOfFrame,  // outside [-R-1, R+1]^2, forced 0
    S1d,         // cover misses the pixel box entirely
    S1e,         // a witnessed box fits inside the doubled pixel box
    S1f,         // pixel box still wider than half a cover box
    S2c,         // image ball certifiably clear of the cover
    S2d,         // image ball certifiably swallows a witnessed box
    S2e,         // accumulated expansion certifies a miss
    S2f,         // iterate budget exhausted without a trigger
};

const char* halt_step_name(HaltStep s);

struct PixelVerdict {
    int bit = 0;
    HaltStep halt_step = HaltStep::OutOfFrame;
    int k_used = 0;
    long w_final = 0;
};

// Column-bucketed lookup over the reference cover.  All geometric queries
// are exact: index windows over-approximate, the per-box predicates then
// decide on dyadic arithmetic with no rounding.
//
// Queries against "any box" use the full cover (Julia-carrying boxes plus
// the cover-only extras); that direction only ever *withholds* a claim, so
// the full set is the sound one.  Queries asserting that a box carries a
// Julia point run over the witnessed list alone.
class CoverIndex {
public:
    explicit CoverIndex(const ReferenceCover& rc);

    const ReferenceCover& cover() const { return *rc_; }

    // Some cover box meets the closed square of L-inf radius rho at z.
    bool any_box_meets_square(const DyadicComplex& z, const Dyadic& rho) const;

    // Some witnessed box lies strictly inside the square of radius rho at
    // z.  Strict, so a 1-verdict never leans on a boundary coincidence.
    bool witnessed_box_inside_square(const DyadicComplex& z, const Dyadic& rho) const;

    // Every cover box keeps Euclidean distance > r from every point of E.
    bool all_boxes_euclid_beyond(const RectInterval& E, const Dyadic& r) const;

    // Some witnessed box sits within Euclidean distance r of every point
    // of E (so the r-ball around any admissible center swallows it).
    bool witnessed_box_euclid_within(const RectInterval& E, const Dyadic& r) const;

    // Some cover box within Euclidean distance d of the rectangle E.
    bool any_box_euclid_near(const RectInterval& E, const Dyadic& d) const;

private:
    struct ColumnTable {
        const std::vector<std::uint64_t>* codes = nullptr;
        // (column i, first index in codes); ranges end at the next entry
        std::vector<std::pair<std::uint32_t, std::uint32_t>> cols;
        void build(const std::vector<std::uint64_t>& v);
    };

    struct IndexWindow {
        long i_lo, i_hi, j_lo, j_hi;
        bool empty() const { return i_lo > i_hi || j_lo > j_hi; }
    };

    // Cells whose inflated box meets the closed rectangle q (inclusive).
    IndexWindow meets_window(const RectInterval& q) const;
    // Cells whose inflated box lies strictly inside q.
    IndexWindow inside_window(const RectInterval& q) const;

    RectInterval box_rect(std::uint64_t code) const;

    // Calls fn(code) over the window; fn returns false to abort.  Returns
    // whether the scan was aborted.
    template <typename Fn>
    bool scan(const ColumnTable& t, const IndexWindow& wnd, Fn&& fn) const;

    const ReferenceCover* rc_;
    Grid grid_;
    std::vector<std::uint64_t> all_;  // cells and extra_cells merged, sorted
    ColumnTable full_, witnessed_;
};

// Iterate budget for the stage-2 loop: the least k with
// L^k >= 2^(N+3) * (2 beta' sqrt2 / c), evaluated through exact rational
// powers with sqrt2 replaced by its upper bracket 665857/470832, so the
// result is never below the true ceiling.
int k_max(int N, const HyperbolicityCertificate& cert);

// Decision procedure for one pixel.  p must be the polynomial the
// certificate was issued for.  w0 = 0 picks the default starting precision
// N + 32; escalation doubles it up to 16 * w0, after which an undecidable
// pixel raises PrecisionExhausted rather than guess.
PixelVerdict classify_pixel(const PolyHandle& p, const IdealPoint& zp,
                            const HyperbolicityCertificate& cert, const CoverIndex& idx,
                            long w0 = 0);

}  // namespace juliacert
