#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "juliacert/classify.hpp"

namespace juliacert {

// Rasterized verdicts over a square window.  Lattice points are the ideal
// points of denominator 2^-(N+2) inside the window (clipped to the frame);
// the picture is the union of closed squares of radius 2^-(N+3) at the
// 1-points.  Indices are absolute: the point of index (ix, iy) sits at
// (ix * 2^-(N+2), iy * 2^-(N+2)), so maps of different windows agree on
// their overlap.
struct PixelMap {
    int N = 0;      // level of the lattice in this map
    int N_eff = 0;  // level the pixels were classified at (max(N, N'))
    BoxLInf window;
    long x0 = 0, y0 = 0;  // lattice index of the lower-left point
    long width = 0, height = 0;

    std::vector<std::uint64_t> bits;  // row-major, packed 64 per word
    std::vector<std::uint8_t> steps;  // HaltStep per point
    std::vector<std::uint8_t> ks;     // k_used per point, clamped to 255

    std::array<std::uint64_t, 8> histogram{};  // verdicts by halt step
    int max_k = 0;

    std::size_t index(long ix, long iy) const {
        return std::size_t(iy - y0) * std::size_t(width) + std::size_t(ix - x0);
    }
    bool in_range(long ix, long iy) const {
        return ix >= x0 && ix < x0 + width && iy >= y0 && iy < y0 + height;
    }
    bool get(long ix, long iy) const {
        std::size_t i = index(ix, iy);
        return (bits[i >> 6] >> (i & 63)) & 1;
    }
    std::size_t count_ones() const;

    bool operator==(const PixelMap& o) const;
};

// Classify every lattice point of the window.  A request below the
// certificate's minimum level N' is served by sweeping at N' over a
// slightly inflated window and propagating 1-bits to every level-N point
// within 2^-(N+2) of a fine 1-pixel.  Windows are clipped to the frame
// [-R-1, R+1]^2; a window entirely outside it yields an empty map.
// jobs > 1 splits rows across threads; the output is identical for any
// job count.
PixelMap sweep(const PolyHandle& p, const HyperbolicityCertificate& cert,
               const BoxLInf& window, int N, int jobs = 1);

// Binary PGM, maxval 255, 0 = black = in the picture.
std::string emit_pgm(const PixelMap& m);

// Verdict dump and its inverse; parse(emit(m)) reproduces m exactly.
std::string emit_verdicts_json(const PixelMap& m);
PixelMap parse_verdicts_json(const std::string& text);

struct HausdorffResult {
    Dyadic bound;       // certified upper bound on d_H(picture, ground)
    bool defined = false;  // false when either side is empty
    bool pass = false;
};

// L-inf Hausdorff distance between the picture (union of pixel squares)
// and a sample of the target set; passes iff the bound is at most
// 2^-N + 2^-(N+4), the picture tolerance plus sampling slack.
HausdorffResult hausdorff_check(const PixelMap& m, const std::vector<DyadicComplex>& ground,
                                int N);

}  // namespace juliacert
