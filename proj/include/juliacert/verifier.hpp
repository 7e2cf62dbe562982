#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "juliacert/boxchain.hpp"

namespace juliacert {

// Backward-iteration sample of a quadratic Julia set, used purely as a test
// oracle. The only guarantee is the containment direction: every point is a
// (rounded) preimage-iterate of the repelling fixed point, so it lies close
// to the Julia set; the cloud says nothing about covering it.
struct CloudSample {
    DyadicComplex c;
    int depth = 0;
    std::uint64_t seed = 0;
    std::vector<DyadicComplex> points;
};

// Two-sided bounds on the L-infinity distance from z to the euclidean unit
// circle, ground truth for the square map. Exact rational branch-and-bound
// over the half-angle parametrization; the returned bracket has width at
// most 2^-w.
std::pair<Dyadic, Dyadic> circle_distance_linf(const DyadicComplex& z, long w);

CloudSample inverse_iteration_cloud(const DyadicComplex& c, int depth, std::size_t count,
                                    std::uint64_t seed);

struct PseudoOrbitReport {
    bool pass = true;
    std::size_t checked = 0;  // (sample, containing-box) pairs actually verified
    std::vector<std::pair<std::uint64_t, std::uint64_t>> violations;  // cell codes
};

// Samples points in surviving boxes and verifies that every surviving box
// guaranteed to contain the image point is an out-neighbor. An empty graph
// passes vacuously.
PseudoOrbitReport pseudo_orbit_check(const Grid& g, const BoxGraph& bg, const PolyHandle& p,
                                     std::size_t samples, std::uint64_t seed);

// Exact dyadic value of an IEEE double (doubles are dyadic rationals).
Dyadic dyadic_from_double(double v);

}  // namespace juliacert
