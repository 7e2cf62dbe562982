#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "juliacert/boxchain.hpp"
#include "juliacert/distortion.hpp"
#include "juliacert/polynomial.hpp"

namespace juliacert {

// Certificate construction.  The pipeline takes a trimmed box model of the
// chain-recurrent set, certifies uniform expansion of some iterate on the
// boxes that can carry Julia-set points, and from that derives the nested
// reference covers and distortion constants the pixel classifier consumes.
// Every number stored in a certificate is dyadic and every claimed
// inequality is re-checkable by exact arithmetic plus interval evaluation.

// ----- classification of trimmed components ------------------------------

enum class ComponentTag { Expanding, Contracting, Undetermined };

struct ComponentClass {
    ComponentTag tag = ComponentTag::Undetermined;
    unsigned nu = 0;  // iterate that settled the tag (0 when undetermined)
    Dyadic lo;        // certified lower bound of |D(p^nu)| over the component
    Dyadic hi;        // certified upper bound (meaningful for Contracting)
};

// Tags each strongly connected component of the trimmed graph by searching
// nu in {1, 2, 4, ...} up to nu_max for a uniform derivative bound over all
// member boxes: Expanding when the lower bound exceeds 1, Contracting when
// the upper bound is below 1.  Tags are per component; nothing about one nu
// transfers to another, so only the found pair is recorded.
std::vector<ComponentClass> classify_expansion(const PolyHandle& p, const BoxGraph& bg,
                                               const SCCDecomposition& d, unsigned nu_max,
                                               long w);

// ----- certificate pieces -------------------------------------------------

struct ExpansionCertificate {
    unsigned nu = 1;          // iterate with uniform expansion
    Dyadic lambda_prime;      // |D(p^nu)| > 1 + lambda' on the expanding boxes
    Dyadic L;                 // 1 + lambda'/2, still exceeded on the inflations
    Dyadic delta;             // inflation margin
    std::vector<BoxLInf> N1;  // expanding boxes inflated by 2*delta

    // Builder context carried for the later stages.
    int level = 0;                     // grid level of the expanding boxes
    Dyadic R;                          // frame half-width
    std::vector<std::uint64_t> cells;  // expanding cell codes, sorted
    Dyadic dlo;                        // certified min |D(p^nu)| over N1 (>= L)
};

struct DistortionConstants {
    Dyadic gamma;       // fixed distortion budget, 3/32
    Dyadic r;           // univalence ball radius, 3*delta/4
    Dyadic a;           // concentric offset with distortion within gamma
    Dyadic c_lo, c_hi;  // dyadic bracket of the diameter-loss coefficient
    Dyadic b;           // admissible pixel-side bound
    int N_prime = 0;    // least N with 2^-(N+1) < a and 2^-N < delta
};

struct ShadowingConstants {
    Dyadic r_prime;   // injectivity radius for the shadowing argument
    Dyadic beta;      // cover inflation radius
    int t_prime = 0;  // refinements done after the beta decision
    Dyadic alpha;     // certified pseudo-orbit bound at the final level
    // Whether alpha < min(2r', lambda'*beta/4) was actually reached.  When
    // the cell budget ran out first, the cover falls back to per-box
    // witnesses for its Julia-point claims.
    bool threshold_met = true;
};

// How the cover's Julia-point claims are backed: by the pseudo-orbit
// shadowing bound (every box), or by an inverse-iteration witness net
// (boxes catching a witness carry the claim; the rest stay in the cover
// for disjointness tests only).
enum class CoverAttestation { Shadowing, WitnessNet };

// Parameters of the witness net, recorded so a verifier can rebuild the
// identical net and re-derive the witnessed/unwitnessed split.
struct CoverWitness {
    std::vector<BoxLInf> roots;  // certified repelling fixed points
    int depth = 0;
    int dedup_level = 0;
    long prec = 0;
};

struct ReferenceCover {
    Dyadic beta_prime;  // common side length
    Dyadic beta;        // inflation radius used to build the boxes
    int level = 0;      // grid level of the underlying cells
    Dyadic R;           // frame half-width (box geometry is derived, not stored)

    std::vector<std::uint64_t> cells;        // Julia-point-carrying boxes, sorted
    std::vector<std::uint64_t> extra_cells;  // cover-only boxes, sorted; empty
                                             // under shadowing attestation
    CoverAttestation attest = CoverAttestation::Shadowing;
    CoverWitness witness;

    Grid grid() const { return Grid(level, R); }
    Dyadic radius() const { return grid().eps().mul_pow2(-1) + beta; }
    std::size_t size() const { return cells.size(); }
    BoxLInf box_at(std::size_t i) const {
        return {grid().cell_rect(cells[i]).midpoint(), radius()};
    }
    BoxLInf box_of(std::uint64_t code) const {
        return {grid().cell_rect(code).midpoint(), radius()};
    }
};

struct BuildMetadata {
    int base_level = 0;
    int final_level = 0;
    long precision = 0;
    unsigned nu_max = 0;
};

struct HyperbolicityCertificate {
    std::string poly_text;  // canonical coefficient rendering
    ExpansionCertificate expansion;
    DistortionConstants distortion;
    ShadowingConstants shadowing;
    ReferenceCover cover;
    Dyadic R;
    BuildMetadata meta;
};

// ----- failures -----------------------------------------------------------

// The delta ladder ran out: no inflation margin certifies expansion at this
// grid level.  Callers refine and retry.
struct NoMarginFound : std::runtime_error {
    NoMarginFound() : std::runtime_error("no inflation margin certifies expansion") {}
};

// The construction budget (grid depth or iterate ceiling) was exhausted
// without producing a certificate.  Not evidence of non-hyperbolicity.
struct BudgetExceeded : std::runtime_error {
    explicit BudgetExceeded(const std::string& what) : std::runtime_error(what) {}
};

// ----- construction stages ------------------------------------------------

// Largest delta in {eps/2, eps/4, ...} such that |D(p^nu)| > 1 + lambda'/2
// holds on every expanding box inflated by 2*delta.  Throws NoMarginFound
// when the ladder bottoms out.
ExpansionCertificate build_N1(const PolyHandle& p, const Grid& g,
                              const std::vector<std::uint64_t>& expanding_cells,
                              const Dyadic& lambda_prime, unsigned nu, long w);

// Distortion constants for inverse branches on delta-balls: gamma is pinned
// at 3/32, r = 3*delta/4, a keeps distortion within gamma on |w0| <= a, and
// b bounds the pixel side so a pixel's image diameter survives the branch.
DistortionConstants distortion_constants(const Dyadic& delta, long w);

// Injectivity radius from second-derivative bounds over N1:
// r' = min(delta, lambda' * dlo / (2 * sup |D^2(p^nu)|)).
Dyadic shadowing_radius(const PolyHandle& p, const ExpansionCertificate& ec, long w);

// Pure arithmetic of the refinement-depth example: the least t with
// alpha * 2^-t < threshold, assuming alpha at least halves per level.
int t_from_alpha(const Dyadic& alpha, const Dyadic& threshold);

// Computes (r', beta, t') and refines `working` (the expanding sub-graph)
// in place until its pseudo-orbit bound alpha is below
// min(2 r', lambda' * beta / 4).  Refines first, if needed, until the cell
// side drops under b so that beta = min(r', delta, (b - eps)/2) is positive.
// max_cells caps the refinement: a level predicted to exceed it is not
// built, and threshold_met reports whether alpha got under the bound before
// the cap hit.  Throws only when even a positive beta is out of reach.
ShadowingConstants shadowing_constants(const PolyHandle& p, const ExpansionCertificate& ec,
                                       const DistortionConstants& dc, Grid& grid,
                                       BoxGraph& working, long w, int jobs,
                                       long long max_cells = 1LL << 40);

// beta-inflations of the (thinned) fine expanding boxes: a uniform cover of
// the Julia set with side beta' = eps + 2*beta <= b.  Attestation of the
// per-box Julia-point claims is the orchestrator's job; this builds the
// geometry only.
ReferenceCover build_N2(const ExpansionCertificate& ec, const DistortionConstants& dc,
                        const ShadowingConstants& sc, const Grid& grid,
                        const BoxGraph& working);

// ----- orchestration ------------------------------------------------------

struct CertifyOptions {
    int start_level = 4;
    int max_level = 16;      // budget for the classification grid
    unsigned nu_max = 64;    // iterate ladder ceiling
    long precision = 32;     // base working precision; grows with the level
    int jobs = 1;

    // Refinement stops before materializing a level predicted to exceed
    // this cell count.  If the shadowing threshold is still out of reach,
    // quadratics fall back to the witness-net attestation.
    long long max_refine_cells = 13'000'000;
    int witness_depth = 48;
    int witness_dedup_coarsen = 3;  // dedup grid is this many levels coarser
    long witness_prec = 96;
};

// Runs the whole pipeline.  Throws BudgetExceeded when the options' budget
// runs out before every component classifies and a margin is found.
HyperbolicityCertificate build_certificate(const PolyHandle& p, const CertifyOptions& opt);

// ----- verification -------------------------------------------------------

struct VerifyReport {
    bool pass = true;
    std::vector<std::string> failures;

    void fail(std::string why) {
        pass = false;
        failures.push_back(std::move(why));
    }
};

// Re-derives every inequality a certificate claims: expansion above L on all
// of N1, the distortion constants against their defining formulas, cover
// geometry (uniform side, beta' <= b), and the nesting of the delta-inflated
// cover inside N1.  A doctored certificate fails with a reason string.
VerifyReport verify_certificate(const PolyHandle& p, const HyperbolicityCertificate& cert,
                                long w);

}  // namespace juliacert
