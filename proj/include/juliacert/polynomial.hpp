#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <mutex>
#include <stdexcept>
#include <string>
#include <vector>

#include "juliacert/interval.hpp"

namespace juliacert {

// Thrown when enclosures blow up before an iteration budget is met; the
// caller's contract is to escalate the working precision and retry.
struct PrecisionExhausted : std::runtime_error {
    long w;
    std::size_t step;
    PrecisionExhausted(long w_, std::size_t step_)
        : std::runtime_error("enclosure diameter exceeded 1 before the requested step"),
          w(w_),
          step(step_) {}
    PrecisionExhausted(long w_, std::size_t step_, const char* msg)
        : std::runtime_error(msg), w(w_), step(step_) {}
    PrecisionExhausted(long w_, std::size_t step_, const std::string& msg)
        : std::runtime_error(msg), w(w_), step(step_) {}
};

// Coefficient source for a monic centered polynomial
// z^d + a_{d-2} z^{d-2} + ... + a_1 z + a_0   (the z^{d-1} term is zero).
// coeff_rect(idx, w) must contain the true a_idx with half-width at most
// 2^-w plus ball_radius(); repeated queries must be consistent with a single
// true value per index.
class CoefficientOracle {
public:
    virtual ~CoefficientOracle() = default;
    virtual std::size_t degree() const = 0;
    virtual RectInterval coeff_rect(std::size_t idx, long w) const = 0;
    virtual std::string identity() const = 0;
    virtual Dyadic ball_radius() const { return Dyadic(); }

    // Point approximation within 2^-n, the classic oracle form.
    DyadicComplex query(std::size_t idx, long n) const {
        return coeff_rect(idx, n + 2).midpoint();
    }
};

// Exact rational coefficients; covers dyadic and decimal-string inputs.
class RationalOracle : public CoefficientOracle {
public:
    RationalOracle(std::size_t degree, std::vector<std::pair<mpq_class, mpq_class>> coeffs);

    std::size_t degree() const override { return d_; }
    RectInterval coeff_rect(std::size_t idx, long w) const override;
    std::string identity() const override;

    const std::pair<mpq_class, mpq_class>& exact_coeff(std::size_t idx) const {
        return coeffs_[idx];
    }

private:
    std::size_t d_;
    std::vector<std::pair<mpq_class, mpq_class>> coeffs_;  // index 0 .. d-2
};

// Widens every coefficient of an inner oracle by a fixed radius: the whole
// dyadic ball of polynomials is evaluated at once (used by the parameter
// locus search).
class BallOracle : public CoefficientOracle {
public:
    BallOracle(std::shared_ptr<const CoefficientOracle> inner, Dyadic radius)
        : inner_(std::move(inner)), radius_(std::move(radius)) {}

    std::size_t degree() const override { return inner_->degree(); }
    RectInterval coeff_rect(std::size_t idx, long w) const override {
        return inner_->coeff_rect(idx, w).inflate(radius_);
    }
    std::string identity() const override;
    Dyadic ball_radius() const override { return radius_ + inner_->ball_radius(); }

private:
    std::shared_ptr<const CoefficientOracle> inner_;
    Dyadic radius_;
};

class PolyHandle {
public:
    explicit PolyHandle(std::shared_ptr<const CoefficientOracle> oracle);

    std::size_t degree() const { return d_; }
    const CoefficientOracle& oracle() const { return *oracle_; }

    // Coefficient rectangles a_0 .. a_{d-2} at working precision w, cached.
    std::shared_ptr<const std::vector<RectInterval>> coeff_rects(long w) const;

    // FNV-1a over the oracle's canonical identity string.
    std::uint64_t identity_hash() const { return hash_; }
    std::string identity() const { return oracle_->identity(); }

private:
    std::shared_ptr<const CoefficientOracle> oracle_;
    std::size_t d_;
    std::uint64_t hash_;
    mutable std::mutex mu_;
    mutable std::map<long, std::shared_ptr<const std::vector<RectInterval>>> cache_;
};

// Enclosure of p(s) over every z in s and every polynomial consistent with
// the oracle at precision w.  Intersection of a Horner sweep, the mean-value
// form around the midpoint, and (degree 2) the exact monomial range.
RectInterval eval_rect(const PolyHandle& p, const RectInterval& s, long w);

// Enclosure of p'(s).
RectInterval eval_deriv_rect(const PolyHandle& p, const RectInterval& s, long w);

// Enclosure of p''(s).
RectInterval eval_second_deriv_rect(const PolyHandle& p, const RectInterval& s, long w);

// Certified Hausdorff overshoot of eval_rect(p, s, w) over the true image
// p(s): how far the enclosure can stick out past the actual set.
Dyadic eval_overshoot_bound(const PolyHandle& p, const RectInterval& s, long w);

// Same bound with the enclosure width already in hand (callers that just ran
// eval_rect on s avoid paying for it twice).
Dyadic eval_overshoot_bound(const PolyHandle& p, const RectInterval& s, long w,
                            const Dyadic& enclosure_width);

// Orbit blocks under g = p^nu starting from the point z: enclosures of
// g^j(z) and two-sided bounds on |D(g^j)(z)|_e for j = 0..k.
struct OrbitBlock {
    RectInterval z;
    Dyadic deriv_lo, deriv_hi;
};

std::vector<OrbitBlock> iter_derivative_abs_bounds(const PolyHandle& p, unsigned nu,
                                                   const DyadicComplex& z, std::size_t k,
                                                   long w);

// Upper bound on |D^2(p^nu)|_e over the rectangle s (second-derivative
// chain recurrence along rectangle enclosures).
Dyadic iter_second_deriv_abs_upper(const PolyHandle& p, unsigned nu, const RectInterval& s,
                                   long w);

// Two-sided bounds on |D(p^nu)|_e valid for every point of the rectangle s.
// When the orbit enclosure blows up mid-chain the walk stops: lo drops to 0
// (still a valid lower bound) and `exhausted` is set; hi means nothing then.
struct RectDerivBounds {
    Dyadic lo, hi;
    bool exhausted = false;
};

RectDerivBounds iter_derivative_abs_bounds_rect(const PolyHandle& p, unsigned nu,
                                                const RectInterval& s, long w);

// Smallest power of two R >= max(2, 1 + sum of upper coefficient moduli at
// precision 8); orbits leaving [-R,R]^2 escape, so the filled set lives inside.
Dyadic escape_radius(const PolyHandle& p);

// Polynomial text forms accepted on the command line: an expression like
// "z^2-1" or "z^3+(0.5-0.25i)z+1", or a coefficient list via
// parse_poly_coeffs(degree, "re,im;re,im;...").  Coefficients are exact
// rationals (decimal strings and fractions parse exactly).
PolyHandle parse_poly(const std::string& text);
PolyHandle parse_poly_coeffs(std::size_t degree, const std::string& list);

mpq_class parse_exact_rational(const std::string& text);

// z^2 + c for exact rational c — the family the locus tools quantify over.
PolyHandle make_quadratic(const mpq_class& c_re, const mpq_class& c_im);

}  // namespace juliacert
