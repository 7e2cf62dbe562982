#include "juliacert/polynomial.hpp"

#include <algorithm>
#include <cassert>
#include <cctype>
#include <sstream>

namespace juliacert {

RationalOracle::RationalOracle(std::size_t degree,
                               std::vector<std::pair<mpq_class, mpq_class>> coeffs)
    : d_(degree), coeffs_(std::move(coeffs)) {
    if (d_ < 2) throw std::invalid_argument("degree must be at least 2");
    if (coeffs_.size() != d_ - 1)
        throw std::invalid_argument("expected d-1 coefficients a_0..a_{d-2}");
    for (auto& c : coeffs_) {
        c.first.canonicalize();
        c.second.canonicalize();
    }
}

RectInterval RationalOracle::coeff_rect(std::size_t idx, long w) const {
    const auto& [re, im] = coeffs_.at(idx);
    return {dyadic_floor(re, w), dyadic_ceil(re, w), dyadic_floor(im, w),
            dyadic_ceil(im, w)};
}

std::string RationalOracle::identity() const {
    std::ostringstream os;
    os << "monic-centered;deg=" << d_;
    for (std::size_t i = 0; i < coeffs_.size(); ++i)
        os << ";a" << i << "=" << coeffs_[i].first.get_str() << ","
           << coeffs_[i].second.get_str();
    return os.str();
}

std::string BallOracle::identity() const {
    std::ostringstream os;
    os << inner_->identity() << ";ball=" << radius_.mantissa_str() << "*2^" << radius_.e;
    return os.str();
}

namespace {

std::uint64_t fnv1a(const std::string& s) {
    std::uint64_t h = 14695981039346656037ull;
    for (unsigned char c : s) {
        h ^= c;
        h *= 1099511628211ull;
    }
    return h;
}

}  // namespace

PolyHandle::PolyHandle(std::shared_ptr<const CoefficientOracle> oracle)
    : oracle_(std::move(oracle)), d_(oracle_->degree()), hash_(fnv1a(oracle_->identity())) {
    if (d_ < 2) throw std::invalid_argument("degree must be at least 2");
}

std::shared_ptr<const std::vector<RectInterval>> PolyHandle::coeff_rects(long w) const {
    std::lock_guard<std::mutex> lock(mu_);
    auto it = cache_.find(w);
    if (it != cache_.end()) return it->second;
    auto rects = std::make_shared<std::vector<RectInterval>>();
    rects->reserve(d_ - 1);
    for (std::size_t i = 0; i + 1 < d_; ++i) rects->push_back(oracle_->coeff_rect(i, w));
    cache_.emplace(w, rects);
    return rects;
}

namespace {

// Full coefficient ladder c_0..c_d: oracle rects, then the fixed 0 and 1.
std::vector<RectInterval> full_coeffs(const PolyHandle& p, long w) {
    auto lower = p.coeff_rects(w);
    std::vector<RectInterval> cs(*lower);
    cs.push_back(RectInterval::point({Dyadic(0), Dyadic(0)}));  // z^{d-1}
    cs.push_back(RectInterval::point({Dyadic(1), Dyadic(0)}));  // z^d
    return cs;
}

RectInterval horner(const std::vector<RectInterval>& cs, const RectInterval& s, long w) {
    RectInterval acc = cs.back();
    for (std::size_t k = cs.size() - 1; k-- > 0;) acc = rect_mul(acc, s, w) + cs[k];
    return acc;
}

std::vector<RectInterval> derivative_coeffs(const std::vector<RectInterval>& cs) {
    std::vector<RectInterval> ds;
    ds.reserve(cs.size() - 1);
    for (std::size_t k = 1; k < cs.size(); ++k) {
        Dyadic f(static_cast<long>(k));
        const RectInterval& c = cs[k];
        ds.push_back({c.re_lo * f, c.re_hi * f, c.im_lo * f, c.im_hi * f});
    }
    return ds;
}

RectInterval sub_point(const RectInterval& s, const DyadicComplex& m) {
    return {s.re_lo - m.re, s.re_hi - m.re, s.im_lo - m.im, s.im_hi - m.im};
}

// Exact image rectangle of s under z^2 + a0 (coefficients as rects): the
// monomial ranges of x^2 - y^2 and 2xy over an axis box are closed-form.
RectInterval quad_exact_rect(const RectInterval& a0, const RectInterval& s, long w) {
    DyInterval ax = s.re().abs_range(), ay = s.im().abs_range();
    DyInterval x2{ax.lo * ax.lo, ax.hi * ax.hi};
    DyInterval y2{ay.lo * ay.lo, ay.hi * ay.hi};
    DyInterval re = x2 - y2;
    DyInterval xy = s.re() * s.im();
    DyInterval im{xy.lo.mul_pow2(1), xy.hi.mul_pow2(1)};
    RectInterval q{re.lo + a0.re_lo, re.hi + a0.re_hi, im.lo + a0.im_lo, im.hi + a0.im_hi};
    return q.round_out(w);
}

RectInterval mean_value_rect(const std::vector<RectInterval>& cs,
                             const std::vector<RectInterval>& ds, const RectInterval& s,
                             long w) {
    DyadicComplex m = s.midpoint();
    RectInterval pm = horner(cs, RectInterval::point(m), w);
    RectInterval dr = horner(ds, s, w);
    return pm + rect_mul(dr, sub_point(s, m), w);
}

}  // namespace

RectInterval eval_rect(const PolyHandle& p, const RectInterval& s, long w) {
    auto cs = full_coeffs(p, w);
    // Degree 2 has an exact image bounding box, which no sound enclosure can
    // beat; skip the Horner and mean-value forms entirely.
    if (p.degree() == 2) return quad_exact_rect(cs[0], s, w);
    RectInterval h = horner(cs, s, w);
    RectInterval mv = mean_value_rect(cs, derivative_coeffs(cs), s, w);
    auto e = rect_intersect(h, mv);
    assert(e.has_value());
    return e ? *e : rect_hull(h, mv);
}

RectInterval eval_deriv_rect(const PolyHandle& p, const RectInterval& s, long w) {
    return horner(derivative_coeffs(full_coeffs(p, w)), s, w);
}

RectInterval eval_second_deriv_rect(const PolyHandle& p, const RectInterval& s, long w) {
    return horner(derivative_coeffs(derivative_coeffs(full_coeffs(p, w))), s, w);
}

Dyadic eval_overshoot_bound(const PolyHandle& p, const RectInterval& s, long w,
                            const Dyadic& enclosure_width) {
    auto cs = full_coeffs(p, w);
    auto ds = derivative_coeffs(cs);
    DyadicComplex m = s.midpoint();
    RectInterval pm = horner(cs, RectInterval::point(m), w);
    RectInterval dr = horner(ds, s, w);
    // Any enclosure point pm' + d*(z-m) differs from the true p(z) by at most
    // wid(pm) plus |z-m|_e times the euclidean spread of the derivative rect.
    // |z-m|_e <= radius * sqrt(2), taken through a fixed upper dyadic root.
    static const Dyadic sqrt2_up = sqrt_upper(Dyadic(2), 60);
    Dyadic rho_e = (s.radius_linf() * sqrt2_up).ceil_to(w);
    Dyadic ov = pm.width() + (rho_e * (dr.re_width() + dr.im_width())).ceil_to(w);
    return min(ov, enclosure_width);
}

Dyadic eval_overshoot_bound(const PolyHandle& p, const RectInterval& s, long w) {
    return eval_overshoot_bound(p, s, w, eval_rect(p, s, w).width());
}

std::vector<OrbitBlock> iter_derivative_abs_bounds(const PolyHandle& p, unsigned nu,
                                                   const DyadicComplex& z, std::size_t k,
                                                   long w) {
    assert(nu >= 1 && k * nu >= 1);
    std::vector<OrbitBlock> blocks;
    blocks.reserve(k + 1);
    RectInterval zr = RectInterval::point(z);
    Dyadic lo(1), hi(1);
    blocks.push_back({zr, lo, hi});
    // Orbits whose enclosure leaves this frame have escaped any region the
    // library ever studies; treating them as exhausted keeps exact integer
    // orbits (which never widen) from doubling their digit count forever.
    const Dyadic far = Dyadic::pow2(62);
    for (std::size_t j = 1; j <= k; ++j) {
        for (unsigned s = 0; s < nu; ++s) {
            RectInterval dr = eval_deriv_rect(p, zr, w);
            auto [dl, dh] = euclid_abs_bounds(dr, w);
            lo = (lo * dl).floor_to(2 * w);
            hi = (hi * dh).ceil_to(2 * w);
            zr = eval_rect(p, zr, w);
            if (zr.width() > Dyadic(1) ||
                max(max(zr.re_hi.abs(), zr.re_lo.abs()),
                    max(zr.im_hi.abs(), zr.im_lo.abs())) > far)
                throw PrecisionExhausted(w, j);
        }
        blocks.push_back({zr, lo, hi});
    }
    return blocks;
}

Dyadic iter_second_deriv_abs_upper(const PolyHandle& p, unsigned nu, const RectInterval& s,
                                   long w) {
    RectInterval a = s;
    RectInterval dr = RectInterval::point({Dyadic(1), Dyadic(0)});
    RectInterval er = RectInterval::point({Dyadic(0), Dyadic(0)});
    for (unsigned i = 0; i < nu; ++i) {
        RectInterval p1 = eval_deriv_rect(p, a, w);
        RectInterval p2 = eval_second_deriv_rect(p, a, w);
        er = rect_mul(p2, rect_mul(dr, dr, w), w) + rect_mul(p1, er, w);
        dr = rect_mul(p1, dr, w);
        a = eval_rect(p, a, w);
    }
    return euclid_abs_bounds(er, w).second;
}

RectDerivBounds iter_derivative_abs_bounds_rect(const PolyHandle& p, unsigned nu,
                                                const RectInterval& s, long w) {
    RectDerivBounds out{Dyadic(1), Dyadic(1), false};
    RectInterval a = s;
    const Dyadic far = Dyadic::pow2(62);
    for (unsigned i = 0; i < nu; ++i) {
        auto [dl, dh] = euclid_abs_bounds(eval_deriv_rect(p, a, w), w);
        out.lo = (out.lo * dl).floor_to(2 * w);
        out.hi = (out.hi * dh).ceil_to(2 * w);
        if (i + 1 < nu) {
            a = eval_rect(p, a, w);
            // A wide or far-flung orbit enclosure makes every later factor
            // worthless; stop with the trivial lower bound instead of
            // grinding out huge exact mantissas.
            if (a.width() > Dyadic(1) || max(a.re_hi.abs(), a.im_hi.abs()) > far ||
                max(a.re_lo.abs(), a.im_lo.abs()) > far) {
                out.lo = Dyadic(0);
                out.exhausted = true;
                return out;
            }
        }
    }
    return out;
}

namespace {

// smallest power of two >= x (x > 0)
Dyadic next_pow2(const Dyadic& x) {
    assert(x.sign() > 0);
    long bits = static_cast<long>(mpz_sizeinbase(x.m.get_mpz_t(), 2));
    long k = (x.m == 1) ? x.e : x.e + bits;
    return Dyadic::pow2(k);
}

}  // namespace

Dyadic escape_radius(const PolyHandle& p) {
    const long w = 8;
    Dyadic sum(1);
    auto rects = p.coeff_rects(w);
    for (const auto& r : *rects) sum += euclid_abs_bounds(r, w).second;
    return next_pow2(max(sum, Dyadic(2)));
}

mpq_class parse_exact_rational(const std::string& text) {
    std::string t;
    for (char c : text)
        if (!std::isspace(static_cast<unsigned char>(c))) t += c;
    if (t.empty()) throw std::invalid_argument("empty number");
    auto slash = t.find('/');
    if (slash != std::string::npos) {
        mpq_class q(t, 10);
        q.canonicalize();
        return q;
    }
    bool neg = false;
    std::size_t i = 0;
    if (t[0] == '+' || t[0] == '-') {
        neg = t[0] == '-';
        i = 1;
    }
    std::string digits;
    long frac = 0;
    bool seen_dot = false, seen_digit = false;
    for (; i < t.size(); ++i) {
        if (t[i] == '.') {
            if (seen_dot) throw std::invalid_argument("bad number: " + text);
            seen_dot = true;
        } else if (std::isdigit(static_cast<unsigned char>(t[i]))) {
            digits += t[i];
            seen_digit = true;
            if (seen_dot) ++frac;
        } else {
            throw std::invalid_argument("bad number: " + text);
        }
    }
    if (!seen_digit) throw std::invalid_argument("bad number: " + text);
    mpz_class num(digits, 10);  // explicit base: leading zeros must not mean octal
    mpz_class den;
    mpz_ui_pow_ui(den.get_mpz_t(), 10, static_cast<unsigned long>(frac));
    mpq_class q(num, den);
    q.canonicalize();
    if (neg) q = -q;
    return q;
}

namespace {

struct ComplexQ {
    mpq_class re, im;
};

// "0.5", "3/4", "i", "-2i", "(0.1+0.2i)", "(0.1-0.2i)"
ComplexQ parse_complex_coeff(const std::string& text) {
    std::string t = text;
    if (!t.empty() && t.front() == '(' && t.back() == ')') {
        std::string inner = t.substr(1, t.size() - 2);
        // split at the last +/- that follows a digit, dot, or 'i'
        std::size_t split = std::string::npos;
        for (std::size_t i = 1; i < inner.size(); ++i) {
            char prev = inner[i - 1];
            if ((inner[i] == '+' || inner[i] == '-') &&
                (std::isdigit(static_cast<unsigned char>(prev)) || prev == '.' || prev == 'i'))
                split = i;
        }
        if (split == std::string::npos) return parse_complex_coeff(inner);
        ComplexQ a = parse_complex_coeff(inner.substr(0, split));
        std::string rest = inner.substr(split);  // keeps the sign
        if (rest[0] == '+') rest = rest.substr(1);
        ComplexQ b = parse_complex_coeff(rest);
        return {a.re + b.re, a.im + b.im};
    }
    if (t == "i" || t == "+i") return {0, 1};
    if (t == "-i") return {0, -1};
    if (!t.empty() && t.back() == 'i')
        return {0, parse_exact_rational(t.substr(0, t.size() - 1))};
    return {parse_exact_rational(t), 0};
}

struct Term {
    ComplexQ coeff;
    unsigned long power = 0;
};

Term parse_term(const std::string& text) {
    Term term;
    auto zpos = text.find('z');
    std::string coeff_part = zpos == std::string::npos ? text : text.substr(0, zpos);
    if (!coeff_part.empty() && coeff_part.back() == '*') coeff_part.pop_back();
    if (coeff_part.empty() || coeff_part == "+")
        term.coeff = {1, 0};
    else if (coeff_part == "-")
        term.coeff = {-1, 0};
    else
        term.coeff = parse_complex_coeff(coeff_part);
    if (zpos != std::string::npos) {
        std::string zp = text.substr(zpos);
        if (zp == "z")
            term.power = 1;
        else if (zp.size() > 2 && zp[1] == '^' &&
                 std::isdigit(static_cast<unsigned char>(zp[2])))
            term.power = std::stoul(zp.substr(2));
        else
            throw std::invalid_argument("bad power in term: " + text);
    }
    return term;
}

}  // namespace

PolyHandle parse_poly(const std::string& text) {
    std::string t;
    for (char c : text)
        if (!std::isspace(static_cast<unsigned char>(c))) t += c;
    if (t.empty()) throw std::invalid_argument("empty polynomial");

    // split into sign-carrying terms at top-level +/-
    std::vector<std::string> parts;
    int depth = 0;
    std::size_t start = 0;
    for (std::size_t i = 0; i < t.size(); ++i) {
        char c = t[i];
        if (c == '(') ++depth;
        if (c == ')') --depth;
        if ((c == '+' || c == '-') && depth == 0 && i > start && t[i - 1] != '^') {
            parts.push_back(t.substr(start, i - start));
            start = i;
        }
    }
    parts.push_back(t.substr(start));

    std::map<unsigned long, ComplexQ> by_power;
    for (auto& part : parts) {
        bool neg = false;
        std::string body = part;
        if (body[0] == '+') body = body.substr(1);
        else if (body[0] == '-') {
            neg = true;
            body = body.substr(1);
        }
        if (body.empty()) throw std::invalid_argument("dangling sign in: " + text);
        Term term = parse_term(body);
        if (neg) {
            term.coeff.re = -term.coeff.re;
            term.coeff.im = -term.coeff.im;
        }
        auto& acc = by_power[term.power];
        acc.re += term.coeff.re;
        acc.im += term.coeff.im;
    }

    unsigned long d = 0;
    for (auto& [pow, c] : by_power)
        if ((c.re != 0 || c.im != 0) && pow > d) d = pow;
    if (d < 2) throw std::invalid_argument("degree must be at least 2: " + text);
    ComplexQ top = by_power[d];
    if (top.re != 1 || top.im != 0)
        throw std::invalid_argument("polynomial must be monic: " + text);
    auto sub = by_power.find(d - 1);
    if (sub != by_power.end() && (sub->second.re != 0 || sub->second.im != 0))
        throw std::invalid_argument("the z^{d-1} term must vanish (centered form): " + text);

    std::vector<std::pair<mpq_class, mpq_class>> coeffs(d - 1, {mpq_class(0), mpq_class(0)});
    for (auto& [pow, c] : by_power)
        if (pow + 1 < d) coeffs[pow] = {c.re, c.im};
    return PolyHandle(std::make_shared<RationalOracle>(d, std::move(coeffs)));
}

PolyHandle make_quadratic(const mpq_class& c_re, const mpq_class& c_im) {
    return PolyHandle(std::make_shared<RationalOracle>(
        2, std::vector<std::pair<mpq_class, mpq_class>>{{c_re, c_im}}));
}

PolyHandle parse_poly_coeffs(std::size_t degree, const std::string& list) {
    std::vector<std::pair<mpq_class, mpq_class>> coeffs;
    std::stringstream ss(list);
    std::string item;
    while (std::getline(ss, item, ';')) {
        auto comma = item.find(',');
        if (comma == std::string::npos)
            coeffs.emplace_back(parse_exact_rational(item), mpq_class(0));
        else
            coeffs.emplace_back(parse_exact_rational(item.substr(0, comma)),
                                parse_exact_rational(item.substr(comma + 1)));
    }
    return PolyHandle(std::make_shared<RationalOracle>(degree, std::move(coeffs)));
}

}  // namespace juliacert
