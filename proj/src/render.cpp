#include "juliacert/render.hpp"

#include <json.hpp>

#include <algorithm>
#include <exception>
#include <map>
#include <stdexcept>
#include <thread>

namespace juliacert {

namespace {

using ordered_json = nlohmann::ordered_json;

long clamp_index(const mpz_class& n) {
    static const long cap = 1L << 40;
    if (n < -cap) return -cap;
    if (n > cap) return cap;
    return n.get_si();
}

// floor / ceil of x in units of 2^-s, exact
long lat_floor(const Dyadic& x, long s) {
    return clamp_index(x.mul_pow2(s).floor_to(0).to_mpq().get_num());
}
long lat_ceil(const Dyadic& x, long s) {
    return clamp_index(x.mul_pow2(s).ceil_to(0).to_mpq().get_num());
}

struct BitGrid {
    long x0 = 0, y0 = 0, width = 0, height = 0;
    std::vector<std::uint64_t> words;

    void init(long x0_, long y0_, long w, long h) {
        x0 = x0_;
        y0 = y0_;
        width = w;
        height = h;
        words.assign((std::size_t(w) * std::size_t(h) + 63) / 64, 0);
    }
    void set(long ix, long iy) {
        std::size_t i = std::size_t(iy - y0) * std::size_t(width) + std::size_t(ix - x0);
        words[i >> 6] |= std::uint64_t(1) << (i & 63);
    }
    bool get(long ix, long iy) const {
        std::size_t i = std::size_t(iy - y0) * std::size_t(width) + std::size_t(ix - x0);
        return (words[i >> 6] >> (i & 63)) & 1;
    }
};

// Mark every lattice point whose index lies in [jx0, jx1] x [jy0, jy1],
// restricted to the grid and to the row band [row_lo, row_hi).
void mark_rect(BitGrid& g, long jx0, long jx1, long jy0, long jy1, long row_lo, long row_hi) {
    jx0 = std::max(jx0, g.x0);
    jx1 = std::min(jx1, g.x0 + g.width - 1);
    jy0 = std::max({jy0, g.y0, row_lo});
    jy1 = std::min({jy1, g.y0 + g.height - 1, row_hi - 1});
    for (long iy = jy0; iy <= jy1; ++iy)
        for (long ix = jx0; ix <= jx1; ++ix) g.set(ix, iy);
}

PixelMap sweep_at_level(const PolyHandle& p, const HyperbolicityCertificate& cert,
                        const RectInterval& want, int N, int jobs) {
    PixelMap m;
    m.N = N;
    m.N_eff = N;

    const Dyadic frame = cert.R + Dyadic(1);
    RectInterval fr{-frame, frame, -frame, frame};
    auto clipped = rect_intersect(want, fr);

    const long s = N + 2;  // lattice scale: points at k * 2^-s
    long ix0 = 0, ix1 = -1, iy0 = 0, iy1 = -1;
    if (clipped) {
        ix0 = lat_ceil(clipped->re_lo, s);
        ix1 = lat_floor(clipped->re_hi, s);
        iy0 = lat_ceil(clipped->im_lo, s);
        iy1 = lat_floor(clipped->im_hi, s);
    }
    if (ix0 > ix1 || iy0 > iy1) return m;  // nothing inside the frame

    m.x0 = ix0;
    m.y0 = iy0;
    m.width = ix1 - ix0 + 1;
    m.height = iy1 - iy0 + 1;
    const std::size_t total = std::size_t(m.width) * std::size_t(m.height);
    m.bits.assign((total + 63) / 64, 0);
    m.steps.assign(total, 0);
    m.ks.assign(total, 0);

    CoverIndex idx(cert.cover);
    const Grid grid = cert.cover.grid();
    const Dyadic& beta = cert.cover.beta;
    const bool s1f_cuts = Dyadic::pow2(-N - 2) > cert.cover.beta_prime.mul_pow2(-1);
    const int kN_cap = 255;

    int J = std::max(1, jobs);
    if (std::size_t(J) > total) J = int(total);
    std::vector<std::thread> pool;
    std::vector<std::exception_ptr> errors(std::size_t(J));
    std::vector<std::array<std::uint64_t, 8>> hists(std::size_t(J));
    std::vector<int> maxks(std::size_t(J), 0);

    auto run_band = [&](int t, long row_lo, long row_hi) {
        try {
            // scatter: cover boxes paint the points they can settle by pure
            // geometry, each worker clipped to its own rows
            BitGrid near, inside;
            near.init(m.x0, m.y0, m.width, m.height);
            inside.init(m.x0, m.y0, m.width, m.height);
            const Dyadic q = Dyadic::pow2(-N - 2);
            const Dyadic h = Dyadic::pow2(-N - 1);

            auto scatter = [&](const std::vector<std::uint64_t>& codes, bool strict) {
                for (std::uint64_t code : codes) {
                    RectInterval box = grid.cell_rect(code).inflate(beta);
                    if (!strict) {
                        mark_rect(near, lat_ceil(box.re_lo - q, s), lat_floor(box.re_hi + q, s),
                                  lat_ceil(box.im_lo - q, s), lat_floor(box.im_hi + q, s),
                                  row_lo, row_hi);
                    } else {
                        mark_rect(inside, lat_floor(box.re_hi - h, s) + 1,
                                  lat_ceil(box.re_lo + h, s) - 1,
                                  lat_floor(box.im_hi - h, s) + 1,
                                  lat_ceil(box.im_lo + h, s) - 1, row_lo, row_hi);
                    }
                }
            };
            scatter(cert.cover.cells, false);
            scatter(cert.cover.extra_cells, false);
            scatter(cert.cover.cells, true);

            for (long iy = row_lo; iy < row_hi; ++iy) {
                for (long ix = m.x0; ix < m.x0 + m.width; ++ix) {
                    PixelVerdict v;
                    if (!near.get(ix, iy)) {
                        v = {0, HaltStep::S1d, 0, 0};
                    } else if (inside.get(ix, iy)) {
                        v = {1, HaltStep::S1e, 0, 0};
                    } else if (s1f_cuts) {
                        v = {0, HaltStep::S1f, 0, 0};
                    } else {
                        IdealPoint zp{{Dyadic(mpz_class(ix), -s), Dyadic(mpz_class(iy), -s)}, N};
                        try {
                            v = classify_pixel(p, zp, cert, idx);
                        } catch (const PrecisionExhausted& pe) {
                            throw PrecisionExhausted(
                                pe.w, pe.step,
                                std::string("pixel (") + std::to_string(ix) + ", " +
                                    std::to_string(iy) + ") * 2^-" + std::to_string(s) +
                                    " undecidable at the precision cap");
                        }
                    }
                    std::size_t i = m.index(ix, iy);
                    if (v.bit) m.bits[i >> 6] |= std::uint64_t(1) << (i & 63);
                    m.steps[i] = std::uint8_t(v.halt_step);
                    m.ks[i] = std::uint8_t(std::min(v.k_used, kN_cap));
                    ++hists[std::size_t(t)][std::size_t(v.halt_step)];
                    maxks[std::size_t(t)] = std::max(maxks[std::size_t(t)], v.k_used);
                }
            }
        } catch (...) {
            errors[std::size_t(t)] = std::current_exception();
        }
    };

    if (J == 1) {
        run_band(0, m.y0, m.y0 + m.height);
    } else {
        for (int t = 0; t < J; ++t) {
            long lo = m.y0 + m.height * t / J;
            long hi = m.y0 + m.height * (t + 1) / J;
            pool.emplace_back(run_band, t, lo, hi);
        }
        for (auto& th : pool) th.join();
    }
    for (int t = 0; t < J; ++t)
        if (errors[std::size_t(t)]) std::rethrow_exception(errors[std::size_t(t)]);
    for (int t = 0; t < J; ++t) {
        for (int k = 0; k < 8; ++k) m.histogram[std::size_t(k)] += hists[std::size_t(t)][std::size_t(k)];
        m.max_k = std::max(m.max_k, maxks[std::size_t(t)]);
    }
    return m;
}

}  // namespace

std::size_t PixelMap::count_ones() const {
    std::size_t n = 0;
    for (std::uint64_t w : bits) n += std::size_t(__builtin_popcountll(w));
    return n;
}

bool PixelMap::operator==(const PixelMap& o) const {
    return N == o.N && N_eff == o.N_eff && x0 == o.x0 && y0 == o.y0 && width == o.width &&
           height == o.height && bits == o.bits && steps == o.steps && ks == o.ks &&
           histogram == o.histogram && max_k == o.max_k &&
           window.center.re == o.window.center.re && window.center.im == o.window.center.im &&
           window.radius == o.window.radius;
}

PixelMap sweep(const PolyHandle& p, const HyperbolicityCertificate& cert, const BoxLInf& window,
               int N, int jobs) {
    if (N < 0) throw std::invalid_argument("negative pixel level");
    const int Np = cert.distortion.N_prime;

    if (N >= Np) {
        PixelMap m = sweep_at_level(p, cert, window.to_rect(), N, jobs);
        m.window = window;
        return m;
    }

    // Too coarse for the certificate: classify on the N' lattice over a
    // window inflated by the transfer radius, then pull each level-N bit
    // from the fine pixels within 2^-(N+2) of it.
    const Dyadic reach = Dyadic::pow2(-N - 2);
    PixelMap fine = sweep_at_level(p, cert, window.to_rect().inflate(reach), Np, jobs);

    PixelMap m;
    m.N = N;
    m.N_eff = Np;
    m.window = window;
    m.max_k = fine.max_k;
    if (fine.width == 0) return m;

    const long shift = Np - N;       // lattice refinement factor, log2
    const long S = 1L << shift;      // fine steps per coarse step

    // coarse lattice points whose fine counterpart the (uninflated) sweep
    // would contain
    const Dyadic frame = cert.R + Dyadic(1);
    RectInterval fr{-frame, frame, -frame, frame};
    auto clipped = rect_intersect(window.to_rect(), fr);
    if (!clipped) return m;
    const long s = N + 2;
    long ix0 = lat_ceil(clipped->re_lo, s), ix1 = lat_floor(clipped->re_hi, s);
    long iy0 = lat_ceil(clipped->im_lo, s), iy1 = lat_floor(clipped->im_hi, s);
    if (ix0 > ix1 || iy0 > iy1) return m;

    m.x0 = ix0;
    m.y0 = iy0;
    m.width = ix1 - ix0 + 1;
    m.height = iy1 - iy0 + 1;
    const std::size_t total = std::size_t(m.width) * std::size_t(m.height);
    m.bits.assign((total + 63) / 64, 0);
    m.steps.assign(total, 0);
    m.ks.assign(total, 0);

    for (long iy = iy0; iy <= iy1; ++iy) {
        for (long ix = ix0; ix <= ix1; ++ix) {
            const long cx = ix * S, cy = iy * S;
            bool one = false;
            long fy0 = std::max(cy - S, fine.y0), fy1 = std::min(cy + S, fine.y0 + fine.height - 1);
            long fx0 = std::max(cx - S, fine.x0), fx1 = std::min(cx + S, fine.x0 + fine.width - 1);
            for (long fy = fy0; fy <= fy1 && !one; ++fy)
                for (long fx = fx0; fx <= fx1; ++fx)
                    if (fine.get(fx, fy)) {
                        one = true;
                        break;
                    }
            std::size_t i = m.index(ix, iy);
            if (one) m.bits[i >> 6] |= std::uint64_t(1) << (i & 63);
            // carry the diagnosis of the coincident fine pixel
            std::size_t fi = fine.index(cx, cy);
            m.steps[i] = fine.steps[fi];
            m.ks[i] = fine.ks[fi];
            ++m.histogram[m.steps[i]];
        }
    }
    return m;
}

std::string emit_pgm(const PixelMap& m) {
    std::string out = "P5\n" + std::to_string(m.width) + " " + std::to_string(m.height) + "\n255\n";
    out.reserve(out.size() + std::size_t(m.width) * std::size_t(m.height));
    for (long iy = m.y0 + m.height - 1; iy >= m.y0; --iy)
        for (long ix = m.x0; ix < m.x0 + m.width; ++ix)
            out.push_back(m.get(ix, iy) ? '\0' : char(255));
    return out;
}

namespace {

ordered_json dyadic_json(const Dyadic& d) {
    return ordered_json{{"m", d.m.get_str()}, {"e", d.e}};
}

Dyadic dyadic_from_json(const ordered_json& j) {
    return Dyadic(mpz_class(j.at("m").get<std::string>()), j.at("e").get<long>());
}

}  // namespace

std::string emit_verdicts_json(const PixelMap& m) {
    ordered_json j;
    j["format"] = "juliaverdicts-1";
    j["N"] = m.N;
    j["N_eff"] = m.N_eff;
    j["window"] = ordered_json{{"re", dyadic_json(m.window.center.re)},
                               {"im", dyadic_json(m.window.center.im)},
                               {"radius", dyadic_json(m.window.radius)}};
    j["x0"] = m.x0;
    j["y0"] = m.y0;
    j["width"] = m.width;
    j["height"] = m.height;
    j["max_k"] = m.max_k;
    j["histogram"] = m.histogram;
    ordered_json pixels = ordered_json::array();
    for (long iy = m.y0; iy < m.y0 + m.height; ++iy)
        for (long ix = m.x0; ix < m.x0 + m.width; ++ix) {
            std::size_t i = m.index(ix, iy);
            pixels.push_back(ordered_json{{"x", ix},
                                          {"y", iy},
                                          {"bit", m.get(ix, iy) ? 1 : 0},
                                          {"step", halt_step_name(HaltStep(m.steps[i]))},
                                          {"k", int(m.ks[i])}});
        }
    j["pixels"] = std::move(pixels);
    return j.dump();
}

PixelMap parse_verdicts_json(const std::string& text) {
    ordered_json j = ordered_json::parse(text);
    if (j.at("format").get<std::string>() != "juliaverdicts-1")
        throw std::runtime_error("unrecognized verdict format");
    PixelMap m;
    m.N = j.at("N").get<int>();
    m.N_eff = j.at("N_eff").get<int>();
    const auto& w = j.at("window");
    m.window.center.re = dyadic_from_json(w.at("re"));
    m.window.center.im = dyadic_from_json(w.at("im"));
    m.window.radius = dyadic_from_json(w.at("radius"));
    m.x0 = j.at("x0").get<long>();
    m.y0 = j.at("y0").get<long>();
    m.width = j.at("width").get<long>();
    m.height = j.at("height").get<long>();
    m.max_k = j.at("max_k").get<int>();
    auto hist = j.at("histogram");
    for (std::size_t k = 0; k < 8; ++k) m.histogram[k] = hist.at(k).get<std::uint64_t>();
    const std::size_t total = std::size_t(m.width) * std::size_t(m.height);
    m.bits.assign((total + 63) / 64, 0);
    m.steps.assign(total, 0);
    m.ks.assign(total, 0);
    for (const auto& px : j.at("pixels")) {
        long ix = px.at("x").get<long>(), iy = px.at("y").get<long>();
        if (!m.in_range(ix, iy)) throw std::runtime_error("pixel outside its own window");
        std::size_t i = m.index(ix, iy);
        if (px.at("bit").get<int>()) m.bits[i >> 6] |= std::uint64_t(1) << (i & 63);
        std::string step = px.at("step").get<std::string>();
        int sid = -1;
        for (int c = 0; c < 8; ++c)
            if (step == halt_step_name(HaltStep(c))) sid = c;
        if (sid < 0) throw std::runtime_error("unknown halt step " + step);
        m.steps[i] = std::uint8_t(sid);
        m.ks[i] = std::uint8_t(px.at("k").get<int>());
    }
    return m;
}

HausdorffResult hausdorff_check(const PixelMap& m, const std::vector<DyadicComplex>& ground,
                                int N) {
    HausdorffResult res;
    if (ground.empty() || m.count_ones() == 0) return res;
    res.defined = true;

    const long s = N + 2;
    const Dyadic pr = Dyadic::pow2(-N - 3);  // pixel square radius
    const Dyadic threshold = Dyadic::pow2(-N) + Dyadic::pow2(-N - 4);

    // bucket the ground sample on the pixel lattice
    std::map<std::pair<long, long>, std::vector<std::size_t>> buckets;
    for (std::size_t i = 0; i < ground.size(); ++i)
        buckets[{lat_floor(ground[i].re, s), lat_floor(ground[i].im, s)}].push_back(i);

    Dyadic worst;  // running max of both directions

    // picture -> sample: nearest ground point per 1-pixel, plus the square
    // radius
    for (long iy = m.y0; iy < m.y0 + m.height; ++iy) {
        for (long ix = m.x0; ix < m.x0 + m.width; ++ix) {
            if (!m.get(ix, iy)) continue;
            DyadicComplex c{Dyadic(mpz_class(ix), -s), Dyadic(mpz_class(iy), -s)};
            bool found = false;
            Dyadic best;
            for (long ring = 2; ring <= 64 && !found; ring *= 2) {
                for (long by = iy - ring; by <= iy + ring; ++by)
                    for (long bx = ix - ring; bx <= ix + ring; ++bx) {
                        auto it = buckets.find({bx, by});
                        if (it == buckets.end()) continue;
                        for (std::size_t gi : it->second) {
                            Dyadic d = dist_linf(c, ground[gi]);
                            if (!found || d < best) best = d;
                            found = true;
                        }
                    }
            }
            if (!found)  // sample is far from this pixel, measure it exactly
                for (const DyadicComplex& g : ground) {
                    Dyadic d = dist_linf(c, g);
                    if (!found || d < best) best = d;
                    found = true;
                }
            Dyadic up = best + pr;
            if (up > worst) worst = up;
        }
    }

    // sample -> picture: nearest 1-pixel per ground point, minus the square
    // radius it already covers
    for (const DyadicComplex& g : ground) {
        long gx = lat_floor(g.re, s), gy = lat_floor(g.im, s);
        bool found = false;
        Dyadic best;
        for (long ring = 2;; ring *= 2) {
            long jx0 = std::max(gx - ring, m.x0), jx1 = std::min(gx + ring, m.x0 + m.width - 1);
            long jy0 = std::max(gy - ring, m.y0), jy1 = std::min(gy + ring, m.y0 + m.height - 1);
            for (long iy = jy0; iy <= jy1; ++iy)
                for (long ix = jx0; ix <= jx1; ++ix) {
                    if (!m.get(ix, iy)) continue;
                    Dyadic d = dist_linf(g, {Dyadic(mpz_class(ix), -s), Dyadic(mpz_class(iy), -s)});
                    if (!found || d < best) best = d;
                    found = true;
                }
            if (found || (jx0 == m.x0 && jx1 == m.x0 + m.width - 1 && jy0 == m.y0 &&
                          jy1 == m.y0 + m.height - 1))
                break;
        }
        // found is guaranteed here: the map has at least one 1-pixel
        Dyadic down = best - pr;
        if (down.sign() < 0) down = Dyadic(0);
        if (down > worst) worst = down;
    }

    res.bound = worst;
    res.pass = !(worst > threshold);
    return res;
}

}  // namespace juliacert
