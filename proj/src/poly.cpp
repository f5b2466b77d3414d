#include "moddep/poly.hpp"

#include <algorithm>
#include <cmath>

namespace moddep {

namespace {

void trim(std::vector<GaussRat>& c) {
    while (!c.empty() && c.back().is_zero()) c.pop_back();
}

// Plain (non-ball) complex arithmetic at a fixed mpfr precision, used only to
// drive the simultaneous iteration; every certified statement afterwards goes
// through ball arithmetic.
struct MC {
    Real re, im;
    explicit MC(long p) : re(p), im(p) {
        mpfr_set_zero(re.get(), 1);
        mpfr_set_zero(im.get(), 1);
    }
};

MC mc_from_gauss(const GaussRat& x, long p) {
    MC r(p);
    mpfr_set_q(r.re.get(), x.re.get_mpq_t(), MPFR_RNDN);
    mpfr_set_q(r.im.get(), x.im.get_mpq_t(), MPFR_RNDN);
    return r;
}

MC mc_add(const MC& a, const MC& b, long p) {
    MC r(p);
    mpfr_add(r.re.get(), a.re.get(), b.re.get(), MPFR_RNDN);
    mpfr_add(r.im.get(), a.im.get(), b.im.get(), MPFR_RNDN);
    return r;
}

MC mc_sub(const MC& a, const MC& b, long p) {
    MC r(p);
    mpfr_sub(r.re.get(), a.re.get(), b.re.get(), MPFR_RNDN);
    mpfr_sub(r.im.get(), a.im.get(), b.im.get(), MPFR_RNDN);
    return r;
}

MC mc_mul(const MC& a, const MC& b, long p) {
    MC r(p);
    mpfr_fmms(r.re.get(), a.re.get(), b.re.get(), a.im.get(), b.im.get(), MPFR_RNDN);
    mpfr_fmma(r.im.get(), a.re.get(), b.im.get(), a.im.get(), b.re.get(), MPFR_RNDN);
    return r;
}

MC mc_div(const MC& a, const MC& b, long p) {
    MC r(p);
    Real n2(p);
    mpfr_fmma(n2.get(), b.re.get(), b.re.get(), b.im.get(), b.im.get(), MPFR_RNDN);
    mpfr_fmma(r.re.get(), a.re.get(), b.re.get(), a.im.get(), b.im.get(), MPFR_RNDN);
    mpfr_fmms(r.im.get(), a.im.get(), b.re.get(), a.re.get(), b.im.get(), MPFR_RNDN);
    mpfr_div(r.re.get(), r.re.get(), n2.get(), MPFR_RNDN);
    mpfr_div(r.im.get(), r.im.get(), n2.get(), MPFR_RNDN);
    return r;
}

// |a|^2 into out.
void mc_abs2(Real& out, const MC& a) {
    mpfr_fmma(out.get(), a.re.get(), a.re.get(), a.im.get(), a.im.get(), MPFR_RNDN);
}

bool mc_is_zero(const MC& a) {
    return mpfr_zero_p(a.re.get()) && mpfr_zero_p(a.im.get());
}

// Exact-center complex ball from iteration state.
CBall cb_exact_mc(const MC& z, long bits) {
    CBall b(bits);
    mpfr_set(b.re.mid.get(), z.re.get(), MPFR_RNDN);
    mpfr_set(b.im.mid.get(), z.im.get(), MPFR_RNDN);
    mpfr_set_zero(b.re.rad.get(), 1);
    mpfr_set_zero(b.im.rad.get(), 1);
    return b;
}

// P and P' at z by a joint Horner pass.
void horner2(const std::vector<MC>& c, const MC& z, long p, MC& val, MC& der) {
    val = c.back();
    der = MC(p);
    for (size_t k = c.size() - 1; k-- > 0;) {
        der = mc_add(mc_mul(der, z, p), val, p);
        val = mc_add(mc_mul(val, z, p), c[k], p);
    }
}

std::vector<RootDisk> solve_squarefree(const GPoly& g, int multiplicity,
                                       const PrecisionCtx& ctx) {
    long n = g.degree();
    std::vector<RootDisk> out;
    if (n <= 0) return out;
    if (n == 1) {
        GaussRat root = -(g.c[0] / g.c[1]);
        out.push_back({CBall::from_gauss(root, ctx.bits), multiplicity});
        return out;
    }

    // Cauchy-style initial radius 1 + max |c_i / c_n|, capped crudely; the
    // iteration self-corrects, only the certification below must be right.
    double r0 = 1.0;
    for (long i = 0; i < n; ++i) {
        double m = std::abs((g.c[(size_t)i] / g.c[(size_t)n]).re.get_d()) +
                   std::abs((g.c[(size_t)i] / g.c[(size_t)n]).im.get_d());
        if (std::isfinite(m)) r0 = std::max(r0, 1.0 + m);
    }
    r0 = std::min(r0, 1e30);

    long wp = std::max(ctx.bits, 64L);
    std::vector<MC> z;
    bool seeded = false;
    for (int esc = 0; esc <= ctx.max_escalations; ++esc, wp *= 2) {
        std::vector<MC> c;
        c.reserve((size_t)n + 1);
        for (const auto& a : g.c) c.push_back(mc_from_gauss(a, wp));

        if (!seeded) {
            z.clear();
            for (long k = 0; k < n; ++k) {
                double th = 2 * M_PI * (double)k / (double)n + 0.4 / (double)n + 0.25;
                MC p0(wp);
                mpfr_set_d(p0.re.get(), r0 * std::cos(th), MPFR_RNDN);
                mpfr_set_d(p0.im.get(), r0 * std::sin(th), MPFR_RNDN);
                z.push_back(p0);
            }
            seeded = true;
        } else {
            for (auto& zi : z) {
                MC up(wp);
                mpfr_set(up.re.get(), zi.re.get(), MPFR_RNDN);
                mpfr_set(up.im.get(), zi.im.get(), MPFR_RNDN);
                zi = up;
            }
        }

        Real eps2(64), t(wp);
        mpfr_set_ui_2exp(eps2.get(), 1, -2 * (wp - 8), MPFR_RNDN);

        for (int it = 0; it < 60 + 8 * (int)n; ++it) {
            bool moved = false;
            for (long i = 0; i < n; ++i) {
                MC val(wp), der(wp);
                horner2(c, z[(size_t)i], wp, val, der);
                if (mc_is_zero(der)) {
                    mpfr_nextabove(z[(size_t)i].re.get());
                    moved = true;
                    continue;
                }
                MC nw = mc_div(val, der, wp);
                MC s(wp);
                for (long j = 0; j < n; ++j) {
                    if (j == i) continue;
                    MC d = mc_sub(z[(size_t)i], z[(size_t)j], wp);
                    if (mc_is_zero(d)) {
                        mpfr_nextabove(z[(size_t)j].re.get());
                        d = mc_sub(z[(size_t)i], z[(size_t)j], wp);
                    }
                    MC one(wp);
                    mpfr_set_ui(one.re.get(), 1, MPFR_RNDN);
                    s = mc_add(s, mc_div(one, d, wp), wp);
                }
                MC one(wp);
                mpfr_set_ui(one.re.get(), 1, MPFR_RNDN);
                MC denom = mc_sub(one, mc_mul(nw, s, wp), wp);
                MC w = mc_is_zero(denom) ? nw : mc_div(nw, denom, wp);
                // relative stop test |w|^2 > eps2 (1 + |z|^2)
                Real w2(wp), z2(wp);
                mc_abs2(w2, w);
                mc_abs2(z2, z[(size_t)i]);
                mpfr_add_ui(z2.get(), z2.get(), 1, MPFR_RNDN);
                mpfr_mul(z2.get(), z2.get(), eps2.get(), MPFR_RNDN);
                if (mpfr_cmp(w2.get(), z2.get()) > 0) moved = true;
                z[(size_t)i] = mc_sub(z[(size_t)i], w, wp);
            }
            if (!moved) break;
        }

        // Certification: disks of radius n |P/P'| around exact centers, all
        // pairwise disjoint, each then holds exactly one root.
        GPoly dg = gp_derivative(g);
        std::vector<CBall> disks;
        std::vector<RBall> radii;
        bool ok = true;
        for (long i = 0; i < n && ok; ++i) {
            CBall zc = cb_exact_mc(z[(size_t)i], wp);
            CBall val = g.eval(zc);
            CBall der = dg.eval(zc);
            if (!der.nonzero()) {
                ok = false;
                break;
            }
            RBall r = rb_mul(RBall::exact_si(n, wp), cb_abs(cb_div(val, der)));
            disks.push_back(zc);
            radii.push_back(r);
        }
        if (ok) {
            for (long i = 0; i < n && ok; ++i)
                for (long j = i + 1; j < n && ok; ++j) {
                    RBall dist = cb_abs(cb_sub(disks[(size_t)i], disks[(size_t)j]));
                    if (!rb_certainly_gt(dist, rb_add(radii[(size_t)i], radii[(size_t)j])))
                        ok = false;
                }
        }
        if (ok) {
            for (long i = 0; i < n; ++i) {
                CBall b = disks[(size_t)i];
                Real ur = radii[(size_t)i].upper();
                mpfr_set(b.re.rad.get(), ur.get(), MPFR_RNDU);
                mpfr_set(b.im.rad.get(), ur.get(), MPFR_RNDU);
                out.push_back({std::move(b), multiplicity});
            }
            return out;
        }
    }
    throw PrecisionExhausted("root separation not certified at max escalation");
}

}  // namespace

GPoly::GPoly(std::vector<GaussRat> coeffs) : c(std::move(coeffs)) { trim(c); }

GPoly GPoly::constant(GaussRat a) { return GPoly({std::move(a)}); }

GPoly GPoly::linear_root(const GaussRat& a) { return GPoly({-a, GaussRat(Rat(1))}); }

const GaussRat& GPoly::lead() const {
    MD_REQUIRE(!is_zero(), PreconditionViolated, "leading coefficient of zero");
    return c.back();
}

GaussRat GPoly::eval(const GaussRat& x) const {
    GaussRat v;
    for (size_t k = c.size(); k-- > 0;) v = v * x + c[k];
    return v;
}

CBall GPoly::eval(const CBall& x) const {
    long bits = x.bits();
    CBall v{RBall::exact_si(0, bits), RBall::exact_si(0, bits)};
    for (size_t k = c.size(); k-- > 0;)
        v = cb_add(cb_mul(v, x), CBall::from_gauss(c[k], bits));
    return v;
}

GPoly GPoly::monic() const {
    MD_REQUIRE(!is_zero(), PreconditionViolated, "normalizing zero");
    return gp_scale(*this, lead().inv());
}

GPoly gp_add(const GPoly& f, const GPoly& g) {
    std::vector<GaussRat> c(std::max(f.c.size(), g.c.size()));
    for (size_t i = 0; i < c.size(); ++i) {
        if (i < f.c.size()) c[i] = c[i] + f.c[i];
        if (i < g.c.size()) c[i] = c[i] + g.c[i];
    }
    return GPoly(std::move(c));
}

GPoly gp_sub(const GPoly& f, const GPoly& g) { return gp_add(f, gp_scale(g, GaussRat(Rat(-1)))); }

GPoly gp_mul(const GPoly& f, const GPoly& g) {
    if (f.is_zero() || g.is_zero()) return GPoly();
    std::vector<GaussRat> c(f.c.size() + g.c.size() - 1);
    for (size_t i = 0; i < f.c.size(); ++i)
        for (size_t j = 0; j < g.c.size(); ++j) c[i + j] = c[i + j] + f.c[i] * g.c[j];
    return GPoly(std::move(c));
}

GPoly gp_scale(const GPoly& f, const GaussRat& t) {
    std::vector<GaussRat> c(f.c.size());
    for (size_t i = 0; i < c.size(); ++i) c[i] = f.c[i] * t;
    return GPoly(std::move(c));
}

GPolyDiv gp_divmod(const GPoly& f, const GPoly& g) {
    MD_REQUIRE(!g.is_zero(), PreconditionViolated, "division by the zero polynomial");
    GPoly r = f;
    if (f.degree() < g.degree()) return {GPoly(), std::move(r)};
    std::vector<GaussRat> q((size_t)(f.degree() - g.degree() + 1));
    GaussRat gl = g.lead().inv();
    while (!r.is_zero() && r.degree() >= g.degree()) {
        long k = r.degree() - g.degree();
        GaussRat t = r.lead() * gl;
        q[(size_t)k] = t;
        std::vector<GaussRat> sub((size_t)(k) + g.c.size());
        for (size_t i = 0; i < g.c.size(); ++i) sub[(size_t)k + i] = g.c[i] * t;
        r = gp_sub(r, GPoly(std::move(sub)));
    }
    return {GPoly(std::move(q)), std::move(r)};
}

GPoly gp_gcd(const GPoly& f, const GPoly& g) {
    GPoly a = f, b = g;
    while (!b.is_zero()) {
        GPoly r = gp_divmod(a, b).rem;
        a = std::move(b);
        b = r.is_zero() ? std::move(r) : r.monic();
    }
    return a.is_zero() ? a : a.monic();
}

GPoly gp_derivative(const GPoly& f) {
    if (f.c.size() <= 1) return GPoly();
    std::vector<GaussRat> c(f.c.size() - 1);
    for (size_t i = 1; i < f.c.size(); ++i) c[i - 1] = f.c[i] * GaussRat(Rat((long)i));
    return GPoly(std::move(c));
}

GPoly gp_pow(const GPoly& f, unsigned long e) {
    GPoly acc = GPoly::constant(GaussRat(Rat(1)));
    GPoly base = f;
    while (e) {
        if (e & 1) acc = gp_mul(acc, base);
        e >>= 1;
        if (e) base = gp_mul(base, base);
    }
    return acc;
}

std::vector<GPoly> gp_squarefree(const GPoly& f) {
    MD_REQUIRE(!f.is_zero(), PreconditionViolated, "squarefree part of zero");
    std::vector<GPoly> out;
    if (f.degree() == 0) return out;
    GPoly fm = f.monic();
    GPoly df = gp_derivative(fm);
    GPoly a = gp_gcd(fm, df);
    GPoly b = gp_divmod(fm, a).quot;
    GPoly cpart = gp_divmod(df, a).quot;
    GPoly d = gp_sub(cpart, gp_derivative(b));
    while (b.degree() > 0) {
        GPoly p = gp_gcd(b, d);
        out.push_back(p);
        b = gp_divmod(b, p).quot;
        cpart = gp_divmod(d, p).quot;
        d = gp_sub(cpart, gp_derivative(b));
    }
    return out;
}

std::vector<RootDisk> gp_roots(const GPoly& f, const PrecisionCtx& ctx) {
    MD_REQUIRE(!f.is_zero(), PreconditionViolated, "roots of the zero polynomial");
    std::vector<RootDisk> out;
    if (f.degree() == 0) return out;
    auto parts = gp_squarefree(f);
    for (size_t i = 0; i < parts.size(); ++i) {
        auto r = solve_squarefree(parts[i], (int)i + 1, ctx);
        out.insert(out.end(), r.begin(), r.end());
    }
    return out;
}

}  // namespace moddep
