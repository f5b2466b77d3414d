#include "moddep/specialpoints.hpp"

#include <algorithm>
#include <numeric>

namespace moddep {

namespace {

bool rb_disjoint(const RBall& x, const RBall& y) {
    Real xu = x.upper(), xl = x.lower(), yu = y.upper(), yl = y.lower();
    return mpfr_cmp(xu.get(), yl.get()) < 0 || mpfr_cmp(yu.get(), xl.get()) < 0;
}

bool cb_disjoint(const CBall& z, const CBall& w) {
    return rb_disjoint(z.re, w.re) || rb_disjoint(z.im, w.im);
}

PrecisionCtx at_bits(const PrecisionCtx& ctx, long bits) {
    PrecisionCtx c = ctx;
    c.bits = bits;
    return c;
}

// ---- exact linear algebra over Q(i) for the fiber pencil ----

using GMat = std::vector<std::vector<GaussRat>>;

GMat companion(const std::vector<Int>& H) {
    long h = (long)H.size() - 1;
    GMat M((size_t)h, std::vector<GaussRat>((size_t)h, GaussRat(Rat(0))));
    for (long j = 0; j + 1 < h; ++j) M[(size_t)(j + 1)][(size_t)j] = GaussRat(Rat(1));
    for (long i = 0; i < h; ++i) M[(size_t)i][(size_t)(h - 1)] = GaussRat(-Rat(H[(size_t)i]));
    return M;
}

GMat gmat_mul(const GMat& x, const GMat& y) {
    size_t n = x.size();
    GMat r(n, std::vector<GaussRat>(n, GaussRat(Rat(0))));
    for (size_t i = 0; i < n; ++i)
        for (size_t k = 0; k < n; ++k) {
            if (x[i][k].is_zero()) continue;
            for (size_t j = 0; j < n; ++j) r[i][j] = r[i][j] + x[i][k] * y[k][j];
        }
    return r;
}

// p(M) by Horner.
GMat poly_at_matrix(const GPoly& p, const GMat& M) {
    size_t n = M.size();
    GMat r(n, std::vector<GaussRat>(n, GaussRat(Rat(0))));
    if (p.is_zero()) return r;
    for (size_t i = 0; i < n; ++i) r[i][i] = p.c.back();
    for (long k = p.degree() - 1; k >= 0; --k) {
        r = gmat_mul(r, M);
        for (size_t i = 0; i < n; ++i) r[i][i] = r[i][i] + p.c[(size_t)k];
    }
    return r;
}

GaussRat gmat_det(GMat m) {
    size_t n = m.size();
    GaussRat det(Rat(1));
    for (size_t col = 0; col < n; ++col) {
        size_t piv = col;
        while (piv < n && m[piv][col].is_zero()) ++piv;
        if (piv == n) return GaussRat(Rat(0));
        if (piv != col) {
            std::swap(m[piv], m[col]);
            det = -det;
        }
        det = det * m[col][col];
        GaussRat inv = m[col][col].inv();
        for (size_t r = col + 1; r < n; ++r) {
            if (m[r][col].is_zero()) continue;
            GaussRat f = m[r][col] * inv;
            for (size_t j = col; j < n; ++j) m[r][j] = m[r][j] - f * m[col][j];
        }
    }
    return det;
}

GPoly lagrange(const std::vector<GaussRat>& xs, const std::vector<GaussRat>& ys) {
    GPoly U = GPoly::zero();
    for (size_t i = 0; i < xs.size(); ++i) {
        if (ys[i].is_zero()) continue;
        GPoly li = GPoly::constant(GaussRat(Rat(1)));
        GaussRat den(Rat(1));
        for (size_t k = 0; k < xs.size(); ++k) {
            if (k == i) continue;
            li = gp_mul(li, GPoly::linear_root(xs[k]));
            den = den * (xs[i] - xs[k]);
        }
        U = gp_add(U, gp_scale(li, ys[i] * den.inv()));
    }
    return U;
}

GPoly int_gpoly(const std::vector<Int>& p) {
    std::vector<GaussRat> c(p.size());
    for (size_t k = 0; k < p.size(); ++k) c[k] = GaussRat(Rat(p[k]));
    return GPoly(std::move(c));
}

// det(num(M) - Y den(M)) = prod_i (num(s_i) - Y den(s_i)) over the roots s_i
// of H: monic part = the finite-value polynomial of the fiber, pole roots
// contribute nonzero constants (num and den are coprime, H irreducible over
// Q, so num(s_i) and den(s_i) never vanish together).
GPoly fiber_values_poly(const std::vector<Int>& H, const ModularFunction& f) {
    GMat M = companion(H);
    GMat A = poly_at_matrix(f.num, M);
    GMat B = poly_at_matrix(f.den, M);
    long h = (long)H.size() - 1;
    std::vector<GaussRat> xs, ys;
    for (long k = 0; k <= h; ++k) {
        xs.push_back(GaussRat(Rat(k)));
        GMat P = A;
        for (size_t i = 0; i < P.size(); ++i)
            for (size_t j = 0; j < P.size(); ++j)
                P[i][j] = P[i][j] - GaussRat(Rat(k)) * B[i][j];
        ys.push_back(gmat_det(std::move(P)));
    }
    GPoly U = lagrange(xs, ys);
    MD_INVARIANT(!U.is_zero(), "fiber pencil cannot vanish identically");
    return U.degree() >= 1 ? U.monic() : U;
}

// For each singular modulus, whether the function has a pole there, decided
// exactly against g = gcd(H, den): the modulus is a root of exactly one of
// g and H/g, and one of the two evaluations excludes zero at some precision.
std::vector<bool> classify_poles(const std::vector<Int>& H, const ModularFunction& f,
                                 const std::vector<SingularModulus>& sm,
                                 const PrecisionCtx& ctx) {
    std::vector<bool> pole(sm.size(), false);
    GPoly g = gp_gcd(int_gpoly(H), f.den);
    if (g.degree() <= 0) return pole;
    GPoly rest = gp_divmod(int_gpoly(H), g).quot;
    for (size_t i = 0; i < sm.size(); ++i) {
        bool decided = false;
        for (int esc = 0; esc <= ctx.max_escalations && !decided; ++esc) {
            CBall jv = esc == 0 ? sm[i].value
                                : eval_j(form_to_point(sm[i].form),
                                         at_bits(ctx, ctx.bits << esc));
            if (g.eval(jv).nonzero()) {
                decided = true;
            } else if (rest.eval(jv).nonzero()) {
                pole[i] = true;
                decided = true;
            }
        }
        MD_REQUIRE(decided, PrecisionExhausted, "cannot separate pole from finite value");
    }
    return pole;
}

}  // namespace

std::vector<SingularModulus> singular_moduli(long long delta, const PrecisionCtx& ctx) {
    std::vector<QuadForm> forms = enumerate_T(delta);
    for (int esc = 0; esc <= ctx.max_escalations; ++esc) {
        PrecisionCtx c = at_bits(ctx, ctx.bits << esc);
        std::vector<SingularModulus> out;
        out.reserve(forms.size());
        for (const QuadForm& q : forms)
            out.push_back({delta, q, eval_j(form_to_point(q), c)});
        bool sep = true;
        for (size_t i = 0; i < out.size() && sep; ++i)
            for (size_t k = i + 1; k < out.size() && sep; ++k)
                if (!cb_disjoint(out[i].value, out[k].value)) sep = false;
        if (sep) return out;
    }
    throw PrecisionExhausted("singular moduli of " + std::to_string(delta) +
                             " could not be separated");
}

std::vector<Int> hilbert_class_poly(long long delta, const PrecisionCtx& ctx) {
    std::vector<QuadForm> forms = enumerate_T(delta);
    for (int esc = 0; esc <= ctx.max_escalations; ++esc) {
        long bits = ctx.bits << esc;
        PrecisionCtx c = at_bits(ctx, bits);
        // prod (X - j_i) with ball coefficients, ascending.
        std::vector<CBall> coef{{RBall::exact_si(1, bits), RBall::exact_si(0, bits)}};
        for (const QuadForm& q : forms) {
            CBall v = eval_j(form_to_point(q), c);
            std::vector<CBall> next((size_t)coef.size() + 1,
                                    {RBall::exact_si(0, bits), RBall::exact_si(0, bits)});
            for (size_t k = 0; k < coef.size(); ++k) {
                next[k + 1] = cb_add(next[k + 1], coef[k]);
                next[k] = cb_sub(next[k], cb_mul(v, coef[k]));
            }
            coef = std::move(next);
        }
        std::vector<Int> out(coef.size());
        bool ok = true;
        for (size_t k = 0; k + 1 < coef.size() && ok; ++k) {
            auto n = rb_integer_within(coef[k].re);
            if (!n || !coef[k].im.contains_zero() || coef[k].im.mag_upper_d() >= 0.25)
                ok = false;
            else
                out[k] = *n;
        }
        if (!ok) continue;
        out.back() = 1;
        MD_INVARIANT((long long)coef.size() - 1 == class_number(delta),
                     "class polynomial degree must match the class number");
        return out;
    }
    throw PrecisionExhausted("class polynomial coefficients of " + std::to_string(delta) +
                             " could not be certified");
}

GPoly fiber_polynomial(const ModularFunction& f, long long delta, const PrecisionCtx& ctx) {
    MD_REQUIRE(!f.is_constant(), ConstantFunction, "constant functions have no special fiber");
    return fiber_values_poly(hilbert_class_poly(delta, ctx), f);
}

FSpecialFiber f_special_points(const ModularFunction& f, long long delta,
                               const PrecisionCtx& ctx) {
    MD_REQUIRE(!f.is_constant(), ConstantFunction, "constant functions have no special fiber");
    std::vector<SingularModulus> sm = singular_moduli(delta, ctx);
    std::vector<Int> H = hilbert_class_poly(delta, ctx);
    std::vector<bool> pole = classify_poles(H, f, sm, ctx);

    FSpecialFiber out;
    for (size_t i = 0; i < sm.size(); ++i)
        if (pole[i]) out.poles.push_back(sm[i]);

    GPoly U = fiber_values_poly(H, f);
    if (U.degree() <= 0) {
        MD_INVARIANT(out.poles.size() == sm.size(),
                     "constant fiber pencil forces every modulus to be a pole");
        return out;
    }
    std::vector<RootDisk> disks = gp_roots(U, ctx);
    std::vector<FSpecialPoint> pts(disks.size());
    for (size_t r = 0; r < disks.size(); ++r) {
        pts[r].value = disks[r].z;
        pts[r].disc = delta;
    }

    // Pair every finite modulus with the unique value disk its image refines
    // into; the image ball always contains the exact value, which is one of
    // the pairwise-disjoint roots, so refinement settles the pairing.
    for (size_t i = 0; i < sm.size(); ++i) {
        if (pole[i]) continue;
        bool placed = false;
        for (int esc = 0; esc <= ctx.max_escalations && !placed; ++esc) {
            CBall jv = esc == 0 ? sm[i].value
                                : eval_j(form_to_point(sm[i].form),
                                         at_bits(ctx, ctx.bits << esc));
            CBall db = f.den.eval(jv);
            if (!db.nonzero()) continue;
            CBall v = cb_div(f.num.eval(jv), db);
            size_t hit = disks.size();
            size_t hits = 0;
            for (size_t r = 0; r < disks.size(); ++r)
                if (!cb_disjoint(v, disks[r].z)) {
                    hit = r;
                    ++hits;
                }
            MD_INVARIANT(hits >= 1, "image ball must meet the disk of its exact value");
            if (hits == 1) {
                pts[hit].preimages.push_back(sm[i]);
                placed = true;
            }
        }
        MD_REQUIRE(placed, PrecisionExhausted, "modulus image could not be isolated");
    }
    for (size_t r = 0; r < disks.size(); ++r)
        MD_INVARIANT((int)pts[r].preimages.size() == disks[r].multiplicity,
                     "preimage count must equal the pencil multiplicity");

    // Smallest-|disc| preimage annotation: the value appears in the fiber of
    // delta' exactly when it is a root of gcd(squarefree(U), U'); being a
    // root of exactly one of the coprime parts, refinement decides it.
    GPoly sq = GPoly::constant(GaussRat(Rat(1)));
    for (const GPoly& part : gp_squarefree(U))
        if (part.degree() >= 1) sq = gp_mul(sq, part);
    for (long long ad = 3; ad < -delta; ++ad) {
        if (!is_valid_disc(-ad)) continue;
        if (std::all_of(pts.begin(), pts.end(),
                        [&](const FSpecialPoint& p) { return p.disc != delta; }))
            break;
        std::vector<Int> Hp = hilbert_class_poly(-ad, ctx);
        GPoly Up = fiber_values_poly(Hp, f);
        if (Up.degree() <= 0) continue;
        GPoly w = gp_gcd(sq, Up);
        if (w.degree() <= 0) continue;
        GPoly other = gp_divmod(sq, w).quot;
        for (auto& p : pts) {
            if (p.disc != delta) continue;  // already annotated with a smaller disc
            const SingularModulus& rep = p.preimages.front();
            bool decided = false;
            for (int esc = 0; esc <= ctx.max_escalations && !decided; ++esc) {
                CBall jv = eval_j(form_to_point(rep.form), at_bits(ctx, ctx.bits << esc));
                CBall db = f.den.eval(jv);
                if (!db.nonzero()) continue;
                CBall v = cb_div(f.num.eval(jv), db);
                if (w.eval(v).nonzero())
                    decided = true;  // certainly not in the delta' fiber
                else if (other.eval(v).nonzero()) {
                    p.disc = -ad;
                    decided = true;
                }
            }
            MD_REQUIRE(decided, PrecisionExhausted,
                       "fiber membership for the discriminant scan is undecided");
        }
    }
    out.points = std::move(pts);
    return out;
}

std::vector<CBall> conjugate_orbit(const ModularFunction& f, const FSpecialPoint& sigma,
                                   const PrecisionCtx& ctx) {
    MD_REQUIRE(!f.is_constant(), ConstantFunction, "constant functions have no orbits");
    std::vector<SingularModulus> sm = singular_moduli(sigma.disc, ctx);
    std::vector<Int> H = hilbert_class_poly(sigma.disc, ctx);
    std::vector<bool> pole = classify_poles(H, f, sm, ctx);
    std::vector<CBall> out;
    for (size_t i = 0; i < sm.size(); ++i) {
        MD_REQUIRE(!pole[i], PoleAtSpecialPoint,
                   "conjugate candidate set meets a pole of the function");
        bool done = false;
        for (int esc = 0; esc <= ctx.max_escalations && !done; ++esc) {
            CBall jv = esc == 0 ? sm[i].value
                                : eval_j(form_to_point(sm[i].form),
                                         at_bits(ctx, ctx.bits << esc));
            CBall db = f.den.eval(jv);
            if (!db.nonzero()) continue;
            out.push_back(cb_div(f.num.eval(jv), db));
            done = true;
        }
        MD_REQUIRE(done, PrecisionExhausted, "conjugate value could not be evaluated");
    }
    return out;
}

std::optional<IsogenyWitness> modular_relation(const CBall& x1, const CBall& x2, long n_max,
                                               const PrecisionCtx& ctx) {
    MD_REQUIRE(n_max >= 1, PreconditionViolated, "isogeny degree bound must be positive");
    FjPoint t1 = inverse_j(x1, ctx);
    for (int esc = 0; esc <= ctx.max_escalations; ++esc) {
        long bits = ctx.bits << esc;
        CBall tau = t1.exact ? CBall::from_qp(*t1.exact, bits) : t1.approx;
        bool ambiguous = false;
        for (long n = 1; n <= n_max; ++n) {
            struct Hit {
                Mat2 g;
                CBall v;
            };
            std::vector<Hit> hits;
            for (long a = 1; a <= n; ++a) {
                if (n % a != 0) continue;
                long d = n / a;
                for (long b = 0; b < d; ++b) {
                    if (std::gcd(std::gcd(a, b), d) != 1) continue;
                    CBall num = cb_add(cb_mul_rb(tau, RBall::from_int(Int(a), bits)),
                                       {RBall::from_int(Int(b), bits), RBall::exact_si(0, bits)});
                    CBall moved = cb_mul_rb(num, RBall::from_rat(Rat(1, (unsigned long)d), bits));
                    CBall v = eval_j(moved, bits);
                    if (!cb_disjoint(v, x2))
                        hits.push_back({Mat2{Int(a), Int(b), Int(0), Int(d)}, v});
                }
            }
            if (hits.empty()) continue;
            bool coherent = true;
            for (size_t i = 0; i < hits.size() && coherent; ++i)
                for (size_t k = i + 1; k < hits.size() && coherent; ++k)
                    if (cb_disjoint(hits[i].v, hits[k].v)) coherent = false;
            if (coherent) return IsogenyWitness{n, hits.front().g};
            ambiguous = true;  // certifiably distinct candidates both meet x2
            break;
        }
        if (!ambiguous) return std::nullopt;
    }
    throw PrecisionExhausted("input balls match several distinct isogeny candidates");
}

}  // namespace moddep
