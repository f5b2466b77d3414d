#include "moddep/witness.hpp"

#include <algorithm>
#include <functional>
#include <map>
#include <utility>

namespace moddep {

namespace {

// The primitive integer matrix with the same Mobius action (positive scaling).
Mat2 primitive_int(const QMat2& g) {
    Int l(1);
    for (const Rat* e : {&g.a, &g.b, &g.c, &g.d})
        mpz_lcm(l.get_mpz_t(), l.get_mpz_t(), e->get_den().get_mpz_t());
    auto sc = [&](const Rat& x) {
        Rat y = x * Rat(l);
        y.canonicalize();
        MD_INVARIANT(is_integer(y), "denominators must clear");
        return Int(y.get_num());
    };
    Mat2 m{sc(g.a), sc(g.b), sc(g.c), sc(g.d)};
    Int c(0);
    for (const Int* e : {&m.a, &m.b, &m.c, &m.d})
        mpz_gcd(c.get_mpz_t(), c.get_mpz_t(), e->get_mpz_t());
    if (c > 1) {
        m.a /= c;
        m.b /= c;
        m.c /= c;
        m.d /= c;
    }
    return m;
}

}  // namespace

QMat2 QMat2::from_text(const std::string& s) {
    auto semi = s.find(';');
    MD_REQUIRE(semi != std::string::npos, ParseError, "matrix text is a,b;c,d");
    auto row = [](const std::string& t) {
        auto comma = t.find(',');
        MD_REQUIRE(comma != std::string::npos, ParseError, "matrix row is a,b");
        return std::pair<Rat, Rat>{parse_rat(t.substr(0, comma)),
                                   parse_rat(t.substr(comma + 1))};
    };
    auto [a, b] = row(s.substr(0, semi));
    auto [c, d] = row(s.substr(semi + 1));
    return {a, b, c, d};
}

std::string QMat2::to_text() const {
    return format_rat(a) + "," + format_rat(b) + ";" + format_rat(c) + "," + format_rat(d);
}

NormalForm normal_form(const QMat2& g) {
    MD_REQUIRE(g.det() > 0, NotInGroup, "normal forms exist for positive determinant only");
    Mat2 m = primitive_int(g);
    // Euclidean row reduction to upper triangular, tracking the left factor.
    Mat2 L = Mat2::identity();
    while (m.c != 0) {
        Int q = floor_div(m.a, m.c);
        Mat2 t{Int(1), -q, Int(0), Int(1)};  // row1 -= q row2
        m = t * m;
        L = t * L;
        Mat2 w{Int(0), Int(-1), Int(1), Int(0)};  // (row1, row2) -> (-row2, row1)
        m = w * m;
        L = w * L;
    }
    if (m.a < 0) {
        Mat2 n{Int(-1), Int(0), Int(0), Int(-1)};
        m = n * m;
        L = n * L;
    }
    MD_INVARIANT(L.det() == 1 && m.a > 0 && m.d > 0, "reduction left SL2 with positive diagonal");

    Rat r(m.a, m.d), s0(m.b, m.d);
    r.canonicalize();
    s0.canonicalize();
    Int n = rat_floor(s0);
    Rat s = s0 - Rat(n);
    // fold the integer translation into gamma: g ~ L^{-1} T^n (z -> r z + s)
    Mat2 inv{L.d, -L.b, -L.c, L.a};
    Mat2 gamma = inv * Mat2{Int(1), n, Int(0), Int(1)};

    // exact action identity: gamma * (r, s; 0, 1) is a positive multiple of g
    Rat pa = Rat(gamma.a) * r, pb = Rat(gamma.a) * s + Rat(gamma.b);
    Rat pc = Rat(gamma.c) * r, pd = Rat(gamma.c) * s + Rat(gamma.d);
    Rat lam;
    if (g.a != 0)
        lam = pa / g.a;
    else if (g.b != 0)
        lam = pb / g.b;
    else if (g.c != 0)
        lam = pc / g.c;
    else
        lam = pd / g.d;
    MD_INVARIANT(lam > 0 && pa == lam * g.a && pb == lam * g.b && pc == lam * g.c &&
                     pd == lam * g.d,
                 "decomposition must reproduce the input action");
    return {gamma, r, s};
}

size_t TranslateFamily::size() const {
    size_t t = 0;
    for (const auto& g : groups) t += g.s.size();
    return t;
}

TranslateFamily TranslateFamily::from_matrices(const std::vector<QMat2>& gs) {
    MD_REQUIRE(!gs.empty(), PreconditionViolated, "a family needs at least one translate");
    std::map<Rat, std::vector<Rat>> by_r;
    for (const auto& g : gs) {
        NormalForm nf = normal_form(g);
        auto& offs = by_r[nf.r];
        MD_REQUIRE(std::find(offs.begin(), offs.end(), nf.s) == offs.end(),
                   NotPairwiseDistinct, "two translates induce the same functional");
        offs.push_back(nf.s);
    }
    TranslateFamily fam;
    for (auto& [r, offs] : by_r) {
        std::sort(offs.begin(), offs.end());
        fam.groups.push_back({r, std::move(offs)});
    }
    return fam;
}

void TranslateFamily::validate() const {
    MD_REQUIRE(!groups.empty(), PreconditionViolated, "a family needs at least one translate");
    for (size_t i = 0; i < groups.size(); ++i) {
        const Group& g = groups[i];
        MD_REQUIRE(g.r > 0, PreconditionViolated, "scaling factors must be positive");
        MD_REQUIRE(i == 0 || groups[i - 1].r < g.r, NotPairwiseDistinct,
                   "group scalings must increase strictly");
        MD_REQUIRE(!g.s.empty(), PreconditionViolated, "a group needs at least one offset");
        for (size_t k = 0; k < g.s.size(); ++k) {
            MD_REQUIRE(g.s[k] >= 0 && g.s[k] < 1, PreconditionViolated,
                       "offsets live in [0,1)");
            MD_REQUIRE(k == 0 || g.s[k - 1] < g.s[k], NotPairwiseDistinct,
                       "offsets must increase strictly");
        }
    }
}

namespace {

const DivisorPoint& top_point(const DivisorInFj& divisor) {
    MD_REQUIRE(!divisor.points.empty(), PreconditionViolated,
               "the divisor is empty; nothing to land on");
    const DivisorPoint& top = divisor.points.back();
    int shared = 0;
    for (const auto& p : divisor.points)
        if (p.im_class == top.im_class) ++shared;
    MD_REQUIRE(shared == 1, PreconditionViolated,
               "top height is shared by several divisor points");
    return top;
}

CBall composite_ball(const WitnessPoint& z, const Rat& r, const Rat& s, long bits) {
    if (z.exact) return CBall::from_qp(qp_add_rat(qp_scale(*z.exact, r), s), bits);
    long zb = z.approx.bits();
    CBall u = cb_mul_rb(z.approx, RBall::from_rat(r, zb));
    return cb_add(u, CBall::from_gauss(GaussRat{s}, zb));
}

bool boxes_overlap(const CBall& x, const CBall& y) { return cb_sub(x, y).contains_zero(); }

std::string describe(const CompositeReport& row) {
    return "(" + std::to_string(row.i) + "," + std::to_string(row.k) +
           ") r=" + format_rat(row.r) + " s=" + format_rat(row.s);
}

// Certified value of f at a composite; the exact point is passed through when
// known so implementations can short-circuit on divisor membership.
using EvalFn = std::function<CBall(const QuadPoint*, const CBall&, long)>;

WitnessCertificate certify_core(const DivisorInFj& divisor, const TranslateFamily& fam,
                                const WitnessPoint& z, const PrecisionCtx& ctx,
                                const EvalFn& value_at) {
    fam.validate();
    const DivisorPoint& top = top_point(divisor);
    const Rat& r1 = fam.groups[0].r;
    const Rat& s11 = fam.groups[0].s[0];

    // z must place the leading composite on the top divisor point
    if (z.exact && top.w.exact) {
        QuadPoint u = qp_add_rat(qp_scale(*z.exact, r1), s11);
        MD_REQUIRE(u == *top.w.exact, PreconditionViolated,
                   "z does not put the leading composite on the top divisor point");
    } else {
        CBall u = composite_ball(z, r1, s11, ctx.bits);
        CBall w = top.w.exact ? CBall::from_qp(*top.w.exact, ctx.bits) : top.w.approx;
        MD_REQUIRE(boxes_overlap(u, w), PreconditionViolated,
                   "z does not put the leading composite on the top divisor point");
    }

    WitnessCertificate cert;
    cert.z = z;
    cert.verdict = WitnessVerdict::CERTIFIED;
    for (size_t gi = 0; gi < fam.groups.size(); ++gi) {
        const auto& grp = fam.groups[gi];
        for (size_t ki = 0; ki < grp.s.size(); ++ki) {
            CompositeReport row;
            row.i = gi + 1;
            row.k = ki + 1;
            row.r = grp.r;
            row.s = grp.s[ki];
            row.point = composite_ball(z, grp.r, grp.s[ki], ctx.bits);

            if (gi == 0 && ki == 0) {
                row.on_divisor = true;
                row.reason = top.multiplicity > 0 ? "lands exactly on the top zero"
                                                  : "lands exactly on the top pole";
                if (!z.exact)
                    row.notes.push_back("top point known only as an enclosure");
                cert.composites.push_back(std::move(row));
                continue;
            }
            row.reason = gi == 0 ? "offset from the top point by s in (0,1), which the "
                                   "divisor condition keeps clear"
                                 : "strictly above every divisor point (r_i > r_1)";

            // exact razor detection: a composite meeting the divisor exactly
            // can never be excluded by a margin
            bool razor = false;
            if (z.exact) {
                QuadPoint u = qp_add_rat(qp_scale(*z.exact, grp.r), grp.s[ki]);
                QuadPoint red = reduce_to_Fj(u).tau;
                for (const auto& p : divisor.points)
                    if (p.w.exact && *p.w.exact == red) razor = true;
            }
            if (razor) {
                row.notes.push_back("composite meets the divisor exactly");
                if (cert.offending.empty()) cert.offending = describe(row);
                cert.verdict = WitnessVerdict::UNDECIDED;
                cert.composites.push_back(std::move(row));
                continue;
            }

            bool ok = false;
            std::string fail;
            for (int esc = 0; esc <= ctx.max_escalations && !ok; ++esc) {
                long bits = ctx.bits << esc;
                try {
                    const QuadPoint* uq = nullptr;
                    QuadPoint uqv;
                    if (z.exact) {
                        uqv = qp_add_rat(qp_scale(*z.exact, grp.r), grp.s[ki]);
                        uq = &uqv;
                    }
                    CBall v = value_at(uq, composite_ball(z, grp.r, grp.s[ki], bits), bits);
                    if (v.is_finite() && v.nonzero()) {
                        double m = cb_abs(v).lower().d();
                        if (m >= ctx.tol) {
                            row.margin = m;
                            ok = true;
                            break;
                        }
                        fail = "margin below the tolerance";
                    } else {
                        fail = "value not certified nonzero and finite";
                    }
                } catch (const error& e) {
                    fail = e.what();
                }
            }
            if (!ok) {
                row.notes.push_back(fail);
                if (cert.offending.empty()) cert.offending = describe(row);
                cert.verdict = WitnessVerdict::UNDECIDED;
            }
            cert.composites.push_back(std::move(row));
        }
    }
    return cert;
}

}  // namespace

WitnessPoint construct_witness(const DivisorInFj& divisor, const TranslateFamily& fam,
                               const PrecisionCtx& ctx) {
    fam.validate();
    const DivisorPoint& top = top_point(divisor);
    const Rat& r1 = fam.groups[0].r;
    const Rat& s11 = fam.groups[0].s[0];
    WitnessPoint z;
    if (top.w.exact) {
        QuadPoint q = qp_scale(qp_add_rat(*top.w.exact, -s11), Rat(1) / r1);
        z.exact = q;
        z.approx = CBall::from_qp(q, ctx.bits);
    } else {
        long bits = std::max(ctx.bits, top.w.approx.bits());
        CBall shifted = cb_sub(top.w.approx, CBall::from_gauss(GaussRat{s11}, bits));
        z.approx = cb_mul_rb(shifted, rb_inv(RBall::from_rat(r1, bits)));
    }
    return z;
}

WitnessCertificate certify_witness(const ModularFunction& f, const TranslateFamily& fam,
                                   const WitnessPoint& z, const PrecisionCtx& ctx) {
    MD_REQUIRE(!f.is_constant(), ConstantFunction, "constant functions have no divisor");
    DivisorInFj divisor = zeros_poles_in_Fj(f, ctx);
    return certify_core(divisor, fam, z, ctx,
                        [&f](const QuadPoint*, const CBall& u, long bits) {
                            return f.eval_at_j(eval_j(u, bits));
                        });
}

WitnessCertificate certify_witness(const B0Element& e, const TranslateFamily& fam,
                                   const WitnessPoint& z, const PrecisionCtx& ctx) {
    B0Divisor dv = b0_divisor(e);
    // factor forms built once; the window covers the product tail comfortably
    // for points at or above the height of F_j's floor
    std::vector<std::pair<PlusForm, long>> factors;
    for (const auto& [d, alpha] : e.exps)
        if (alpha != 0) factors.emplace_back(build_fd((long)d, 1024), (long)alpha);
    auto value_at = [&factors, &ctx](const QuadPoint* uq, const CBall& u, long bits) {
        PrecisionCtx sub{bits, ctx.tol, 0};
        CBall out{RBall::exact_si(1, bits), RBall::exact_si(0, bits)};
        for (const auto& [pf, alpha] : factors) {
            LiftValue lv = uq ? eval_lift(pf, *uq, sub) : eval_lift(pf, u, sub);
            out = cb_mul(out, cb_pow_si(lv.value, alpha));
        }
        return out;
    };
    return certify_core(dv.points, fam, z, ctx, value_at);
}

}  // namespace moddep
