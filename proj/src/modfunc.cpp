#include "moddep/modfunc.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <map>
#include <sstream>

namespace moddep {

namespace {

CBall cb_zero(long bits) { return {RBall::exact_si(0, bits), RBall::exact_si(0, bits)}; }

CBall exact_center(const CBall& z) {
    CBall r = z;
    mpfr_set_zero(r.re.rad.get(), 1);
    mpfr_set_zero(r.im.rad.get(), 1);
    return r;
}

std::complex<double> cb_center_d(const CBall& z) {
    return {z.re.mid.d(), z.im.mid.d()};
}

// Zero-centered ball of radius |mag| in both coordinates.
RBall rb_zero_pm(const RBall& mag, long bits) {
    RBall r = RBall::exact_si(0, bits);
    mpfr_set(r.rad.get(), mag.upper().get(), MPFR_RNDU);
    return r;
}

CBall cb_mobius_int(const Mat2& g, const CBall& tau) {
    long bits = tau.bits();
    auto coef = [&](const Int& v) {
        return CBall{RBall::from_int(v, bits), RBall::exact_si(0, bits)};
    };
    CBall num = cb_add(cb_mul(coef(g.a), tau), coef(g.b));
    CBall den = cb_add(cb_mul(coef(g.c), tau), coef(g.d));
    return cb_div(num, den);
}

// sigma_k through N as exact integers.
std::vector<Int> sigma_table_int(long N, int k) {
    std::vector<Int> s((size_t)N + 1, Int(0));
    for (long d = 1; d <= N; ++d) {
        Int dk = pow_int(Int(d), k);
        for (long n = d; n <= N; n += d) s[(size_t)n] += dk;
    }
    return s;
}

// Fast non-certified j for seeding only.
std::complex<double> j_double(std::complex<double> t) {
    for (int k = 0; k < 400; ++k) {
        double n = std::round(t.real());
        t -= n;
        double a = std::norm(t);
        if (a < 1.0)
            t = std::complex<double>(-t.real() / a, t.imag() / a);
        else
            break;
    }
    std::complex<double> q = std::exp(std::complex<double>(0, 2 * M_PI) * t);
    std::complex<double> e4 = 1, e6 = 1, qp = 1;
    for (int n = 1; n <= 48; ++n) {
        double s3 = 0, s5 = 0;
        for (int d = 1; d <= n; ++d)
            if (n % d == 0) {
                s3 += (double)d * d * d;
                s5 += (double)d * d * d * d * d;
            }
        qp *= q;
        e4 += 240.0 * s3 * qp;
        e6 -= 504.0 * s5 * qp;
    }
    std::complex<double> e43 = e4 * e4 * e4;
    return 1728.0 * e43 / (e43 - e6 * e6);
}

// Choose an SL2 word from the exact center, apply it to the ball once, and
// verify the landing zone.  Fuzzy membership is fine: all that matters is a
// certified |q| bound afterwards.
CBall reduce_near_Fj(const CBall& tau0, long bits) {
    CBall tau = tau0;
    for (int attempt = 0; attempt < 4; ++attempt) {
        // Walk the center with exact integer shifts.
        Real re(bits), im(bits), n2(bits), t(bits);
        mpfr_set(re.get(), tau.re.mid.get(), MPFR_RNDN);
        mpfr_set(im.get(), tau.im.mid.get(), MPFR_RNDN);
        MD_REQUIRE(mpfr_sgn(im.get()) > 0, PreconditionViolated,
                   "point not in the upper half plane");
        Mat2 g = Mat2::identity();
        for (int k = 0; k < 20000; ++k) {
            Int sh;
            mpfr_round(t.get(), re.get());
            mpfr_get_z(sh.get_mpz_t(), t.get(), MPFR_RNDN);
            if (sh != 0) {
                mpfr_sub_z(re.get(), re.get(), sh.get_mpz_t(), MPFR_RNDN);
                g = Mat2{1, -sh, 0, 1} * g;
            }
            mpfr_fmma(n2.get(), re.get(), re.get(), im.get(), im.get(), MPFR_RNDN);
            if (mpfr_cmp_d(n2.get(), 0.9995) >= 0) break;
            // S: (re, im) -> (-re, im) / n2
            mpfr_div(re.get(), re.get(), n2.get(), MPFR_RNDN);
            mpfr_neg(re.get(), re.get(), MPFR_RNDN);
            mpfr_div(im.get(), im.get(), n2.get(), MPFR_RNDN);
            g = Mat2{0, -1, 1, 0} * g;
        }
        if (!(g == Mat2::identity())) tau = cb_mobius_int(g, tau);
        double rc = tau.re.mid.d(), ic = tau.im.mid.d();
        double nn = rc * rc + ic * ic;
        if (std::abs(rc) <= 0.5005 && nn >= 0.999) break;
    }
    // Landing certificate: Im bounded below so |q| <= e^{-2 pi 0.84}.
    Real lo = tau.im.lower();
    MD_REQUIRE(mpfr_cmp_d(lo.get(), 0.84) > 0, PrecisionExhausted,
               "reduction could not certify the height of the landing zone");
    return tau;
}

struct JParts {
    CBall e4, e6, delta;
};

JParts eval_eisenstein(const CBall& tau_red, long bits) {
    RBall pi = rb_pi(bits);
    CBall i2pi{RBall::exact_si(0, bits), rb_mul_2si(pi, 1)};
    CBall q = cb_exp(cb_mul(i2pi, tau_red));

    double rho = cb_mag_upper_d(q);
    MD_REQUIRE(rho < 0.0055, PrecisionExhausted, "q too large after reduction");
    long N = (long)std::ceil(2.0 * (double)(bits + 16) / std::log2(1.0 / rho)) + 4;

    auto s3 = sigma_table_int(N, 3);
    auto s5 = sigma_table_int(N, 5);
    auto horner = [&](const std::vector<Int>& c) {
        // sum_{n=1}^{N} c_n q^n
        CBall acc{RBall::from_int(c[(size_t)N], bits), RBall::exact_si(0, bits)};
        for (long n = N - 1; n >= 1; --n)
            acc = cb_add(cb_mul(acc, q),
                         CBall{RBall::from_int(c[(size_t)n], bits), RBall::exact_si(0, bits)});
        return cb_mul(acc, q);
    };

    // Tail majorant: sigma_3(n) <= n^4, sigma_5(n) <= n^6, and n^6 <= rho^{-n/2}
    // once rho <= 1/100, so the dropped tail is below (10/9) rho^{(N+1)/2}.
    RBall rho_ball = cb_abs(q);
    RBall tail_geo = rb_sqrt(rb_pow_si(rho_ball, N + 1));
    tail_geo = rb_mul(tail_geo, RBall::from_rat(Rat(10, 9), bits));
    RBall t4 = rb_mul(tail_geo, RBall::exact_si(240, bits));
    RBall t6 = rb_mul(tail_geo, RBall::exact_si(504, bits));

    CBall one = cb_zero(bits);
    one.re = RBall::exact_si(1, bits);
    CBall e4 = cb_add(one, cb_mul_rb(horner(s3), RBall::exact_si(240, bits)));
    e4 = cb_add(e4, CBall{rb_zero_pm(t4, bits), rb_zero_pm(t4, bits)});
    CBall e6 = cb_sub(one, cb_mul_rb(horner(s5), RBall::exact_si(504, bits)));
    e6 = cb_add(e6, CBall{rb_zero_pm(t6, bits), rb_zero_pm(t6, bits)});

    CBall delta = cb_mul_rb(cb_sub(cb_pow_si(e4, 3), cb_pow_si(e6, 2)),
                            rb_inv(RBall::exact_si(1728, bits)));
    return {std::move(e4), std::move(e6), std::move(delta)};
}

// j-values of the thirteen rational CM points, keyed for exact recognition.
const std::map<long long, long long>& h1_j_table() {
    static const std::map<long long, long long> t = {
        {0, -3},
        {1728, -4},
        {-3375, -7},
        {8000, -8},
        {-32768, -11},
        {54000, -12},
        {287496, -16},
        {-884736, -19},
        {16581375, -28},
        {-12288000, -27},
        {-884736000, -43},
        {-147197952000, -67},
        {-262537412640768000LL, -163},
    };
    return t;
}

std::optional<QuadPoint> recognize_h1(const GaussRat& x) {
    if (!x.is_real() || !is_integer(x.re)) return std::nullopt;
    if (!x.re.get_num().fits_slong_p()) return std::nullopt;
    auto it = h1_j_table().find(x.re.get_num().get_si());
    if (it == h1_j_table().end()) return std::nullopt;
    return form_to_point(enumerate_T(it->second)[0]);
}

}  // namespace

CBall eval_j(const CBall& tau, long bits) {
    CBall red = reduce_near_Fj(tau, bits);
    JParts p = eval_eisenstein(red, bits);
    return cb_div(cb_pow_si(p.e4, 3), p.delta);
}

CBall eval_j_prime(const CBall& tau, long bits) {
    CBall red = reduce_near_Fj(tau, bits);
    JParts p = eval_eisenstein(red, bits);
    CBall v = cb_div(cb_mul(cb_pow_si(p.e4, 2), p.e6), p.delta);
    RBall two_pi = rb_mul_2si(rb_pi(bits), 1);
    // -2 pi i * v
    CBall i2pi{RBall::exact_si(0, bits), two_pi};
    return cb_neg(cb_mul(i2pi, v));
}

CBall eval_j(const QuadPoint& tau, const PrecisionCtx& ctx) {
    Reduction red = reduce_to_Fj(tau);
    long bits = ctx.bits;
    for (int esc = 0; esc <= ctx.max_escalations; ++esc, bits *= 2) {
        CBall v = eval_j(CBall::from_qp(red.tau, bits), bits);
        if (v.is_finite() && v.re.rad.d() < ctx.tol && v.im.rad.d() < ctx.tol) return v;
    }
    throw PrecisionExhausted("eval_j tolerance unreachable within escalation budget");
}

RBall FjPoint::im_ball(long bits) const {
    if (exact) return CBall::from_qp(*exact, bits).im;
    return approx.im;
}

RBall FjPoint::re_ball(long bits) const {
    if (exact) return RBall::from_rat(exact->re, bits);
    return approx.re;
}

ModularFunction ModularFunction::from_parts(GPoly n, GPoly d) {
    MD_REQUIRE(!d.is_zero(), PreconditionViolated, "zero denominator");
    GPoly g = gp_gcd(n, d);
    if (g.degree() > 0) {
        n = gp_divmod(n, g).quot;
        d = gp_divmod(d, g).quot;
    }
    GaussRat lc = d.lead().inv();
    return {gp_scale(n, lc), gp_scale(d, lc)};
}

ModularFunction ModularFunction::from_poly(GPoly n) {
    return from_parts(std::move(n), GPoly::constant(GaussRat(Rat(1))));
}

bool ModularFunction::is_constant() const { return num.degree() <= 0 && den.degree() <= 0; }

CBall ModularFunction::eval_at_j(const CBall& x) const {
    return cb_div(num.eval(x), den.eval(x));
}

std::string ModularFunction::to_text() const {
    std::ostringstream os;
    auto line = [&](const char* tag, const GPoly& p) {
        os << tag << ":";
        if (p.is_zero()) os << " 0";
        for (const auto& c : p.c) os << " " << format_gauss(c);
        os << "\n";
    };
    line("num", num);
    line("den", den);
    return os.str();
}

ModularFunction ModularFunction::from_text(const std::string& text) {
    std::istringstream is(text);
    std::string word;
    GPoly parts[2];
    bool seen[2] = {false, false};
    int cur = -1;
    std::vector<GaussRat> coeffs;
    auto flush = [&]() {
        if (cur >= 0) {
            parts[cur] = GPoly(coeffs);
            seen[cur] = true;
        }
        coeffs.clear();
    };
    while (is >> word) {
        if (word == "num:" || word == "den:") {
            flush();
            cur = (word == "num:") ? 0 : 1;
        } else {
            MD_REQUIRE(cur >= 0, ParseError, "coefficient before num:/den: tag");
            coeffs.push_back(parse_gauss(word));
        }
    }
    flush();
    MD_REQUIRE(seen[0] && seen[1], ParseError, "function text needs num: and den: lines");
    return from_parts(std::move(parts[0]), std::move(parts[1]));
}

namespace {

// Damped Newton from the best seeds; returns an exact-center candidate.
std::optional<CBall> newton_candidate(const CBall& x, long bits) {
    std::complex<double> target = cb_center_d(x);
    std::vector<std::complex<double>> seeds;
    double abs_t = std::abs(target);
    if (abs_t > 2500) {
        // q ~ 1/(x - 744): tau = log(q) / (2 pi i)
        std::complex<double> q = 1.0 / (target - 744.0);
        std::complex<double> t = std::log(q) / std::complex<double>(0, 2 * M_PI);
        if (t.imag() > 0.84) seeds.push_back(t);
    }
    for (double b : {0.87, 0.9, 0.95, 1.0, 1.08, 1.2, 1.35, 1.55, 1.8, 2.1, 2.5, 3.0})
        for (double a = -0.45; a <= 0.51; a += 0.1)
            seeds.push_back({a, b});
    std::vector<double> score(seeds.size());
    for (size_t k = 0; k < seeds.size(); ++k) score[k] = std::abs(j_double(seeds[k]) - target);
    std::vector<size_t> order(seeds.size());
    for (size_t k = 0; k < order.size(); ++k) order[k] = k;
    std::stable_sort(order.begin(), order.end(),
                     [&](size_t u, size_t v) { return score[u] < score[v]; });
    {
        std::vector<std::complex<double>> tmp;
        for (size_t k : order) tmp.push_back(seeds[k]);
        seeds.swap(tmp);
    }
    size_t tries = std::min<size_t>(seeds.size(), 6);
    for (size_t si = 0; si < tries; ++si) {
        CBall tau = cb_zero(bits);
        mpfr_set_d(tau.re.mid.get(), seeds[si].real(), MPFR_RNDN);
        mpfr_set_d(tau.im.mid.get(), seeds[si].imag(), MPFR_RNDN);
        bool ok = false;
        for (int it = 0; it < 200; ++it) {
            CBall jv, jd;
            try {
                jv = eval_j(tau, bits);
                jd = eval_j_prime(tau, bits);
            } catch (const error&) {
                break;
            }
            CBall diff = cb_sub(jv, exact_center(x));
            if (!jd.nonzero()) break;
            CBall step = cb_div(diff, jd);
            double sn = std::abs(cb_center_d(step));
            double tn = std::abs(cb_center_d(tau));
            CBall next = exact_center(cb_sub(tau, step));
            if (next.im.mid.d() <= 0.05) break;
            tau = next;
            if (sn <= std::ldexp(1.0 + tn, -(int)bits + 8)) {
                ok = true;
                break;
            }
        }
        if (!ok) continue;
        return tau;
    }
    return std::nullopt;
}

// Krawczyk containment test on the box tau0 +/- r.
std::optional<CBall> certify_root(const CBall& x, const CBall& tau0, long bits, double r) {
    CBall box = tau0;
    mpfr_set_d(box.re.rad.get(), r, MPFR_RNDU);
    mpfr_set_d(box.im.rad.get(), r, MPFR_RNDU);
    if (mpfr_cmp_d(box.im.lower().get(), 0.05) <= 0) return std::nullopt;
    CBall jv, jpB, jp0;
    try {
        jv = eval_j(tau0, bits);
        jp0 = eval_j_prime(tau0, bits);
        jpB = eval_j_prime(box, bits);
    } catch (const error&) {
        return std::nullopt;
    }
    if (!jp0.nonzero()) return std::nullopt;
    CBall m = cb_inv(exact_center(jp0));
    CBall one = cb_zero(bits);
    one.re = RBall::exact_si(1, bits);
    // Parametrized over the full input ball: containment certifies a preimage
    // inside the box for every value x covers, the true one included.
    CBall c1 = cb_mul(m, cb_sub(jv, x));
    CBall c2 = cb_mul(cb_sub(one, cb_mul(m, jpB)), cb_sub(box, tau0));
    CBall K = cb_sub(c2, c1);  // offset of K(B) from tau0
    RBall rb = RBall::from_d(r, bits);
    if (rb_certainly_lt(rb_abs(K.re), rb) && rb_certainly_lt(rb_abs(K.im), rb)) {
        CBall out = tau0;
        mpfr_set(out.re.rad.get(), rb_abs(K.re).upper().get(), MPFR_RNDU);
        mpfr_set(out.im.rad.get(), rb_abs(K.im).upper().get(), MPFR_RNDU);
        return out;
    }
    return std::nullopt;
}

}  // namespace

FjPoint inverse_j(const CBall& x, const PrecisionCtx& ctx) {
    // j' vanishes at the elliptic points, so the contraction test below can
    // never certify a preimage of 0 or 1728 from a numeric ball.  Tight balls
    // around the thirteen rational one-class values are answered exactly.
    if (x.im.contains_zero()) {
        if (auto n = rb_integer_within(x.re); n && n->fits_slong_p()) {
            if (auto qp = recognize_h1(GaussRat{Rat(*n)}))
                return FjPoint{*qp, CBall::from_qp(*qp, ctx.bits)};
        }
    }
    long bits = ctx.bits;
    for (int esc = 0; esc <= ctx.max_escalations; ++esc, bits *= 2) {
        auto cand = newton_candidate(x, bits);
        if (!cand) continue;
        // Radius ladder around the Newton residual scale.
        double base = std::ldexp(1.0, -(int)bits / 2);
        for (double r : {base, base * 1e6, base * 1e12, 1e-8, 1e-5, 1e-3}) {
            auto cert = certify_root(x, *cand, bits, r);
            if (cert) return FjPoint{std::nullopt, *cert};
        }
    }
    throw InversionFailed("no certified preimage under j within escalation budget");
}

FjPoint inverse_j(const GaussRat& x, const PrecisionCtx& ctx) {
    if (auto qp = recognize_h1(x))
        return FjPoint{*qp, CBall::from_qp(*qp, ctx.bits)};
    return inverse_j(CBall::from_gauss(x, ctx.bits), ctx);
}

namespace {

// points sharing an Im level carry the same class id.
struct ImKey {
    Rat im2m;  // im^2 * m, exact
    friend bool operator<(const ImKey& a, const ImKey& b) { return a.im2m < b.im2m; }
};

int fresh_class(int& counter) { return counter++; }

// Tri-state order: -1 / +1 decided, 0 undecidable.
int cmp_points(const DivisorPoint& a, const DivisorPoint& b, long bits) {
    auto im_cmp = [&]() -> int {
        if (a.w.exact && b.w.exact) {
            Rat ia = a.w.exact->im * a.w.exact->im * to_rat(a.w.exact->m);
            Rat ib = b.w.exact->im * b.w.exact->im * to_rat(b.w.exact->m);
            return ia < ib ? -1 : (ib < ia ? 1 : 0);
        }
        RBall ia = a.w.im_ball(bits), ib = b.w.im_ball(bits);
        if (rb_certainly_lt(ia, ib)) return -1;
        if (rb_certainly_gt(ia, ib)) return 1;
        return 0;
    };
    auto re_cmp = [&]() -> int {
        if (a.w.exact && b.w.exact) {
            return a.w.exact->re < b.w.exact->re ? -1 : (b.w.exact->re < a.w.exact->re ? 1 : 0);
        }
        RBall ra = a.w.re_ball(bits), rbb = b.w.re_ball(bits);
        if (rb_certainly_lt(ra, rbb)) return -1;
        if (rb_certainly_gt(ra, rbb)) return 1;
        return 0;
    };
    if (a.im_class == b.im_class) {
        int c = re_cmp();
        MD_REQUIRE(c != 0, PrecisionExhausted, "could not order equal-height divisor points");
        return c;
    }
    int c = im_cmp();
    if (c != 0) return c;
    int cr = re_cmp();
    MD_REQUIRE(cr != 0, PrecisionExhausted, "could not order divisor points by height");
    return cr;
}

}  // namespace

DivisorInFj zeros_poles_in_Fj(const ModularFunction& f, const PrecisionCtx& ctx) {
    MD_REQUIRE(!f.is_constant(), PreconditionViolated, "constant function has no divisor here");
    std::vector<DivisorPoint> pts;
    int class_counter = 0;

    auto add_side = [&](const GPoly& poly, int sign) {
        if (poly.degree() <= 0) return;
        auto parts = gp_squarefree(poly);
        for (size_t pi = 0; pi < parts.size(); ++pi) {
            const GPoly& part = parts[pi];
            if (part.degree() <= 0) continue;
            int mult = sign * (int)(pi + 1);
            if (part.degree() == 1) {
                GaussRat root = -(part.c[0] / part.c[1]);
                FjPoint w = inverse_j(root, ctx);
                pts.push_back({std::move(w), mult, fresh_class(class_counter)});
                continue;
            }
            // Peel off roots at the rational CM values first: they have exact
            // preimages, and 0 / 1728 would stall the numeric inversion.
            GPoly rest = part;
            for (const auto& [jval, disc] : h1_j_table()) {
                (void)disc;
                GaussRat v{Rat(to_int(jval)), Rat(0)};
                if (rest.degree() >= 1 && rest.eval(v) == GaussRat(Rat(0))) {
                    rest = gp_divmod(rest, GPoly::linear_root(v)).quot;
                    FjPoint w = inverse_j(v, ctx);
                    pts.push_back({std::move(w), mult, fresh_class(class_counter)});
                }
            }
            if (rest.degree() <= 0) continue;
            if (rest.degree() == 1) {
                GaussRat root = -(rest.c[0] / rest.c[1]);
                FjPoint w = inverse_j(root, ctx);
                pts.push_back({std::move(w), mult, fresh_class(class_counter)});
                continue;
            }
            bool real_coeffs = true;
            for (const auto& cc : rest.c) real_coeffs = real_coeffs && cc.is_real();
            auto disks = gp_roots(rest, ctx);
            std::vector<bool> used(disks.size(), false);
            for (size_t i = 0; i < disks.size(); ++i) {
                if (used[i]) continue;
                used[i] = true;
                const CBall& x = disks[i].z;
                if (real_coeffs && x.im.nonzero()) {
                    // Conjugate pairing: the mirror point shares the Im level.
                    size_t partner = disks.size();
                    for (size_t k = 0; k < disks.size(); ++k) {
                        if (used[k]) continue;
                        if (cb_sub(cb_conj(x), disks[k].z).contains_zero()) {
                            partner = k;
                            break;
                        }
                    }
                    MD_INVARIANT(partner < disks.size(),
                                 "conjugate root missing for a real-coefficient factor");
                    used[partner] = true;
                    // Pull back the upper-half root; mirror gives the other.
                    const CBall& xu = rb_certainly_gt(x.im, RBall::exact_si(0, x.bits()))
                                          ? x
                                          : disks[partner].z;
                    FjPoint w = inverse_j(xu, ctx);
                    FjPoint wm;
                    wm.approx = CBall{rb_neg(w.approx.re), w.approx.im};
                    int cls = fresh_class(class_counter);
                    pts.push_back({std::move(w), mult, cls});
                    pts.push_back({std::move(wm), mult, cls});
                } else {
                    FjPoint w = inverse_j(x, ctx);
                    pts.push_back({std::move(w), mult, fresh_class(class_counter)});
                }
            }
        }
    };
    add_side(f.num, +1);
    add_side(f.den, -1);

    // Exact points on one Im level share a class.
    std::map<std::pair<long long, Rat>, int> exact_classes;
    for (auto& p : pts) {
        if (!p.w.exact) continue;
        std::pair<long long, Rat> key{p.w.exact->m, p.w.exact->im};
        auto it = exact_classes.find(key);
        if (it == exact_classes.end())
            exact_classes.emplace(key, p.im_class);
        else
            p.im_class = it->second;
    }

    std::sort(pts.begin(), pts.end(), [&](const DivisorPoint& a, const DivisorPoint& b) {
        return cmp_points(a, b, ctx.bits) < 0;
    });
    return {std::move(pts)};
}

namespace {

Rat frac_unit(const Rat& d, long* shift) {
    Rat s = d - rat_floor(d);
    *shift = -rat_floor(d).get_si();
    return s;
}

}  // namespace

DivisorConditionReport divisor_condition_for_points(DivisorInFj divisor,
                                                    const PrecisionCtx& ctx) {
    DivisorConditionReport rep;
    rep.divisor = std::move(divisor);
    auto& pts = rep.divisor.points;
    MD_REQUIRE(!pts.empty(), PreconditionViolated, "empty divisor support");
    long bits = ctx.bits;

    // Normalize class ids: fresh for unassigned, merged for exact points on
    // one Im level.  Numeric ids from the producer (mirror pairs) survive.
    int next_class = 0;
    for (const auto& p : pts) next_class = std::max(next_class, p.im_class + 1);
    std::map<std::pair<long long, Rat>, int> level_ids;
    for (auto& p : pts) {
        if (p.w.exact) {
            std::pair<long long, Rat> key{p.w.exact->m, p.w.exact->im};
            auto it = level_ids.find(key);
            if (it == level_ids.end()) {
                if (p.im_class < 0) p.im_class = next_class++;
                level_ids.emplace(key, p.im_class);
            } else {
                p.im_class = it->second;
            }
        } else if (p.im_class < 0) {
            p.im_class = next_class++;
        }
    }
    std::sort(pts.begin(), pts.end(), [&](const DivisorPoint& a, const DivisorPoint& b) {
        return cmp_points(a, b, bits) < 0;
    });
    size_t r = pts.size() - 1;
    const DivisorPoint& wr = pts[r];
    bool undecided = false;

    auto report_fail = [&](size_t i, Mat2 gamma, std::optional<Rat> s_exact, double s_approx) {
        rep.verdict = DivisorVerdict::FAILS;
        rep.violation = TranslateViolation{i, gamma, std::move(s_exact), s_approx};
    };

    for (size_t i = 0; i < pts.size() && rep.verdict != DivisorVerdict::FAILS; ++i) {
        const DivisorPoint& wi = pts[i];

        // c = 0: horizontal translates, needs the same Im level.
        bool same_level = false, level_known = true;
        if (wi.im_class == wr.im_class) {
            same_level = true;
        } else if (wi.w.exact && wr.w.exact) {
            same_level = wi.w.exact->m == wr.w.exact->m && wi.w.exact->im == wr.w.exact->im;
        } else {
            RBall di = rb_sub(wi.w.im_ball(bits), wr.w.im_ball(bits));
            if (di.contains_zero()) {
                level_known = false;  // might coincide, cannot certify either way
            }
        }
        if (!level_known && i != r) {
            undecided = true;
            rep.notes.push_back("undecided: Im coincidence test for point " +
                                std::to_string(i));
        } else if (same_level && i != r) {
            if (wi.w.exact && wr.w.exact) {
                Rat d = wi.w.exact->re - wr.w.exact->re;
                long n = 0;
                Rat s = frac_unit(d, &n);
                if (s != 0)
                    report_fail(i, Mat2{1, n, 0, 1}, s, s.get_d());
                else
                    rep.notes.push_back("translate of point " + std::to_string(i) +
                                        " meets only the endpoint");
            } else {
                RBall d = rb_sub(wi.w.re_ball(bits), wr.w.re_ball(bits));
                long n = -(long)std::floor(d.mid.d());
                RBall s = rb_add(d, RBall::exact_si(n, bits));
                if (rb_certainly_gt(s, RBall::exact_si(0, bits)) &&
                    rb_certainly_lt(s, RBall::exact_si(1, bits))) {
                    report_fail(i, Mat2{1, n, 0, 1}, std::nullopt, s.mid.d());
                } else {
                    undecided = true;
                    rep.notes.push_back("undecided: horizontal offset for point " +
                                        std::to_string(i));
                }
            }
        }
        if (rep.verdict == DivisorVerdict::FAILS) break;

        // |c| = 1: gamma = T^n (0 -1; 1 d), needs |w_i + d|^2 Im(w_r) = Im(w_i).
        for (long dd = -1; dd <= 1 && rep.verdict != DivisorVerdict::FAILS; ++dd) {
            if (wi.w.exact && wr.w.exact) {
                const QuadPoint& a = *wi.w.exact;
                const QuadPoint& b = *wr.w.exact;
                QuadPoint ad = qp_add_rat(a, Rat(dd));
                Rat Q = ad.norm2();
                if (a.m != b.m) continue;  // sqrt kernels differ: never equal
                if (a.im != Q * b.im) continue;
                Mat2 g0{0, -1, 1, dd};
                QuadPoint moved = mobius(g0, a);
                Rat off = moved.re - b.re;
                long n = 0;
                Rat s = frac_unit(off, &n);
                if (s != 0)
                    report_fail(i, Mat2{1, n, 0, 1} * g0, s, s.get_d());
                else
                    rep.notes.push_back("inversion translate of point " + std::to_string(i) +
                                        " meets only the endpoint");
            } else {
                CBall a = wi.w.exact ? CBall::from_qp(*wi.w.exact, bits) : wi.w.approx;
                CBall ad = a;
                ad.re = rb_add(ad.re, RBall::exact_si(dd, bits));
                RBall lhs = rb_mul(cb_abs_sq(ad), wr.w.im_ball(bits));
                RBall rhs = wi.w.im_ball(bits);
                if (rb_certainly_lt(lhs, rhs) || rb_certainly_gt(lhs, rhs)) continue;
                undecided = true;
                rep.notes.push_back("undecided: inversion-level test for point " +
                                    std::to_string(i) + " at d=" + std::to_string(dd));
            }
        }
    }

    if (rep.verdict != DivisorVerdict::FAILS)
        rep.verdict = undecided ? DivisorVerdict::UNDECIDED : DivisorVerdict::HOLDS;
    if (rep.verdict == DivisorVerdict::HOLDS)
        rep.notes.push_back("all translate candidates excluded");
    return rep;
}

DivisorConditionReport divisor_condition_check(const ModularFunction& f,
                                               const PrecisionCtx& ctx) {
    return divisor_condition_for_points(zeros_poles_in_Fj(f, ctx), ctx);
}

}  // namespace moddep
