#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <complex>

#include "doctest.h"
#include "moddep/modfunc.hpp"
#include "moddep/poly.hpp"

using namespace moddep;

namespace {

GaussRat gr(long re, long im = 0) { return {Rat(to_int(re)), Rat(to_int(im))}; }

GPoly from_roots(const std::vector<GaussRat>& roots) {
    GPoly f = GPoly::constant(gr(1));
    for (const auto& r : roots) f = gp_mul(f, GPoly::linear_root(r));
    return f;
}

bool ball_contains(const RBall& b, const Rat& v) {
    RBall d = rb_sub(b, RBall::from_rat(v, b.bits()));
    return d.contains_zero();
}

bool ball_contains(const CBall& b, const GaussRat& v) {
    return ball_contains(b.re, v.re) && ball_contains(b.im, v.im);
}

CBall tau_ball(double re, double im, long bits) {
    CBall t{RBall::from_d(re, bits), RBall::from_d(im, bits)};
    return t;
}

double rad_max_d(const CBall& z) { return std::max(z.re.rad.d(), z.im.rad.d()); }

}  // namespace

TEST_CASE("polynomial arithmetic over Q(i)") {
    GPoly f = from_roots({gr(2), gr(0, 1)});          // (X-2)(X-i)
    GPoly g = gp_mul(f, GPoly::linear_root(gr(-3)));  // * (X+3)
    CHECK(g.degree() == 3);
    CHECK(g.eval(gr(2)) == gr(0));
    CHECK(g.eval(gr(0, 1)) == gr(0));
    CHECK(g.eval(gr(-3)) == gr(0));
    CHECK(g.eval(gr(1)) == (gr(1) - gr(2)) * (gr(1) - gr(0, 1)) * (gr(1) + gr(3)));

    auto dm = gp_divmod(g, f);
    CHECK(dm.rem.is_zero());
    CHECK(dm.quot == GPoly::linear_root(gr(-3)));
    auto dm2 = gp_divmod(g, GPoly::linear_root(gr(5)));
    CHECK(dm2.rem.degree() == 0);
    CHECK(dm2.rem.c[0] == g.eval(gr(5)));

    GPoly a = gp_mul(from_roots({gr(1)}), from_roots({gr(0, 1), gr(0, -1)}));
    GPoly b = from_roots({gr(1), gr(-3)});
    GPoly d = gp_gcd(a, b);
    CHECK(d == GPoly::linear_root(gr(1)));  // monic gcd X - 1

    GPoly p = gp_pow(GPoly::linear_root(gr(4)), 3);
    CHECK(p.degree() == 3);
    CHECK(p.eval(gr(4)) == gr(0));
    GPoly dp = gp_derivative(p);  // 3 (X-4)^2
    CHECK(dp.degree() == 2);
    CHECK(dp.eval(gr(5)) == gr(3));
}

TEST_CASE("Yun squarefree decomposition") {
    GPoly f = gp_scale(
        gp_mul(gp_pow(GPoly::linear_root(gr(1)), 2), gp_pow(GPoly::linear_root(gr(-2)), 3)),
        gr(5));
    auto parts = gp_squarefree(f);
    REQUIRE(parts.size() == 3);
    CHECK(parts[0].degree() == 0);
    CHECK(parts[1] == GPoly::linear_root(gr(1)));
    CHECK(parts[2] == GPoly::linear_root(gr(-2)));

    // Reassemble: lc * prod parts[i]^{i+1}
    GPoly back = GPoly::constant(f.lead());
    for (size_t i = 0; i < parts.size(); ++i) back = gp_mul(back, gp_pow(parts[i], i + 1));
    CHECK(back == f);
}

TEST_CASE("certified root isolation") {
    PrecisionCtx ctx;
    std::vector<GaussRat> roots = {gr(2), gr(0, 1), GaussRat(Rat(-1, 2)), gr(7, -3)};
    GPoly f = from_roots(roots);
    auto disks = gp_roots(f, ctx);
    REQUIRE(disks.size() == roots.size());
    for (const auto& r : roots) {
        int hits = 0;
        for (const auto& d : disks)
            if (ball_contains(d.z, r)) ++hits;
        CHECK(hits == 1);
    }
    for (const auto& d : disks) CHECK(d.multiplicity == 1);

    // Multiplicity via the squarefree layer: (X-3)^2 (X+1)
    GPoly g = gp_mul(gp_pow(GPoly::linear_root(gr(3)), 2), GPoly::linear_root(gr(-1)));
    auto gd = gp_roots(g, ctx);
    REQUIRE(gd.size() == 2);
    int seen2 = 0, seen1 = 0;
    for (const auto& d : gd) {
        if (ball_contains(d.z, gr(3))) {
            CHECK(d.multiplicity == 2);
            ++seen2;
        }
        if (ball_contains(d.z, gr(-1))) {
            CHECK(d.multiplicity == 1);
            ++seen1;
        }
    }
    CHECK(seen2 == 1);
    CHECK(seen1 == 1);
}

TEST_CASE("j at the classical points") {
    PrecisionCtx ctx{192, 1e-40, 8};
    struct Known {
        QuadPoint tau;
        long long value;
    };
    std::vector<Known> table = {
        {QuadPoint(Rat(1, 2), Rat(1, 2), 3), 0},        // zeta_6
        {QuadPoint(Rat(0), Rat(1), 1), 1728},           // i
        {QuadPoint(Rat(0), Rat(2), 1), 287496},         // 2i
        {QuadPoint(Rat(0), Rat(1), 2), 8000},           // i sqrt2
        {QuadPoint(Rat(1, 2), Rat(1, 2), 7), -3375},    // (1+i sqrt7)/2
    };
    for (const auto& k : table) {
        CBall v = eval_j(k.tau, ctx);
        CHECK(ball_contains(v, gr(k.value)));
        CHECK(rad_max_d(v) < 1e-40);
    }
}

TEST_CASE("j is SL2-invariant on boxes") {
    long bits = 160;
    std::vector<Mat2> gens = {{1, 1, 0, 1}, {0, -1, 1, 0}, {2, 1, 1, 1}, {1, 0, 2, 1}};
    std::vector<std::pair<double, double>> taus = {
        {0.13, 1.41}, {-0.37, 0.52}, {1.72, 0.33}, {0.5, 0.91}};
    for (auto [re, im] : taus) {
        CBall t = tau_ball(re, im, bits);
        CBall v = eval_j(t, bits);
        for (const auto& g : gens) {
            CBall num = cb_add(cb_mul(CBall{RBall::from_int(g.a, bits), RBall::exact_si(0, bits)}, t),
                               CBall{RBall::from_int(g.b, bits), RBall::exact_si(0, bits)});
            CBall den = cb_add(cb_mul(CBall{RBall::from_int(g.c, bits), RBall::exact_si(0, bits)}, t),
                               CBall{RBall::from_int(g.d, bits), RBall::exact_si(0, bits)});
            CBall v2 = eval_j(cb_div(num, den), bits);
            CHECK(cb_sub(v, v2).contains_zero());
        }
    }
}

TEST_CASE("derivative of j matches a finite difference") {
    long bits = 256;
    CBall t = tau_ball(0.3, 1.2, bits);
    CBall jp = eval_j_prime(t, bits);
    double h = 1e-12;
    CBall th = tau_ball(0.3 + h, 1.2, bits);
    std::complex<double> fd =
        (std::complex<double>(eval_j(th, bits).re.mid.d(), eval_j(th, bits).im.mid.d()) -
         std::complex<double>(eval_j(t, bits).re.mid.d(), eval_j(t, bits).im.mid.d())) /
        h;
    std::complex<double> jd(jp.re.mid.d(), jp.im.mid.d());
    CHECK(std::abs(fd - jd) < 1e-2 * std::abs(jd));
}

TEST_CASE("escalation reaches the requested enclosure width") {
    PrecisionCtx tight{128, 1e-70, 8};
    CBall v = eval_j(QuadPoint(Rat(0), Rat(1), 3), tight);  // i sqrt3, j = 54000
    CHECK(ball_contains(v, gr(54000)));
    CHECK(rad_max_d(v) < 1e-70);

    PrecisionCtx impossible{64, 1e-300, 0};
    CHECK_THROWS_AS(eval_j(QuadPoint(Rat(0), Rat(1), 1), impossible), PrecisionExhausted);
}

TEST_CASE("exact preimages of the thirteen rational j-values") {
    PrecisionCtx ctx;
    auto check_exact = [&](long long jval, const QuadPoint& expect) {
        FjPoint w = inverse_j(GaussRat(Rat(to_int(jval))), ctx);
        REQUIRE(w.exact.has_value());
        CHECK(*w.exact == expect);
    };
    check_exact(0, QuadPoint(Rat(1, 2), Rat(1, 2), 3));
    check_exact(1728, QuadPoint(Rat(0), Rat(1), 1));
    check_exact(287496, QuadPoint(Rat(0), Rat(2), 1));
    check_exact(8000, QuadPoint(Rat(0), Rat(1), 2));
    check_exact(-3375, QuadPoint(Rat(1, 2), Rat(1, 2), 7));
    check_exact(54000, QuadPoint(Rat(0), Rat(1), 3));
    check_exact(-32768, QuadPoint(Rat(1, 2), Rat(1, 2), 11));
    check_exact(-262537412640768000LL, QuadPoint(Rat(1, 2), Rat(1, 2), 163));
}

TEST_CASE("numeric inversion round trips through j") {
    PrecisionCtx ctx;
    std::vector<GaussRat> xs = {gr(1729), gr(-500), gr(1000000), gr(10000, 3000),
                                GaussRat(Rat(1, 2))};
    for (const auto& x : xs) {
        FjPoint w = inverse_j(x, ctx);
        REQUIRE(!w.exact.has_value());
        // fuzzy fundamental domain
        CHECK(std::abs(w.approx.re.mid.d()) < 0.52);
        CHECK(w.approx.im.mid.d() > 0.8);
        // certified inclusion: j over the output box must cover x
        CBall back = eval_j(w.approx, ctx.bits);
        CHECK(ball_contains(back, x));
    }
    // deterministic
    FjPoint a = inverse_j(gr(1729), ctx), b = inverse_j(gr(1729), ctx);
    CHECK(a.approx.str(30) == b.approx.str(30));
}

TEST_CASE("critical values invert by recognition where contraction cannot work") {
    PrecisionCtx small{64, 1e-10, 1};
    CBall x = CBall::from_gauss(gr(1728), 64);
    FjPoint w = inverse_j(x, small);
    REQUIRE(w.exact.has_value());
    CHECK(*w.exact == QuadPoint(Rat(0), Rat(1), 1));
    // widened past integer recognition the numeric route is on its own, and
    // no contraction test succeeds where j' vanishes
    mpfr_set_d(x.re.rad.get(), 0.3, MPFR_RNDU);
    CHECK_THROWS_AS(inverse_j(x, small), InversionFailed);
}

TEST_CASE("function normalization and text round trip") {
    GPoly num = gp_mul(GPoly::linear_root(gr(1728)), GPoly::linear_root(gr(5)));
    GPoly den = gp_scale(gp_mul(GPoly::linear_root(gr(5)), GPoly::linear_root(gr(-2))), gr(3));
    ModularFunction f = ModularFunction::from_parts(num, den);
    CHECK(f.num.degree() == 1);
    CHECK(f.den.degree() == 1);
    CHECK(f.den.lead() == gr(1));  // canonical: monic denominator
    CHECK(f.den.eval(gr(-2)) == gr(0));
    CHECK(f.num.eval(gr(1728)) == gr(0));
    CHECK(!f.is_constant());
    CHECK(ModularFunction::from_poly(GPoly::constant(gr(7))).is_constant());

    std::string text = f.to_text();
    ModularFunction g = ModularFunction::from_text(text);
    CHECK(g.num == f.num);
    CHECK(g.den == f.den);

    ModularFunction h = ModularFunction::from_text("num: -3/2+1/4i 0 1\nden: 1");
    CHECK(h.num.degree() == 2);
    CHECK(h.num.c[0] == GaussRat(Rat(-3, 2), Rat(1, 4)));
    CHECK_THROWS_AS(ModularFunction::from_text("num: 1 2"), ParseError);
    CHECK_THROWS_AS(ModularFunction::from_text("num: x\nden: 1"), ParseError);

    CBall x = CBall::from_gauss(gr(2), 128);
    CBall val = f.eval_at_j(x);
    // f(2) = (2-1728)/(3 (2+2)): the scale of the cancelled factor stays in num
    CHECK(ball_contains(val, (gr(2) - gr(1728)) / (gr(3) * (gr(2) + gr(2)))));
}

TEST_CASE("divisor support of polynomial families in j") {
    PrecisionCtx ctx;
    ModularFunction f = ModularFunction::from_poly(GPoly::linear_root(gr(0)));  // f = j
    DivisorInFj div = zeros_poles_in_Fj(f, ctx);
    REQUIRE(div.points.size() == 1);
    REQUIRE(div.points[0].w.exact.has_value());
    CHECK(*div.points[0].w.exact == QuadPoint(Rat(1, 2), Rat(1, 2), 3));
    CHECK(div.points[0].multiplicity == 1);

    ModularFunction inv = ModularFunction::from_parts(GPoly::constant(gr(1)),
                                                      GPoly::linear_root(gr(0)));
    DivisorInFj divinv = zeros_poles_in_Fj(inv, ctx);
    REQUIRE(divinv.points.size() == 1);
    CHECK(divinv.points[0].multiplicity == -1);

    // (j - 8000)^2 (j + 3375): exact CM points with multiplicities, sorted by height
    GPoly g = gp_mul(gp_pow(GPoly::linear_root(gr(8000)), 2), GPoly::linear_root(gr(-3375)));
    DivisorInFj d2 = zeros_poles_in_Fj(ModularFunction::from_poly(g), ctx);
    REQUIRE(d2.points.size() == 2);
    REQUIRE(d2.points[0].w.exact.has_value());
    REQUIRE(d2.points[1].w.exact.has_value());
    CHECK(*d2.points[0].w.exact == QuadPoint(Rat(1, 2), Rat(1, 2), 7));  // Im ~ 1.322
    CHECK(d2.points[0].multiplicity == 1);
    CHECK(*d2.points[1].w.exact == QuadPoint(Rat(0), Rat(1), 2));  // Im ~ 1.414
    CHECK(d2.points[1].multiplicity == 2);

    int total = 0;
    for (const auto& p : d2.points) total += p.multiplicity;
    CHECK(total == g.degree());
}

TEST_CASE("conjugate j-values pull back to a mirror pair") {
    PrecisionCtx ctx;
    // roots 5000 +- 3000i: real coefficients, conjugate pair off the real axis
    GPoly g = gp_mul(GPoly::linear_root(gr(5000, 3000)), GPoly::linear_root(gr(5000, -3000)));
    for (const auto& c : g.c) CHECK(c.is_real());
    DivisorInFj div = zeros_poles_in_Fj(ModularFunction::from_poly(g), ctx);
    REQUIRE(div.points.size() == 2);
    const auto& p = div.points[0];
    const auto& q = div.points[1];
    CHECK(p.im_class == q.im_class);
    CHECK(!p.w.exact.has_value());
    // mirrored: Re(q) = -Re(p) structurally, identical Im enclosure
    CHECK(rb_add(p.w.approx.re, q.w.approx.re).contains_zero());
    CHECK(rb_sub(p.w.approx.im, q.w.approx.im).contains_zero());
    CHECK(p.w.approx.re.mid.d() != 0.0);
}

TEST_CASE("divisor condition holds for j and for j - 1728") {
    PrecisionCtx ctx;
    auto rep = divisor_condition_check(
        ModularFunction::from_poly(GPoly::linear_root(gr(0))), ctx);
    CHECK(rep.verdict == DivisorVerdict::HOLDS);
    CHECK(!rep.violation.has_value());
    // the two unit-circle inversions of zeta_6 land on endpoints, recorded as notes
    bool endpoint_note = false;
    for (const auto& n : rep.notes) endpoint_note = endpoint_note || n.find("endpoint") != std::string::npos;
    CHECK(endpoint_note);

    auto rep2 = divisor_condition_check(
        ModularFunction::from_poly(GPoly::linear_root(gr(1728))), ctx);
    CHECK(rep2.verdict == DivisorVerdict::HOLDS);

    // two exact points at different heights: nothing to translate
    auto rep3 = divisor_condition_check(
        ModularFunction::from_poly(
            gp_mul(GPoly::linear_root(gr(0)), GPoly::linear_root(gr(1728)))),
        ctx);
    CHECK(rep3.verdict == DivisorVerdict::HOLDS);
}

TEST_CASE("divisor condition fails on an equal-height mirror pair") {
    PrecisionCtx ctx;
    GPoly g = gp_mul(GPoly::linear_root(gr(5000, 3000)), GPoly::linear_root(gr(5000, -3000)));
    auto rep = divisor_condition_check(ModularFunction::from_poly(g), ctx);
    CHECK(rep.verdict == DivisorVerdict::FAILS);
    REQUIRE(rep.violation.has_value());
    const auto& v = *rep.violation;
    CHECK(v.index == 0);
    CHECK(v.gamma.c == 0);  // a horizontal translate
    CHECK(v.gamma.a == 1);
    CHECK(v.s_approx > 0.0);
    CHECK(v.s_approx < 1.0);
}
