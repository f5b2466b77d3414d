#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <vector>

#include "doctest.h"
#include "moddep/specialpoints.hpp"

using namespace moddep;

namespace {

GaussRat gr(long long re, long long im = 0) { return {Rat(to_int(re)), Rat(to_int(im))}; }

bool ball_contains(const RBall& b, const Rat& v) {
    return rb_sub(b, RBall::from_rat(v, b.bits())).contains_zero();
}

bool ball_contains(const CBall& b, const GaussRat& v) {
    return ball_contains(b.re, v.re) && ball_contains(b.im, v.im);
}

bool disjoint(const RBall& x, const RBall& y) {
    Real xu = x.upper(), xl = x.lower(), yu = y.upper(), yl = y.lower();
    return mpfr_cmp(xu.get(), yl.get()) < 0 || mpfr_cmp(yu.get(), xl.get()) < 0;
}

bool disjoint(const CBall& z, const CBall& w) {
    return disjoint(z.re, w.re) || disjoint(z.im, w.im);
}

ModularFunction fn_j() { return ModularFunction::from_poly(GPoly::linear_root(gr(0))); }

PrecisionCtx ctx_default{128, 1e-30, 8};

PrecisionCtx at_prec(long bits) { return {bits, 1e-30, 8}; }

}  // namespace

TEST_CASE("singular moduli of the smallest discriminants") {
    auto s3 = singular_moduli(-3, ctx_default);
    REQUIRE(s3.size() == 1);
    CHECK(s3[0].disc == -3);
    CHECK(ball_contains(s3[0].value, gr(0)));
    CHECK(s3[0].value.re.rad.d() < 1e-25);

    auto s4 = singular_moduli(-4, ctx_default);
    REQUIRE(s4.size() == 1);
    CHECK(s4[0].form == QuadForm{1, 0, 1});
    CHECK(ball_contains(s4[0].value, gr(1728)));

    // two real conjugates: both forms are their own mirror class
    auto s15 = singular_moduli(-15, ctx_default);
    REQUIRE(s15.size() == 2);
    for (const auto& s : s15) CHECK(s.value.im.contains_zero());
    CHECK(disjoint(s15[0].value, s15[1].value));

    // h = 3: one real value, one genuinely complex conjugate pair
    auto s23 = singular_moduli(-23, ctx_default);
    REQUIRE(s23.size() == 3);
    int real_count = 0, complex_count = 0;
    for (const auto& s : s23) {
        if (s.value.im.contains_zero())
            ++real_count;
        else
            ++complex_count;
    }
    CHECK(real_count == 1);
    CHECK(complex_count == 2);
}

TEST_CASE("singular moduli are pairwise disjoint with one value per form") {
    for (long long d = 3; d <= 40; ++d) {
        if (!is_valid_disc(-d)) continue;
        auto sm = singular_moduli(-d, ctx_default);
        CHECK((long long)sm.size() == class_number(-d));
        for (size_t i = 0; i < sm.size(); ++i)
            for (size_t k = i + 1; k < sm.size(); ++k)
                CHECK(disjoint(sm[i].value, sm[k].value));
    }
}

TEST_CASE("class polynomials of the one-class discriminants") {
    // every discriminant with a single reduced form gives X - (that j-value)
    const std::vector<std::pair<long long, long long>> table = {
        {-3, 0},          {-4, 1728},         {-7, -3375},
        {-8, 8000},       {-11, -32768},      {-12, 54000},
        {-16, 287496},    {-19, -884736},     {-27, -12288000},
        {-28, 16581375},  {-43, -884736000},  {-67, -147197952000},
    };
    for (auto [d, jv] : table) {
        auto H = hilbert_class_poly(d, ctx_default);
        REQUIRE(H.size() == 2);
        CHECK(H[1] == 1);
        CHECK(H[0] == -to_int(jv));
    }
    auto H163 = hilbert_class_poly(-163, ctx_default);
    REQUIRE(H163.size() == 2);
    CHECK(H163[0] == Int("262537412640768000"));
}

TEST_CASE("class polynomial of discriminant -15") {
    auto H = hilbert_class_poly(-15, ctx_default);
    REQUIRE(H.size() == 3);
    CHECK(H[2] == 1);
    CHECK(H[1] == 191025);
    CHECK(H[0] == Int("-121287375"));
}

TEST_CASE("class polynomials: degree, stability, and Vieta consistency") {
    for (long long d = 3; d <= 100; ++d) {
        if (!is_valid_disc(-d)) continue;
        auto H = hilbert_class_poly(-d, at_prec(200));
        CHECK((long long)H.size() - 1 == class_number(-d));
        CHECK(H.back() == 1);
        auto H2 = hilbert_class_poly(-d, at_prec(400));
        CHECK(H == H2);
    }
    // sum and product of the moduli against the top/bottom coefficients
    for (long long d : {15, 20, 23, 31}) {
        auto sm = singular_moduli(-d, ctx_default);
        auto H = hilbert_class_poly(-d, ctx_default);
        size_t h = sm.size();
        REQUIRE(H.size() == h + 1);
        CBall sum{RBall::exact_si(0, 256), RBall::exact_si(0, 256)};
        CBall prod{RBall::exact_si(1, 256), RBall::exact_si(0, 256)};
        for (const auto& s : sm) {
            sum = cb_add(sum, s.value);
            prod = cb_mul(prod, s.value);
        }
        CHECK(ball_contains(sum, GaussRat(-Rat(H[h - 1]))));
        Rat c0 = (h % 2 == 0) ? Rat(H[0]) : -Rat(H[0]);
        CHECK(ball_contains(prod, GaussRat(c0)));
    }
}

TEST_CASE("class polynomials of one-class discriminants evaluate to zero on j") {
    // H(-d) applied to the modulus must vanish; sanity on ball arithmetic
    auto sm = singular_moduli(-20, ctx_default);
    auto H = hilbert_class_poly(-20, ctx_default);
    GPoly Hp = GPoly::zero();
    for (const auto& c : H) Hp.c.push_back(GaussRat(Rat(c)));
    for (const auto& s : sm) {
        CBall v = Hp.eval(s.value);
        CHECK(v.re.contains_zero());
        CHECK(v.im.contains_zero());
    }
}

TEST_CASE("special fibers of the identity function") {
    auto fib = f_special_points(fn_j(), -4, ctx_default);
    REQUIRE(fib.points.size() == 1);
    CHECK(fib.poles.empty());
    const auto& p = fib.points[0];
    CHECK(ball_contains(p.value, gr(1728)));
    CHECK(p.disc == -4);
    REQUIRE(p.preimages.size() == 1);
    CHECK(p.preimages[0].form == QuadForm{1, 0, 1});

    // fiber values of j are exactly the singular moduli, one preimage each
    for (long long d : {3, 15, 23}) {
        auto f2 = f_special_points(fn_j(), -d, ctx_default);
        auto sm = singular_moduli(-d, ctx_default);
        REQUIRE(f2.points.size() == sm.size());
        CHECK(f2.poles.empty());
        for (const auto& pt : f2.points) {
            CHECK(pt.disc == -d);
            CHECK(pt.preimages.size() == 1);
            size_t overlaps = 0;
            for (const auto& s : sm)
                if (!disjoint(pt.value, s.value)) ++overlaps;
            CHECK(overlaps == 1);
        }
    }
}

TEST_CASE("special fibers of scaled and reciprocal functions") {
    ModularFunction f =
        ModularFunction::from_parts(GPoly::linear_root(gr(0)), GPoly::constant(gr(1728)));
    auto fib = f_special_points(f, -4, ctx_default);
    REQUIRE(fib.points.size() == 1);
    CHECK(ball_contains(fib.points[0].value, gr(1)));
    CHECK(fib.points[0].disc == -4);

    ModularFunction inv =
        ModularFunction::from_parts(GPoly::constant(gr(1)), GPoly::linear_root(gr(0)));
    auto fib3 = f_special_points(inv, -3, ctx_default);
    CHECK(fib3.points.empty());
    REQUIRE(fib3.poles.size() == 1);
    CHECK(fib3.poles[0].disc == -3);

    // a pole close to (but not at) a modulus must not be misclassified
    ModularFunction part = ModularFunction::from_parts(
        GPoly::constant(gr(1)), GPoly::linear_root(gr(632)));
    auto fib15 = f_special_points(part, -15, ctx_default);
    CHECK(fib15.points.size() == 2);
    CHECK(fib15.poles.empty());
}

TEST_CASE("fiber collisions are detected exactly") {
    // H(-15)(j) sends both discriminant -15 moduli to zero: one point, two preimages
    GPoly H15{{gr(-121287375), gr(191025), gr(1)}};
    ModularFunction f = ModularFunction::from_poly(H15);
    auto fib = f_special_points(f, -15, ctx_default);
    REQUIRE(fib.points.size() == 1);
    const auto& p = fib.points[0];
    CHECK(ball_contains(p.value, gr(0)));
    CHECK(p.preimages.size() == 2);
    CHECK(p.disc == -15);
}

TEST_CASE("fiber values reached at a smaller discriminant are annotated with it") {
    // j (j - 1728) vanishes on the -3 fiber as well, so its zero on the -4
    // fiber carries the smaller discriminant
    ModularFunction f = ModularFunction::from_poly(
        gp_mul(GPoly::linear_root(gr(0)), GPoly::linear_root(gr(1728))));
    auto fib = f_special_points(f, -4, ctx_default);
    REQUIRE(fib.points.size() == 1);
    CHECK(ball_contains(fib.points[0].value, gr(0)));
    CHECK(fib.points[0].disc == -3);
}

TEST_CASE("constant functions are rejected") {
    ModularFunction c = ModularFunction::from_poly(GPoly::constant(gr(5)));
    CHECK_THROWS_AS(f_special_points(c, -3, ctx_default), ConstantFunction);
    FSpecialPoint dummy;
    CHECK_THROWS_AS(conjugate_orbit(c, dummy, ctx_default), ConstantFunction);
}

TEST_CASE("conjugate orbits enumerate the full candidate set") {
    auto fib15 = f_special_points(fn_j(), -15, ctx_default);
    REQUIRE(fib15.points.size() == 2);
    auto sm = singular_moduli(-15, ctx_default);
    for (const auto& p : fib15.points) {
        auto orbit = conjugate_orbit(fn_j(), p, ctx_default);
        REQUIRE(orbit.size() == 2);
        // the point itself appears, and each orbit member meets a modulus
        size_t self = 0;
        for (const auto& v : orbit) {
            if (!disjoint(v, p.value)) ++self;
            size_t m = 0;
            for (const auto& s : sm)
                if (!disjoint(v, s.value)) ++m;
            CHECK(m == 1);
        }
        CHECK(self >= 1);
    }

    auto fib4 = f_special_points(fn_j(), -4, ctx_default);
    auto o4 = conjugate_orbit(fn_j(), fib4.points[0], ctx_default);
    REQUIRE(o4.size() == 1);
    CHECK(ball_contains(o4[0], gr(1728)));

    // collision case: both candidate conjugates of the collapsed value are ~0
    GPoly H15{{gr(-121287375), gr(191025), gr(1)}};
    ModularFunction f = ModularFunction::from_poly(H15);
    auto fibc = f_special_points(f, -15, ctx_default);
    auto oc = conjugate_orbit(f, fibc.points[0], ctx_default);
    REQUIRE(oc.size() == 2);
    for (const auto& v : oc) CHECK(ball_contains(v, gr(0)));
}

TEST_CASE("modular relation: reflexive, 2-isogeny, and certified absence") {
    PrecisionCtx ctx{128, 1e-30, 8};
    CBall i{RBall::exact_si(0, 256), RBall::exact_si(1, 256)};
    CBall two_i{RBall::exact_si(0, 256), RBall::exact_si(2, 256)};
    CBall ji = eval_j(i, 256), j2i = eval_j(two_i, 256);

    auto self = modular_relation(j2i, j2i, 3, ctx);
    REQUIRE(self.has_value());
    CHECK(self->n == 1);
    CHECK(self->g.det() == 1);

    auto fwd = modular_relation(ji, j2i, 5, ctx);
    REQUIRE(fwd.has_value());
    CHECK(fwd->n == 2);
    CHECK(fwd->g.det() == 2);
    auto rev = modular_relation(j2i, ji, 5, ctx);
    REQUIRE(rev.has_value());
    CHECK(rev->n == 2);

    // no cyclic relation of degree <= 5 between these; disjointness at every
    // coset is a certificate, not a timeout
    QuadPoint p163{Rat(1, 2), Rat(1, 2), 163};
    CBall j163 = eval_j(p163, ctx);
    CHECK_FALSE(modular_relation(j2i, j163, 5, ctx).has_value());

    CHECK_THROWS_AS(modular_relation(ji, j2i, 0, ctx), PreconditionViolated);
}

TEST_CASE("modular relation witnesses replay and the relation is symmetric") {
    PrecisionCtx ctx{128, 1e-30, 8};
    // CM points with cyclic isogenies of composite degree: i and n*i
    for (long n : {2, 3, 4}) {
        CBall i{RBall::exact_si(0, 256), RBall::exact_si(1, 256)};
        CBall ni{RBall::exact_si(0, 256), RBall::exact_si(n, 256)};
        CBall a = eval_j(i, 256), b = eval_j(ni, 256);
        auto w = modular_relation(a, b, 6, ctx);
        REQUIRE(w.has_value());
        CHECK(w->n == n);
        CHECK(w->g.det() == n);
        auto back = modular_relation(b, a, 6, ctx);
        REQUIRE(back.has_value());
        CHECK(back->n == n);

        // replay: the witness matrix really moves a preimage of a onto b
        FjPoint t1 = inverse_j(a, ctx);
        CBall tau = t1.exact ? CBall::from_qp(*t1.exact, 256) : t1.approx;
        CBall num = cb_add(cb_mul_rb(tau, RBall::from_int(w->g.a, 256)),
                           CBall{RBall::from_int(w->g.b, 256), RBall::exact_si(0, 256)});
        CBall moved = cb_mul_rb(num, rb_inv(RBall::from_int(w->g.d, 256)));
        CHECK_FALSE(disjoint(eval_j(moved, 256), b));
    }
}
