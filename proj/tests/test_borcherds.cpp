#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "moddep/borcherds.hpp"

using namespace moddep;

TEST_CASE("basis form at d = 0 is the theta series") {
    PlusForm f0 = build_fd(0, 60);
    CHECK(f0.principal_index() == 0);
    for (long n = 0; n <= 60; ++n) {
        long r = 0;
        for (long k = 0; k * k <= n; ++k)
            if (k * k == n) r = k == 0 ? 1 : 2;
        CHECK(f0.a(n) == r);
    }
}

TEST_CASE("basis forms reproduce the classical coefficient tables") {
    // First coefficients of the d = 3, 4, 7, 8 basis forms, as tabulated in
    // the traces-of-singular-moduli literature.
    PlusForm f3 = build_fd(3, 40);
    CHECK(f3.a(-3) == 1);
    CHECK(f3.a(0) == 0);
    CHECK(f3.a(1) == -248);
    CHECK(f3.a(4) == 26752);
    CHECK(f3.a(5) == -85995);
    CHECK(f3.a(8) == 1707264);
    CHECK(f3.a(9) == -4096248);
    CHECK(f3.a(12) == 44330496);

    PlusForm f4 = build_fd(4, 40);
    CHECK(f4.a(-4) == 1);
    CHECK(f4.a(1) == 492);
    CHECK(f4.a(4) == 143376);
    CHECK(f4.a(5) == 565760);
    CHECK(f4.a(8) == 18473000);
    CHECK(f4.a(9) == 51180012);

    // Duality with the weight-3/2 form q^-1 - 2 + 248 q^3 - 492 q^4 + 4119 q^7
    // - 7256 q^8 + ... pins a(1) across the whole range.
    CHECK(build_fd(7, 10).a(1) == -4119);
    CHECK(build_fd(8, 10).a(1) == 7256);

    // Plus-space support: nothing at n = 2, 3 mod 4.
    for (long n = 1; n <= 40; ++n)
        if (n % 4 == 2 || n % 4 == 3) {
            CHECK(f3.a(n) == 0);
            CHECK(f4.a(n) == 0);
        }
}

TEST_CASE("rejects indices outside the basis index set") {
    CHECK_THROWS_AS(build_fd(1, 40), NotInBasisIndexSet);
    CHECK_THROWS_AS(build_fd(2, 40), NotInBasisIndexSet);
    CHECK_THROWS_AS(build_fd(6, 40), NotInBasisIndexSet);
    CHECK_THROWS_AS(build_fd(-3, 40), NotInBasisIndexSet);
}

TEST_CASE("principal-part weights are Hurwitz numbers") {
    CHECK(lift_h(build_fd(0, 4)) == Rat(-1, 12));
    CHECK(lift_h(build_fd(3, 4)) == Rat(1, 3));
    CHECK(lift_h(build_fd(4, 4)) == Rat(1, 2));
    CHECK(lift_h(build_fd(7, 4)) == Rat(1));
    CHECK(lift_h(build_fd(8, 4)) == Rat(1));
    // Additivity across a combination with a nontrivial constant term.
    PlusForm f = pf_add(pf_scale(build_fd(0, 4), Int(12)), pf_scale(build_fd(3, 4), Int(-2)));
    CHECK(lift_h(f) == Rat(-1) - Rat(2, 3));
}

TEST_CASE("twelve copies of theta lift to the discriminant function") {
    // h = 12 H(0) = -1, so the full lift is q prod (1 - q^n)^24: an
    // independent eta-quotient oracle for both parts of the lift.
    PlusForm f = pf_scale(build_fd(0, 500), Int(12));
    LiftResult L = lift(f, 20);
    CHECK(L.h == Rat(-1));
    LaurentSeries full = L.product_part.shift(1);
    LaurentSeries delta = qseries::delta_series(20);
    for (long n = 1; n <= 20; ++n) CHECK(full.coeff_or_zero(n) == delta.coeff_or_zero(n));
}

TEST_CASE("cube of the d = 3 lift is the j function") {
    PlusForm f3 = build_fd(3, 440);
    LiftResult L = lift(f3, 20);
    CHECK(L.h == Rat(1, 3));
    LaurentSeries psi3 = L.product_part.pow_int(3).shift(-1);
    LaurentSeries j = qseries::j_series(18);
    for (long n = -1; n <= 18; ++n) CHECK(psi3.coeff_or_zero(n) == j.coeff_or_zero(n));
}

TEST_CASE("lift is a homomorphism into products") {
    long N = 12;
    PlusForm f3 = build_fd(3, N * N);
    PlusForm f4 = build_fd(4, N * N);
    PlusForm f8 = build_fd(8, N * N);
    PlusForm sum = pf_add(pf_add(pf_scale(f3, Int(2)), pf_scale(f4, Int(-1))), f8);
    LiftResult Ls = lift(sum, N);
    CHECK(Ls.h == Rat(2, 3) - Rat(1, 2) + Rat(1));
    LaurentSeries prod = lift(f3, N).product_part.pow_int(2) *
                         lift(f4, N).product_part.inverse() * lift(f8, N).product_part;
    for (long n = 0; n <= N - 1; ++n)
        CHECK(Ls.product_part.coeff_or_zero(n) == prod.coeff_or_zero(n));
}

TEST_CASE("product exponents are recoverable and integral") {
    PlusForm f3 = build_fd(3, 120);
    LiftResult L = lift(f3, 10);
    auto es = qseries::peel_product_exponents(L.product_part, 8);
    for (long n = 1; n <= 8; ++n) CHECK(es[(size_t)(n - 1)] == f3.a(n * n));
}

TEST_CASE("window guard on the lift") {
    PlusForm f3 = build_fd(3, 99);  // needs 100 coefficients for order 10
    CHECK_THROWS_AS(lift(f3, 10), WindowTooSmall);
    CHECK_THROWS_AS(lift(f3, 0), PreconditionViolated);
}

TEST_CASE("lift divisor folds square multiples into one class") {
    PlusForm f3 = build_fd(3, 20);
    auto dv3 = lift_divisor(f3, -20, -1);
    CHECK(dv3.at(-3) == 1);
    for (auto [delta, m] : dv3)
        if (delta != -3) CHECK(m == 0);

    // d = 12 contributes at -12 directly and at -3 through n = 2.
    PlusForm f12 = build_fd(12, 60);
    auto dv12 = lift_divisor(f12, -12, -1);
    CHECK(dv12.at(-12) == 1);
    CHECK(dv12.at(-3) == 1);
    for (auto [delta, m] : dv12)
        if (delta != -12 && delta != -3) CHECK(m == 0);

    // Combinations add multiplicities.
    PlusForm f = pf_add(pf_scale(build_fd(4, 20), Int(2)), f3);
    auto dv = lift_divisor(f, -8, -1);
    CHECK(dv.at(-3) == 1);
    CHECK(dv.at(-4) == 2);
}

TEST_CASE("divisor of a product element lists exact CM points") {
    B0Element e;
    e.exps = {{32, 1}};
    B0Divisor d = b0_divisor(e);
    CHECK(d.mult.at(-32) == 1);
    CHECK(d.mult.at(-8) == 1);
    CHECK(d.mult.size() == 2);
    // |T_-32| = 2 and |T_-8| = 1 exact points, each of multiplicity one.
    CHECK(d.points.points.size() == 3);
    for (const auto& p : d.points.points) {
        CHECK(p.multiplicity == 1);
        CHECK(p.w.exact.has_value());
    }
}

TEST_CASE("divisor condition certificate for product elements") {
    PrecisionCtx ctx{128, 1e-20, 8};

    B0Element e1;
    e1.exps = {{3, 1}};
    B0Report r1 = divisor_condition_b0(e1, ctx);
    CHECK(r1.dk == 3);
    CHECK(r1.tau_star == QuadPoint(Rat(1, 2), Rat(1, 2), 3));
    CHECK(r1.generic.verdict == DivisorVerdict::HOLDS);

    B0Element e2;
    e2.exps = {{4, -2}, {7, 1}};
    B0Report r2 = divisor_condition_b0(e2, ctx);
    CHECK(r2.dk == 7);
    CHECK(r2.tau_star == QuadPoint(Rat(1, 2), Rat(1, 2), 7));
    CHECK(!r2.dominance.empty());
    CHECK(r2.generic.verdict == DivisorVerdict::HOLDS);

    B0Element empty;
    CHECK_THROWS_AS(divisor_condition_b0(empty, ctx), ConstantFunction);
}

TEST_CASE("product evaluation: exact routes") {
    PrecisionCtx ctx{200, 1e-20, 8};
    PlusForm zero;
    LiftValue v1 = eval_lift(zero, QuadPoint(Rat(0), Rat(2), 1), ctx);
    CHECK(!v1.heuristic);
    CHECK(v1.value.re.mid.str(8).substr(0, 1) == "1");
    CHECK(!v1.value.contains_zero());

    // i lies in the zero divisor of the d = 4 lift: exact zero, no truncation.
    PlusForm f4 = build_fd(4, 420);
    LiftValue v2 = eval_lift(f4, QuadPoint(Rat(0), Rat(1), 1), ctx);
    CHECK(!v2.heuristic);
    CHECK(v2.terms == 0);
    CHECK(cb_mag_upper_d(v2.value) == 0.0);

    // Flipping the sign turns the zero into a pole.
    CHECK_THROWS_AS(eval_lift(pf_scale(f4, Int(-1)), QuadPoint(Rat(0), Rat(1), 1), ctx),
                    PoleAtSpecialPoint);

    CHECK_THROWS_AS(eval_lift(f4, QuadPoint(Rat(0), Rat(-2), 1), ctx), PreconditionViolated);
}

TEST_CASE("product evaluation: truncation doubling off the divisor") {
    PrecisionCtx ctx{200, 1e-20, 8};
    PlusForm f4 = build_fd(4, 420);
    LiftValue v = eval_lift(f4, QuadPoint(Rat(0), Rat(19, 10), 1), ctx);
    CHECK(v.heuristic);
    CHECK(v.terms >= 8);
    CHECK(rb_certainly_lt(cb_abs(v.value), RBall::from_d(390.0, 200)));
    CHECK(rb_certainly_gt(cb_abs(v.value), RBall::from_d(389.8, 200)));

    // Psi(f_3)^3 = j certified numerically: cube the value at 2i.
    PlusForm f3 = build_fd(3, 440);
    LiftValue p = eval_lift(f3, QuadPoint(Rat(0), Rat(2), 1), ctx);
    CBall cube = cb_pow_si(p.value, 3);
    auto nearest = rb_integer_within(cube.re, 1e-30);
    REQUIRE(nearest.has_value());
    CHECK(*nearest == 287496);
    CHECK(cube.im.contains_zero());
    CHECK(cube.im.mag_upper_d() < 1e-30);

    // A window too small for even the first doubling refuses to answer.
    PlusForm small = build_fd(3, 48);
    CHECK_THROWS_AS(eval_lift(small, QuadPoint(Rat(0), Rat(2), 1), ctx), NotConverged);
}

TEST_CASE("plus form text round trip") {
    PlusForm f3 = build_fd(3, 25);
    PlusForm g = PlusForm::from_text(f3.to_text());
    CHECK(g.order == f3.order);
    CHECK(g.coeffs == f3.coeffs);

    PlusForm h = PlusForm::from_text("order 8\n-3 1\n1 -248\n4 26752\n5 -85995\n8 1707264\n");
    CHECK(h.order == 8);
    CHECK(h.a(-3) == 1);
    CHECK(h.a(4) == 26752);
    CHECK_THROWS_AS(h.a(9), WindowTooSmall);

    CHECK_THROWS_AS(PlusForm::from_text("order x\n1 2\n"), ParseError);
    CHECK_THROWS_AS(PlusForm::from_text("1 two\n"), ParseError);
}

TEST_CASE("product element text round trip") {
    B0Element e;
    e.exps = {{3, 1}, {7, -2}, {12, 5}};
    CHECK(e.to_text() == "3:1,7:-2,12:5");
    B0Element g = B0Element::from_text("3:1,7:-2,12:5");
    CHECK(g.exps == e.exps);
    CHECK(B0Element::from_text("").exps.empty());
    CHECK_THROWS_AS(B0Element::from_text("3:"), ParseError);
    // Index validity is a property of the product space, not the text format.
    CHECK_THROWS_AS(b0_divisor(B0Element::from_text("5:1")), NotInBasisIndexSet);
}
