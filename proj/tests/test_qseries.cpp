#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "moddep/laurent.hpp"

using namespace moddep;
using namespace moddep::qseries;

TEST_CASE("series window bookkeeping") {
    // Product order: never emit coefficients the inputs cannot determine.
    LaurentSeries j = j_series(10);     // lead -1, order 10
    LaurentSeries d = delta_series(8);  // lead 1, order 8
    LaurentSeries p = j * d;
    CHECK(p.lead().value() == 0);
    // order = min(10 + 1, 8 + (-1)) = 7
    CHECK(p.order() == 7);
    // j * Delta = E4^3 exactly in the common window.
    LaurentSeries e43 = E4_series(7).pow_int(3);
    for (long n = 0; n <= 7; ++n) CHECK(p.coeff_or_zero(n) == e43.coeff_or_zero(n));

    // j/Delta: relative windows are R_j = 11, R_Delta = 7, so lead -2, order -2+7 = 5.
    LaurentSeries q = j / d;
    CHECK(q.lead().value() == -2);
    CHECK(q.order() == 5);
    // Round trip through the inverse keeps the relative window.
    LaurentSeries r = (j / d) * d;
    for (long n = r.lo(); n <= r.order(); ++n)
        CHECK(r.coeff_or_zero(n) == j.coeff_or_zero(n));
}

TEST_CASE("j series: two independent routes agree") {
    long N = 30;
    LaurentSeries j1 = j_series(N);
    // Independent route: E6^2/Delta + 1728 (one extra guard term for the window).
    LaurentSeries j2 =
        E6_series(N + 2).pow_int(2) / delta_series(N + 2) + LaurentSeries::constant(Rat(1728), N);
    CHECK(j1.coeff(-1) == 1);
    CHECK(j1.coeff(0) == 744);
    CHECK(j1.coeff(1) == 196884);
    CHECK(j1.coeff(2) == 21493760);
    CHECK(j1.coeff(3) == 864299970);
    for (long n = -1; n <= N; ++n) CHECK(j1.coeff(n) == j2.coeff(n));
}

TEST_CASE("eta quotients") {
    // Delta = q prod (1-q^n)^24.
    LaurentSeries d = eta_quotient({{1, 24}}, 12);
    CHECK(d.lead().value() == 1);
    CHECK(d.coeff(1) == 1);
    CHECK(d.coeff(2) == -24);
    CHECK(d.coeff(3) == 252);
    CHECK(d.coeff(4) == -1472);
    CHECK(d.coeff(5) == 4830);
    CHECK(d.coeff(6) == -6048);

    // Gamma0(4) Hauptmodul x = eta(z)^8/eta(4z)^8 = q^{-1}(1 - 8q + 20q^2 - ...).
    LaurentSeries x = eta_quotient({{1, 8}, {4, -8}}, 6);
    CHECK(x.offset() == 0);
    CHECK(x.lead().value() == -1);
    CHECK(x.coeff(-1) == 1);
    CHECK(x.coeff(0) == -8);
    CHECK(x.coeff(1) == 20);
    CHECK(x.coeff(2) == 0);
    CHECK(x.coeff(3) == -62);

    // eta itself carries the fractional offset q^{1/24}.
    LaurentSeries eta = eta_quotient({{1, 1}}, 8);
    CHECK(eta.offset() == Rat(1, 24));
    CHECK(eta.coeff(0) == 1);
    CHECK(eta.coeff(1) == -1);
    CHECK(eta.coeff(2) == -1);
    CHECK(eta.coeff(3) == 0);
    CHECK(eta.coeff(5) == 1);  // pentagonal numbers
    CHECK(eta.coeff(7) == 1);
}

TEST_CASE("rational powers") {
    // (Delta^{1/24})^24 = Delta.
    LaurentSeries d = delta_series(14);
    LaurentSeries e = d.pow_rat(Rat(1, 24));
    CHECK(e.offset() == Rat(1, 24));
    LaurentSeries back = e.pow_int(24);
    for (long n = 1; n <= back.order(); ++n) CHECK(back.coeff(n) == d.coeff(n));
    // And it matches eta directly.
    LaurentSeries eta = eta_quotient({{1, 1}}, 12);
    for (long n = 0; n <= std::min(e.order(), eta.order()); ++n)
        CHECK(e.coeff_or_zero(n) == eta.coeff_or_zero(n));
}

TEST_CASE("peel product exponents") {
    // Delta/q has all exponents 24.
    LaurentSeries d = delta_series(20);
    auto es = peel_product_exponents(d, 12);
    for (auto& e : es) CHECK(e == 24);

    // j = q^{-1} prod (1-q^n)^{e_n} with e_n = 3*a_3(n^2) (integrality check only here;
    // the Borcherds tests pin the cross-identities).
    LaurentSeries j = j_series(12);
    auto ej = peel_product_exponents(j, 10);
    CHECK(ej[0] == -744);
    CHECK(ej[1] == 80256);
    CHECK(ej[2] == -12288744);
    for (auto& e : ej) CHECK(e % 3 == 0);

    // Non-product-form input is rejected.
    LaurentSeries half = LaurentSeries::monomial(Rat(1), 0, 6) +
                         LaurentSeries::monomial(Rat(1, 2), 1, 6);
    CHECK_THROWS_AS(peel_product_exponents(half, 4), NotAProductForm);
}

TEST_CASE("hurwitz class numbers") {
    CHECK(hurwitz_H(0) == Rat(-1, 12));
    CHECK(hurwitz_H(1) == 0);
    CHECK(hurwitz_H(2) == 0);
    CHECK(hurwitz_H(3) == Rat(1, 3));
    CHECK(hurwitz_H(4) == Rat(1, 2));
    CHECK(hurwitz_H(5) == 0);
    CHECK(hurwitz_H(7) == 1);
    CHECK(hurwitz_H(8) == 1);
    CHECK(hurwitz_H(11) == 1);
    CHECK(hurwitz_H(12) == Rat(4, 3));
    CHECK(hurwitz_H(15) == 2);
    CHECK(hurwitz_H(16) == Rat(3, 2));
    CHECK(hurwitz_H(19) == 1);
    CHECK(hurwitz_H(20) == 2);
    CHECK(hurwitz_H(23) == 3);
    CHECK(hurwitz_H(24) == 2);
    CHECK(hurwitz_H(27) == Rat(4, 3));
    CHECK(hurwitz_H(28) == 2);

    LaurentSeries h = hurwitz_series(8);
    CHECK(h.coeff(0) == Rat(-1, 12));
    CHECK(h.coeff(3) == Rat(1, 3));
    CHECK(h.coeff(4) == Rat(1, 2));
    CHECK(h.coeff(7) == 1);
}

TEST_CASE("text round trip") {
    LaurentSeries x = eta_quotient({{1, 8}, {4, -8}}, 9);
    LaurentSeries y = LaurentSeries::from_text(x.to_text());
    CHECK(x == y);
    LaurentSeries eta = eta_quotient({{2, 3}}, 10);
    CHECK(LaurentSeries::from_text(eta.to_text()) == eta);
}
