#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <random>

#include "moddep/check.hpp"
#include "moddep/quadforms.hpp"

using namespace moddep;

namespace {

// Independent enumeration: scan a box of (a, b, c) triples and keep what the
// textbook inequalities accept.  Deliberately ignorant of the search pruning
// used by reduced_forms_all.
std::vector<QuadForm> oracle_reduced(long long delta, bool primitive_only) {
    std::vector<QuadForm> out;
    for (long long a = 1; 3 * a * a <= -delta; ++a)
        for (long long c = a; 4 * a * c <= a * a - delta; ++c)
            for (long long b = -a; b <= a; ++b) {
                QuadForm q{a, b, c};
                if (q.disc() != delta || !q.reduced()) continue;
                if (primitive_only && !q.primitive()) continue;
                out.push_back(q);
            }
    std::sort(out.begin(), out.end());
    return out;
}

QuadPoint random_point(std::mt19937_64& rng) {
    static const long long kernels[] = {1, 2, 3, 5, 7, 11, 15};
    std::uniform_int_distribution<long long> num(-40, 40), den(1, 7), pos(1, 30),
        kidx(0, 6);
    Rat re(to_int(num(rng)), to_int(den(rng)));
    Rat im(to_int(pos(rng)), to_int(den(rng)));
    re.canonicalize();
    im.canonicalize();
    return QuadPoint(re, im, kernels[(size_t)kidx(rng)]);
}

}  // namespace

TEST_CASE("enumerate_T matches the box scan") {
    for (long long n = 3; n <= 400; ++n) {
        long long delta = -n;
        if (!is_valid_disc(delta)) {
            CHECK_THROWS_AS((void)enumerate_T(delta), InvalidDiscriminant);
            continue;
        }
        CHECK(enumerate_T(delta) == oracle_reduced(delta, true));
        CHECK(reduced_forms_all(delta) == oracle_reduced(delta, false));
    }
}

TEST_CASE("class numbers") {
    const std::pair<long long, long long> table[] = {
        {-3, 1},  {-4, 1},  {-7, 1},  {-8, 1},  {-11, 1},  {-12, 1},
        {-15, 2}, {-16, 1}, {-19, 1}, {-20, 2}, {-23, 3},  {-24, 2},
        {-27, 1}, {-31, 3}, {-43, 1}, {-47, 5}, {-67, 1},  {-71, 7},
        {-84, 4}, {-95, 8}, {-148, 2}, {-163, 1}, {-427, 2}};
    for (auto [delta, h] : table) CHECK(class_number(delta) == h);
}

TEST_CASE("principal form leads the enumeration") {
    for (long long n = 3; n <= 300; ++n) {
        if (!is_valid_disc(-n)) continue;
        auto forms = enumerate_T(-n);
        REQUIRE(!forms.empty());
        // Exactly one form with a = 1, and the (a, b) order puts it first.
        long long b0 = (n % 2 == 0) ? 0 : 1;
        CHECK(forms[0] == QuadForm{1, b0, (b0 * b0 + n) / 4});
        for (size_t i = 1; i < forms.size(); ++i) CHECK(forms[i].a > 1);
    }
}

TEST_CASE("quadratic field arithmetic") {
    QuadPoint zeta6(Rat(1, 2), Rat(1, 2), 3);
    // zeta6 is a primitive 6th root of unity: zeta6^2 = zeta6 - 1.
    QuadPoint sq = qp_mul(zeta6, zeta6);
    CHECK(sq == qp_add_rat(zeta6, Rat(-1)));
    CHECK(qp_mul(sq, qp_inv(zeta6)) == zeta6);  // zeta6^2 / zeta6

    // Kernel normalization: sqrt(12) = 2 sqrt(3), sqrt(18) = 3 sqrt(2).
    QuadPoint a(Rat(0), Rat(1), 12);
    CHECK(a.m == 3);
    CHECK(a.im == 2);
    QuadPoint b(Rat(5), Rat(1, 3), 18);
    CHECK(b.m == 2);
    CHECK(b.im == 1);

    std::mt19937_64 rng(7);
    for (int t = 0; t < 50; ++t) {
        QuadPoint x = random_point(rng);
        QuadPoint y = random_point(rng);
        y.m = x.m;  // field ops require a shared kernel
        CHECK(qp_sub(qp_add(x, y), y) == x);
        CHECK(qp_mul(qp_mul(x, y), qp_inv(y)) == x);
        CHECK(qp_mul(x, qp_inv(x)) == QuadPoint(Rat(1), Rat(0), 1));
        // norm2 is multiplicative.
        CHECK(qp_mul(x, y).norm2() == x.norm2() * y.norm2());
    }
}

TEST_CASE("reduction to the fundamental domain") {
    std::mt19937_64 rng(11);
    for (int t = 0; t < 200; ++t) {
        QuadPoint tau = random_point(rng);
        Reduction r = reduce_to_Fj(tau);
        CHECK(in_Fj(r.tau));
        CHECK(r.g.det() == 1);
        CHECK(mobius(r.g, tau) == r.tau);
    }
    // Points already inside come back untouched.
    QuadPoint i(Rat(0), Rat(1), 1);
    Reduction ri = reduce_to_Fj(i);
    CHECK(ri.tau == i);
    CHECK(ri.g == Mat2::identity());
    // Boundary conventions: Re = -1/2 shifts to +1/2, |tau| = 1 with Re < 0 inverts.
    QuadPoint rho(Rat(-1, 2), Rat(1, 2), 3);
    CHECK(reduce_to_Fj(rho).tau == QuadPoint(Rat(1, 2), Rat(1, 2), 3));
    CHECK_FALSE(in_Fj(rho));
}

TEST_CASE("forms and points round trip") {
    for (long long n = 3; n <= 300; ++n) {
        if (!is_valid_disc(-n)) continue;
        auto forms = enumerate_T(-n);
        for (const auto& q : forms) {
            QuadPoint tau = form_to_point(q);
            CHECK(in_Fj(tau));
            PointDisc pd = discriminant_of_point(tau);
            CHECK(pd.delta == -n);
            CHECK(pd.form == q);
        }
        // The principal point dominates in height: Im = sqrt(n)/2 exactly.
        QuadPoint top = form_to_point(forms[0]);
        Rat h0 = top.im * top.im * to_rat(top.m);
        CHECK(h0 == to_rat(n) / 4);
        for (size_t i = 1; i < forms.size(); ++i) {
            QuadPoint p = form_to_point(forms[i]);
            CHECK(p.im * p.im * to_rat(p.m) < h0);
        }
    }
}

TEST_CASE("discriminants of named points") {
    QuadPoint i(Rat(0), Rat(1), 1);
    CHECK(discriminant_of_point(i).delta == -4);
    CHECK(discriminant_of_point(i).form == QuadForm{1, 0, 1});

    QuadPoint zeta6(Rat(1, 2), Rat(1, 2), 3);
    CHECK(discriminant_of_point(zeta6).delta == -3);
    CHECK(discriminant_of_point(zeta6).form == QuadForm{1, 1, 1});

    QuadPoint twoi(Rat(0), Rat(2), 1);
    CHECK(discriminant_of_point(twoi).delta == -16);

    QuadPoint i_sqrt2(Rat(0), Rat(1), 2);
    CHECK(discriminant_of_point(i_sqrt2).delta == -8);

    QuadPoint omega7(Rat(1, 2), Rat(1, 2), 7);
    CHECK(discriminant_of_point(omega7).delta == -7);
    CHECK(discriminant_of_point(omega7).form == QuadForm{1, 1, 2});

    // Non-maximal denominator: (1 + sqrt(-3))/4 satisfies 4 tau^2 - 2 tau + 1.
    QuadPoint quarter(Rat(1, 4), Rat(1, 4), 3);
    PointDisc pd = discriminant_of_point(quarter);
    CHECK(pd.delta == -12);
    CHECK(pd.form == QuadForm{4, 2, 1});
}
