#pragma once

#include <optional>
#include <vector>

#include "moddep/modfunc.hpp"
#include "moddep/poly.hpp"
#include "moddep/prec.hpp"
#include "moddep/quadforms.hpp"

namespace moddep {

// j at one CM point, tagged with the form that produced it.
struct SingularModulus {
    long long disc = 0;
    QuadForm form;
    CBall value;
};

// One ball per element of T_delta, certified pairwise disjoint (precision is
// escalated until they separate; they must, the j-values are distinct).
std::vector<SingularModulus> singular_moduli(long long delta, const PrecisionCtx& ctx);

// prod over T_delta of (X - j(tau_form)), coefficients ascending, monic,
// degree = |T_delta|.  Every coefficient is rounded to the certified nearest
// integer; failure to certify escalates, then PrecisionExhausted.
std::vector<Int> hilbert_class_poly(long long delta, const PrecisionCtx& ctx);

// A value of f at the CM points of one discriminant, annotated with the
// smallest-|disc| CM preimage discriminant found in the scan range and with
// the preimages from this fiber (more than one when the value collides).
struct FSpecialPoint {
    CBall value;
    long long disc = 0;
    std::vector<SingularModulus> preimages;
};

// The fiber of f over T_delta, split into finite values and poles.  Collisions
// are decided exactly: the values are the roots of the pencil determinant
// det(num(M) - Y den(M)) over the companion matrix M of the class polynomial,
// so multiplicity structure comes from Yun decomposition, not ball overlap.
struct FSpecialFiber {
    std::vector<FSpecialPoint> points;
    std::vector<SingularModulus> poles;
};
FSpecialFiber f_special_points(const ModularFunction& f, long long delta,
                               const PrecisionCtx& ctx);

// Exact polynomial with root set = finite fiber values of f over T_delta,
// multiplicities included (monic; degree drops by one per pole).  This is the
// algebraic side of f_special_points: every fiber value is a root, so its
// height and degree are bounded by this polynomial's.
GPoly fiber_polynomial(const ModularFunction& f, long long delta, const PrecisionCtx& ctx);

// Candidate conjugate set {f(j(tau_form)) : form in T_{disc(sigma)}}: contains
// every Galois conjugate of the value (it may be a strict superset for
// general f, which is why it is named a candidate set).
std::vector<CBall> conjugate_orbit(const ModularFunction& f, const FSpecialPoint& sigma,
                                   const PrecisionCtx& ctx);

// Witness that x2 = j(g tau) for j(tau) = x1: the smallest cyclic-isogeny
// degree n <= n_max with its coset representative (a, b; 0, d), ad = n,
// 0 <= b < d, gcd(a, b, d) = 1.  Matching is within the combined input error;
// two certifiably distinct candidates inside the input ball cannot be told
// apart by more precision, so that raises PrecisionExhausted.
struct IsogenyWitness {
    long n = 1;
    Mat2 g;
};
std::optional<IsogenyWitness> modular_relation(const CBall& x1, const CBall& x2, long n_max,
                                               const PrecisionCtx& ctx);

}  // namespace moddep
