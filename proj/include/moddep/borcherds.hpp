#pragma once

#include <map>
#include <string>
#include <vector>

#include "moddep/laurent.hpp"
#include "moddep/modfunc.hpp"
#include "moddep/prec.hpp"
#include "moddep/quadforms.hpp"
#include "moddep/rat.hpp"

namespace moddep {

// Weight-1/2 plus-space form by coefficient data: sum a(n) q^n with a(n) = 0
// unless n = 0, 1 mod 4, finite principal part, coefficients known through
// `order`.
struct PlusForm {
    std::map<long, Int> coeffs;  // nonzero coefficients only
    long order = 0;

    // 0 for absent indices; indices above `order` are unknown, not zero.
    Int a(long n) const;
    // Least index with nonzero coefficient (0 when the form is zero).
    long principal_index() const;
    bool in_A0() const { return a(0) == 0; }
    bool is_zero() const { return coeffs.empty(); }

    // Text form: `n a(n)` lines, ascending; `order N` header line.
    std::string to_text() const;
    static PlusForm from_text(const std::string& text);
};

PlusForm pf_add(const PlusForm& f, const PlusForm& g);
PlusForm pf_scale(const PlusForm& f, const Int& c);

// The basis form f_d: principal part q^{-d}, zero constant term for d > 0
// (f_0 is the theta series).  Exact linear algebra over a spanning family of
// weight-1/2 forms; SpanningFamilyInsufficient when the solve or the
// full-window verification fails, NotInBasisIndexSet unless d = 0, 3 mod 4.
PlusForm build_fd(long d, long order);

// Psi(f) = q^{-h} prod_{n>0} (1 - q^n)^{a(n^2)}.
struct LiftResult {
    Rat h;                      // sum_m a(-m) H(m)
    LaurentSeries product_part;  // 1 + O(q), integer coefficients
};

Rat lift_h(const PlusForm& f);
// Needs a(n^2) through n = order, i.e. f.order >= order^2 (WindowTooSmall).
LiftResult lift(const PlusForm& f, long order);

// Multiplicity of the zero of Psi(f) along each discriminant class:
// sum_{n>0} a(n^2 Delta), for every valid Delta in [delta_min, delta_max].
std::map<long long, long long> lift_divisor(const PlusForm& f, long long delta_min,
                                            long long delta_max);

// f = prod_d Psi(f_d)^{alpha_d}, d = 0, 3 mod 4, d >= 3.
struct B0Element {
    std::map<long long, long long> exps;

    std::string to_text() const;                     // "d:alpha,d:alpha"
    static B0Element from_text(const std::string&);  // parse the same
};

// Divisor of the product over F_j: exact CM points with multiplicities,
// plus the total multiplicity per discriminant.
struct B0Divisor {
    std::map<long long, long long> mult;  // discriminant -> multiplicity
    DivisorInFj points;                   // ascending height
};
B0Divisor b0_divisor(const B0Element& e);

// The divisor-condition certificate for a B0 element: tau* is the unique
// a = 1 point of the top discriminant -d_k; dominance lists the exact
// Im^2 comparisons against every other support point; `generic` is the
// same decision run through the translate checker on the explicit points.
struct B0Report {
    long long dk = 0;
    QuadPoint tau_star;
    std::vector<std::string> dominance;
    DivisorConditionReport generic;
};
B0Report divisor_condition_b0(const B0Element& e, const PrecisionCtx& ctx);

// Value of Psi(f) at tau.  Exact-zero short circuit when tau is a CM point
// in the zero divisor (PoleAtSpecialPoint when in the polar part); otherwise
// truncation doubling on the product, heuristic by declaration.
struct LiftValue {
    CBall value;
    bool heuristic = true;
    long terms = 0;  // truncation that stabilized (0 for the exact route)
};
LiftValue eval_lift(const PlusForm& f, const QuadPoint& tau, const PrecisionCtx& ctx);
LiftValue eval_lift(const PlusForm& f, const CBall& tau, const PrecisionCtx& ctx);

}  // namespace moddep
