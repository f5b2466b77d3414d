#pragma once

#include <optional>
#include <string>
#include <vector>

#include "moddep/poly.hpp"
#include "moddep/prec.hpp"
#include "moddep/quadforms.hpp"

namespace moddep {

// f = num(j) / den(j) with coprime parts over Q(i).
struct ModularFunction {
    GPoly num, den;

    static ModularFunction from_parts(GPoly n, GPoly d);
    static ModularFunction from_poly(GPoly n);
    bool is_constant() const;
    // Value in the j-plane: num(x)/den(x) on a certified box.
    CBall eval_at_j(const CBall& x) const;

    // Text form: `num:` / `den:` lines with ascending coefficients, each
    // `p/q` or `p/q+r/s i`.
    std::string to_text() const;
    static ModularFunction from_text(const std::string& text);
};

// j on a certified box in the upper half plane (reduced internally, explicit
// series tail majorants; the enclosure is rigorous, its radius is the
// caller's business).
CBall eval_j(const CBall& tau, long bits);
CBall eval_j_prime(const CBall& tau, long bits);
// Exact input, escalating from ctx.bits until the radius beats ctx.tol.
CBall eval_j(const QuadPoint& tau, const PrecisionCtx& ctx);

// A located point of F_j; `exact` when the surd is known, the enclosure is
// always valid.
struct FjPoint {
    std::optional<QuadPoint> exact;
    CBall approx;

    RBall im_ball(long bits) const;
    RBall re_ball(long bits) const;
};

// Preimage under j|_{F_j}.  Deterministic; certified inclusion or
// InversionFailed.  The GaussRat overload recognizes the critical values
// 0 and 1728 exactly.
FjPoint inverse_j(const CBall& x, const PrecisionCtx& ctx);
FjPoint inverse_j(const GaussRat& x, const PrecisionCtx& ctx);

struct DivisorPoint {
    FjPoint w;
    int multiplicity = 0;  // j-plane order: root multiplicity of num (+) or den (-)
    int im_class = -1;     // points sharing a class have equal Im by construction
};

struct DivisorInFj {
    std::vector<DivisorPoint> points;  // ascending Im, ties broken by Re
};

DivisorInFj zeros_poles_in_Fj(const ModularFunction& f, const PrecisionCtx& ctx);

enum class DivisorVerdict { HOLDS, FAILS, UNDECIDED };

// A certified violation: gamma moves w_{index} onto the open segment
// (w_r, w_r + 1) at offset s.
struct TranslateViolation {
    size_t index = 0;
    Mat2 gamma;
    std::optional<Rat> s_exact;
    double s_approx = 0;
};

struct DivisorConditionReport {
    DivisorVerdict verdict = DivisorVerdict::UNDECIDED;
    DivisorInFj divisor;
    std::optional<TranslateViolation> violation;  // FAILS only
    std::vector<std::string> notes;               // exclusions / undecided reasons
};

DivisorConditionReport divisor_condition_check(const ModularFunction& f,
                                               const PrecisionCtx& ctx);
// Same decision on an explicit divisor support (shared with the
// Borcherds-side checker, where all points are exact surds).
DivisorConditionReport divisor_condition_for_points(DivisorInFj divisor,
                                                    const PrecisionCtx& ctx);

}  // namespace moddep
