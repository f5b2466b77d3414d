#pragma once

#include <mpfr.h>

#include <optional>
#include <string>

#include "moddep/check.hpp"
#include "moddep/quadforms.hpp"
#include "moddep/rat.hpp"

namespace moddep {

// Working precision plus the per-evaluation error budget callers certify
// against.  Contexts are immutable values; escalate() is the only way up.
struct PrecisionCtx {
    long bits = 128;
    double tol = 1e-30;
    int max_escalations = 8;

    PrecisionCtx escalate() const { return {bits * 2, tol, max_escalations}; }
};

// RAII wrapper over one mpfr number.  The value is whatever the last mpfr_*
// call wrote through get(); fresh instances are NaN.
class Real {
  public:
    explicit Real(long prec = 64);
    Real(const Real& o);
    Real(Real&& o) noexcept;
    Real& operator=(const Real& o);
    Real& operator=(Real&& o) noexcept;
    ~Real();

    mpfr_ptr get() { return v_; }
    mpfr_srcptr get() const { return v_; }
    long prec() const { return mpfr_get_prec(v_); }
    double d() const { return mpfr_get_d(v_, MPFR_RNDN); }
    std::string str(int digits = 20) const;

  private:
    mpfr_t v_;
};

// Certified enclosure mid +/- rad.  The radius lives at a short fixed
// precision and is always rounded outward, so every arithmetic identity below
// is an enclosure statement, never an estimate.
struct RBall {
    Real mid;
    Real rad;

    explicit RBall(long bits = 64);  // NaN center, infinite radius
    static RBall exact_si(long x, long bits);
    static RBall from_int(const Int& x, long bits);
    static RBall from_rat(const Rat& x, long bits);
    static RBall from_d(double x, long bits);

    long bits() const { return mid.prec(); }
    bool is_finite() const;
    bool contains_zero() const;
    bool nonzero() const { return is_finite() && !contains_zero(); }
    Real upper() const;  // mid + rad, rounded up
    Real lower() const;  // mid - rad, rounded down
    // Upper bound of |x| as a double (rounded up; may be +inf).
    double mag_upper_d() const;
    std::string str(int digits = 20) const;
};

RBall rb_neg(const RBall& x);
RBall rb_abs(const RBall& x);
RBall rb_add(const RBall& x, const RBall& y);
RBall rb_sub(const RBall& x, const RBall& y);
RBall rb_mul(const RBall& x, const RBall& y);
RBall rb_inv(const RBall& x);  // PrecisionExhausted if the ball meets 0
RBall rb_div(const RBall& x, const RBall& y);
RBall rb_mul_2si(const RBall& x, long e);  // exact
// sqrt on a ball known to sit in [0, inf): balls touching 0 from below are
// clipped; definitely negative input is PreconditionViolated.
RBall rb_sqrt(const RBall& x);
RBall rb_root_ui(const RBall& x, unsigned long k);  // requires lower bound > 0
RBall rb_exp(const RBall& x);
RBall rb_log(const RBall& x);  // requires lower bound > 0
RBall rb_sin(const RBall& x);
RBall rb_cos(const RBall& x);
// Angle of (x, y) in (-pi, pi].  PrecisionExhausted when the box meets the
// branch cut {y = 0, x <= 0} or contains the origin.
RBall rb_atan2(const RBall& y, const RBall& x);
RBall rb_pow_si(const RBall& x, long e);
RBall rb_pi(long bits);

// Certified strict order; false means "could not certify", not "greater".
bool rb_certainly_lt(const RBall& x, const RBall& y);
bool rb_certainly_gt(const RBall& x, const RBall& y);
// The integer n with |x - n| <= slack, when that is certified and unique.
std::optional<Int> rb_integer_within(const RBall& x, double slack = 0.25);

// Rectangular complex enclosure (a box: re-ball x im-ball).
struct CBall {
    RBall re, im;

    explicit CBall(long bits = 64);
    CBall(RBall re_, RBall im_) : re(std::move(re_)), im(std::move(im_)) {}
    static CBall from_gauss(const GaussRat& x, long bits);
    static CBall from_qp(const QuadPoint& tau, long bits);

    long bits() const { return re.bits(); }
    bool is_finite() const { return re.is_finite() && im.is_finite(); }
    bool contains_zero() const { return re.contains_zero() && im.contains_zero(); }
    bool nonzero() const { return is_finite() && !contains_zero(); }
    std::string str(int digits = 20) const;
};

CBall cb_neg(const CBall& z);
CBall cb_conj(const CBall& z);
CBall cb_add(const CBall& z, const CBall& w);
CBall cb_sub(const CBall& z, const CBall& w);
CBall cb_mul(const CBall& z, const CBall& w);
CBall cb_mul_rb(const CBall& z, const RBall& t);
CBall cb_inv(const CBall& z);  // PrecisionExhausted if the box meets 0
CBall cb_div(const CBall& z, const CBall& w);
RBall cb_abs_sq(const CBall& z);
RBall cb_abs(const CBall& z);
CBall cb_exp(const CBall& z);
RBall cb_arg(const CBall& z);  // same domain restriction as rb_atan2
CBall cb_log(const CBall& z);
// log(1 + w) for |w| certified <= 1/2, by the alternating power series with
// an explicit tail enclosure.  Unlike cb_log(1 + w), the output radius scales
// with |w| rather than with ulp(1), which is what keeps (1 - q^n)^e usable
// when e is astronomically large and q^n is tiny.
CBall cb_log1p(const CBall& w);
CBall cb_from_polar(const RBall& r, const RBall& theta);
// Principal k-th root |z|^{1/k} e^{i arg(z)/k}; same branch-cut restriction.
CBall cb_root_ui(const CBall& z, unsigned long k);
CBall cb_pow_si(const CBall& z, long e);
// Upper bound of |z| as a double (rounded up; may be +inf).
double cb_mag_upper_d(const CBall& z);

}  // namespace moddep
