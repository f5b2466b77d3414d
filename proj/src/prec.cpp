#include "moddep/prec.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace moddep {

namespace {

// Radii carry magnitude only; 32 bits with mpfr's huge exponent range never
// under- or overflows where a double would.
constexpr long kRadPrec = 32;

// Account for the rounding of a center operation: when mpfr reported an
// inexact result (t != 0), one ulp of the center over-covers the half-ulp
// rounding error.  Non-regular centers poison the radius.
void bump(Real& rad, mpfr_srcptr mid, int t) {
    if (!mpfr_number_p(mid)) {
        mpfr_set_inf(rad.get(), 1);
        return;
    }
    if (t == 0 || mpfr_zero_p(mid)) return;
    mpfr_t u;
    mpfr_init2(u, kRadPrec);
    mpfr_set_ui_2exp(u, 1, mpfr_get_exp(mid) - mpfr_get_prec(mid), MPFR_RNDU);
    mpfr_add(rad.get(), rad.get(), u, MPFR_RNDU);
    mpfr_clear(u);
}

// |x.mid| rounded up into a kRadPrec temporary.
void abs_mid_up(mpfr_ptr out, const RBall& x) {
    mpfr_set(out, x.mid.get(), MPFR_RNDA);
    mpfr_abs(out, out, MPFR_RNDU);
}

struct Tmp {
    mpfr_t v;
    explicit Tmp(long prec) { mpfr_init2(v, prec); }
    ~Tmp() { mpfr_clear(v); }
    operator mpfr_ptr() { return v; }
    operator mpfr_srcptr() const { return v; }
};

long join_bits(const RBall& x, const RBall& y) { return std::max(x.bits(), y.bits()); }

}  // namespace

Real::Real(long prec) { mpfr_init2(v_, std::max(prec, (long)MPFR_PREC_MIN)); }
Real::Real(const Real& o) {
    mpfr_init2(v_, o.prec());
    mpfr_set(v_, o.v_, MPFR_RNDN);
}
Real::Real(Real&& o) noexcept {
    mpfr_init2(v_, o.prec());
    mpfr_swap(v_, o.v_);
}
Real& Real::operator=(const Real& o) {
    if (this != &o) {
        mpfr_set_prec(v_, o.prec());
        mpfr_set(v_, o.v_, MPFR_RNDN);
    }
    return *this;
}
Real& Real::operator=(Real&& o) noexcept {
    if (this != &o) mpfr_swap(v_, o.v_);
    return *this;
}
Real::~Real() { mpfr_clear(v_); }

std::string Real::str(int digits) const {
    char* s = nullptr;
    mpfr_asprintf(&s, "%.*Rg", digits, v_);
    std::string out(s);
    mpfr_free_str(s);
    return out;
}

RBall::RBall(long bits) : mid(bits), rad(kRadPrec) { mpfr_set_inf(rad.get(), 1); }

RBall RBall::exact_si(long x, long bits) {
    RBall r(bits);
    int t = mpfr_set_si(r.mid.get(), x, MPFR_RNDN);
    mpfr_set_zero(r.rad.get(), 1);
    bump(r.rad, r.mid.get(), t);
    return r;
}

RBall RBall::from_int(const Int& x, long bits) {
    RBall r(bits);
    int t = mpfr_set_z(r.mid.get(), x.get_mpz_t(), MPFR_RNDN);
    mpfr_set_zero(r.rad.get(), 1);
    bump(r.rad, r.mid.get(), t);
    return r;
}

RBall RBall::from_rat(const Rat& x, long bits) {
    RBall r(bits);
    int t = mpfr_set_q(r.mid.get(), x.get_mpq_t(), MPFR_RNDN);
    mpfr_set_zero(r.rad.get(), 1);
    bump(r.rad, r.mid.get(), t);
    return r;
}

RBall RBall::from_d(double x, long bits) {
    RBall r(bits);
    int t = mpfr_set_d(r.mid.get(), x, MPFR_RNDN);
    mpfr_set_zero(r.rad.get(), 1);
    bump(r.rad, r.mid.get(), t);
    return r;
}

bool RBall::is_finite() const {
    return mpfr_number_p(mid.get()) && mpfr_number_p(rad.get());
}

bool RBall::contains_zero() const {
    if (!is_finite()) return true;
    return mpfr_cmpabs(mid.get(), rad.get()) <= 0;
}

Real RBall::upper() const {
    Real u(bits());
    mpfr_add(u.get(), mid.get(), rad.get(), MPFR_RNDU);
    return u;
}

Real RBall::lower() const {
    Real l(bits());
    mpfr_sub(l.get(), mid.get(), rad.get(), MPFR_RNDD);
    return l;
}

double RBall::mag_upper_d() const {
    Tmp t(kRadPrec);
    abs_mid_up(t, *this);
    mpfr_add(t, t, rad.get(), MPFR_RNDU);
    return mpfr_get_d(t, MPFR_RNDU);
}

std::string RBall::str(int digits) const {
    return mid.str(digits) + " +/- " + rad.str(3);
}

RBall rb_neg(const RBall& x) {
    RBall r(x.bits());
    mpfr_neg(r.mid.get(), x.mid.get(), MPFR_RNDN);
    mpfr_set(r.rad.get(), x.rad.get(), MPFR_RNDU);
    return r;
}

RBall rb_abs(const RBall& x) {
    RBall r(x.bits());
    mpfr_abs(r.mid.get(), x.mid.get(), MPFR_RNDN);
    mpfr_set(r.rad.get(), x.rad.get(), MPFR_RNDU);
    return r;
}

RBall rb_add(const RBall& x, const RBall& y) {
    RBall r(join_bits(x, y));
    int t = mpfr_add(r.mid.get(), x.mid.get(), y.mid.get(), MPFR_RNDN);
    mpfr_add(r.rad.get(), x.rad.get(), y.rad.get(), MPFR_RNDU);
    bump(r.rad, r.mid.get(), t);
    return r;
}

RBall rb_sub(const RBall& x, const RBall& y) {
    RBall r(join_bits(x, y));
    int t = mpfr_sub(r.mid.get(), x.mid.get(), y.mid.get(), MPFR_RNDN);
    mpfr_add(r.rad.get(), x.rad.get(), y.rad.get(), MPFR_RNDU);
    bump(r.rad, r.mid.get(), t);
    return r;
}

RBall rb_mul(const RBall& x, const RBall& y) {
    RBall r(join_bits(x, y));
    int t = mpfr_mul(r.mid.get(), x.mid.get(), y.mid.get(), MPFR_RNDN);
    // |x||ry| + |y||rx| + rx ry
    Tmp ax(kRadPrec), ay(kRadPrec), s(kRadPrec);
    abs_mid_up(ax, x);
    abs_mid_up(ay, y);
    mpfr_mul(s, ax, y.rad.get(), MPFR_RNDU);
    mpfr_mul(ay, ay, x.rad.get(), MPFR_RNDU);
    mpfr_add(s, s, ay, MPFR_RNDU);
    mpfr_mul(ax, x.rad.get(), y.rad.get(), MPFR_RNDU);
    mpfr_add(r.rad.get(), s, ax, MPFR_RNDU);
    bump(r.rad, r.mid.get(), t);
    return r;
}

RBall rb_inv(const RBall& x) {
    MD_REQUIRE(x.nonzero(), PrecisionExhausted, "inverting a ball that meets zero");
    RBall r(x.bits());
    int t = mpfr_ui_div(r.mid.get(), 1, x.mid.get(), MPFR_RNDN);
    // |1/a - 1/m| <= rad / (|m|_low (|m|_low - rad)) on the ball.
    Tmp ml(kRadPrec), l(kRadPrec);
    mpfr_set(ml, x.mid.get(), MPFR_RNDZ);  // toward zero: |ml| <= |m|
    mpfr_abs(ml, ml, MPFR_RNDD);
    mpfr_sub(l, ml, x.rad.get(), MPFR_RNDD);  // lower bound of |a|
    MD_REQUIRE(mpfr_sgn(l.v) > 0, PrecisionExhausted, "inverting a ball that meets zero");
    mpfr_mul(l, l, ml, MPFR_RNDD);
    mpfr_div(r.rad.get(), x.rad.get(), l, MPFR_RNDU);
    bump(r.rad, r.mid.get(), t);
    return r;
}

RBall rb_div(const RBall& x, const RBall& y) { return rb_mul(x, rb_inv(y)); }

RBall rb_mul_2si(const RBall& x, long e) {
    RBall r(x.bits());
    mpfr_mul_2si(r.mid.get(), x.mid.get(), e, MPFR_RNDN);
    mpfr_mul_2si(r.rad.get(), x.rad.get(), e, MPFR_RNDU);
    return r;
}

RBall rb_sqrt(const RBall& x) {
    MD_REQUIRE(x.is_finite(), PrecisionExhausted, "sqrt of a non-finite ball");
    RBall r(x.bits());
    Tmp l(x.bits());
    mpfr_sub(l, x.mid.get(), x.rad.get(), MPFR_RNDD);
    if (mpfr_sgn(l.v) > 0) {
        int t = mpfr_sqrt(r.mid.get(), x.mid.get(), MPFR_RNDN);
        // |sqrt a - sqrt m| <= rad / (2 sqrt(l))
        Tmp sl(kRadPrec);
        mpfr_sqrt(sl, l, MPFR_RNDD);
        mpfr_mul_2si(sl, sl, 1, MPFR_RNDD);
        mpfr_div(r.rad.get(), x.rad.get(), sl, MPFR_RNDU);
        bump(r.rad, r.mid.get(), t);
        return r;
    }
    // Ball touches 0: enclose sqrt([0, u]) as u' / 2 +/- u' / 2.
    Tmp u(x.bits());
    mpfr_add(u, x.mid.get(), x.rad.get(), MPFR_RNDU);
    MD_REQUIRE(mpfr_sgn(u.v) >= 0, PreconditionViolated, "sqrt of a negative ball");
    mpfr_sqrt(u, u, MPFR_RNDU);
    mpfr_mul_2si(r.mid.get(), u, -1, MPFR_RNDU);
    mpfr_set(r.rad.get(), r.mid.get(), MPFR_RNDU);
    return r;
}

RBall rb_root_ui(const RBall& x, unsigned long k) {
    MD_REQUIRE(k >= 1, PreconditionViolated, "root order must be positive");
    if (k == 1) return x;
    RBall r(x.bits());
    Tmp l(x.bits());
    mpfr_sub(l, x.mid.get(), x.rad.get(), MPFR_RNDD);
    MD_REQUIRE(mpfr_sgn(l.v) > 0, PrecisionExhausted, "root of a ball that meets zero");
    int t = mpfr_rootn_ui(r.mid.get(), x.mid.get(), k, MPFR_RNDN);
    // Mean value: sup derivative on [l, u] is l^{1/k} / (k l).
    Tmp rl(kRadPrec), den(kRadPrec);
    mpfr_rootn_ui(rl, l, k, MPFR_RNDU);
    mpfr_mul_ui(den, l, k, MPFR_RNDD);
    mpfr_div(rl, rl, den, MPFR_RNDU);
    mpfr_mul(r.rad.get(), x.rad.get(), rl, MPFR_RNDU);
    bump(r.rad, r.mid.get(), t);
    return r;
}

RBall rb_exp(const RBall& x) {
    RBall r(x.bits());
    int t = mpfr_exp(r.mid.get(), x.mid.get(), MPFR_RNDN);
    // |e^a - e^m| <= e^{m + rad} rad
    Tmp u(x.bits());
    mpfr_add(u, x.mid.get(), x.rad.get(), MPFR_RNDU);
    Tmp eu(kRadPrec);
    mpfr_exp(eu, u, MPFR_RNDU);
    mpfr_mul(r.rad.get(), eu, x.rad.get(), MPFR_RNDU);
    bump(r.rad, r.mid.get(), t);
    return r;
}

RBall rb_log(const RBall& x) {
    RBall r(x.bits());
    Tmp l(x.bits());
    mpfr_sub(l, x.mid.get(), x.rad.get(), MPFR_RNDD);
    MD_REQUIRE(mpfr_sgn(l.v) > 0, PrecisionExhausted, "log of a ball that meets zero");
    int t = mpfr_log(r.mid.get(), x.mid.get(), MPFR_RNDN);
    mpfr_div(r.rad.get(), x.rad.get(), l, MPFR_RNDU);
    bump(r.rad, r.mid.get(), t);
    return r;
}

RBall rb_sin(const RBall& x) {
    RBall r(x.bits());
    int t = mpfr_sin(r.mid.get(), x.mid.get(), MPFR_RNDN);
    mpfr_set(r.rad.get(), x.rad.get(), MPFR_RNDU);
    bump(r.rad, r.mid.get(), t);
    return r;
}

RBall rb_cos(const RBall& x) {
    RBall r(x.bits());
    int t = mpfr_cos(r.mid.get(), x.mid.get(), MPFR_RNDN);
    mpfr_set(r.rad.get(), x.rad.get(), MPFR_RNDU);
    bump(r.rad, r.mid.get(), t);
    return r;
}

RBall rb_atan2(const RBall& y, const RBall& x) {
    MD_REQUIRE(x.is_finite() && y.is_finite(), PrecisionExhausted,
               "atan2 of a non-finite ball");
    // Valid only if the box avoids the closed cut {im = 0, re <= 0}; a box
    // with im straddling 0 must then be entirely in re > 0.
    bool y_clear = y.nonzero();
    Tmp xl(x.bits());
    mpfr_sub(xl, x.mid.get(), x.rad.get(), MPFR_RNDD);
    bool x_pos = mpfr_sgn(xl.v) > 0;
    MD_REQUIRE(y_clear || x_pos, PrecisionExhausted, "argument box meets the branch cut");

    long p = join_bits(x, y);
    RBall r(p);
    int t = mpfr_atan2(r.mid.get(), y.mid.get(), x.mid.get(), MPFR_RNDN);
    // Gradient bound 1/rho on a disk covering the box: displacement <= rx + ry,
    // rho lower bound = |center| - (rx + ry).
    Tmp xs(p), ys(p), rho(p);
    mpfr_sqr(xs, x.mid.get(), MPFR_RNDD);
    mpfr_sqr(ys, y.mid.get(), MPFR_RNDD);
    mpfr_add(rho, xs, ys, MPFR_RNDD);
    mpfr_sqrt(rho, rho, MPFR_RNDD);
    Tmp dr(kRadPrec);
    mpfr_add(dr, x.rad.get(), y.rad.get(), MPFR_RNDU);
    mpfr_sub(rho, rho, dr, MPFR_RNDD);
    MD_REQUIRE(mpfr_sgn(rho.v) > 0, PrecisionExhausted, "argument box meets the origin");
    mpfr_div(r.rad.get(), dr, rho, MPFR_RNDU);
    bump(r.rad, r.mid.get(), t);
    return r;
}

RBall rb_pow_si(const RBall& x, long e) {
    if (e == 0) return RBall::exact_si(1, x.bits());
    unsigned long k = (unsigned long)(e < 0 ? -e : e);
    RBall acc = RBall::exact_si(1, x.bits());
    RBall base = x;
    bool first = true;
    while (k) {
        if (k & 1) {
            acc = first ? base : rb_mul(acc, base);
            first = false;
        }
        k >>= 1;
        if (k) base = rb_mul(base, base);
    }
    return e < 0 ? rb_inv(acc) : acc;
}

RBall rb_pi(long bits) {
    RBall r(bits);
    int t = mpfr_const_pi(r.mid.get(), MPFR_RNDN);
    mpfr_set_zero(r.rad.get(), 1);
    bump(r.rad, r.mid.get(), t);
    return r;
}

bool rb_certainly_lt(const RBall& x, const RBall& y) {
    if (!x.is_finite() || !y.is_finite()) return false;
    return mpfr_cmp(x.upper().get(), y.lower().get()) < 0;
}

bool rb_certainly_gt(const RBall& x, const RBall& y) { return rb_certainly_lt(y, x); }

std::optional<Int> rb_integer_within(const RBall& x, double slack) {
    if (!x.is_finite()) return std::nullopt;
    Int n;
    Tmp t(x.bits());
    mpfr_round(t, x.mid.get());
    mpfr_get_z(n.get_mpz_t(), t, MPFR_RNDN);
    // Certify |x - n| < slack strictly.
    mpfr_sub_z(t, x.mid.get(), n.get_mpz_t(), MPFR_RNDA);
    mpfr_abs(t, t, MPFR_RNDU);
    mpfr_add(t, t, x.rad.get(), MPFR_RNDU);
    if (mpfr_cmp_d(t, slack) >= 0) return std::nullopt;
    return n;
}

CBall::CBall(long bits) : re(bits), im(bits) {}

CBall CBall::from_gauss(const GaussRat& x, long bits) {
    return {RBall::from_rat(x.re, bits), RBall::from_rat(x.im, bits)};
}

CBall CBall::from_qp(const QuadPoint& tau, long bits) {
    RBall s = rb_sqrt(RBall::exact_si(tau.m, bits));
    return {RBall::from_rat(tau.re, bits), rb_mul(RBall::from_rat(tau.im, bits), s)};
}

std::string CBall::str(int digits) const {
    return "(" + re.str(digits) + ", " + im.str(digits) + " i)";
}

CBall cb_neg(const CBall& z) { return {rb_neg(z.re), rb_neg(z.im)}; }
CBall cb_conj(const CBall& z) { return {z.re, rb_neg(z.im)}; }
CBall cb_add(const CBall& z, const CBall& w) {
    return {rb_add(z.re, w.re), rb_add(z.im, w.im)};
}
CBall cb_sub(const CBall& z, const CBall& w) {
    return {rb_sub(z.re, w.re), rb_sub(z.im, w.im)};
}
CBall cb_mul(const CBall& z, const CBall& w) {
    return {rb_sub(rb_mul(z.re, w.re), rb_mul(z.im, w.im)),
            rb_add(rb_mul(z.re, w.im), rb_mul(z.im, w.re))};
}
CBall cb_mul_rb(const CBall& z, const RBall& t) {
    return {rb_mul(z.re, t), rb_mul(z.im, t)};
}

RBall cb_abs_sq(const CBall& z) { return rb_add(rb_mul(z.re, z.re), rb_mul(z.im, z.im)); }
RBall cb_abs(const CBall& z) { return rb_sqrt(cb_abs_sq(z)); }

CBall cb_inv(const CBall& z) {
    RBall d = cb_abs_sq(z);
    MD_REQUIRE(d.nonzero(), PrecisionExhausted, "inverting a box that meets zero");
    RBall di = rb_inv(d);
    return {rb_mul(z.re, di), rb_neg(rb_mul(z.im, di))};
}

CBall cb_div(const CBall& z, const CBall& w) { return cb_mul(z, cb_inv(w)); }

CBall cb_exp(const CBall& z) {
    RBall m = rb_exp(z.re);
    return {rb_mul(m, rb_cos(z.im)), rb_mul(m, rb_sin(z.im))};
}

RBall cb_arg(const CBall& z) { return rb_atan2(z.im, z.re); }

CBall cb_log(const CBall& z) { return {rb_log(cb_abs(z)), cb_arg(z)}; }

CBall cb_from_polar(const RBall& r, const RBall& theta) {
    return {rb_mul(r, rb_cos(theta)), rb_mul(r, rb_sin(theta))};
}

CBall cb_root_ui(const CBall& z, unsigned long k) {
    MD_REQUIRE(k >= 1, PreconditionViolated, "root order must be positive");
    if (k == 1) return z;
    RBall r = rb_root_ui(cb_abs(z), k);
    RBall theta = rb_mul(cb_arg(z), rb_inv(RBall::exact_si((long)k, z.bits())));
    return cb_from_polar(r, theta);
}

CBall cb_pow_si(const CBall& z, long e) {
    if (e == 0) return {RBall::exact_si(1, z.bits()), RBall::exact_si(0, z.bits())};
    unsigned long k = (unsigned long)(e < 0 ? -e : e);
    CBall base = z;
    CBall out(z.bits());
    bool first = true;
    while (k) {
        if (k & 1) {
            out = first ? base : cb_mul(out, base);
            first = false;
        }
        k >>= 1;
        if (k) base = cb_mul(base, base);
    }
    return e < 0 ? cb_inv(out) : out;
}

double cb_mag_upper_d(const CBall& z) {
    if (!z.is_finite()) return std::numeric_limits<double>::infinity();
    return cb_abs(z).mag_upper_d();
}

CBall cb_log1p(const CBall& w) {
    long bits = w.bits();
    double rho = cb_mag_upper_d(w);
    MD_REQUIRE(rho <= 0.5, PreconditionViolated, "log1p series needs |w| <= 1/2");
    CBall zero{RBall::exact_si(0, bits), RBall::exact_si(0, bits)};
    if (rho == 0.0) return zero;

    // Smallest K with rho^K <= rho 2^{-bits-8}; the alternating series then
    // has tail at most rho^{K+1} / ((K+1)(1 - rho)).
    double lr = -std::log2(rho);  // >= 1 since rho <= 1/2
    long K = 1 + (long)std::ceil((double)(bits + 8) / lr);
    if (K < 1) K = 1;
    if (K > 4 * bits + 64) K = 4 * bits + 64;

    // S = w P(-w) with P(u) = sum_{j=0}^{K-1} u^j / (j+1), by Horner.
    CBall u = cb_neg(w);
    CBall acc{RBall::from_rat(Rat(1, (unsigned long)K), bits), RBall::exact_si(0, bits)};
    for (long j = K - 1; j >= 1; --j) {
        CBall cj{RBall::from_rat(Rat(1, (unsigned long)j), bits), RBall::exact_si(0, bits)};
        acc = cb_add(cj, cb_mul(u, acc));
    }
    CBall s = cb_mul(w, acc);

    // Inflate both radii by the series tail (all arithmetic rounded outward).
    Tmp tail(kRadPrec), den(kRadPrec);
    mpfr_set_d(tail, rho, MPFR_RNDU);
    mpfr_pow_ui(tail, tail, (unsigned long)(K + 1), MPFR_RNDU);
    mpfr_div_ui(tail, tail, (unsigned long)(K + 1), MPFR_RNDU);
    mpfr_set_si(den, 1, MPFR_RNDD);
    mpfr_sub_d(den, den, rho, MPFR_RNDD);
    mpfr_div(tail, tail, den, MPFR_RNDU);
    mpfr_add(s.re.rad.get(), s.re.rad.get(), tail, MPFR_RNDU);
    mpfr_add(s.im.rad.get(), s.im.rad.get(), tail, MPFR_RNDU);
    return s;
}

}  // namespace moddep
