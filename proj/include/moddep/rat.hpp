#pragma once

#include <gmpxx.h>

#include <cstdint>
#include <optional>
#include <string>

#include "moddep/check.hpp"

namespace moddep {

using Int = mpz_class;
using Rat = mpq_class;

inline bool is_integer(const Rat& x) { return x.get_den() == 1; }

// gmpxx has no long long constructor; this platform's long is 64-bit.
inline Int to_int(long long v) { return Int((long)v); }
inline Rat to_rat(long long v) { return Rat((long)v); }

// floor(n/d) for integers, exact.
inline Int floor_div(const Int& n, const Int& d) {
    Int q;
    mpz_fdiv_q(q.get_mpz_t(), n.get_mpz_t(), d.get_mpz_t());
    return q;
}

inline Int rat_floor(const Rat& x) { return floor_div(x.get_num(), x.get_den()); }

inline Int rat_ceil(const Rat& x) {
    Int q;
    mpz_cdiv_q(q.get_mpz_t(), x.get_num().get_mpz_t(), x.get_den().get_mpz_t());
    return q;
}

// Unique integer t with x - t in (-1/2, 1/2]; ties at half-integers round down.
inline Int round_half_down(const Rat& x) { return rat_ceil(x - Rat(1, 2)); }

inline Rat frac_part(const Rat& x) { return x - Rat(rat_floor(x)); }

inline Int pow_int(const Int& b, unsigned long e) {
    Int r;
    mpz_pow_ui(r.get_mpz_t(), b.get_mpz_t(), e);
    return r;
}

inline Rat pow_rat(const Rat& b, long e) {
    if (e == 0) return Rat(1);
    Rat r;
    unsigned long a = e < 0 ? -(unsigned long)e : (unsigned long)e;
    mpz_pow_ui(r.get_num().get_mpz_t(), b.get_num().get_mpz_t(), a);
    mpz_pow_ui(r.get_den().get_mpz_t(), b.get_den().get_mpz_t(), a);
    if (e < 0) {
        MD_REQUIRE(b != 0, PreconditionViolated, "0 to a negative power");
        r = Rat(r.get_den(), r.get_num());
    }
    r.canonicalize();
    return r;
}

// binomial(e, k) for e of either sign; integer for integer e.
inline Int binomial(const Int& e, unsigned long k) {
    Int r;
    if (e >= 0) {
        mpz_bin_ui(r.get_mpz_t(), e.get_mpz_t(), k);
        return r;
    }
    // C(e, k) = (-1)^k C(-e+k-1, k)
    Int top = -e + (long)k - 1;
    mpz_bin_ui(r.get_mpz_t(), top.get_mpz_t(), k);
    return (k % 2 == 0) ? r : Int(-r);
}

// "p/q" or "p"; also accepts decimal literals like "-1.25e3" (exact value).
Rat parse_rat(const std::string& s);
std::string format_rat(const Rat& x);

// Element of Q(i); enough field arithmetic for polynomial work.
struct GaussRat {
    Rat re, im;

    GaussRat() = default;
    GaussRat(Rat r) : re(std::move(r)) {}
    GaussRat(Rat r, Rat i) : re(std::move(r)), im(std::move(i)) {}

    bool is_zero() const { return re == 0 && im == 0; }
    bool is_real() const { return im == 0; }

    friend GaussRat operator+(const GaussRat& a, const GaussRat& b) {
        return {a.re + b.re, a.im + b.im};
    }
    friend GaussRat operator-(const GaussRat& a, const GaussRat& b) {
        return {a.re - b.re, a.im - b.im};
    }
    friend GaussRat operator-(const GaussRat& a) { return {-a.re, -a.im}; }
    friend GaussRat operator*(const GaussRat& a, const GaussRat& b) {
        return {a.re * b.re - a.im * b.im, a.re * b.im + a.im * b.re};
    }
    GaussRat conj() const { return {re, -im}; }
    Rat norm() const { return re * re + im * im; }
    GaussRat inv() const {
        MD_REQUIRE(!is_zero(), PreconditionViolated, "division by zero in Q(i)");
        Rat n = norm();
        return {re / n, -im / n};
    }
    friend GaussRat operator/(const GaussRat& a, const GaussRat& b) { return a * b.inv(); }
    friend bool operator==(const GaussRat& a, const GaussRat& b) {
        return a.re == b.re && a.im == b.im;
    }
    friend bool operator!=(const GaussRat& a, const GaussRat& b) { return !(a == b); }
};

// "p/q", "p/q+r/s i", "p/q-r/s i" (spaces around the imaginary part optional).
GaussRat parse_gauss(const std::string& s);
std::string format_gauss(const GaussRat& x);

}  // namespace moddep
