#pragma once

#include <iosfwd>
#include <optional>
#include <utility>
#include <vector>

#include "moddep/rat.hpp"

namespace moddep {

// Truncated Laurent series q^{offset} * sum_{n=lo}^{order} c_n q^n with exact
// rational coefficients. offset is canonicalized into [0, 1); all fractional
// q-powers live there, the integer window stays in [lo, order].
//
// Truncation bookkeeping: coefficients above `order` are unknown, not zero.
// Products and quotients propagate the *relative* window R = order - lead so a
// result never claims coefficients its inputs cannot determine.
class LaurentSeries {
public:
    LaurentSeries() : lo_(0), order_(-1) {}  // zero known through order -1

    static LaurentSeries zero(long order);
    static LaurentSeries constant(const Rat& c, long order);
    static LaurentSeries monomial(const Rat& c, long exp, long order);
    // Takes ownership of c = coefficients of q^{lo..lo+c.size()-1}.
    LaurentSeries(Rat offset, long lo, std::vector<Rat> c);

    const Rat& offset() const { return offset_; }
    long lo() const { return lo_; }
    long order() const { return order_; }
    bool is_zero() const;
    std::optional<long> lead() const;  // least exponent with nonzero coefficient
    Rat coeff(long n) const;           // 0 outside [lo, order]; asking above order throws
    Rat coeff_or_zero(long n) const;   // 0 anywhere outside the stored window

    LaurentSeries truncate(long new_order) const;
    LaurentSeries shift(long k) const;  // multiply by q^k
    LaurentSeries scale(const Rat& c) const;

    friend LaurentSeries operator+(const LaurentSeries& a, const LaurentSeries& b);
    friend LaurentSeries operator-(const LaurentSeries& a, const LaurentSeries& b);
    friend LaurentSeries operator-(const LaurentSeries& a);
    friend LaurentSeries operator*(const LaurentSeries& a, const LaurentSeries& b);
    LaurentSeries inverse() const;  // requires nonzero leading coefficient
    friend LaurentSeries operator/(const LaurentSeries& a, const LaurentSeries& b);
    LaurentSeries pow_int(long k) const;
    // Rational exponent: leading coefficient must be 1 and the resulting offset
    // (lead + offset) * e is folded; NonIntegralExponent otherwise.
    LaurentSeries pow_rat(const Rat& e) const;

    friend bool operator==(const LaurentSeries& a, const LaurentSeries& b);

    // Text format: header `offset p/q  lo L  order N`, then `exponent coefficient`
    // lines for the nonzero coefficients.
    std::string to_text() const;
    static LaurentSeries from_text(const std::string& text);

private:
    void normalize();

    Rat offset_;          // in [0, 1)
    long lo_, order_;     // inclusive integer window; empty iff order_ < lo_
    std::vector<Rat> c_;  // size order_ - lo_ + 1
};

// Truncated (1 - q^step)^e.
LaurentSeries binomial_factor(const Int& e, long step, long order);

namespace qseries {

// prod over (m, e): eta(m z)^e including the q^{m e/24} prefactors.
LaurentSeries eta_quotient(const std::vector<std::pair<long, long>>& factors, long order);
LaurentSeries E4_series(long order);
LaurentSeries E6_series(long order);
LaurentSeries delta_series(long order);     // eta(z)^24
LaurentSeries j_series(long order);         // E4^3 / Delta
LaurentSeries theta_series(long order);     // 1 + 2 sum q^{n^2}
LaurentSeries hurwitz_series(long order);   // -1/12 + sum_{n>0} H(n) q^n
Rat hurwitz_H(long n);

// Exponents e_1..e_{n_max} with F = q^{lead} prod (1 - q^n)^{e_n}; requires
// leading coefficient 1 and integer exponents at every step.
std::vector<Int> peel_product_exponents(const LaurentSeries& F, long n_max);

}  // namespace qseries

}  // namespace moddep
