#include "moddep/laurent.hpp"

#include <algorithm>
#include <sstream>

namespace moddep {

namespace {

// Dense convolutions dominate everything downstream, and the eta-quotient
// workloads are almost always integral; skipping mpq canonicalization there
// is worth an order of magnitude.
bool window_is_integer(const LaurentSeries& s, long lo, long hi) {
    for (long n = lo; n <= hi; ++n)
        if (mpz_cmp_ui(mpq_denref(s.coeff_or_zero(n).get_mpq_t()), 1) != 0) return false;
    return true;
}

}  // namespace

void LaurentSeries::normalize() {
    offset_.canonicalize();  // two-arg Rat construction does not canonicalize
    // Fold integral part of the offset into the exponent window.
    Int shift = rat_floor(offset_);
    if (shift != 0) {
        offset_ -= Rat(shift);
        MD_REQUIRE(shift.fits_slong_p(), PreconditionViolated, "offset overflow");
        lo_ += shift.get_si();
        order_ += shift.get_si();
    }
    // Drop leading stored zeros; they carry no information.
    size_t k = 0;
    while (k < c_.size() && c_[k] == 0) ++k;
    if (k > 0) {
        c_.erase(c_.begin(), c_.begin() + (long)k);
        lo_ += (long)k;
    }
    MD_INVARIANT(c_.size() == (size_t)std::max(0L, order_ - lo_ + 1), "window size mismatch");
}

LaurentSeries::LaurentSeries(Rat offset, long lo, std::vector<Rat> c)
    : offset_(std::move(offset)), lo_(lo), order_(lo + (long)c.size() - 1), c_(std::move(c)) {
    normalize();
}

LaurentSeries LaurentSeries::zero(long order) {
    LaurentSeries s;
    s.lo_ = order + 1;
    s.order_ = order;
    return s;
}

LaurentSeries LaurentSeries::constant(const Rat& c, long order) {
    return monomial(c, 0, order);
}

LaurentSeries LaurentSeries::monomial(const Rat& c, long exp, long order) {
    if (c == 0) return zero(order);
    MD_REQUIRE(exp <= order, WindowTooSmall, "monomial exponent beyond order");
    std::vector<Rat> v((size_t)(order - exp + 1), Rat(0));
    v[0] = c;
    return LaurentSeries(Rat(0), exp, std::move(v));
}

bool LaurentSeries::is_zero() const {
    return std::all_of(c_.begin(), c_.end(), [](const Rat& x) { return x == 0; });
}

std::optional<long> LaurentSeries::lead() const {
    for (size_t k = 0; k < c_.size(); ++k)
        if (c_[k] != 0) return lo_ + (long)k;
    return std::nullopt;
}

Rat LaurentSeries::coeff(long n) const {
    MD_REQUIRE(n <= order_, WindowTooSmall,
               "coefficient q^" + std::to_string(n) + " beyond computed order " +
                   std::to_string(order_));
    if (n < lo_) return Rat(0);
    return c_[(size_t)(n - lo_)];
}

Rat LaurentSeries::coeff_or_zero(long n) const {
    if (n < lo_ || n > order_) return Rat(0);
    return c_[(size_t)(n - lo_)];
}

LaurentSeries LaurentSeries::truncate(long new_order) const {
    MD_REQUIRE(new_order <= order_, WindowTooSmall, "cannot extend a window by truncation");
    LaurentSeries r = *this;
    r.order_ = new_order;
    r.c_.resize((size_t)std::max(0L, new_order - r.lo_ + 1));
    if (new_order < r.lo_) r.lo_ = new_order + 1;
    r.normalize();
    return r;
}

LaurentSeries LaurentSeries::shift(long k) const {
    LaurentSeries r = *this;
    r.lo_ += k;
    r.order_ += k;
    return r;
}

LaurentSeries LaurentSeries::scale(const Rat& t) const {
    if (t == 0) return zero(order_);
    LaurentSeries r = *this;
    for (Rat& x : r.c_) x *= t;
    return r;
}

LaurentSeries operator+(const LaurentSeries& a, const LaurentSeries& b) {
    MD_REQUIRE(a.offset_ == b.offset_ || a.is_zero() || b.is_zero(), NonIntegralExponent,
               "adding series with different fractional offsets");
    if (a.is_zero() && b.is_zero())
        return LaurentSeries::zero(std::min(a.order_, b.order_));
    long order = std::min(a.order_, b.order_);
    long lo = std::min(a.lo_, b.lo_);
    if (lo > order) return LaurentSeries::zero(order);
    std::vector<Rat> c((size_t)(order - lo + 1), Rat(0));
    for (long n = lo; n <= order; ++n) c[(size_t)(n - lo)] = a.coeff_or_zero(n) + b.coeff_or_zero(n);
    return LaurentSeries(a.is_zero() ? b.offset_ : a.offset_, lo, std::move(c));
}

LaurentSeries operator-(const LaurentSeries& a) { return a.scale(Rat(-1)); }

LaurentSeries operator-(const LaurentSeries& a, const LaurentSeries& b) { return a + (-b); }

LaurentSeries operator*(const LaurentSeries& a, const LaurentSeries& b) {
    auto la = a.lead(), lb = b.lead();
    if (!la || !lb) {
        // Zero factor: product is known zero through the other's lead plus this window.
        if (!la && !lb) return LaurentSeries::zero(a.order_ + b.order_ + 1);
        return LaurentSeries::zero(!la ? a.order_ + *lb : b.order_ + *la);
    }
    long order = std::min(a.order_ + *lb, b.order_ + *la);
    long lo = *la + *lb;
    if (window_is_integer(a, *la, a.order_) && window_is_integer(b, *lb, b.order_)) {
        std::vector<Int> z((size_t)(order - lo + 1), Int(0));
        for (long i = *la; i <= a.order_; ++i) {
            const Rat& ai = a.coeff_or_zero(i);
            if (ai == 0) continue;
            long kmax = std::min(b.order_, order - i);
            for (long k = *lb; k <= kmax; ++k) {
                const Rat& bk = b.coeff_or_zero(k);
                if (bk != 0)
                    mpz_addmul(z[(size_t)(i + k - lo)].get_mpz_t(),
                               mpq_numref(ai.get_mpq_t()), mpq_numref(bk.get_mpq_t()));
            }
        }
        std::vector<Rat> c(z.size());
        for (size_t n = 0; n < z.size(); ++n) c[n] = Rat(z[n]);
        return LaurentSeries(a.offset_ + b.offset_, lo, std::move(c));
    }
    std::vector<Rat> c((size_t)(order - lo + 1), Rat(0));
    for (long i = *la; i <= a.order_; ++i) {
        const Rat& ai = a.coeff_or_zero(i);
        if (ai == 0) continue;
        long kmax = std::min(b.order_, order - i);
        for (long k = *lb; k <= kmax; ++k) {
            const Rat& bk = b.coeff_or_zero(k);
            if (bk != 0) c[(size_t)(i + k - lo)] += ai * bk;
        }
    }
    return LaurentSeries(a.offset_ + b.offset_, lo, std::move(c));
}

LaurentSeries LaurentSeries::inverse() const {
    auto l = lead();
    MD_REQUIRE(l.has_value(), PreconditionViolated, "inverting the zero series");
    long R = order_ - *l;  // relative window survives inversion
    const Rat& c0 = coeff_or_zero(*l);
    // (c0 q^l (1 + u))^-1 = c0^-1 q^-l (1 - u + u^2 - ...) computed by recurrence.
    if ((c0 == 1 || c0 == -1) && window_is_integer(*this, *l, order_)) {
        // Unit lead keeps the recurrence integral: r_k = -c0 sum a_i r_{k-i}.
        std::vector<Int> r((size_t)(R + 1), Int(0));
        r[0] = c0.get_num();
        for (long k = 1; k <= R; ++k) {
            Int s(0);
            for (long i = 1; i <= k; ++i) {
                const Rat& ai = coeff_or_zero(*l + i);
                if (ai != 0)
                    mpz_addmul(s.get_mpz_t(), mpq_numref(ai.get_mpq_t()),
                               r[(size_t)(k - i)].get_mpz_t());
            }
            r[(size_t)k] = c0 == 1 ? Int(-s) : s;
        }
        std::vector<Rat> rc(r.size());
        for (size_t n = 0; n < r.size(); ++n) rc[n] = Rat(r[n]);
        return LaurentSeries(-offset_, -*l, std::move(rc));
    }
    std::vector<Rat> r((size_t)(R + 1), Rat(0));
    r[0] = 1 / c0;
    for (long k = 1; k <= R; ++k) {
        Rat s(0);
        for (long i = 1; i <= k; ++i) {
            const Rat& ai = coeff_or_zero(*l + i);
            if (ai != 0) s += ai * r[(size_t)(k - i)];
        }
        r[(size_t)k] = -s / c0;
    }
    LaurentSeries out(-offset_, -*l, std::move(r));
    return out;
}

LaurentSeries operator/(const LaurentSeries& a, const LaurentSeries& b) { return a * b.inverse(); }

LaurentSeries LaurentSeries::pow_int(long k) const {
    if (k == 0) return LaurentSeries::constant(Rat(1), order_ - (lead() ? *lead() : 0));
    const LaurentSeries base = k > 0 ? *this : inverse();
    long e = std::labs(k);
    LaurentSeries acc = base;
    // Square-and-multiply keeps the relative window tight.
    LaurentSeries result;
    bool have = false;
    while (e > 0) {
        if (e & 1) {
            result = have ? result * acc : acc;
            have = true;
        }
        e >>= 1;
        if (e) acc = acc * acc;
    }
    return result;
}

LaurentSeries LaurentSeries::pow_rat(const Rat& e) const {
    if (is_integer(e)) {
        MD_REQUIRE(e.get_num().fits_slong_p(), PreconditionViolated, "exponent overflow");
        return pow_int(e.get_num().get_si());
    }
    auto l = lead();
    MD_REQUIRE(l.has_value(), PreconditionViolated, "rational power of the zero series");
    MD_REQUIRE(coeff_or_zero(*l) == 1, NonIntegralExponent,
               "rational power requires leading coefficient 1");
    long R = order_ - *l;
    // (1 + u)^e by generalized binomial recurrence: b_k from b_{k-1}.
    // Use the ODE (1+u) y' = e u' y coefficient recursion.
    std::vector<Rat> u((size_t)(R + 1), Rat(0));
    for (long k = 1; k <= R; ++k) u[(size_t)k] = coeff_or_zero(*l + k);
    std::vector<Rat> y((size_t)(R + 1), Rat(0));
    y[0] = 1;
    for (long k = 1; k <= R; ++k) {
        // k y_k = sum_{i=1}^{k} (e i - (k - i)) u_i y_{k-i}
        Rat s(0);
        for (long i = 1; i <= k; ++i) {
            if (u[(size_t)i] == 0) continue;
            s += (e * Rat(i) - Rat(k - i)) * u[(size_t)i] * y[(size_t)(k - i)];
        }
        y[(size_t)k] = s / Rat(k);
    }
    Rat new_off = (Rat(*l) + offset_) * e;
    return LaurentSeries(new_off, 0, std::move(y));
}

bool operator==(const LaurentSeries& a, const LaurentSeries& b) {
    if (a.is_zero() && b.is_zero()) return true;
    if (a.offset_ != b.offset_) return false;
    long lo = std::min(a.lo_, b.lo_);
    long hi = std::min(a.order_, b.order_);
    for (long n = lo; n <= hi; ++n)
        if (a.coeff_or_zero(n) != b.coeff_or_zero(n)) return false;
    // Windows must agree for equality of truncated objects.
    return a.order_ == b.order_;
}

std::string LaurentSeries::to_text() const {
    std::ostringstream os;
    os << "offset " << format_rat(offset_) << "  lo " << lo_ << "  order " << order_ << "\n";
    for (long n = lo_; n <= order_; ++n) {
        const Rat& c = coeff_or_zero(n);
        if (c != 0) os << n << " " << format_rat(c) << "\n";
    }
    return os.str();
}

LaurentSeries LaurentSeries::from_text(const std::string& text) {
    std::istringstream is(text);
    std::string kw;
    std::string off_s;
    long lo = 0, order = 0;
    is >> kw >> off_s;
    MD_REQUIRE(kw == "offset", ParseError, "series header must start with 'offset'");
    is >> kw >> lo;
    MD_REQUIRE(kw == "lo" && is.good(), ParseError, "series header missing 'lo'");
    is >> kw >> order;
    MD_REQUIRE(kw == "order" && !is.fail(), ParseError, "series header missing 'order'");
    std::vector<Rat> c((size_t)std::max(0L, order - lo + 1), Rat(0));
    long n;
    std::string cs;
    while (is >> n >> cs) {
        MD_REQUIRE(n >= lo && n <= order, ParseError,
                   "exponent " + std::to_string(n) + " outside declared window");
        c[(size_t)(n - lo)] = parse_rat(cs);
    }
    return LaurentSeries(parse_rat(off_s), lo, std::move(c));
}

LaurentSeries binomial_factor(const Int& e, long step, long order) {
    MD_REQUIRE(step > 0, PreconditionViolated, "factor step must be positive");
    std::vector<Rat> c((size_t)(order + 1), Rat(0));
    for (long k = 0; step * k <= order; ++k) {
        Int b = binomial(e, (unsigned long)k);
        if (k % 2) b = -b;
        c[(size_t)(step * k)] = Rat(b);
    }
    return LaurentSeries(Rat(0), 0, std::move(c));
}

namespace qseries {

namespace {

std::vector<Int> sigma_table(long order, unsigned long k) {
    std::vector<Int> s((size_t)(order + 1), Int(0));
    for (long d = 1; d <= order; ++d) {
        Int dk = pow_int(Int(d), k);
        for (long n = d; n <= order; n += d) s[(size_t)n] += dk;
    }
    return s;
}

}  // namespace

LaurentSeries eta_quotient(const std::vector<std::pair<long, long>>& factors, long order) {
    Rat offset(0);
    for (auto [m, e] : factors) {
        MD_REQUIRE(m > 0, PreconditionViolated, "eta level must be positive");
        offset += Rat(m * e, 24);
    }
    // Relative product window must cover `order` after the offset shift.
    Int off_floor = rat_floor(offset);
    long rel = order - (long)off_floor.get_si();
    MD_REQUIRE(rel >= 0, WindowTooSmall, "order below the leading exponent");
    // (1 - q^s) multiplies in place as c[k] -= c[k-s]; dividing it back out is
    // the prefix recurrence c[k] += c[k-s].  Each eta factor is |e| such
    // passes per period multiple: O(|e| rel^2 / m) integer adds in total.
    std::vector<Int> z((size_t)(rel + 1), Int(0));
    z[0] = 1;
    for (auto [m, e] : factors) {
        for (long s = m; s <= rel; s += m) {
            for (long rep = 0; rep < std::labs(e); ++rep) {
                if (e > 0)
                    for (long k = rel; k >= s; --k) z[(size_t)k] -= z[(size_t)(k - s)];
                else
                    for (long k = s; k <= rel; ++k) z[(size_t)k] += z[(size_t)(k - s)];
            }
        }
    }
    std::vector<Rat> c((size_t)(rel + 1));
    for (long n = 0; n <= rel; ++n) c[(size_t)n] = Rat(z[(size_t)n]);
    return LaurentSeries(offset, 0, std::move(c));
}

LaurentSeries E4_series(long order) {
    MD_REQUIRE(order >= 0, WindowTooSmall, "order must be >= 0");
    auto s3 = sigma_table(order, 3);
    std::vector<Rat> c((size_t)(order + 1), Rat(0));
    c[0] = 1;
    for (long n = 1; n <= order; ++n) c[(size_t)n] = Rat(240 * s3[(size_t)n]);
    return LaurentSeries(Rat(0), 0, std::move(c));
}

LaurentSeries E6_series(long order) {
    MD_REQUIRE(order >= 0, WindowTooSmall, "order must be >= 0");
    auto s5 = sigma_table(order, 5);
    std::vector<Rat> c((size_t)(order + 1), Rat(0));
    c[0] = 1;
    for (long n = 1; n <= order; ++n) c[(size_t)n] = Rat(-504 * s5[(size_t)n]);
    return LaurentSeries(Rat(0), 0, std::move(c));
}

LaurentSeries delta_series(long order) { return eta_quotient({{1, 24}}, order); }

LaurentSeries j_series(long order) {
    // E4^3/Delta.  Delta leads at q^1, so 1/Delta keeps the relative window of
    // Delta while the quotient leads at q^-1: two orders are lost end to end.
    LaurentSeries e4 = E4_series(order + 2);
    LaurentSeries d = delta_series(order + 2);
    return e4.pow_int(3) / d;
}

LaurentSeries theta_series(long order) {
    MD_REQUIRE(order >= 0, WindowTooSmall, "order must be >= 0");
    std::vector<Rat> c((size_t)(order + 1), Rat(0));
    c[0] = 1;
    for (long n = 1; n * n <= order; ++n) c[(size_t)(n * n)] = 2;
    return LaurentSeries(Rat(0), 0, std::move(c));
}

std::vector<Int> peel_product_exponents(const LaurentSeries& F, long n_max) {
    auto l = F.lead();
    MD_REQUIRE(l.has_value(), NotAProductForm, "zero series has no product form");
    MD_REQUIRE(F.offset() == 0, NotAProductForm, "fractional offset has no product form");
    MD_REQUIRE(F.coeff_or_zero(*l) == 1, NotAProductForm, "leading coefficient must be 1");
    MD_REQUIRE(n_max <= F.order() - *l, WindowTooSmall,
               "window supports peeling only through n = " + std::to_string(F.order() - *l));
    // Work with the unit part U = q^{-lead} F; divide off (1-q^n)^{e_n} in turn.
    LaurentSeries U = F.shift(-*l);
    std::vector<Int> es;
    es.reserve((size_t)n_max);
    for (long n = 1; n <= n_max; ++n) {
        Rat cn = U.coeff_or_zero(n);
        MD_REQUIRE(is_integer(cn), NotAProductForm,
                   "non-integer exponent at n = " + std::to_string(n));
        Int e = -cn.get_num();
        es.push_back(e);
        if (e != 0) U = U * binomial_factor(-e, n, U.order());
    }
    return es;
}

}  // namespace qseries

}  // namespace moddep
