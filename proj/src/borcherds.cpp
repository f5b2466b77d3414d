#include "moddep/borcherds.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <optional>
#include <sstream>

namespace moddep {

namespace {

long mod4(long long n) { return (long)(((n % 4) + 4) % 4); }

// Order of prod_m eta(m z)^{r_m} at the cusp with denominator c | N, in local
// variable units (Ligozat).
Rat eta_cusp_order(const std::vector<std::pair<long, long>>& fac, long N, long c) {
    Rat sum(0);
    for (auto [m, r] : fac) {
        long g = std::gcd(c, m);
        Rat term(to_int(g * g * r), to_int(m));
        term.canonicalize();
        sum += term;
    }
    long g2 = std::gcd(c, N / c);
    Rat scale(to_int(N), to_int(24 * c * g2));
    scale.canonicalize();
    return sum * scale;
}

const std::vector<std::pair<long, long>> kHauptFac = {{1, 8}, {4, -8}};

// x = eta(z)^8 / eta(4z)^8 is the q^{-1} Hauptmodul used for the spanning
// family.  Its only pole sits at infinity, it vanishes at the cusp 0, and its
// value at the cusp 1/2 is -16: u = (eta(z)/eta(2z))^24 has a simple pole
// there, so x^2 = u (x + 16) forces the value.  Both facts are checked once.
void verify_hauptmodul_once() {
    static const bool ok = [] {
        MD_INVARIANT(eta_cusp_order(kHauptFac, 4, 1) > 0, "x must vanish at the cusp 0");
        MD_INVARIANT(eta_cusp_order(kHauptFac, 4, 2) == 0, "x must be finite at the cusp 1/2");
        MD_INVARIANT(eta_cusp_order(kHauptFac, 4, 4) == Rat(-1), "x must have a simple pole at infinity");
        MD_INVARIANT(eta_cusp_order({{1, 24}, {2, -24}}, 4, 2) == Rat(-1),
                     "u must have a simple pole at the cusp 1/2");
        long W = 40;
        LaurentSeries x = qseries::eta_quotient(kHauptFac, W);
        LaurentSeries u = qseries::eta_quotient({{1, 24}, {2, -24}}, W);
        MD_INVARIANT(x * x == u * (x + LaurentSeries::constant(Rat(16), W)),
                     "Hauptmodul cusp value -16 failed its series certificate");
        return true;
    }();
    (void)ok;
}

// Exact Gauss-Jordan on the plus-condition window; free variables pinned to 0
// (the full-order verification is the gate).  nullopt = inconsistent.
std::optional<std::vector<Rat>> solve_plus_window(const std::vector<LaurentSeries>& fam,
                                                  long d, long top) {
    std::vector<long> rows_n;
    for (long n = -d; n <= top; ++n) {
        long rr = mod4(n);
        if (n <= 0 || rr == 2 || rr == 3) rows_n.push_back(n);
    }
    size_t R = rows_n.size(), U = fam.size();
    std::vector<std::vector<Rat>> M(R, std::vector<Rat>(U + 1, Rat(0)));
    for (size_t i = 0; i < R; ++i) {
        long n = rows_n[i];
        for (size_t j = 0; j < U; ++j) M[i][j] = fam[j].coeff_or_zero(n);
        if (n == -d && d > 0)
            M[i][U] = 1;
        else if (n == 0)
            M[i][U] = (d == 0) ? 1 : 0;
    }
    std::vector<std::optional<size_t>> pivot_row(U);
    size_t row = 0;
    for (size_t col = 0; col < U && row < R; ++col) {
        size_t pr = row;
        while (pr < R && M[pr][col] == 0) ++pr;
        if (pr == R) continue;
        std::swap(M[pr], M[row]);
        Rat inv = Rat(1) / M[row][col];
        for (size_t j = col; j <= U; ++j) M[row][j] *= inv;
        for (size_t i = 0; i < R; ++i) {
            if (i == row || M[i][col] == 0) continue;
            Rat f = M[i][col];
            for (size_t j = col; j <= U; ++j) M[i][j] -= f * M[row][j];
        }
        pivot_row[col] = row;
        ++row;
    }
    for (size_t i = row; i < R; ++i)
        if (M[i][U] != 0) return std::nullopt;
    std::vector<Rat> sol(U, Rat(0));
    for (size_t col = 0; col < U; ++col)
        if (pivot_row[col]) sol[col] = M[*pivot_row[col]][U];
    return sol;
}

std::optional<PlusForm> package_verify(const LaurentSeries& F, long d, long W) {
    MD_INVARIANT(F.offset() == 0, "plus form with fractional exponents");
    PlusForm pf;
    pf.order = W;
    for (long n = F.lo(); n <= W; ++n) {
        Rat c = F.coeff_or_zero(n);
        if (c == 0) continue;
        if (!is_integer(c)) return std::nullopt;
        long rr = mod4(n);
        if (rr == 2 || rr == 3) return std::nullopt;
        if (n < 0 && n != -d) return std::nullopt;
        pf.coeffs[n] = c.get_num();
    }
    if (d > 0 && pf.a(-d) != 1) return std::nullopt;
    if (pf.a(0) != (d == 0 ? 1 : 0)) return std::nullopt;
    return pf;
}

CBall cb_exact_zero(long bits) { return {RBall::exact_si(0, bits), RBall::exact_si(0, bits)}; }

// (1 - w)^e.  The log1p route keeps the output radius proportional to |w|;
// going through cb_log(1 - w) instead would leave an absolute ulp(1) floor
// that the astronomically large exponents of Borcherds products amplify into
// a useless enclosure.
CBall one_minus_pow(const CBall& w, const Int& e) {
    if (cb_mag_upper_d(w) <= 0.5)
        return cb_exp(cb_mul_rb(cb_log1p(cb_neg(w)), RBall::from_int(e, w.bits())));
    CBall base = cb_sub({RBall::exact_si(1, w.bits()), RBall::exact_si(0, w.bits())}, w);
    if (e.fits_slong_p()) return cb_pow_si(base, e.get_si());
    return cb_exp(cb_mul_rb(cb_log(base), RBall::from_int(e, w.bits())));
}

}  // namespace

Int PlusForm::a(long n) const {
    MD_REQUIRE(n <= order, WindowTooSmall, "coefficient index beyond the computed window");
    auto it = coeffs.find(n);
    return it == coeffs.end() ? Int(0) : it->second;
}

long PlusForm::principal_index() const {
    return coeffs.empty() ? 0 : coeffs.begin()->first;
}

std::string PlusForm::to_text() const {
    std::ostringstream os;
    os << "order " << order << "\n";
    for (const auto& [n, c] : coeffs) os << n << " " << c.get_str() << "\n";
    return os.str();
}

PlusForm PlusForm::from_text(const std::string& text) {
    std::istringstream is(text);
    std::string line;
    PlusForm pf;
    bool saw_order = false;
    long max_n = 0;
    while (std::getline(is, line)) {
        std::istringstream ls(line);
        std::string first;
        if (!(ls >> first)) continue;
        if (first == "order") {
            MD_REQUIRE((bool)(ls >> pf.order), ParseError, "malformed order line");
            saw_order = true;
            continue;
        }
        long n = 0;
        try {
            n = std::stol(first);
        } catch (const std::exception&) {
            throw ParseError("bad coefficient index: " + first);
        }
        std::string cs;
        MD_REQUIRE((bool)(ls >> cs), ParseError, "missing coefficient value");
        Int c;
        if (mpz_set_str(c.get_mpz_t(), cs.c_str(), 10) != 0)
            throw ParseError("bad coefficient value: " + cs);
        if (c != 0) pf.coeffs[n] = c;
        max_n = std::max(max_n, n);
    }
    if (!saw_order) pf.order = max_n;
    MD_REQUIRE(pf.order >= max_n, ParseError, "order below the largest listed index");
    return pf;
}

PlusForm pf_add(const PlusForm& f, const PlusForm& g) {
    PlusForm out;
    out.order = std::min(f.order, g.order);
    for (const auto& [n, c] : f.coeffs)
        if (n <= out.order) out.coeffs[n] = c;
    for (const auto& [n, c] : g.coeffs) {
        if (n > out.order) continue;
        Int v = out.coeffs.count(n) ? out.coeffs[n] + c : c;
        if (v == 0)
            out.coeffs.erase(n);
        else
            out.coeffs[n] = v;
    }
    return out;
}

PlusForm pf_scale(const PlusForm& f, const Int& c) {
    PlusForm out;
    out.order = f.order;
    if (c == 0) return out;
    for (const auto& [n, v] : f.coeffs) out.coeffs[n] = v * c;
    return out;
}

namespace {

// theta (c_0 + c_1 x + ... + c_d x^d + sum_t c_{d+2t-1} x^-t + c_{d+2t} (x+16)^-t)
// materialized through q^W.  Horner on the polynomial part keeps the number of
// full-order multiplies linear in d.
LaurentSeries combine_family(long d, long stage, const std::vector<Rat>& c, long W) {
    long Wb = W + d + 6;
    // Clear denominators up front: with integer combination coefficients every
    // dense multiply below stays on the integer fast path.
    Int L(1);
    for (const Rat& cj : c) {
        Int den = cj.get_den();
        mpz_lcm(L.get_mpz_t(), L.get_mpz_t(), den.get_mpz_t());
    }
    auto ci = [&](long k) {
        Rat v = c[(size_t)k] * Rat(L);
        MD_INVARIANT(is_integer(v), "denominator clearing must leave integers");
        return LaurentSeries::constant(v, Wb);
    };
    LaurentSeries th = qseries::theta_series(Wb);
    LaurentSeries x = qseries::eta_quotient(kHauptFac, Wb);
    LaurentSeries P = ci(d);
    for (long k = d - 1; k >= 0; --k) P = P * x + ci(k);
    if (stage > 0) {
        LaurentSeries xi = x.inverse();
        LaurentSeries x16i = (x + LaurentSeries::constant(Rat(16), Wb)).inverse();
        LaurentSeries pi = LaurentSeries::constant(Rat(1), Wb);
        LaurentSeries p16 = pi;
        for (long t = 1; t <= stage; ++t) {
            pi = pi * xi;
            p16 = p16 * x16i;
            long idx = d + 2 * t - 1;
            P = P + pi * ci(idx) + p16 * ci(idx + 1);
        }
    }
    return (th * P).scale(Rat(1, L));
}

}  // namespace

PlusForm build_fd(long d, long order) {
    MD_REQUIRE(d >= 0 && (d % 4 == 0 || d % 4 == 3), NotInBasisIndexSet,
               "basis index must be nonnegative and 0 or 3 mod 4");
    MD_REQUIRE(order >= 1, PreconditionViolated, "order must be positive");
    verify_hauptmodul_once();

    // The linear constraints only involve coefficients up to q^{4d+40}, so the
    // combination is found on a short window first; the requested order is
    // materialized once, for the combination that verifies.
    long W = std::max(order, 4 * d + 60);
    long Ws = 4 * d + 60;
    long Wsb = Ws + d + 6;
    LaurentSeries th = qseries::theta_series(Wsb);
    LaurentSeries x = qseries::eta_quotient(kHauptFac, Wsb);
    LaurentSeries x16 = x + LaurentSeries::constant(Rat(16), Wsb);
    LaurentSeries xi = x.inverse();
    LaurentSeries x16i = x16.inverse();

    long max_stage = d / 4 + 3;
    for (long stage = 0; stage <= max_stage; ++stage) {
        std::vector<LaurentSeries> fam;
        LaurentSeries xp = LaurentSeries::constant(Rat(1), Wsb);
        for (long k = 0; k <= d; ++k) {
            fam.push_back(th * xp);
            if (k < d) xp = xp * x;
        }
        LaurentSeries pi = LaurentSeries::constant(Rat(1), Wsb);
        LaurentSeries p16 = LaurentSeries::constant(Rat(1), Wsb);
        for (long t = 1; t <= stage; ++t) {
            pi = pi * xi;
            p16 = p16 * x16i;
            fam.push_back(th * pi);
            fam.push_back(th * p16);
        }
        auto sol = solve_plus_window(fam, d, 4 * d + 40);
        if (!sol) continue;
        LaurentSeries F = LaurentSeries::zero(Wsb);
        for (size_t j = 0; j < fam.size(); ++j)
            if ((*sol)[j] != 0) F = F + fam[j].scale((*sol)[j]);
        if (F.is_zero()) continue;
        auto pf = package_verify(F.truncate(Ws), d, Ws);
        if (!pf) continue;
        if (W <= Ws) return *pf;
        auto pff = package_verify(combine_family(d, stage, *sol, W).truncate(W), d, W);
        MD_INVARIANT(pff.has_value(), "window combination must package at full order");
        return *pff;
    }
    throw SpanningFamilyInsufficient("no plus form with principal part q^-" +
                                     std::to_string(d) + " in the spanning family");
}

Rat lift_h(const PlusForm& f) {
    Rat h(0);
    for (const auto& [n, c] : f.coeffs) {
        if (n > 0) break;
        h += Rat(c) * qseries::hurwitz_H(-n);
    }
    return h;
}

LiftResult lift(const PlusForm& f, long order) {
    MD_REQUIRE(order >= 1, PreconditionViolated, "order must be positive");
    MD_REQUIRE(order <= 46340 && order * order <= f.order, WindowTooSmall,
               "product exponents need a(n^2) through n = order");
    LaurentSeries P = LaurentSeries::constant(Rat(1), order);
    for (long n = 1; n <= order; ++n) {
        Int e = f.a(n * n);
        if (e != 0) P = P * binomial_factor(e, n, order);
    }
    return {lift_h(f), std::move(P)};
}

std::map<long long, long long> lift_divisor(const PlusForm& f, long long delta_min,
                                            long long delta_max) {
    MD_REQUIRE(delta_min <= delta_max && delta_max < 0, PreconditionViolated,
               "discriminant range must be negative");
    std::map<long long, long long> out;
    long pmin = f.principal_index();
    for (long long Delta = delta_min; Delta <= delta_max; ++Delta) {
        long rr = mod4(Delta);
        if (rr != 0 && rr != 1) continue;
        Int m(0);
        if (pmin < 0) {
            for (long long n = 1; n * n * (-Delta) <= -(long long)pmin; ++n)
                m += f.a((long)(n * n * Delta));
        }
        MD_INVARIANT(m.fits_slong_p(), "divisor multiplicity overflow");
        out[Delta] = m.get_si();
    }
    return out;
}

std::string B0Element::to_text() const {
    std::ostringstream os;
    bool first = true;
    for (const auto& [d, a] : exps) {
        if (!first) os << ",";
        os << d << ":" << a;
        first = false;
    }
    return os.str();
}

B0Element B0Element::from_text(const std::string& text) {
    B0Element e;
    std::istringstream is(text);
    std::string item;
    while (std::getline(is, item, ',')) {
        if (item.empty()) continue;
        auto pos = item.find(':');
        MD_REQUIRE(pos != std::string::npos, ParseError, "expected d:alpha, got " + item);
        try {
            long long d = std::stoll(item.substr(0, pos));
            long long a = std::stoll(item.substr(pos + 1));
            if (a != 0) e.exps[d] += a;
        } catch (const std::exception&) {
            throw ParseError("bad exponent entry: " + item);
        }
    }
    return e;
}

B0Divisor b0_divisor(const B0Element& e) {
    bool any = false;
    for (const auto& [d, a] : e.exps) {
        if (a == 0) continue;
        MD_REQUIRE(d >= 3 && (d % 4 == 0 || d % 4 == 3), NotInBasisIndexSet,
                   "exponent index must be >= 3 and 0 or 3 mod 4");
        any = true;
    }
    MD_REQUIRE(any, ConstantFunction, "empty product has no divisor");

    B0Divisor out;
    for (const auto& [d, a] : e.exps) {
        if (a == 0) continue;
        // zero multiplicity along T_Delta is sum_n a(n^2 Delta) with
        // a = delta at q^{-d}: one hit per n^2 | d with d/n^2 a discriminant
        for (long long n = 1; n * n <= d; ++n) {
            if (d % (n * n) != 0) continue;
            long long Delta = -(d / (n * n));
            long rr = mod4(Delta);
            if (rr != 0 && rr != 1) continue;
            out.mult[Delta] += a;
        }
    }
    for (auto it = out.mult.begin(); it != out.mult.end();)
        it = (it->second == 0) ? out.mult.erase(it) : std::next(it);

    for (const auto& [Delta, m] : out.mult) {
        for (const QuadForm& q : enumerate_T(Delta)) {
            QuadPoint w = form_to_point(q);
            out.points.points.push_back(
                {FjPoint{w, CBall::from_qp(w, 64)}, (int)m, -1});
        }
    }
    std::sort(out.points.points.begin(), out.points.points.end(),
              [](const DivisorPoint& p, const DivisorPoint& q) {
                  const QuadPoint& a = *p.w.exact;
                  const QuadPoint& b = *q.w.exact;
                  Rat ia = a.im * a.im * to_rat(a.m), ib = b.im * b.im * to_rat(b.m);
                  return ia != ib ? ia < ib : a.re < b.re;
              });
    return out;
}

B0Report divisor_condition_b0(const B0Element& e, const PrecisionCtx& ctx) {
    B0Divisor dv = b0_divisor(e);
    B0Report rep;
    for (const auto& [d, a] : e.exps)
        if (a != 0) rep.dk = std::max(rep.dk, d);
    rep.tau_star = form_to_point(enumerate_T(-rep.dk)[0]);
    MD_INVARIANT(dv.mult.count(-rep.dk) && dv.mult[-rep.dk] != 0,
                 "top discriminant missing from the divisor");

    // Strict height dominance of tau*: Im^2 = d_k/4 beats |Delta|/(4a^2)
    // for every other support point, decided exactly.
    Rat top = to_rat(rep.dk) / 4;
    for (const auto& p : dv.points.points) {
        const QuadPoint& w = *p.w.exact;
        if (w == rep.tau_star) continue;
        Rat im2 = w.im * w.im * to_rat(w.m);
        MD_INVARIANT(im2 < top, "height dominance violated in a B0 divisor");
        std::ostringstream os;
        os << "Im^2 " << im2.get_str() << " < " << top.get_str();
        rep.dominance.push_back(os.str());
    }
    rep.generic = divisor_condition_for_points(dv.points, ctx);
    return rep;
}

LiftValue eval_lift(const PlusForm& f, const QuadPoint& tau, const PrecisionCtx& ctx) {
    MD_REQUIRE(tau.im > 0, PreconditionViolated, "point must be in the upper half plane");
    long long dmax = f.principal_index() < 0 ? -(long long)f.principal_index() : 0;
    if (dmax > 0) {
        PointDisc pd = discriminant_of_point(tau);
        if (pd.delta >= -dmax) {
            auto dvm = lift_divisor(f, pd.delta, pd.delta);
            long long m = dvm.count(pd.delta) ? dvm[pd.delta] : 0;
            if (m > 0) return {cb_exact_zero(ctx.bits), false, 0};
            MD_REQUIRE(m == 0, PoleAtSpecialPoint,
                       "product has a pole along this discriminant class");
        }
    }
    return eval_lift(f, CBall::from_qp(tau, ctx.bits), ctx);
}

LiftValue eval_lift(const PlusForm& f, const CBall& tau, const PrecisionCtx& ctx) {
    long bits = ctx.bits;
    if (f.is_zero()) {
        CBall one = cb_exact_zero(bits);
        one.re = RBall::exact_si(1, bits);
        return {one, false, 0};
    }
    RBall two_pi = rb_mul_2si(rb_pi(bits), 1);
    CBall i2pi{RBall::exact_si(0, bits), two_pi};
    CBall q = cb_exp(cb_mul(i2pi, tau));
    MD_REQUIRE(cb_mag_upper_d(q) < 1.0, PreconditionViolated,
               "product needs |q| < 1");

    // q^{-h} taken as exp(-2 pi i h tau): single-valued in tau, no branch cut.
    CBall val = cb_exp(cb_mul_rb(cb_mul(i2pi, tau), RBall::from_rat(-lift_h(f), bits)));
    long tmax = (long)std::floor(std::sqrt((double)f.order + 0.5));
    CBall one = cb_exact_zero(bits);
    one.re = RBall::exact_si(1, bits);
    CBall qn = one;
    long n = 0;
    std::optional<CBall> prev;
    for (long T = 8; T <= tmax; T *= 2) {
        while (n < T) {
            ++n;
            qn = cb_mul(qn, q);
            Int e = f.a(n * n);
            if (e != 0) val = cb_mul(val, one_minus_pow(qn, e));
        }
        MD_REQUIRE(val.is_finite(), NotConverged,
                   "product accumulation lost all precision");
        if (prev) {
            double diff = cb_mag_upper_d(cb_sub(val, *prev));
            double scale = std::max(1.0, cb_mag_upper_d(val));
            if (diff <= ctx.tol * scale) return {val, true, T};
        }
        prev = val;
    }
    throw NotConverged("product truncations did not stabilize within the window");
}

}  // namespace moddep
