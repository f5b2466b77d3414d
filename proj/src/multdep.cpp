#include "moddep/multdep.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>

#include "moddep/specialpoints.hpp"

namespace moddep {

namespace {

Int round_rat(const Rat& x) {
    // nearest integer, half rounded down; canonical mpq has positive den
    Int q;
    Int n2 = 2 * x.get_num() + x.get_den();
    Int d2 = 2 * x.get_den();
    mpz_fdiv_q(q.get_mpz_t(), n2.get_mpz_t(), d2.get_mpz_t());
    return q;
}

// ---- exact LLL over the integers (rational Gram-Schmidt, delta = 3/4) ----

class Lll {
  public:
    explicit Lll(std::vector<std::vector<Int>>& rows) : b(rows), m(rows.size()) {
        if (m == 0) return;
        dim = b[0].size();
        bs.assign(m, std::vector<Rat>(dim));
        mu.assign(m, std::vector<Rat>(m));
        B.assign(m, Rat(0));
        gram_schmidt();
        reduce();
    }

  private:
    std::vector<std::vector<Int>>& b;
    size_t m, dim = 0;
    std::vector<std::vector<Rat>> bs, mu;
    std::vector<Rat> B;

    void gram_schmidt() {
        for (size_t i = 0; i < m; ++i) {
            for (size_t c = 0; c < dim; ++c) bs[i][c] = Rat(b[i][c]);
            for (size_t j = 0; j < i; ++j) {
                Rat d(0);
                for (size_t c = 0; c < dim; ++c) d += Rat(b[i][c]) * bs[j][c];
                mu[i][j] = d / B[j];
                for (size_t c = 0; c < dim; ++c) bs[i][c] -= mu[i][j] * bs[j][c];
            }
            B[i] = Rat(0);
            for (size_t c = 0; c < dim; ++c) B[i] += bs[i][c] * bs[i][c];
            MD_INVARIANT(B[i] != 0, "lattice rows must be linearly independent");
        }
    }

    void size_reduce(size_t k) {
        for (;;) {
            long j = -1;
            for (long t = (long)k - 1; t >= 0; --t) {
                Rat two_mu = 2 * mu[(size_t)k][(size_t)t];
                if (two_mu > 1 || two_mu < -1) {
                    j = t;
                    break;
                }
            }
            if (j < 0) return;
            Int q = round_rat(mu[k][(size_t)j]);
            for (size_t c = 0; c < dim; ++c) b[k][c] -= q * b[(size_t)j][c];
            gram_schmidt();
        }
    }

    void reduce() {
        if (m < 2) return;
        const Rat delta(3, 4);
        size_t k = 1;
        long guard = 0;
        while (k < m) {
            MD_INVARIANT(++guard < 200000, "basis reduction must terminate");
            size_reduce(k);
            Rat lovasz = (delta - mu[k][k - 1] * mu[k][k - 1]) * B[k - 1];
            if (B[k] >= lovasz) {
                ++k;
            } else {
                std::swap(b[k], b[k - 1]);
                gram_schmidt();
                if (k > 1) --k;
            }
        }
    }
};

Int iabs(const Int& x) { return x >= 0 ? x : Int(-x); }

CBall cb_one(long bits) { return {RBall::exact_si(1, bits), RBall::exact_si(0, bits)}; }

// |z| <= hypot of the componentwise upper bounds, rounded up.
Real ball_mag_upper(const CBall& z, long prec) {
    Real ur(prec), ui(prec), out(prec);
    mpfr_abs(ur.get(), z.re.mid.get(), MPFR_RNDU);
    mpfr_add(ur.get(), ur.get(), z.re.rad.get(), MPFR_RNDU);
    mpfr_abs(ui.get(), z.im.mid.get(), MPFR_RNDU);
    mpfr_add(ui.get(), ui.get(), z.im.rad.get(), MPFR_RNDU);
    mpfr_hypot(out.get(), ur.get(), ui.get(), MPFR_RNDU);
    return out;
}

std::string verdict_name(Verdict v) {
    switch (v) {
        case Verdict::VERIFIED: return "VERIFIED";
        case Verdict::REFUTED: return "REFUTED";
        default: return "UNDECIDED";
    }
}

}  // namespace

long euler_phi(long m) {
    MD_REQUIRE(m >= 1, DomainError, "phi needs a positive argument");
    long r = 1, x = m;
    for (long p = 2; p * p <= x; ++p) {
        if (x % p != 0) continue;
        r *= p - 1;
        x /= p;
        while (x % p == 0) {
            r *= p;
            x /= p;
        }
    }
    if (x > 1) r *= x - 1;
    return r;
}

long max_order_with_phi_leq(long d) {
    MD_REQUIRE(d >= 1, DomainError, "degree bound must be positive");
    // phi(m) >= sqrt(m/2), so orders beyond 2 d^2 cannot qualify
    long best = 1;
    for (long m = 1; m <= 2 * d * d + 2; ++m)
        if (euler_phi(m) <= d) best = m;
    return best;
}

std::vector<double> exponent_bound(long n, long d, const std::vector<double>& heights,
                                   double c_n) {
    MD_REQUIRE(n >= 1, DomainError, "need at least one value");
    MD_REQUIRE(d >= 2, DomainError, "degree bound must be at least 2");
    MD_REQUIRE(c_n > 0, DomainError, "the constant must be positive");
    MD_REQUIRE((long)heights.size() == n, PreconditionViolated,
               "one height per value required");
    for (double h : heights)
        MD_REQUIRE(h > 0, DomainError, "heights must be positive");
    if (n == 1) return {(double)max_order_with_phi_leq(d)};
    double common = c_n * std::pow((double)d, (double)n) * std::log((double)d);
    std::vector<double> out((size_t)n, common);
    for (size_t i = 0; i < (size_t)n; ++i)
        for (size_t j = 0; j < (size_t)n; ++j)
            if (j != i) out[i] *= heights[j];
    return out;
}

std::vector<std::vector<Int>> detect_relations(const std::vector<CBall>& values,
                                               const std::vector<long>& box,
                                               const PrecisionCtx& ctx) {
    size_t n = values.size();
    MD_REQUIRE(n >= 1, PreconditionViolated, "need at least one value");
    MD_REQUIRE(box.size() == n, PreconditionViolated, "one box bound per value");
    for (long bx : box)
        MD_REQUIRE(bx >= 1, PreconditionViolated, "box bounds must be positive");
    for (const CBall& v : values)
        MD_REQUIRE(v.nonzero(), ZeroInput, "value ball contains zero");

    long bits = std::max<long>(ctx.bits, 64);
    long cshift = bits - 8;

    // midpoint rows (log|v|, arg v) with arg in [0, 2 pi), scaled to integers
    size_t m = n + 1;  // one row per value plus the 2 pi row
    std::vector<std::vector<Int>> rows(m, std::vector<Int>(m + 2, Int(0)));
    Real t(bits), a(bits), pi2(bits);
    mpfr_const_pi(pi2.get(), MPFR_RNDN);
    mpfr_mul_2si(pi2.get(), pi2.get(), 1, MPFR_RNDN);
    auto scaled = [&](const Real& x) {
        Real s(bits);
        mpfr_mul_2si(s.get(), x.get(), cshift, MPFR_RNDN);
        Int z;
        mpfr_get_z(z.get_mpz_t(), s.get(), MPFR_RNDN);
        return z;
    };
    for (size_t i = 0; i < n; ++i) {
        rows[i][i] = 1;
        mpfr_hypot(t.get(), values[i].re.mid.get(), values[i].im.mid.get(), MPFR_RNDN);
        MD_INVARIANT(mpfr_sgn(t.get()) > 0, "nonzero ball must have a nonzero midpoint");
        mpfr_log(t.get(), t.get(), MPFR_RNDN);
        rows[i][m] = scaled(t);
        mpfr_atan2(a.get(), values[i].im.mid.get(), values[i].re.mid.get(), MPFR_RNDN);
        if (mpfr_sgn(a.get()) < 0) mpfr_add(a.get(), a.get(), pi2.get(), MPFR_RNDN);
        rows[i][m + 1] = scaled(a);
    }
    rows[n][n] = 1;
    rows[n][m + 1] = scaled(pi2);

    Lll{rows};

    // plausibly-null reduced vectors: residual columns small against the scale
    Int thresh_unit = Int(1) << 16;
    auto passes = [&](const std::vector<Int>& w) {
        Int weight = 1;
        for (size_t i = 0; i <= n; ++i) weight += iabs(w[i]);
        Int lim = weight * thresh_unit;
        return iabs(w[m]) <= lim && iabs(w[m + 1]) <= lim;
    };
    std::vector<std::vector<Int>> null_rows;
    for (const auto& w : rows)
        if (passes(w)) null_rows.push_back(w);

    std::set<std::vector<Int>> seen;
    if (!null_rows.empty()) {
        long maxbox = *std::max_element(box.begin(), box.end());
        size_t r = null_rows.size();
        long K = 4 * maxbox + 4;
        auto total = [&](long k) {
            double tot = 1;
            for (size_t i = 0; i < r; ++i) tot *= (double)(2 * k + 1);
            return tot;
        };
        while (K > maxbox && total(K) > 6e6) K /= 2;
        if (K < maxbox) K = maxbox;
        if (total(K) > 6e6) K = 1;  // degenerate high-rank case: basis multiples only

        std::vector<Int> acc(m + 2, Int(0));
        std::vector<long> c(r, -K);
        auto consider = [&]() {
            if (!passes(acc)) return;
            bool any = false, inbox = true;
            for (size_t i = 0; i < n && inbox; ++i) {
                if (acc[i] != 0) any = true;
                if (iabs(acc[i]) > box[i]) inbox = false;
            }
            if (!any || !inbox) return;
            std::vector<Int> cand(acc.begin(), acc.begin() + (long)n);
            for (size_t i = 0; i < n; ++i) {
                if (cand[i] == 0) continue;
                if (cand[i] < 0)
                    for (auto& e : cand) e = -e;
                break;
            }
            seen.insert(std::move(cand));
        };
        // depth-first over the coefficient box, one combination per leaf
        std::function<void(size_t, const std::vector<Int>&)> walk =
            [&](size_t depth, const std::vector<Int>& cur) {
                if (depth == r) {
                    acc = cur;
                    consider();
                    return;
                }
                for (long cc = -K; cc <= K; ++cc) {
                    std::vector<Int> nxt = cur;
                    if (cc != 0)
                        for (size_t col = 0; col < m + 2; ++col)
                            nxt[col] += null_rows[depth][col] * Int(cc);
                    walk(depth + 1, nxt);
                }
            };
        walk(0, std::vector<Int>(m + 2, Int(0)));
    }
    return {seen.begin(), seen.end()};
}

RelationCertificate verify_relation(const std::vector<DescribedValue>& values,
                                    const std::vector<Int>& exponents,
                                    const std::vector<DescribedValue>& gamma,
                                    const std::vector<Int>& gamma_exponents,
                                    const PrecisionCtx& ctx, double liouville_c) {
    MD_REQUIRE(values.size() == exponents.size(), PreconditionViolated,
               "one exponent per value");
    MD_REQUIRE(gamma.size() == gamma_exponents.size(), PreconditionViolated,
               "one exponent per generator");
    MD_REQUIRE(liouville_c >= 1, DomainError, "gap scaling below 1 is unsound");
    bool any = false;
    for (const Int& e : exponents) any = any || e != 0;
    MD_REQUIRE(any, PreconditionViolated, "value exponents must not all vanish");

    RelationCertificate cert;
    for (const auto& v : values) cert.values.push_back(v.label);
    for (const auto& g : gamma) cert.values.push_back(g.label);
    cert.exponents = exponents;
    cert.gamma_exponents = gamma_exponents;

    // supported inputs: the residual is prod values^a * prod gamma^-alpha - 1
    struct Term {
        const DescribedValue* v;
        long e;
    };
    std::vector<Term> terms;
    bool have_heights = true, any_refresh = false;
    double D = 1, Hsum = std::log(2.0);
    auto add_term = [&](const DescribedValue& v, const Int& e, bool negate) {
        if (e == 0) return;
        MD_REQUIRE(e.fits_slong_p(), DomainError, "exponent out of range");
        terms.push_back({&v, negate ? -e.get_si() : e.get_si()});
        if (v.height) {
            D *= (double)std::max<long>(1, v.height->d);
            Hsum += std::abs(mpz_get_d(e.get_mpz_t())) * std::max(0.0, v.height->h);
        } else {
            have_heights = false;
        }
        if (v.refresh) any_refresh = true;
    };
    for (size_t i = 0; i < values.size(); ++i) add_term(values[i], exponents[i], false);
    for (size_t i = 0; i < gamma.size(); ++i) add_term(gamma[i], gamma_exponents[i], true);

    double log_gap = -liouville_c * D * Hsum;
    Real gap(64);
    mpfr_set_d(gap.get(), log_gap, MPFR_RNDD);
    mpfr_exp(gap.get(), gap.get(), MPFR_RNDD);
    cert.liouville_gap = have_heights ? mpfr_get_d(gap.get(), MPFR_RNDD) : 0;

    std::string last_reason = have_heights
                                  ? "residual separated from neither zero nor the gap"
                                  : "missing height data for a supported input";
    int esc_cap = any_refresh ? ctx.max_escalations : std::min(1, ctx.max_escalations);
    for (int esc = 0; esc <= esc_cap; ++esc) {
        long bits = ctx.bits << esc;
        try {
            CBall P = cb_one(bits);
            for (const Term& t : terms) {
                CBall b = t.v->refresh ? t.v->refresh(bits) : t.v->value;
                P = cb_mul(P, cb_pow_si(b, t.e));
            }
            CBall R = cb_sub(P, cb_one(bits));
            Real upper = ball_mag_upper(R, 64);
            double upper_d = mpfr_get_d(upper.get(), MPFR_RNDU);
            if (R.nonzero()) {
                cert.residual_bound = upper_d;
                cert.verdict = Verdict::REFUTED;
                return cert;
            }
            if (have_heights && mpfr_cmp(upper.get(), gap.get()) < 0) {
                // the extended-precision comparison is authoritative; the
                // double fields only summarize it and may underflow
                cert.residual_bound = upper_d;
                cert.verdict = Verdict::VERIFIED;
                if (!(upper_d < cert.liouville_gap))
                    cert.reason = "separation certified beyond double range";
                return cert;
            }
            cert.residual_bound = upper_d;
        } catch (const error& e) {
            last_reason = e.what();
        }
    }
    cert.verdict = Verdict::UNDECIDED;
    cert.reason = last_reason;
    return cert;
}

MinimalSubset minimal_dependent_subset(size_t n, const std::vector<Int>& witness,
                                       const RelationOracle& oracle) {
    MD_REQUIRE(n >= 1 && witness.size() == n, PreconditionViolated,
               "witness length must match the tuple");
    MD_REQUIRE(witness[0] != 0, PreconditionViolated,
               "the witnessed relation must involve the first element");

    auto normalize = [](std::vector<Int>& a) {
        Int g = 0;
        for (const Int& x : a) mpz_gcd(g.get_mpz_t(), g.get_mpz_t(), x.get_mpz_t());
        if (g > 1)
            for (Int& x : a) x /= g;
    };

    std::vector<size_t> C(n);
    std::iota(C.begin(), C.end(), 0);
    std::vector<Int> a = witness;
    normalize(a);

    while (C.size() > 1) {
        size_t sz = C.size();
        bool shrunk = false;
        // proper nonempty subsets, small first so eliminations stay cheap
        std::vector<unsigned> masks;
        for (unsigned mask = 1; mask + 1 < (1u << sz); ++mask) masks.push_back(mask);
        std::stable_sort(masks.begin(), masks.end(), [](unsigned x, unsigned y) {
            return __builtin_popcount(x) < __builtin_popcount(y);
        });
        for (unsigned mask : masks) {
            std::vector<size_t> T, pos;
            for (size_t i = 0; i < sz; ++i)
                if (mask & (1u << i)) {
                    T.push_back(C[i]);
                    pos.push_back(i);
                }
            auto rel = oracle(T);
            if (!rel) continue;
            MD_REQUIRE(rel->size() == T.size(), PreconditionViolated,
                       "oracle relation length mismatch");
            // spread the subset relation over the current index set
            std::vector<Int> bfull(sz, Int(0));
            bool nontrivial = false;
            for (size_t i = 0; i < pos.size(); ++i) {
                bfull[pos[i]] = (*rel)[i];
                nontrivial = nontrivial || (*rel)[i] != 0;
            }
            MD_REQUIRE(nontrivial, PreconditionViolated, "oracle returned a trivial relation");
            size_t k = sz;
            for (size_t i = 1; i < sz; ++i)
                if (bfull[i] != 0) {
                    k = i;
                    break;
                }
            if (k == sz) {
                // the relation lives on the first element alone: x_0 is a
                // root of unity and {x_0} is the minimal set
                return {{C[0]}, {bfull[0]}};
            }
            if (bfull[0] != 0) {
                // the subset relation still involves the first element, so
                // it replaces the current witness outright
                C = std::move(T);
                a = std::move(*rel);
                normalize(a);
                shrunk = true;
                break;
            }
            // first element untouched (b_0 = 0): eliminate element k, so
            // a'_i = a_i b_k - b_i a_k keeps index 0 (a'_0 = a_0 b_k != 0)
            // and drops index k
            std::vector<size_t> C2;
            std::vector<Int> a2;
            for (size_t i = 0; i < sz; ++i) {
                if (i == k) continue;
                C2.push_back(C[i]);
                a2.push_back(a[i] * bfull[k] - bfull[i] * a[k]);
            }
            MD_INVARIANT(a2[0] != 0, "elimination must preserve the first exponent");
            C = std::move(C2);
            a = std::move(a2);
            normalize(a);
            shrunk = true;
            break;
        }
        if (!shrunk) break;
    }
    return {C, a};
}

std::optional<RelationCertificate> gamma_dependence(const std::vector<DescribedValue>& values,
                                                    const std::vector<DescribedValue>& generators,
                                                    const std::vector<long>& box,
                                                    const PrecisionCtx& ctx,
                                                    double liouville_c) {
    size_t nv = values.size(), ng = generators.size();
    MD_REQUIRE(nv >= 1, PreconditionViolated, "need at least one value");
    MD_REQUIRE(box.size() == nv + ng, PreconditionViolated,
               "one box bound per value and generator");
    std::vector<CBall> balls;
    for (const auto& v : values) balls.push_back(v.value);
    for (const auto& g : generators) balls.push_back(g.value);
    for (const auto& cand : detect_relations(balls, box, ctx)) {
        bool any = false;
        for (size_t i = 0; i < nv; ++i) any = any || cand[i] != 0;
        if (!any) continue;
        std::vector<Int> a(cand.begin(), cand.begin() + (long)nv);
        std::vector<Int> alpha;
        for (size_t i = 0; i < ng; ++i) alpha.push_back(-cand[nv + i]);
        RelationCertificate cert =
            verify_relation(values, a, generators, alpha, ctx, liouville_c);
        if (cert.verdict == Verdict::VERIFIED) return cert;
    }
    return std::nullopt;
}

HeightData height_from_annihilator(const GPoly& U) {
    MD_REQUIRE(U.degree() >= 1, DomainError, "annihilator must be nonconstant");
    bool real_coeffs = true;
    for (const auto& c : U.c) real_coeffs = real_coeffs && c.im == 0;
    GPoly N = U;
    if (!real_coeffs) {
        // fold against the conjugate so the bound reads off an integer
        // polynomial with the value still a root
        GPoly Ubar = U;
        for (auto& c : Ubar.c) c = c.conj();
        N = gp_mul(U, Ubar);
    }
    Int lam = 1;
    for (const auto& c : N.c) {
        mpz_lcm(lam.get_mpz_t(), lam.get_mpz_t(), c.re.get_den().get_mpz_t());
        mpz_lcm(lam.get_mpz_t(), lam.get_mpz_t(), c.im.get_den().get_mpz_t());
    }
    Int l2sq = 0;
    for (const auto& c : N.c) {
        Rat re = Rat(lam) * c.re, im = Rat(lam) * c.im;
        MD_INVARIANT(is_integer(re) && is_integer(im),
                     "denominator-cleared polynomial must be integral");
        l2sq += re.get_num() * re.get_num() + im.get_num() * im.get_num();
    }
    long ex = 0;
    double dm = mpz_get_d_2exp(&ex, l2sq.get_mpz_t());
    double h_bound = 0.5 * (std::log(dm) + (double)ex * std::log(2.0)) + 0.01;
    return HeightData{std::max(h_bound, std::log(2.0)), std::max<long>(1, N.degree())};
}

std::vector<DescribedValue> described_special_points(const ModularFunction& f,
                                                     long long delta_max,
                                                     const PrecisionCtx& ctx) {
    MD_REQUIRE(!f.is_constant(), ConstantFunction, "constant functions have no special points");
    MD_REQUIRE(delta_max >= 3, DomainError, "discriminant bound below the smallest valid one");
    std::vector<DescribedValue> out;
    for (long long d = 3; d <= delta_max; ++d) {
        if (!is_valid_disc(-d)) continue;
        FSpecialFiber fib = f_special_points(f, -d, ctx);
        bool canonical_here = false;
        for (const auto& pt : fib.points) canonical_here = canonical_here || pt.disc == -d;
        if (!canonical_here) continue;

        // degree/height bounds from the exact fiber polynomial
        HeightData hd = height_from_annihilator(fiber_polynomial(f, -d, ctx));

        for (const auto& pt : fib.points) {
            if (pt.disc != -d) continue;  // reachable at a smaller discriminant
            DescribedValue dv;
            dv.value = pt.value;
            dv.height = hd;
            const QuadForm& q = pt.preimages[0].form;
            dv.label = "cm(disc=" + std::to_string(-d) + ";form=" + std::to_string(q.a) +
                       "," + std::to_string(q.b) + "," + std::to_string(q.c) + ")";
            QuadPoint qp = form_to_point(q);
            ModularFunction fc = f;
            dv.refresh = [fc, qp](long bits) {
                return fc.eval_at_j(eval_j(CBall::from_qp(qp, bits), bits));
            };
            out.push_back(std::move(dv));
        }
    }
    return out;
}

namespace {

std::string cert_key(const RelationCertificate& c) {
    std::string k;
    for (const auto& l : c.values) k += l + "|";
    for (const auto& e : c.exponents) k += e.get_str() + ",";
    k += ";";
    for (const auto& e : c.gamma_exponents) k += e.get_str() + ",";
    return k;
}

}  // namespace

SearchResult search_dependent_tuples(const ModularFunction& f, long n, long long delta_max,
                                     const std::vector<DescribedValue>& gamma,
                                     const SearchConfig& cfg, const PrecisionCtx& ctx) {
    MD_REQUIRE(n >= 1, DomainError, "tuple size must be positive");
    MD_REQUIRE(delta_max >= 3, DomainError, "discriminant bound below the smallest valid one");
    MD_REQUIRE(cfg.box_cap >= 1, DomainError, "box cap must be positive");

    SearchResult res;
    std::vector<DescribedValue> pts;
    for (auto& p : described_special_points(f, delta_max, ctx)) {
        // a ball at zero can never enter a multiplicative relation; exclude it
        bool zeroish = !p.value.nonzero();
        if (zeroish && p.refresh) {
            for (int esc = 1; esc <= 2 && zeroish; ++esc)
                zeroish = !p.refresh(ctx.bits << esc).nonzero();
        }
        if (zeroish) {
            res.summary.errors.push_back(p.label + ": value not certified nonzero, excluded");
            continue;
        }
        pts.push_back(std::move(p));
    }
    res.summary.points = (long)pts.size();
    if ((long)pts.size() < n) return res;

    std::set<std::string> emitted;
    std::vector<size_t> idx((size_t)n);
    std::iota(idx.begin(), idx.end(), 0);
    auto next_comb = [&]() {
        long i = n - 1;
        while (i >= 0 && idx[(size_t)i] == pts.size() - (size_t)n + (size_t)i) --i;
        if (i < 0) return false;
        ++idx[(size_t)i];
        for (long j = i + 1; j < n; ++j) idx[(size_t)j] = idx[(size_t)(j - 1)] + 1;
        return true;
    };

    auto content_sign_normalize = [](std::vector<Int>& a) {
        Int g = 0;
        for (const Int& x : a) mpz_gcd(g.get_mpz_t(), g.get_mpz_t(), x.get_mpz_t());
        if (g > 1)
            for (Int& x : a) x /= g;
        for (const Int& x : a) {
            if (x == 0) continue;
            if (x < 0)
                for (Int& y : a) y = -y;
            break;
        }
    };

    do {
        ++res.summary.tuples_scanned;
        try {
            std::vector<DescribedValue> tup;
            for (long i = 0; i < n; ++i) tup.push_back(pts[idx[(size_t)i]]);

            long dbound = 1;
            std::vector<double> hs;
            for (const auto& v : tup) {
                dbound *= std::max<long>(1, v.height->d);
                hs.push_back(std::max(v.height->h, std::log(2.0)));
            }
            if (dbound < 2) dbound = 2;
            std::vector<double> B = exponent_bound(n, dbound, hs, cfg.c_n);
            std::vector<long> box;
            for (double b : B)
                box.push_back(std::max<long>(1, std::min((long)std::floor(b), cfg.box_cap)));

            if (gamma.empty()) {
                std::vector<CBall> balls;
                for (const auto& v : tup) balls.push_back(v.value);
                auto cands = detect_relations(balls, box, ctx);
                res.summary.candidates += (long)cands.size();
                for (const auto& cand : cands) {
                    RelationCertificate cert =
                        verify_relation(tup, cand, {}, {}, ctx, cfg.liouville_c);
                    if (cert.verdict == Verdict::UNDECIDED) {
                        ++res.summary.undecided;
                        continue;
                    }
                    if (cert.verdict != Verdict::VERIFIED) continue;

                    // shrink to a minimal dependent subset, anchored at the
                    // first element the relation involves
                    size_t s0 = 0;
                    while (cand[s0] == 0) ++s0;
                    std::vector<size_t> rot{s0};
                    for (size_t i = 0; i < (size_t)n; ++i)
                        if (i != s0) rot.push_back(i);
                    std::vector<Int> wit;
                    for (size_t i : rot) wit.push_back(cand[i]);

                    auto oracle =
                        [&](const std::vector<size_t>& sub) -> std::optional<std::vector<Int>> {
                        std::vector<DescribedValue> sv;
                        std::vector<CBall> sb;
                        std::vector<long> sbox;
                        for (size_t i : sub) {
                            sv.push_back(tup[rot[i]]);
                            sb.push_back(tup[rot[i]].value);
                            sbox.push_back(box[rot[i]]);
                        }
                        bool saw_undecided = false;
                        for (const auto& c2 : detect_relations(sb, sbox, ctx)) {
                            RelationCertificate sc =
                                verify_relation(sv, c2, {}, {}, ctx, cfg.liouville_c);
                            if (sc.verdict == Verdict::VERIFIED) return c2;
                            if (sc.verdict == Verdict::UNDECIDED) saw_undecided = true;
                        }
                        if (saw_undecided)
                            throw PrecisionExhausted("subset independence undecided");
                        return std::nullopt;
                    };
                    MinimalSubset ms = minimal_dependent_subset((size_t)n, wit, oracle);

                    // map back to tuple positions, canonical ascending order
                    std::vector<std::pair<size_t, Int>> items;
                    for (size_t i = 0; i < ms.indices.size(); ++i)
                        items.push_back({rot[ms.indices[i]], ms.exponents[i]});
                    std::sort(items.begin(), items.end(),
                              [](const auto& x, const auto& y) { return x.first < y.first; });
                    std::vector<DescribedValue> subv;
                    std::vector<Int> sube;
                    for (auto& [p, e] : items) {
                        subv.push_back(tup[p]);
                        sube.push_back(e);
                    }
                    content_sign_normalize(sube);
                    RelationCertificate final_cert =
                        verify_relation(subv, sube, {}, {}, ctx, cfg.liouville_c);
                    if (final_cert.verdict != Verdict::VERIFIED) {
                        ++res.summary.undecided;
                        continue;
                    }
                    if (emitted.insert(cert_key(final_cert)).second) {
                        ++res.summary.verified;
                        res.certificates.push_back(std::move(final_cert));
                    }
                }
            } else {
                std::vector<long> box_full = box;
                for (size_t i = 0; i < gamma.size(); ++i) box_full.push_back(cfg.box_cap);
                auto cert = gamma_dependence(tup, gamma, box_full, ctx, cfg.liouville_c);
                ++res.summary.candidates;
                if (cert) {
                    if (emitted.insert(cert_key(*cert)).second) {
                        ++res.summary.verified;
                        res.certificates.push_back(std::move(*cert));
                    }
                }
            }
        } catch (const error& e) {
            res.summary.errors.push_back(e.what());
        }
    } while (next_comb());
    return res;
}

}  // namespace moddep
