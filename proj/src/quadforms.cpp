#include "moddep/quadforms.hpp"

#include <algorithm>
#include <numeric>

namespace moddep {

long long QuadForm::content() const {
    long long g = std::gcd(std::gcd(std::llabs(a), std::llabs(b)), std::llabs(c));
    return g;
}

bool is_valid_disc(long long delta) {
    if (delta >= 0) return false;
    long long r = ((delta % 4) + 4) % 4;
    return r == 0 || r == 1;
}

std::vector<QuadForm> reduced_forms_all(long long delta) {
    MD_REQUIRE(is_valid_disc(delta), InvalidDiscriminant,
               "need Delta < 0 with Delta = 0,1 mod 4, got " + std::to_string(delta));
    std::vector<QuadForm> out;
    long long n = -delta;
    // a <= sqrt(n/3) for reduced forms: n = 4ac - b^2 >= 4a^2 - a^2 = 3a^2.
    for (long long a = 1; 3 * a * a <= n; ++a) {
        for (long long b = -a + 1; b <= a; ++b) {
            long long num = b * b + n;  // 4ac
            if (num % (4 * a) != 0) continue;
            long long c = num / (4 * a);
            QuadForm q{a, b, c};
            if (q.reduced()) out.push_back(q);
        }
    }
    std::sort(out.begin(), out.end());
    return out;
}

std::vector<QuadForm> enumerate_T(long long delta) {
    std::vector<QuadForm> out = reduced_forms_all(delta);
    std::erase_if(out, [](const QuadForm& q) { return !q.primitive(); });
    return out;
}

long long class_number(long long delta) { return (long long)enumerate_T(delta).size(); }

namespace {

// Largest square divisor split: n = m0 * f^2 with m0 squarefree.
std::pair<long long, long long> squarefree_split(long long n) {
    long long m0 = 1, f = 1;
    for (long long p = 2; p * p <= n; ++p) {
        if (n % p) continue;
        int e = 0;
        while (n % p == 0) {
            n /= p;
            ++e;
        }
        for (int i = 0; i < e / 2; ++i) f *= p;
        if (e % 2) m0 *= p;
    }
    m0 *= n;  // residual prime
    return {m0, f};
}

}  // namespace

QuadPoint::QuadPoint(Rat re_, Rat imq, long long n) : re(std::move(re_)), im(std::move(imq)) {
    MD_REQUIRE(n > 0, PreconditionViolated, "kernel must be positive");
    auto [m0, f] = squarefree_split(n);
    m = m0;
    im *= to_rat(f);
    if (im == 0) m = 1;
}

static void require_same_kernel(const QuadPoint& x, const QuadPoint& y) {
    MD_REQUIRE(x.m == y.m || x.im == 0 || y.im == 0, PreconditionViolated,
               "mixed quadratic kernels " + std::to_string(x.m) + " and " + std::to_string(y.m));
}

QuadPoint qp_add(const QuadPoint& x, const QuadPoint& y) {
    require_same_kernel(x, y);
    QuadPoint r;
    r.re = x.re + y.re;
    r.im = x.im + y.im;
    r.m = x.im != 0 ? x.m : y.m;
    if (r.im == 0) r.m = 1;
    return r;
}

QuadPoint qp_sub(const QuadPoint& x, const QuadPoint& y) {
    QuadPoint ny = y;
    ny.re = -ny.re;
    ny.im = -ny.im;
    return qp_add(x, ny);
}

QuadPoint qp_mul(const QuadPoint& x, const QuadPoint& y) {
    require_same_kernel(x, y);
    long long m = x.im != 0 ? x.m : y.m;
    QuadPoint r;
    // (a + b sqrt(m) i)(c + d sqrt(m) i) = ac - bd m + (ad + bc) sqrt(m) i
    r.re = x.re * y.re - x.im * y.im * to_rat(m);
    r.im = x.re * y.im + x.im * y.re;
    r.m = r.im != 0 ? m : 1;
    return r;
}

QuadPoint qp_inv(const QuadPoint& x) {
    Rat n = x.norm2();
    MD_REQUIRE(n != 0, PreconditionViolated, "inverting zero");
    QuadPoint r = x;
    r.re /= n;
    r.im = -r.im / n;
    if (r.im == 0) r.m = 1;
    return r;
}

QuadPoint qp_add_rat(const QuadPoint& x, const Rat& t) {
    QuadPoint r = x;
    r.re += t;
    return r;
}

QuadPoint qp_scale(const QuadPoint& x, const Rat& t) {
    QuadPoint r = x;
    r.re *= t;
    r.im *= t;
    if (r.im == 0) r.m = 1;
    return r;
}

QuadPoint mobius(const Mat2& g, const QuadPoint& tau) {
    MD_REQUIRE(g.det() != 0, PreconditionViolated, "singular matrix");
    QuadPoint num = tau, den = tau;
    num = qp_scale(num, Rat(g.a));
    num = qp_add_rat(num, Rat(g.b));
    den = qp_scale(den, Rat(g.c));
    den = qp_add_rat(den, Rat(g.d));
    return qp_mul(num, qp_inv(den));
}

bool in_Fj(const QuadPoint& tau) {
    if (tau.im <= 0) return false;
    Rat half(1, 2);
    if (!(tau.re > -half && tau.re <= half)) return false;
    Rat n = tau.norm2();
    if (n < 1) return false;
    if (n == 1 && tau.re < 0) return false;
    return true;
}

Reduction reduce_to_Fj(const QuadPoint& tau0) {
    MD_REQUIRE(tau0.im > 0, PreconditionViolated, "point not in the upper half plane");
    QuadPoint tau = tau0;
    Mat2 g = Mat2::identity();
    Rat half(1, 2);
    for (int guard = 0; guard < 100000; ++guard) {
        // Shift so Re in (-1/2, 1/2].
        Int t = round_half_down(tau.re);
        if (t != 0) {
            tau = qp_add_rat(tau, Rat(-t));
            g = Mat2{1, -t, 0, 1} * g;
        }
        Rat n = tau.norm2();
        if (n < 1 || (n == 1 && tau.re < 0)) {
            // tau <- -1/tau = -conj(tau)/|tau|^2
            tau = qp_scale(qp_inv(tau), Rat(-1));
            g = Mat2{0, -1, 1, 0} * g;
            continue;
        }
        MD_INVARIANT(in_Fj(tau), "reduction landed outside F_j");
        return {tau, g};
    }
    throw std::logic_error("reduce_to_Fj did not terminate");
}

QuadPoint form_to_point(const QuadForm& q) {
    MD_REQUIRE(q.positive_definite(), PreconditionViolated, "form not positive definite");
    long long delta = q.disc();
    return QuadPoint(to_rat(q.b) / to_rat(2 * q.a), Rat(1) / to_rat(2 * q.a), -delta);
}

PointDisc discriminant_of_point(const QuadPoint& tau) {
    MD_REQUIRE(tau.im > 0, PreconditionViolated, "point not in the upper half plane");
    // tau^2 - 2 Re(tau) tau + |tau|^2 = 0; clear denominators, make primitive.
    Rat two_re = 2 * tau.re;
    Rat n2 = tau.norm2();
    Int den = lcm(two_re.get_den(), n2.get_den());
    Rat Br = -two_re * Rat(den);
    Rat Cr = n2 * Rat(den);
    MD_INVARIANT(is_integer(Br) && is_integer(Cr), "denominator clearing failed");
    Int A = den;
    Int B = Br.get_num();
    Int C = Cr.get_num();
    Int g = gcd(gcd(A, B), C);
    A /= g;
    B /= g;
    C /= g;
    Int delta = B * B - 4 * A * C;
    MD_REQUIRE(delta.fits_slong_p(), PreconditionViolated, "discriminant overflow");
    long long d = delta.get_si();
    MD_REQUIRE(is_valid_disc(d), InvalidDiscriminant, "point is not quadratic imaginary");
    MD_INVARIANT(A.fits_slong_p() && B.fits_slong_p() && C.fits_slong_p(), "form overflow");
    // Convention: form_to_point((a, -B, c)) reproduces tau = (-B + sqrt(Delta))/(2A).
    QuadForm q{A.get_si(), -B.get_si(), C.get_si()};
    MD_INVARIANT(form_to_point(q) == tau, "form/point round trip failed");
    return {d, q};
}

}  // namespace moddep
