#pragma once

#include <array>
#include <functional>
#include <optional>
#include <vector>

#include "moddep/rat.hpp"

namespace moddep {

// Positive definite integral binary quadratic form a X^2 + b X Y + c Y^2.
struct QuadForm {
    long long a = 0, b = 0, c = 0;

    long long disc() const { return b * b - 4 * a * c; }
    bool positive_definite() const { return a > 0 && disc() < 0; }
    long long content() const;  // gcd(a, b, c)
    bool primitive() const { return content() == 1; }
    // Reduced: -a < b <= a < c, or 0 <= b <= a = c.
    bool reduced() const {
        return positive_definite() &&
               ((-a < b && b <= a && a < c) || (0 <= b && b <= a && a == c));
    }
    friend bool operator==(const QuadForm&, const QuadForm&) = default;
    // Enumeration order used throughout: ascending (a, b).
    friend bool operator<(const QuadForm& x, const QuadForm& y) {
        return x.a != y.a ? x.a < y.a : x.b < y.b;
    }
};

// Delta < 0 and Delta = 0 or 1 mod 4.
bool is_valid_disc(long long delta);

// All reduced forms of discriminant delta, imprimitive ones included (used by the
// Hurwitz class number), ascending (a, b).
std::vector<QuadForm> reduced_forms_all(long long delta);

// T_Delta: the primitive reduced forms, ascending (a, b).
std::vector<QuadForm> enumerate_T(long long delta);

long long class_number(long long delta);

// tau = re + im*sqrt(m)*i with m > 0 squarefree and im > 0 unless the point is
// real-degenerate (never the case for points of H we construct).
struct QuadPoint {
    Rat re;
    Rat im;       // coefficient of sqrt(m)
    long long m;  // squarefree positive kernel

    QuadPoint() : re(0), im(0), m(1) {}
    // Normalizes n = m0 * f^2 into (m = m0, im *= f).
    QuadPoint(Rat re_, Rat imq, long long n);

    Rat norm2() const { return re * re + im * im * to_rat(m); }  // |tau|^2
    friend bool operator==(const QuadPoint& x, const QuadPoint& y) {
        return x.re == y.re && x.im == y.im && (x.m == y.m || x.im == 0);
    }
};

// Field arithmetic in Q(sqrt(-m)); both operands must share the kernel m.
QuadPoint qp_add(const QuadPoint& x, const QuadPoint& y);
QuadPoint qp_sub(const QuadPoint& x, const QuadPoint& y);
QuadPoint qp_mul(const QuadPoint& x, const QuadPoint& y);
QuadPoint qp_inv(const QuadPoint& x);
QuadPoint qp_add_rat(const QuadPoint& x, const Rat& t);
QuadPoint qp_scale(const QuadPoint& x, const Rat& t);

struct Mat2 {
    // Row-major integer matrix (a b; c d).
    Int a, b, c, d;
    Int det() const { return a * d - b * c; }
    static Mat2 identity() { return {1, 0, 0, 1}; }
    friend Mat2 operator*(const Mat2& x, const Mat2& y) {
        return {x.a * y.a + x.b * y.c, x.a * y.b + x.b * y.d, x.c * y.a + x.d * y.c,
                x.c * y.b + x.d * y.d};
    }
    friend bool operator==(const Mat2&, const Mat2&) = default;
};

// (a tau + b)/(c tau + d); requires det != 0 and c tau + d != 0.
QuadPoint mobius(const Mat2& g, const QuadPoint& tau);

// Standard fundamental domain membership: -1/2 < Re <= 1/2, |tau| >= 1, and
// |tau| > 1 when Re < 0.
bool in_Fj(const QuadPoint& tau);

struct Reduction {
    QuadPoint tau;  // in_Fj(tau)
    Mat2 g;         // tau = g * input
};
Reduction reduce_to_Fj(const QuadPoint& tau);

// The point (b + sqrt(Delta))/(2a) attached to a form of discriminant Delta;
// lands in F_j exactly when the form is reduced.
QuadPoint form_to_point(const QuadForm& q);

struct PointDisc {
    long long delta;
    QuadForm form;  // form_to_point(form) == the input point
};
// Discriminant of the primitive integral quadratic equation satisfied by tau.
PointDisc discriminant_of_point(const QuadPoint& tau);

}  // namespace moddep
