#include "moddep/laurent.hpp"
#include "moddep/quadforms.hpp"

namespace moddep::qseries {

Rat hurwitz_H(long n) {
    MD_REQUIRE(n >= 0, PreconditionViolated, "H(n) needs n >= 0");
    if (n == 0) return Rat(-1, 12);
    long r = n % 4;
    if (r == 1 || r == 2) return Rat(0);
    // Weighted count of reduced forms of discriminant -n, imprimitive included:
    // multiples of x^2+y^2 weigh 1/2, multiples of x^2+xy+y^2 weigh 1/3.
    Rat h(0);
    for (const QuadForm& q : reduced_forms_all(-n)) {
        if (q.b == 0 && q.a == q.c)
            h += Rat(1, 2);
        else if (q.a == q.b && q.b == q.c)
            h += Rat(1, 3);
        else
            h += 1;
    }
    return h;
}

LaurentSeries hurwitz_series(long order) {
    MD_REQUIRE(order >= 0, WindowTooSmall, "order must be >= 0");
    std::vector<Rat> c((size_t)(order + 1));
    for (long n = 0; n <= order; ++n) c[(size_t)n] = hurwitz_H(n);
    return LaurentSeries(Rat(0), 0, std::move(c));
}

}  // namespace moddep::qseries
