#pragma once

#include <vector>

#include "moddep/prec.hpp"
#include "moddep/rat.hpp"

namespace moddep {

// Dense polynomial over Q(i), coefficients ascending, no trailing zeros.
struct GPoly {
    std::vector<GaussRat> c;

    GPoly() = default;
    explicit GPoly(std::vector<GaussRat> coeffs);
    static GPoly zero() { return GPoly(); }
    static GPoly constant(GaussRat a);
    // X - a
    static GPoly linear_root(const GaussRat& a);

    long degree() const { return (long)c.size() - 1; }  // -1 for zero
    bool is_zero() const { return c.empty(); }
    const GaussRat& lead() const;
    GaussRat eval(const GaussRat& x) const;
    CBall eval(const CBall& x) const;
    GPoly monic() const;
    friend bool operator==(const GPoly&, const GPoly&) = default;
};

GPoly gp_add(const GPoly& f, const GPoly& g);
GPoly gp_sub(const GPoly& f, const GPoly& g);
GPoly gp_mul(const GPoly& f, const GPoly& g);
GPoly gp_scale(const GPoly& f, const GaussRat& t);
struct GPolyDiv {
    GPoly quot, rem;
};
GPolyDiv gp_divmod(const GPoly& f, const GPoly& g);  // g nonzero
GPoly gp_gcd(const GPoly& f, const GPoly& g);        // monic (or zero)
GPoly gp_derivative(const GPoly& f);
GPoly gp_pow(const GPoly& f, unsigned long e);

// Yun decomposition: f = lc * prod_i out[i]^{i+1} with out[i] monic squarefree
// and pairwise coprime (entries may be constant 1).
std::vector<GPoly> gp_squarefree(const GPoly& f);

// A root enclosure: the disk is certified to contain exactly one root of the
// squarefree part, carrying the full multiplicity from the input.
struct RootDisk {
    CBall z;
    int multiplicity = 0;
};

// All complex roots with certified pairwise-disjoint disks; escalates from
// ctx.bits, PrecisionExhausted when separation cannot be certified.
std::vector<RootDisk> gp_roots(const GPoly& f, const PrecisionCtx& ctx);

}  // namespace moddep
