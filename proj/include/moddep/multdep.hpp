#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "moddep/modfunc.hpp"
#include "moddep/prec.hpp"

namespace moddep {

// Degree/height upper bounds for one algebraic input; both may be generous,
// tighter bounds only widen the certification gap.
struct HeightData {
    double h = 0;  // log Weil height upper bound, >= 0
    long d = 1;    // field degree upper bound, >= 1
};

enum class Verdict { VERIFIED, REFUTED, UNDECIDED };

// Outcome of testing prod values[i]^exponents[i] = prod gamma[i]^gamma_exponents[i].
// VERIFIED is rigorous: the residual upper bound beats a Liouville gap computed
// from the declared degrees and heights, which a nonzero algebraic residual
// could not do.  REFUTED is rigorous the other way (residual excludes zero).
struct RelationCertificate {
    std::vector<std::string> values;  // caller-supplied labels, |values| = n + k
    std::vector<Int> exponents;       // a_i on the values block, not all zero
    std::vector<Int> gamma_exponents; // alpha_i on the generator block, may be empty
    double residual_bound = 0;        // certified upper bound on |prod - 1|
    double liouville_gap = 0;         // threshold the residual had to beat
    Verdict verdict = Verdict::UNDECIDED;
    std::string reason;               // cause when UNDECIDED, empty otherwise
};

// One relation input: a certified ball, optional height data (no heights means
// VERIFIED is out of reach), a label copied into certificates, and an optional
// re-evaluator used when verification escalates precision.
struct DescribedValue {
    CBall value;
    std::optional<HeightData> height;
    std::string label;
    std::function<CBall(long)> refresh;  // bits -> tighter enclosure
};

long euler_phi(long m);
// Largest m with phi(m) <= d: the order bound for a degree-d root of unity.
long max_order_with_phi_leq(long d);

// Height/degree bounds for any root of U: log of the l2 norm of the
// denominator-cleared coefficient vector, with Gaussian coefficients folded
// against their conjugates first so the bound reads off an integer polynomial.
HeightData height_from_annihilator(const GPoly& U);

// Per-index exponent bounds B_i = c_n d^n log(d) prod_{j != i} h_j for a
// dependence among n values of degree <= d and heights h_j.  n = 1 is the
// root-of-unity case and routes to the phi-inverse order bound instead.
std::vector<double> exponent_bound(long n, long d, const std::vector<double>& heights,
                                   double c_n);

// Candidate exponent vectors (unverified) for prod values[i]^{a_i} = 1 with
// |a_i| <= box[i], found by lattice reduction on (log|v|, arg v) rows against
// (0, 2 pi), arg taken in [0, 2 pi).  Emits every candidate in the box spanned
// by the plausibly-null reduced vectors; sign-normalized, deduplicated.
std::vector<std::vector<Int>> detect_relations(const std::vector<CBall>& values,
                                               const std::vector<long>& box,
                                               const PrecisionCtx& ctx);

// Certified check of prod values^a = prod gamma^alpha at escalating precision.
// liouville_c scales the gap exp(-liouville_c * D * Hsum); anything >= 1 is
// sound, larger is more conservative.
RelationCertificate verify_relation(const std::vector<DescribedValue>& values,
                                    const std::vector<Int>& exponents,
                                    const std::vector<DescribedValue>& gamma,
                                    const std::vector<Int>& gamma_exponents,
                                    const PrecisionCtx& ctx, double liouville_c = 2.0);

// Decides dependence of the sub-tuple at `indices`: a witnessing relation
// (not all zero) if dependent, nullopt if independent; may throw to signal
// an undecided test, which propagates.
using RelationOracle =
    std::function<std::optional<std::vector<Int>>(const std::vector<size_t>&)>;

struct MinimalSubset {
    std::vector<size_t> indices;  // ascending; contains 0
    std::vector<Int> exponents;   // witnessing relation on the subset
};

// Elimination induction: from a full-tuple relation with nonzero first
// exponent, repeatedly removes an element of a dependent proper subset while
// keeping the first exponent nonzero, until no proper subset is dependent.
// The result contains element 0, is dependent, and is minimal with that.
MinimalSubset minimal_dependent_subset(size_t n, const std::vector<Int>& witness,
                                       const RelationOracle& oracle);

// First verified relation prod values^a = prod generators^alpha with the
// values block not all zero, within the per-index box (values block first,
// then generators).  The generator set is trusted to be multiplicatively
// independent; nullopt when nothing in the box verifies.
std::optional<RelationCertificate> gamma_dependence(const std::vector<DescribedValue>& values,
                                                    const std::vector<DescribedValue>& generators,
                                                    const std::vector<long>& box,
                                                    const PrecisionCtx& ctx,
                                                    double liouville_c = 2.0);

struct SearchConfig {
    double c_n = 1.0;         // constant in the exponent bound formula
    long box_cap = 50;        // hard cap on any exponent box entry
    double liouville_c = 2.0; // gap scaling passed to verification
};

struct SearchSummary {
    long points = 0;          // special points collected (canonical occurrences)
    long tuples_scanned = 0;
    long candidates = 0;      // detector emissions before verification
    long verified = 0;
    long undecided = 0;
    std::vector<std::string> errors;  // per-tuple failures, scan continued
};

struct SearchResult {
    std::vector<RelationCertificate> certificates;  // VERIFIED, minimal support
    SearchSummary summary;
};

// Special points of f with |disc| <= delta_max as relation inputs: canonical
// occurrences only (a value reachable at a smaller discriminant is reported
// there and skipped here), with height/degree bounds read off the exact fiber
// polynomial and a re-evaluator through the CM preimage.
std::vector<DescribedValue> described_special_points(const ModularFunction& f,
                                                     long long delta_max,
                                                     const PrecisionCtx& ctx);

// Bounded dependence search over n-tuples of distinct special points of f,
// optionally against a generator list: detect -> verify -> minimal-subset
// filtering, emitting verified minimal certificates and a coverage summary.
SearchResult search_dependent_tuples(const ModularFunction& f, long n, long long delta_max,
                                     const std::vector<DescribedValue>& gamma,
                                     const SearchConfig& cfg, const PrecisionCtx& ctx);

}  // namespace moddep
