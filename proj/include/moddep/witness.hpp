#pragma once

#include <optional>
#include <string>
#include <vector>

#include "moddep/borcherds.hpp"
#include "moddep/modfunc.hpp"
#include "moddep/prec.hpp"
#include "moddep/quadforms.hpp"
#include "moddep/rat.hpp"

namespace moddep {

// Rational 2x2 matrix acting on H by Mobius transformation.
struct QMat2 {
    Rat a, b, c, d;

    Rat det() const { return a * d - b * c; }
    static QMat2 identity() { return {Rat(1), Rat(0), Rat(0), Rat(1)}; }
    static QMat2 from_text(const std::string& s);  // "a,b;c,d", rational entries
    std::string to_text() const;
};

// g = gamma * h as Mobius actions, with gamma integral of determinant 1 and
// h z = r z + s for 0 < r and 0 <= s < 1.  Deterministic: gamma comes from
// Euclidean row reduction of the primitive integer scaling of g.
struct NormalForm {
    Mat2 gamma;
    Rat r, s;
};
NormalForm normal_form(const QMat2& g);  // NotInGroup unless det(g) > 0

// A family of translates grouped by scaling factor: r_1 < ... < r_l, each
// group listing its offsets s_{i,1} < s_{i,2} < ... in [0,1).  The functionals
// r z + s are pairwise distinct exactly when the source cosets are; duplicate
// functionals are unrepresentable here and rejected at construction.
struct TranslateFamily {
    struct Group {
        Rat r;
        std::vector<Rat> s;
    };
    std::vector<Group> groups;

    size_t size() const;
    // NotPairwiseDistinct when two matrices induce the same functional.
    static TranslateFamily from_matrices(const std::vector<QMat2>& gs);
    // Structural invariants for hand-built families (strict orderings, ranges).
    void validate() const;
};

// The constructed point z with r_1 z + s_{1,1} equal to the highest divisor
// point; exact whenever that point is.
struct WitnessPoint {
    std::optional<QuadPoint> exact;
    CBall approx;
};

// Requires a nonempty divisor whose top point is alone at its height.
WitnessPoint construct_witness(const DivisorInFj& divisor, const TranslateFamily& fam,
                               const PrecisionCtx& ctx);

enum class WitnessVerdict { CERTIFIED, UNDECIDED };

// One composite r_i z + s_{i,k}: where it sits and why it does or does not
// meet the divisor, with a certified numeric margin for the exclusions.
struct CompositeReport {
    size_t i = 0, k = 0;  // 1-based group and offset indices
    Rat r, s;
    CBall point;
    bool on_divisor = false;
    std::string reason;
    double margin = 0;  // certified lower bound on |f| at the point
    std::vector<std::string> notes;
};

struct WitnessCertificate {
    WitnessPoint z;
    std::vector<CompositeReport> composites;
    WitnessVerdict verdict = WitnessVerdict::UNDECIDED;
    std::string offending;  // UNDECIDED: the composite that failed
};

WitnessCertificate certify_witness(const ModularFunction& f, const TranslateFamily& fam,
                                   const WitnessPoint& z, const PrecisionCtx& ctx);
WitnessCertificate certify_witness(const B0Element& e, const TranslateFamily& fam,
                                   const WitnessPoint& z, const PrecisionCtx& ctx);

}  // namespace moddep
