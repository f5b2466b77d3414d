#pragma once

#include <stdexcept>
#include <string>

namespace moddep {

// Every failure mode callers are expected to handle carries a stable code so the
// CLI and the certificate store can report it without string matching on what().
class error : public std::runtime_error {
public:
    error(std::string code, const std::string& msg)
        : std::runtime_error(code + ": " + msg), code_(std::move(code)) {}
    const std::string& code() const { return code_; }

private:
    std::string code_;
};

#define MODDEP_ERROR(Name)                                              \
    class Name : public error {                                         \
    public:                                                             \
        explicit Name(const std::string& msg) : error(#Name, msg) {}    \
    }

MODDEP_ERROR(NonIntegralExponent);
MODDEP_ERROR(NotAProductForm);
MODDEP_ERROR(InvalidDiscriminant);
MODDEP_ERROR(UndecidedBoundary);
MODDEP_ERROR(PrecisionExhausted);
MODDEP_ERROR(WindowTooSmall);
MODDEP_ERROR(NotInBasisIndexSet);
MODDEP_ERROR(SpanningFamilyInsufficient);
MODDEP_ERROR(NotConverged);
MODDEP_ERROR(InversionFailed);
MODDEP_ERROR(PoleAtSpecialPoint);
MODDEP_ERROR(NotPairwiseDistinct);
MODDEP_ERROR(NotInGroup);
MODDEP_ERROR(PreconditionViolated);
MODDEP_ERROR(ConstantFunction);
MODDEP_ERROR(ZeroInput);
MODDEP_ERROR(DomainError);
MODDEP_ERROR(LockHeld);
MODDEP_ERROR(ReplayMismatch);
MODDEP_ERROR(ParseError);

#undef MODDEP_ERROR

// Input validation (caller error) vs internal invariant (our bug).
#define MD_REQUIRE(cond, exc, msg)                  \
    do {                                            \
        if (!(cond)) throw ::moddep::exc(msg);      \
    } while (0)

#define MD_INVARIANT(cond, msg)                                                         \
    do {                                                                                \
        if (!(cond))                                                                    \
            throw std::logic_error(std::string(__FILE__) + ":" +                        \
                                   std::to_string(__LINE__) + ": invariant: " + (msg)); \
    } while (0)

}  // namespace moddep
