#include "moddep/rat.hpp"

#include <cctype>
#include <cstdlib>

namespace moddep {

namespace {

// Exact value of a decimal literal: mantissa * 10^(exp10 - fracdigits).
Rat decimal_to_rat(const std::string& s) {
    size_t i = 0;
    bool neg = false;
    if (i < s.size() && (s[i] == '+' || s[i] == '-')) neg = s[i++] == '-';
    Int mant = 0;
    long fracdigits = 0;
    bool seen_digit = false, seen_dot = false;
    for (; i < s.size(); ++i) {
        char c = s[i];
        if (std::isdigit((unsigned char)c)) {
            mant = mant * 10 + (c - '0');
            if (seen_dot) ++fracdigits;
            seen_digit = true;
        } else if (c == '.' && !seen_dot) {
            seen_dot = true;
        } else {
            break;
        }
    }
    MD_REQUIRE(seen_digit, ParseError, "not a number: '" + s + "'");
    long exp10 = 0;
    if (i < s.size() && (s[i] == 'e' || s[i] == 'E')) {
        ++i;
        MD_REQUIRE(i < s.size(), ParseError, "dangling exponent in '" + s + "'");
        char* end = nullptr;
        exp10 = std::strtol(s.c_str() + i, &end, 10);
        MD_REQUIRE(end && *end == '\0', ParseError, "bad exponent in '" + s + "'");
        i = s.size();
    }
    MD_REQUIRE(i == s.size(), ParseError, "trailing junk in '" + s + "'");
    long e = exp10 - fracdigits;
    Rat r(mant);
    if (e > 0)
        r *= Rat(pow_int(Int(10), (unsigned long)e));
    else if (e < 0)
        r /= Rat(pow_int(Int(10), (unsigned long)(-e)));
    r.canonicalize();
    return neg ? Rat(-r) : r;
}

}  // namespace

Rat parse_rat(const std::string& s) {
    MD_REQUIRE(!s.empty(), ParseError, "empty rational");
    auto slash = s.find('/');
    if (slash == std::string::npos) {
        if (s.find('.') != std::string::npos || s.find('e') != std::string::npos ||
            s.find('E') != std::string::npos)
            return decimal_to_rat(s);
        try {
            Rat r(s);
            r.canonicalize();
            return r;
        } catch (const std::invalid_argument&) {
            throw ParseError("not a rational: '" + s + "'");
        }
    }
    try {
        Rat r(s);
        MD_REQUIRE(r.get_den() != 0, ParseError, "zero denominator in '" + s + "'");
        r.canonicalize();
        return r;
    } catch (const std::invalid_argument&) {
        throw ParseError("not a rational: '" + s + "'");
    }
}

std::string format_rat(const Rat& x) { return x.get_str(); }

GaussRat parse_gauss(const std::string& raw) {
    std::string s;
    for (char c : raw)
        if (!std::isspace((unsigned char)c)) s.push_back(c);
    MD_REQUIRE(!s.empty(), ParseError, "empty coefficient");
    if (s.back() == 'i') {
        s.pop_back();
        // Split at the sign separating the two parts; skip a leading sign and
        // signs inside exponents ("1e-3").
        for (size_t i = s.size(); i-- > 1;) {
            if ((s[i] == '+' || s[i] == '-') && s[i - 1] != 'e' && s[i - 1] != 'E' &&
                s[i - 1] != '/') {
                Rat re = parse_rat(s.substr(0, i));
                std::string ims = s.substr(i);
                if (ims == "+") ims = "1";
                if (ims == "-") ims = "-1";
                if (ims[0] == '+') ims = ims.substr(1);
                return {re, parse_rat(ims)};
            }
        }
        if (s.empty()) return {Rat(0), Rat(1)};
        return {Rat(0), parse_rat(s)};  // pure imaginary
    }
    return {parse_rat(s), Rat(0)};
}

std::string format_gauss(const GaussRat& x) {
    if (x.im == 0) return format_rat(x.re);
    std::string im = format_rat(x.im);
    if (im[0] != '-') im = "+" + im;
    return format_rat(x.re) + im + "i";
}

}  // namespace moddep
